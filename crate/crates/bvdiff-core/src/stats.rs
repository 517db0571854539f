//! Statistical test helpers used by the experiments and their validations:
//! chi-square goodness of fit, normal tails, two-proportion z-tests and
//! (Poisson-)binomial tail probabilities.
//!
//! Everything is plain `f64` on top of `libm`, so the module works without
//! `std`. Accuracy targets are test-harness grade (~1e-10 relative), checked
//! against known reference values.

use crate::{Error, Result};
use alloc::vec;
use libm::{exp, fabs, log, sqrt};

const EPS: f64 = 1e-14;
const MAX_ITER: usize = 500;

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if fabs(term) < fabs(sum) * EPS {
            break;
        }
    }
    sum * exp(-x + a * log(x) - libm::lgamma(a))
}

fn gamma_q_cf(a: f64, x: f64) -> f64 {
    // Modified Lentz continued fraction.
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if fabs(d) < tiny {
            d = tiny;
        }
        c = b + an / c;
        if fabs(c) < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if fabs(delta - 1.0) < EPS {
            break;
        }
    }
    h * exp(-x + a * log(x) - libm::lgamma(a))
}

/// Survival function of the chi-square distribution with `df` degrees of
/// freedom: `Pr[X >= stat]`.
pub fn chi_square_sf(stat: f64, df: f64) -> f64 {
    gamma_q(df / 2.0, stat / 2.0)
}

/// Pearson chi-square goodness-of-fit test of observed counts against cell
/// probabilities. Returns `(statistic, p_value)` with `len - 1` degrees of
/// freedom.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<(f64, f64)> {
    if counts.len() != probs.len() || counts.len() < 2 {
        return Err(Error::BadParam("need matching counts/probs with at least two cells"));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::BadParam("no observations"));
    }
    let mut stat = 0.0;
    for (&obs, &p) in counts.iter().zip(probs) {
        if p <= 0.0 {
            return Err(Error::BadParam("cell probability must be positive"));
        }
        let expected = total as f64 * p;
        let diff = obs as f64 - expected;
        stat += diff * diff / expected;
    }
    let df = (counts.len() - 1) as f64;
    Ok((stat, chi_square_sf(stat, df)))
}

/// Upper tail of the standard normal distribution.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

/// Result of a two-proportion z-test.
#[derive(Debug, Clone, Copy)]
pub struct TwoProportion {
    pub z: f64,
    /// Two-sided p-value.
    pub p_value: f64,
}

/// Pooled two-proportion z-test for `x1/n1` vs `x2/n2`.
pub fn two_proportion_z(x1: u64, n1: u64, x2: u64, n2: u64) -> Result<TwoProportion> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::BadParam("empty sample in z-test"));
    }
    let p1 = x1 as f64 / n1 as f64;
    let p2 = x2 as f64 / n2 as f64;
    let pooled = (x1 + x2) as f64 / (n1 + n2) as f64;
    let var = pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64);
    if var == 0.0 {
        // Identical degenerate samples: no evidence of a difference.
        return Ok(TwoProportion { z: 0.0, p_value: 1.0 });
    }
    let z = (p1 - p2) / sqrt(var);
    Ok(TwoProportion { z, p_value: 2.0 * normal_sf(fabs(z)) })
}

/// Exact binomial upper tail `Pr[X >= k]` for `X ~ Bin(n, p)`.
pub fn binomial_tail_geq(n: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    // Stable forward recurrence over the pmf.
    let mut pmf = exp(n as f64 * log(1.0 - p));
    let mut tail = if k == 0 { pmf } else { 0.0 };
    let ratio = p / (1.0 - p);
    for i in 0..n {
        pmf *= (n - i) as f64 / (i + 1) as f64 * ratio;
        if i + 1 >= k {
            tail += pmf;
        }
    }
    tail.min(1.0)
}

/// Upper tail `Pr[X >= k]` for a Poisson-binomial sum of independent
/// indicators with the given success probabilities (O(n^2) convolution).
pub fn poisson_binomial_tail_geq(ps: &[f64], k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > ps.len() {
        return 0.0;
    }
    let mut dist = vec![0.0f64; ps.len() + 1];
    dist[0] = 1.0;
    for (i, &p) in ps.iter().enumerate() {
        for c in (0..=i + 1).rev() {
            let stay = dist[c] * (1.0 - p);
            let up = if c > 0 { dist[c - 1] * p } else { 0.0 };
            dist[c] = stay + up;
        }
    }
    dist[k..].iter().sum::<f64>().min(1.0)
}
