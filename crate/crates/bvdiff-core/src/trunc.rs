//! Algorithm 2: find a truncated differential `(a, b)` of `Enc^t` whose
//! probability exceeds `sigma` for most keys, by BV-sampling every
//! component function over the joint `(x || k)` input.
//!
//! Per component `j` the sampler draws `q(n)` vectors, keeps only their
//! first `n` bits and solves `{x . u = i}` for both right-hand sides,
//! giving `Z_j^0`, `Z_j^1` (their union is `Z_j`, kept as the pair since a
//! union of cosets is not affine). The candidate scan then looks for a
//! nonzero `a` lying in as many `Z_j` as possible: for each candidate the
//! set `J(a) = {j : a in Z_j}` is computed directly, which agrees exactly
//! with the paper-style search over d-subsets with nontrivial intersection
//! but avoids enumerating the subsets.

use crate::bits::{BitWord, TruncatedDifference};
use crate::cipher::{Cipher, Direction};
use crate::gf2::{solve_affine, AffineSolutionSet, LinearSystem};
use crate::rng::{stream, uniform_below, Domain};
use crate::walsh::{BvSampler, SpectrumCache};
use crate::{Error, Result};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

/// The BV sample budget `q(n) = ceil(tau^2 n^3 / (2 (1 - sigma)^2))`.
///
/// Computed in floating point with a relative snap of 1e-9 before the
/// ceiling so that analytically integral values (e.g. 65536 at n=8,
/// sigma=0.75, tau=4) do not round up through representation noise.
pub fn sample_budget(n: u8, sigma: f64, tau: f64) -> Result<u64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::BadParam("sigma must lie strictly inside (0, 1)"));
    }
    if tau < 1.0 {
        return Err(Error::BadParam("tau must be >= 1"));
    }
    if n == 0 {
        return Err(Error::BadParam("n must be positive"));
    }
    let n3 = (n as f64) * (n as f64) * (n as f64);
    let v = tau * tau * n3 / (2.0 * (1.0 - sigma) * (1.0 - sigma));
    let nearest = libm::round(v);
    let snapped = if libm::fabs(v - nearest) <= 1e-9 * libm::fmax(1.0, libm::fabs(v)) {
        nearest
    } else {
        libm::ceil(v)
    };
    Ok(snapped as u64)
}

/// Signal-to-noise inputs of the counting scheme.
#[derive(Debug, Clone, Copy)]
pub struct SnParams {
    /// Candidate subkey count L.
    pub l: u64,
    /// Differential probability p.
    pub p: f64,
    /// Average count per pair, `L / 2^d` when counting over all matching
    /// output differences.
    pub alpha: f64,
    /// Undiscarded fraction; fixed at 1 (no pre-discarding).
    pub lambda: f64,
}

impl SnParams {
    /// Parameters of a d-bit truncated differential with probability `p`.
    pub fn for_truncated(l: u64, p: f64, d: u8) -> Self {
        Self { l, p, alpha: l as f64 / (1u64 << d) as f64, lambda: 1.0 }
    }
}

/// `S/N = L p / (alpha lambda)`.
pub fn signal_to_noise(params: &SnParams) -> Result<f64> {
    if params.l == 0 {
        return Err(Error::BadParam("at least one candidate subkey required"));
    }
    if !(0.0..=1.0).contains(&params.p) {
        return Err(Error::BadParam("p must be a probability"));
    }
    let denom = params.alpha * params.lambda;
    if denom == 0.0 {
        return Err(Error::BadParam("alpha * lambda must be nonzero"));
    }
    Ok(params.l as f64 * params.p / denom)
}

/// The emission gate `S/N = 2^d sigma > 1`.
pub fn sn_gate(d: u8, sigma: f64) -> bool {
    (1u64 << d) as f64 * sigma > 1.0
}

/// A truncated differential as emitted by the search: concrete nonzero
/// input difference `a`, trit-vector output `b` with `d` predicted bits.
#[derive(Debug, Clone)]
pub struct TruncatedDifferential {
    pub a: BitWord,
    pub b: TruncatedDifference,
    pub d: u8,
    pub sigma: f64,
    pub tau: f64,
    pub q_used: u64,
    pub cipher: String,
    pub t: u8,
    pub direction: Direction,
}

/// Per-component solve diagnostics (kept in full: the sets are tiny once
/// `q(n)` samples have constrained them).
#[derive(Debug, Clone)]
pub struct ComponentSets {
    pub j: u8,
    pub z0: AffineSolutionSet,
    pub z1: AffineSolutionSet,
    /// All sampled x-parts were zero: `Z_j` predicts nothing and the
    /// component is left out of subscript selection.
    pub excluded: bool,
    /// Rank of the sampled system.
    pub rank: u8,
}

#[derive(Debug, Clone)]
pub enum Alg2Outcome {
    Found(TruncatedDifferential),
    No,
}

#[derive(Debug, Clone)]
pub struct Alg2Result {
    pub outcome: Alg2Outcome,
    pub components: Vec<ComponentSets>,
    pub q: u64,
    /// Largest number of components any nonzero candidate lies in.
    pub max_common: u8,
    pub prefer_max_d: bool,
}

impl Alg2Result {
    pub fn found(&self) -> Option<&TruncatedDifferential> {
        match &self.outcome {
            Alg2Outcome::Found(td) => Some(td),
            Alg2Outcome::No => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Alg2Options {
    /// Replace the formula budget `q(n)`; recorded by callers when used.
    pub q_override: Option<u64>,
    /// Scan d descending (strongest differential) instead of the default
    /// ascending scan that returns at the first feasible d.
    pub prefer_max_d: bool,
    /// Cap for solution-set enumeration during the candidate scan.
    pub enumeration_cap: u64,
}

impl Default for Alg2Options {
    fn default() -> Self {
        Self { q_override: None, prefer_max_d: false, enumeration_cap: 1 << 16 }
    }
}

/// Run the truncated-differential search on `Enc^t` (forward) or on the
/// inverse of the last `t` rounds (inverse direction).
///
/// Deterministic given `master_seed`: component `j` samples from its own
/// derived stream, so per-component work can be distributed without
/// changing results.
pub fn algorithm2(
    cipher: &Cipher,
    t: u8,
    direction: Direction,
    sigma: f64,
    tau: f64,
    master_seed: u64,
    opts: &Alg2Options,
    cache: &mut SpectrumCache,
) -> Result<Alg2Result> {
    let n = cipher.block_bits();
    let q = match opts.q_override {
        Some(q) if q >= 1 => q,
        Some(_) => return Err(Error::BadParam("q override must be >= 1")),
        None => sample_budget(n, sigma, tau)?,
    };
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::BadParam("sigma must lie strictly inside (0, 1)"));
    }
    let dir_tag = ((t as u32) << 1) | matches!(direction, Direction::Inverse) as u32;

    // Steps 3..12: per-component sampling and solving.
    let mut components = Vec::with_capacity(n as usize);
    for j in 1..=n {
        let spectrum = cache.spectrum(cipher, t, j, direction)?;
        let sampler = BvSampler::new(spectrum)?;
        let mut rng = stream(master_seed, Domain::Alg2Sampling, j as u16, dir_tag);
        let mut rows: BTreeSet<u64> = BTreeSet::new();
        for _ in 0..q {
            let u = sampler.sample(&mut rng);
            rows.insert(u.high(n).bits());
        }
        let excluded = rows.iter().all(|&r| r == 0);
        let rows: Vec<BitWord> = rows.into_iter().map(|r| BitWord::of(r, n)).collect();
        let z0 = solve_affine(&LinearSystem::new(rows.clone(), 0, n)?)?;
        let z1 = solve_affine(&LinearSystem::new(rows, 1, n)?)?;
        let rank = n - z0.dim();
        components.push(ComponentSets { j, z0, z1, excluded, rank });
    }

    // Candidate scan: J(a) and the appended bit i_j for every nonzero a
    // seen in any solution set.
    let candidates = common_candidates(&components, opts.enumeration_cap)?;
    let max_common = candidates.values().map(|js| js.len() as u8).max().unwrap_or(0);

    let ds: Vec<u8> = if opts.prefer_max_d { (1..=n).rev().collect() } else { (1..=n).collect() };
    for d in ds {
        if !sn_gate(d, sigma) {
            continue;
        }
        if max_common < d {
            continue;
        }
        // Choose uniformly among the candidates lying in the most sets.
        let best: Vec<(&u64, &Vec<(u8, u8)>)> =
            candidates.iter().filter(|(_, js)| js.len() as u8 == max_common).collect();
        let mut choice_rng = stream(master_seed, Domain::Alg2Choice, 0, dir_tag);
        let pick = uniform_below(&mut choice_rng, best.len() as u64) as usize;
        let (&a_bits, js) = best[pick];
        let a = BitWord::of(a_bits, n);
        // Predicted subscripts: the d lowest component indices of J(a).
        let preds: Vec<(u8, u8)> = js.iter().take(d as usize).copied().collect();
        let b = TruncatedDifference::from_predictions(n, &preds)?;
        debug_assert_eq!(b.d(), d);
        let td = TruncatedDifferential {
            a,
            b,
            d,
            sigma,
            tau,
            q_used: q,
            cipher: String::from(cipher.name()),
            t,
            direction,
        };
        return Ok(Alg2Result { outcome: Alg2Outcome::Found(td), components, q, max_common, prefer_max_d: opts.prefer_max_d });
    }
    Ok(Alg2Result { outcome: Alg2Outcome::No, components, q, max_common, prefer_max_d: opts.prefer_max_d })
}

/// For every nonzero candidate `a` in any enumerated `Z_j`, the ascending
/// list of `(j, i_j)` over non-excluded components with `a in Z_j^{i_j}`.
fn common_candidates(
    components: &[ComponentSets],
    cap: u64,
) -> Result<BTreeMap<u64, Vec<(u8, u8)>>> {
    let mut pool: BTreeSet<u64> = BTreeSet::new();
    for c in components {
        if c.excluded {
            continue;
        }
        for set in [&c.z0, &c.z1] {
            let (members, _truncated) = set.enumerate(cap)?;
            pool.extend(members.iter().filter(|m| !m.is_zero()).map(|m| m.bits()));
        }
    }
    let mut out: BTreeMap<u64, Vec<(u8, u8)>> = BTreeMap::new();
    for &a_bits in &pool {
        let mut js = Vec::new();
        for c in components {
            if c.excluded {
                continue;
            }
            let a = BitWord::of(a_bits, c.z0.unknowns());
            if c.z0.member(a)? {
                js.push((c.j, 0));
            } else if c.z1.member(a)? {
                js.push((c.j, 1));
            }
        }
        if !js.is_empty() {
            out.insert(a_bits, js);
        }
    }
    Ok(out)
}
