//! Algorithm 3: scan the split point `t1` and return a boomerang
//! distinguisher - one truncated differential for `Enc^{t1}` and one for
//! the inverse of the remaining `t2 = r - t1` rounds.
//!
//! The scan covers `t1 = 1..r-1` so both halves keep at least one round (a
//! zero-round half is vacuous), ascending, returning at the first split
//! where both searches succeed; smallest-t1 selection keeps concurrent
//! scans deterministic.

use crate::cipher::{Cipher, Direction};
use crate::trunc::{algorithm2, Alg2Options, Alg2Outcome, TruncatedDifferential};
use crate::walsh::SpectrumCache;
use crate::{Error, Result};
use alloc::vec::Vec;

/// A split-point distinguisher: forward differential `(a1, b1)` of
/// `Enc^{t1}` and backward differential `(a2, b2)` of `(Enc^{t2})^{-1}`
/// (its input difference `a2` lives on the ciphertext side).
#[derive(Debug, Clone)]
pub struct BoomerangDistinguisher {
    pub fwd: TruncatedDifferential,
    pub bwd: TruncatedDifferential,
    pub t1: u8,
    pub t2: u8,
    pub sigma: f64,
    pub tau: f64,
}

impl BoomerangDistinguisher {
    /// Predicted-bit count of the forward input-side difference, the `d`
    /// of the `2^-d` random baseline. The search emits concrete input
    /// differences, so this is `n` here, but the experiment code treats it
    /// generally.
    pub fn baseline_d(&self) -> u8 {
        crate::bits::TruncatedDifference::concrete(self.fwd.a).d()
    }
}

#[derive(Debug, Clone)]
pub enum Alg3Outcome {
    Found(BoomerangDistinguisher),
    No,
}

/// One scanned split and which halves succeeded there.
#[derive(Debug, Clone, Copy)]
pub struct SplitAttempt {
    pub t1: u8,
    pub t2: u8,
    pub fwd_found: bool,
    pub bwd_found: bool,
}

#[derive(Debug, Clone)]
pub struct Alg3Result {
    pub outcome: Alg3Outcome,
    pub attempts: Vec<SplitAttempt>,
}

impl Alg3Result {
    pub fn found(&self) -> Option<&BoomerangDistinguisher> {
        match &self.outcome {
            Alg3Outcome::Found(d) => Some(d),
            Alg3Outcome::No => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Alg3Options {
    pub alg2: Alg2Options,
    /// Restrict the scan to an inclusive `t1` window (experiment hook,
    /// recorded in reports when used); `None` scans `1..=r-1`.
    pub t1_range: Option<(u8, u8)>,
}

/// Scan the splits and return the first fully successful one.
pub fn algorithm3(
    cipher: &Cipher,
    sigma: f64,
    tau: f64,
    master_seed: u64,
    opts: &Alg3Options,
    cache: &mut SpectrumCache,
) -> Result<Alg3Result> {
    let r = cipher.rounds();
    if r < 2 {
        return Err(Error::BadParam("boomerang splits need at least two rounds"));
    }
    let (lo, hi) = opts.t1_range.unwrap_or((1, r - 1));
    if lo == 0 || hi >= r || lo > hi {
        return Err(Error::BadParam("t1 range must satisfy 1 <= lo <= hi <= r-1"));
    }
    let mut attempts = Vec::new();
    for t1 in lo..=hi {
        let t2 = r - t1;
        let fwd = algorithm2(cipher, t1, Direction::Forward, sigma, tau, master_seed, &opts.alg2, cache)?;
        let bwd = algorithm2(cipher, t2, Direction::Inverse, sigma, tau, master_seed, &opts.alg2, cache)?;
        let attempt = SplitAttempt {
            t1,
            t2,
            fwd_found: fwd.found().is_some(),
            bwd_found: bwd.found().is_some(),
        };
        attempts.push(attempt);
        if let (Alg2Outcome::Found(f), Alg2Outcome::Found(b)) = (fwd.outcome, bwd.outcome) {
            let dist = BoomerangDistinguisher { fwd: f, bwd: b, t1, t2, sigma, tau };
            return Ok(Alg3Result { outcome: Alg3Outcome::Found(dist), attempts });
        }
    }
    Ok(Alg3Result { outcome: Alg3Outcome::No, attempts })
}

/// The paper's quadruple accounting: a generated quadruple is right with
/// probability `(p1 p2)^2` on the cipher versus `2^-d` on a random
/// permutation; the pair distinguishes when the former exceeds the latter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrupleProbability {
    pub right_rate: f64,
    pub random_baseline: f64,
    pub distinguishable: bool,
}

pub fn quadruple_probability(p1: f64, p2: f64, d: u8) -> Result<QuadrupleProbability> {
    if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
        return Err(Error::BadParam("probabilities must lie in [0, 1]"));
    }
    let right_rate = (p1 * p2) * (p1 * p2);
    let random_baseline = 1.0 / (1u64 << d) as f64;
    Ok(QuadrupleProbability { right_rate, random_baseline, distinguishable: right_rate > random_baseline })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitWord;
    use crate::cipher::identity_round_cipher;
    use crate::oracle::key_fraction_above;

    #[test]
    fn quadruple_probability_examples() {
        let q = quadruple_probability(1.0, 1.0, 8).unwrap();
        assert_eq!(q.right_rate, 1.0);
        assert_eq!(q.random_baseline, 1.0 / 256.0);
        assert!(q.distinguishable);

        let q = quadruple_probability(0.5, 0.5, 2).unwrap();
        assert!((q.right_rate - 0.0625).abs() < 1e-15);
        assert_eq!(q.random_baseline, 0.25);
        assert!(!q.distinguishable);

        let q = quadruple_probability(0.9, 0.9, 4).unwrap();
        assert!((q.right_rate - 0.9f64.powi(4)).abs() < 1e-12);
        assert!(q.distinguishable);

        assert!(quadruple_probability(1.2, 0.5, 4).is_err());
    }

    #[test]
    fn identity_variant_two_rounds_splits_immediately() {
        // Pure key-XOR rounds: t1 = 1 works and both halves are images of
        // the (identity) linear layer.
        let cipher = identity_round_cipher(2);
        let mut cache = SpectrumCache::new();
        let opts = Alg3Options {
            alg2: Alg2Options { q_override: Some(1024), ..Default::default() },
            ..Default::default()
        };
        let res = algorithm3(&cipher, 0.75, 2.0, 3, &opts, &mut cache).unwrap();
        let dist = res.found().expect("probability-1 halves at every split");
        assert_eq!((dist.t1, dist.t2), (1, 1));
        assert!(dist.fwd.b.matches(dist.fwd.a));
        assert!(dist.bwd.b.matches(dist.bwd.a));
        assert_eq!(res.attempts.len(), 1);
    }

    #[test]
    fn planted_scan_returns_first_feasible_split() {
        // With every round weakened, partial-zero differentials survive
        // even the asymmetric splits, so the ascending scan stops at t1=1.
        // Both halves must still be genuinely high-probability (oracle).
        let cipher = Cipher::planted(4, 4);
        let mut cache = SpectrumCache::new();
        let opts = Alg3Options {
            alg2: Alg2Options { q_override: Some(8192), ..Default::default() },
            ..Default::default()
        };
        let res = algorithm3(&cipher, 0.9, 4.0, 11, &opts, &mut cache).unwrap();
        let dist = res.found().expect("weakened rounds leave plenty of structure");
        assert_eq!(dist.t1 + dist.t2, 4);
        assert_eq!(dist.t1, 1);
        let f_frac = key_fraction_above(&cipher, dist.t1, dist.fwd.a, &dist.fwd.b, 0.9).unwrap();
        assert!(f_frac.gt(0.75));
        // Backward half: verify against the inverse map directly.
        let mut ok_keys = 0u32;
        for kv in 0..256u64 {
            let k = BitWord::of(kv, 8);
            let mut hits = 0u32;
            for yv in 0..256u64 {
                let y = BitWord::of(yv, 8);
                let m0 = cipher.decrypt_suffix(y, k, dist.t1).unwrap();
                let m1 = cipher.decrypt_suffix(y.xor(dist.bwd.a).unwrap(), k, dist.t1).unwrap();
                hits += dist.bwd.b.matches(m0.xor(m1).unwrap()) as u32;
            }
            ok_keys += (hits as f64 > 0.9 * 256.0) as u32;
        }
        assert!(ok_keys as f64 / 256.0 > 0.75);
    }

    #[test]
    fn planted_symmetric_split_carries_concrete_halves() {
        // Restricting the scan to t1 = 2 with max-d selection recovers the
        // planted symmetric distinguisher with fully predicted outputs.
        let cipher = Cipher::planted(4, 4);
        let mut cache = SpectrumCache::new();
        let opts = Alg3Options {
            alg2: Alg2Options { q_override: Some(8192), prefer_max_d: true, ..Default::default() },
            t1_range: Some((2, 2)),
        };
        let res = algorithm3(&cipher, 0.9, 4.0, 19, &opts, &mut cache).unwrap();
        let dist = res.found().unwrap();
        assert_eq!((dist.t1, dist.t2), (2, 2));
        assert_eq!(dist.fwd.d, 8);
        assert_eq!(dist.bwd.d, 8);
        assert!([0x10, 0x20, 0x30].contains(&dist.fwd.a.bits()));
        assert!([0x01, 0x02, 0x03].contains(&dist.bwd.a.bits()));
        assert_eq!(dist.fwd.b.value_bits(), dist.fwd.a.rotl(4));
        assert_eq!(dist.bwd.b.value_bits(), dist.bwd.a.rotl(4));
        assert_eq!(dist.baseline_d(), 8);
    }

    #[test]
    fn full_strength_toy8_has_no_split() {
        let cipher = Cipher::toy8(4);
        let mut cache = SpectrumCache::new();
        let opts = Alg3Options {
            alg2: Alg2Options { q_override: Some(1 << 15), ..Default::default() },
            ..Default::default()
        };
        let res = algorithm3(&cipher, 0.99, 4.0, 23, &opts, &mut cache).unwrap();
        assert!(res.found().is_none());
        assert_eq!(res.attempts.len(), 3);
        // Every split dies on at least one side.
        for a in &res.attempts {
            assert!(!(a.fwd_found && a.bwd_found));
        }
    }

    #[test]
    fn t1_range_is_validated() {
        let cipher = Cipher::planted(4, 4);
        let mut cache = SpectrumCache::new();
        let mut opts = Alg3Options::default();
        opts.t1_range = Some((0, 2));
        assert!(algorithm3(&cipher, 0.9, 4.0, 0, &opts, &mut cache).is_err());
        opts.t1_range = Some((2, 4));
        assert!(algorithm3(&cipher, 0.9, 4.0, 0, &opts, &mut cache).is_err());
        let one_round = Cipher::toy8(1);
        assert!(algorithm3(&one_round, 0.9, 4.0, 0, &Alg3Options::default(), &mut cache).is_err());
    }
}
