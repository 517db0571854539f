//! Algorithm 1: collect BV measurements of a single Boolean function and
//! solve for the candidate complete-differential sets `Z^0`, `Z^1`.
//!
//! Each measurement yields a vector `u` in the spectrum support; the
//! candidate sets are the exact solution sets of `{x . u = i | u in W}`.
//! Every true complete differential satisfies all these equations, so it
//! can never be lost (soundness is exact, not statistical); spurious
//! survivors die off at a rate controlled by the differential probabilities
//! of the function.

use crate::bits::BitWord;
use crate::cipher::BitTable;
use crate::gf2::{solve_affine, AffineSolutionSet, LinearSystem};
use crate::walsh::{BvSampler, WalshSpectrum};
use crate::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use rand_chacha::rand_core::RngCore;

#[derive(Debug, Clone)]
pub enum Alg1Outcome {
    Found { z0: AffineSolutionSet, z1: AffineSolutionSet },
    No,
}

/// Output of one Algorithm-1 run, with the sample multiset retained for
/// audit (duplicates carry no linear-algebra information but their counts
/// diagnose skewed spectra).
#[derive(Debug, Clone)]
pub struct Alg1Result {
    pub outcome: Alg1Outcome,
    pub samples_used: u64,
    /// Distinct sampled vectors, ascending.
    pub w: Vec<BitWord>,
    /// Multiplicity of each vector in `w`.
    pub multiplicities: Vec<u64>,
    /// Rank of the sampled system; `n - rank` is the dimension of `Z^0`.
    pub rank: u8,
}

impl Alg1Result {
    pub fn found(&self) -> Option<(&AffineSolutionSet, &AffineSolutionSet)> {
        match &self.outcome {
            Alg1Outcome::Found { z0, z1 } => Some((z0, z1)),
            Alg1Outcome::No => None,
        }
    }
}

/// Run Algorithm 1 against a prebuilt spectrum.
pub fn algorithm1(spectrum: &WalshSpectrum, q: u64, rng: &mut impl RngCore) -> Result<Alg1Result> {
    if q == 0 {
        return Err(Error::BadParam("sample budget q must be >= 1"));
    }
    let n = spectrum.n_bits();
    let sampler = BvSampler::new(spectrum)?;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..q {
        *counts.entry(sampler.sample(rng).bits()).or_insert(0) += 1;
    }
    let w: Vec<BitWord> = counts.keys().map(|&u| BitWord::of(u, n)).collect();
    let multiplicities: Vec<u64> = counts.values().copied().collect();
    let z0 = solve_affine(&LinearSystem::new(w.clone(), 0, n)?)?;
    let z1 = solve_affine(&LinearSystem::new(w.clone(), 1, n)?)?;
    let rank = n - z0.dim();
    let outcome = if z0.at_most_zero() && z1.at_most_zero() {
        Alg1Outcome::No
    } else {
        Alg1Outcome::Found { z0, z1 }
    };
    Ok(Alg1Result { outcome, samples_used: q, w, multiplicities, rank })
}

/// Convenience entry point from a truth table.
pub fn algorithm1_table(table: &BitTable, q: u64, rng: &mut impl RngCore) -> Result<Alg1Result> {
    algorithm1(&WalshSpectrum::from_table(table)?, q, rng)
}
