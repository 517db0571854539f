//! Seeded, splittable randomness.
//!
//! Everything random in this crate flows from one master seed through
//! ChaCha12 streams. A stream is addressed by a coarse domain plus two
//! lane indices, so per-component sampling, per-trial experiments and
//! per-key profiles all get independent, reproducible generators that can
//! run in parallel without sharing state.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Recorded in every report so runs can name their generator exactly.
pub const RNG_IDENTITY: &str = "chacha12/stream64";

/// Coarse separation of the independent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Alg1Sampling = 1,
    Alg2Sampling = 2,
    Alg2Choice = 3,
    Alg3 = 4,
    RecoveryTrial = 5,
    QuadrupleTrial = 6,
    RandomPerm = 7,
    KeyGen = 8,
    Concretize = 9,
}

/// Derive the stream for `(domain, a, b)` from the master seed.
pub fn stream(master_seed: u64, domain: Domain, a: u16, b: u32) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(((domain as u64) << 48) | ((a as u64) << 32) | b as u64);
    rng
}

/// Uniform draw from `[0, bound)` by rejection from 64-bit words.
pub fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    if bound.is_power_of_two() {
        return rng.next_u64() & (bound - 1);
    }
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % bound;
        }
    }
}

/// Exact `2N`-bit uniform integer (`2N <= 64`), for spectrum sampling.
pub fn uniform_pow2(rng: &mut impl RngCore, bits: u32) -> u64 {
    debug_assert!(bits >= 1 && bits <= 64);
    if bits == 64 {
        rng.next_u64()
    } else {
        rng.next_u64() >> (64 - bits)
    }
}
