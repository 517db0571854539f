//! Desk-scale search for truncated differentials and boomerang distinguishers
//! of toy block ciphers, driven by exact Walsh-spectrum sampling.
//!
//! The crate reproduces, entirely classically, the output distribution of the
//! Bernstein-Vazirani circuit on a Boolean component function: measuring the
//! final state yields `u` with probability `S_f(u)^2`, which we sample
//! bit-exactly from the integer Walsh spectrum. On top of that sampler sit
//! the three search algorithms (single-function differential sets, truncated
//! differentials of `Enc^t`, boomerang distinguishers of `Enc^r`), brute-force
//! oracles that recompute every probability exhaustively at desk scale, and
//! the counting-scheme key-recovery / quadruple-distinguishing experiments.
//!
//! The crate is `no_std`-compatible (`alloc` required); IO, file formats and
//! the CLI live in the companion `bvdiff` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod attack;
pub mod bits;
pub mod boom;
pub mod bv;
pub mod cipher;
mod error;
pub mod gf2;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod trunc;
pub mod walsh;

pub use error::{Error, Result};

/// Hard ceiling on `n + m` for truth tables and spectra (`2^28` entries).
pub const MAX_TABLE_BITS: u8 = 28;

/// Hard ceiling on exhaustive per-key / per-input oracle scans.
pub const MAX_ORACLE_BITS: u8 = 20;
