//! Brute-force ground truth.
//!
//! Every probability the search algorithms are supposed to find is
//! recomputed here exhaustively at desk scale: differential and truncated
//! differential probabilities per key, per-key profiles and key fractions,
//! complete-differential sets and the gamma parameter of Boolean functions,
//! plus the closed-form gate/qubit complexity report. Values are returned
//! as exact rationals so tests never compare floats.

use crate::bits::{BitWord, TruncatedDifference};
use crate::cipher::{BitTable, Cipher};
use crate::trunc::sample_budget;
use crate::walsh::fwht_i64;
use crate::{Error, Result, MAX_ORACLE_BITS};
use alloc::vec::Vec;
use rand_chacha::rand_core::RngCore;

/// An exact probability `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        debug_assert!(den > 0 && num <= den);
        Self { num, den }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Exact comparison against a float threshold.
    pub fn gt(&self, threshold: f64) -> bool {
        self.num as f64 > threshold * self.den as f64
    }
}

fn guard_bits(bits: u8, what: &'static str) -> Result<()> {
    if bits > MAX_ORACLE_BITS {
        return Err(Error::ResourceGuard { bits, limit: MAX_ORACLE_BITS, what });
    }
    Ok(())
}

/// Encryption table of `Enc_k^t` over all plaintexts, the inner loop of
/// every exhaustive cipher oracle.
fn enc_table(cipher: &Cipher, t: u8, k: BitWord) -> Result<Vec<u64>> {
    let n = cipher.block_bits();
    guard_bits(n, "exhaustive plaintext scan")?;
    let mut out = Vec::with_capacity(1 << n);
    for x in BitWord::all(n) {
        out.push(cipher.encrypt_reduced(x, k, t)?.bits());
    }
    Ok(out)
}

/// Exact probability of the differential `dx -> dy` for `Enc_k^t`, counted
/// over all `2^n` plaintexts.
pub fn differential_probability(
    cipher: &Cipher,
    t: u8,
    k: BitWord,
    dx: BitWord,
    dy: BitWord,
) -> Result<Rational> {
    let n = cipher.block_bits();
    if dx.width() != n || dy.width() != n {
        return Err(Error::WidthMismatch { left: dx.width(), right: n });
    }
    let table = enc_table(cipher, t, k)?;
    let dxb = dx.bits() as usize;
    let dyb = dy.bits();
    let count = (0..table.len()).filter(|&x| table[x] ^ table[x ^ dxb] == dyb).count() as u64;
    Ok(Rational::new(count, table.len() as u64))
}

/// Exact truncated differential probability `Z(k)`: the fraction of `x`
/// with `Enc_k^t(x + a) + Enc_k^t(x) ~ b`.
pub fn truncated_probability(
    cipher: &Cipher,
    t: u8,
    k: BitWord,
    a: BitWord,
    b: &TruncatedDifference,
) -> Result<Rational> {
    let n = cipher.block_bits();
    if a.width() != n || b.width() != n {
        return Err(Error::WidthMismatch { left: a.width(), right: n });
    }
    if a.is_zero() {
        return Err(Error::BadParam("truncated differential requires a nonzero input difference"));
    }
    let table = enc_table(cipher, t, k)?;
    let ab = a.bits() as usize;
    let count = (0..table.len())
        .filter(|&x| b.matches(BitWord::of(table[x] ^ table[x ^ ab], n)))
        .count() as u64;
    Ok(Rational::new(count, table.len() as u64))
}

/// Monte-Carlo estimate of `Z(k)` from `samples` random plaintexts, for
/// instances past the exhaustive guard. Clearly labeled: returns the raw
/// hit count over the sample count, never an exact rational.
pub fn truncated_probability_sampled(
    cipher: &Cipher,
    t: u8,
    k: BitWord,
    a: BitWord,
    b: &TruncatedDifference,
    samples: u32,
    rng: &mut impl RngCore,
) -> Result<Rational> {
    let n = cipher.block_bits();
    if a.is_zero() {
        return Err(Error::BadParam("truncated differential requires a nonzero input difference"));
    }
    let mut hits = 0u64;
    for _ in 0..samples {
        let x = BitWord::of(crate::rng::uniform_pow2(rng, n as u32), n);
        let y0 = cipher.encrypt_reduced(x, k, t)?;
        let y1 = cipher.encrypt_reduced(x.xor(a)?, k, t)?;
        hits += b.matches(y0.xor(y1)?) as u64;
    }
    Ok(Rational::new(hits, samples as u64))
}

/// Per-key profile of one truncated differential: `Z(k)` for every key.
#[derive(Debug, Clone)]
pub struct KeyProfile {
    pub cipher: alloc::string::String,
    pub t: u8,
    pub a: BitWord,
    pub b: TruncatedDifference,
    /// `z[k]` is `Z(k)`, indexed by the key's integer value.
    pub z: Vec<Rational>,
}

impl KeyProfile {
    /// Exact fraction of keys with `Z(k) > sigma`.
    pub fn fraction_above(&self, sigma: f64) -> Rational {
        let above = self.z.iter().filter(|z| z.gt(sigma)).count() as u64;
        Rational::new(above, self.z.len() as u64)
    }
}

/// Compute `Z(k)` exhaustively for every key in `F_2^m`.
pub fn key_profile(cipher: &Cipher, t: u8, a: BitWord, b: &TruncatedDifference) -> Result<KeyProfile> {
    let m = cipher.key_bits();
    guard_bits(m, "exhaustive key scan")?;
    let mut z = Vec::with_capacity(1 << m);
    for k in BitWord::all(m) {
        z.push(truncated_probability(cipher, t, k, a, b)?);
    }
    Ok(KeyProfile { cipher: alloc::string::String::from(cipher.name()), t, a, b: *b, z })
}

/// Exact fraction of keys whose `Z(k)` exceeds `sigma`.
pub fn key_fraction_above(
    cipher: &Cipher,
    t: u8,
    a: BitWord,
    b: &TruncatedDifference,
    sigma: f64,
) -> Result<Rational> {
    Ok(key_profile(cipher, t, a, b)?.fraction_above(sigma))
}

/// For every input difference `dx`, the exact count of `x` with
/// `f(x + dx) = f(x)`, computed in `O(N 2^N)` through the spectrum
/// (`sum_u s_hat(u)^2 (-1)^(u.dx) = 2^N * sum_x (-1)^(f(x)+f(x+dx))`).
pub fn agreement_counts(table: &BitTable) -> Vec<u64> {
    let len = table.len();
    let mut work: Vec<i64> = (0..len).map(|x| 1 - 2 * table.get(x) as i64).collect();
    fwht_i64(&mut work);
    for v in work.iter_mut() {
        *v *= *v;
    }
    fwht_i64(&mut work);
    work.iter()
        .map(|&v| {
            let corr = v / len as i64; // sum_x (-1)^(f(x)+f(x+dx))
            ((len as i64 + corr) / 2) as u64
        })
        .collect()
}

/// Exact probability of `(dx, i)` as a differential of the Boolean
/// function `f`.
pub fn bool_differential_probability(table: &BitTable, dx: BitWord, i: u8) -> Result<Rational> {
    if dx.width() != table.n_bits() {
        return Err(Error::WidthMismatch { left: dx.width(), right: table.n_bits() });
    }
    let counts = agreement_counts(table);
    let c0 = counts[dx.bits() as usize];
    let len = table.len() as u64;
    Ok(Rational::new(if i == 0 { c0 } else { len - c0 }, len))
}

/// The complete-differential sets `(D_f^0, D_f^1)`: input differences whose
/// output difference is 0 (resp. 1) for *every* input.
pub fn complete_differentials(table: &BitTable) -> (Vec<BitWord>, Vec<BitWord>) {
    let counts = agreement_counts(table);
    let len = table.len() as u64;
    let w = table.n_bits();
    let mut d0 = Vec::new();
    let mut d1 = Vec::new();
    for (dx, &c) in counts.iter().enumerate() {
        if c == len {
            d0.push(BitWord::of(dx as u64, w));
        } else if c == 0 {
            d1.push(BitWord::of(dx as u64, w));
        }
    }
    (d0, d1)
}

/// The maximum differential probability among non-complete differentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// Every input difference is a complete differential (affine `f`);
    /// gamma is undefined.
    AllComplete,
    Value(Rational),
}

/// `gamma_f`: max over `dx` outside `D_f` and `i in {0,1}` of the
/// differential probability. Strictly below 1 whenever defined.
pub fn gamma(table: &BitTable) -> Gamma {
    let counts = agreement_counts(table);
    let len = table.len() as u64;
    let mut best = 0u64;
    let mut found = false;
    for &c in &counts {
        if c == len || c == 0 {
            continue; // complete differential
        }
        found = true;
        best = best.max(c).max(len - c);
    }
    if !found {
        return Gamma::AllComplete;
    }
    debug_assert!(best < len);
    Gamma::Value(Rational::new(best, len))
}

/// The closed-form resource counts: BV gates per call, total gates for the
/// two search algorithms, the classical solve cost and the qubit count.
/// `enc_gates` is the caller-supplied universal-gate count of the cipher
/// circuit (circuit synthesis is out of scope).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityReport {
    pub n: u8,
    pub m: u8,
    pub r: u8,
    pub enc_gates: u64,
    /// BV sample budget `ceil(tau^2 n^3 / (2 (1-sigma)^2))`.
    pub q: u64,
    /// Universal gates of one BV call on a component: `2(n+m) + 1 + enc_gates`.
    pub bv_call_gates: u64,
    /// Gates of the truncated-differential search:
    /// `q * (2n^2 + (2m+1)n + enc_gates)`.
    pub alg2_gates: u128,
    /// Gates of the boomerang search over all splits:
    /// `r * q * (4n^2 + (4m+2)n + enc_gates)`.
    pub alg3_gates: u128,
    /// Classical cost of solving the `2n` linear systems: `2 q n^3`.
    pub classical_ops: u128,
    /// `n + m + 1` (the BV register plus one ancilla, reused sequentially).
    pub qubits: u32,
}

pub fn complexity_report(
    n: u8,
    m: u8,
    sigma: f64,
    tau: f64,
    r: u8,
    enc_gates: u64,
) -> Result<ComplexityReport> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::BadParam("sigma must lie strictly inside (0, 1)"));
    }
    if tau < 1.0 {
        return Err(Error::BadParam("tau must be >= 1"));
    }
    if n == 0 || m == 0 || r == 0 {
        return Err(Error::BadParam("n, m, r must be positive"));
    }
    let q = sample_budget(n, sigma, tau)?;
    let n_ = n as u128;
    let m_ = m as u128;
    let alg2_inner = 2 * n_ * n_ + (2 * m_ + 1) * n_ + enc_gates as u128;
    let alg3_inner = 4 * n_ * n_ + (4 * m_ + 2) * n_ + enc_gates as u128;
    Ok(ComplexityReport {
        n,
        m,
        r,
        enc_gates,
        q,
        bv_call_gates: 2 * (n as u64 + m as u64) + 1 + enc_gates,
        alg2_gates: q as u128 * alg2_inner,
        alg3_gates: r as u128 * q as u128 * alg3_inner,
        classical_ops: 2 * q as u128 * n_ * n_ * n_,
        qubits: n as u32 + m as u32 + 1,
    })
}
