//! Exact integer Walsh-Hadamard spectra and the BV output sampler.
//!
//! For a Boolean function `f` on `N` bits the stored coefficients are
//! `s_hat(u) = sum_x (-1)^(f(x) + u.x)`, i.e. the normalized transform
//! scaled by `2^N` so everything stays in integers. Measuring the BV
//! circuit on `f` outputs `u` with probability `s_hat(u)^2 / 2^(2N)`;
//! the sampler reproduces that distribution bit-exactly from integer
//! cumulative weights and power-of-two uniform draws - no floating point,
//! so sampler bias can never confound the statistical validations.

use crate::bits::BitWord;
use crate::cipher::{BitTable, Cipher, Direction};
use crate::{Error, Result, MAX_TABLE_BITS};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use rand_chacha::rand_core::RngCore;

/// Exact integer Walsh-Hadamard spectrum of one Boolean function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshSpectrum {
    n_bits: u8,
    coeffs: Vec<i64>,
}

/// In-place fast Walsh-Hadamard butterfly.
pub fn fwht_i64(data: &mut [i64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        let mut i = 0;
        while i < n {
            for j in i..i + h {
                let a = data[j];
                let b = data[j + h];
                data[j] = a + b;
                data[j + h] = a - b;
            }
            i += 2 * h;
        }
        h *= 2;
    }
}

impl WalshSpectrum {
    /// Transform a truth table into its exact spectrum.
    pub fn from_table(table: &BitTable) -> Result<Self> {
        let n_bits = table.n_bits();
        if n_bits > MAX_TABLE_BITS {
            return Err(Error::ResourceGuard { bits: n_bits, limit: MAX_TABLE_BITS, what: "Walsh spectrum" });
        }
        let len = table.len();
        let mut coeffs: Vec<i64> = (0..len).map(|x| 1 - 2 * table.get(x) as i64).collect();
        fwht_i64(&mut coeffs);
        let spectrum = Self { n_bits, coeffs };
        debug_assert!(spectrum.parseval_holds());
        Ok(spectrum)
    }

    pub fn n_bits(&self) -> u8 {
        self.n_bits
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// `s_hat(u)`.
    pub fn coeff(&self, u: BitWord) -> i64 {
        debug_assert_eq!(u.width(), self.n_bits);
        self.coeffs[u.bits() as usize]
    }

    /// The integer Parseval identity `sum_u s_hat(u)^2 = 2^(2N)`.
    pub fn parseval_holds(&self) -> bool {
        let total: u128 = self.coeffs.iter().map(|&c| (c as i128 * c as i128) as u128).sum();
        total == 1u128 << (2 * self.n_bits as u32)
    }

    /// `u` with `s_hat(u) != 0`, ascending.
    pub fn support(&self) -> impl Iterator<Item = BitWord> + '_ {
        let w = self.n_bits;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(u, _)| BitWord::of(u as u64, w))
    }

    /// Brute-force the definitional double sum; the independent oracle the
    /// butterfly is checked against in tests.
    pub fn definitional(table: &BitTable) -> Vec<i64> {
        let len = table.len();
        let mut out = Vec::with_capacity(len);
        for u in 0..len {
            let mut acc = 0i64;
            for x in 0..len {
                let sign = (table.get(x) as u32 + (u & x).count_ones()) & 1;
                acc += 1 - 2 * sign as i64;
            }
            out.push(acc);
        }
        out
    }
}

/// Bit-exact sampler for the BV measurement distribution `Pr[u] =
/// s_hat(u)^2 / 2^(2N)`.
///
/// The nonzero support is materialized once as sorted indices with integer
/// prefix sums; each draw is one `2N`-bit uniform integer and a binary
/// search, so zero-coefficient vectors can never be emitted.
#[derive(Debug, Clone)]
pub struct BvSampler {
    n_bits: u8,
    support: Vec<u32>,
    cumulative: Vec<u64>,
}

impl BvSampler {
    pub fn new(spectrum: &WalshSpectrum) -> Result<Self> {
        let n_bits = spectrum.n_bits();
        if 2 * n_bits as u32 > 63 {
            return Err(Error::ResourceGuard { bits: n_bits, limit: 31, what: "sampler weight table" });
        }
        let mut support = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0u64;
        for (u, &c) in spectrum.coeffs().iter().enumerate() {
            if c != 0 {
                acc += (c * c) as u64;
                support.push(u as u32);
                cumulative.push(acc);
            }
        }
        // Parseval forces a nonempty support summing to exactly 2^(2N).
        if acc != 1u64 << (2 * n_bits as u32) {
            return Err(Error::Internal("spectrum violates the Parseval identity"));
        }
        Ok(Self { n_bits, support, cumulative })
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    /// One measurement.
    pub fn sample(&self, rng: &mut impl RngCore) -> BitWord {
        let draw = crate::rng::uniform_pow2(rng, 2 * self.n_bits as u32);
        // First support index whose cumulative weight exceeds the draw.
        let idx = self.cumulative.partition_point(|&c| c <= draw);
        BitWord::of(self.support[idx] as u64, self.n_bits)
    }

    /// `count` i.i.d. measurements.
    pub fn sample_many(&self, count: u64, rng: &mut impl RngCore) -> Vec<BitWord> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}

/// Lazily built spectra keyed by `(t, j, direction)` for one cipher.
///
/// Values are immutable once built; parallel callers hold one cache each
/// (building a spectrum twice is cheap and harmless).
#[derive(Debug, Default)]
pub struct SpectrumCache {
    map: BTreeMap<(u8, u8, Direction), WalshSpectrum>,
}

impl SpectrumCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn spectrum(&mut self, cipher: &Cipher, t: u8, j: u8, direction: Direction) -> Result<&WalshSpectrum> {
        use alloc::collections::btree_map::Entry;
        match self.map.entry((t, j, direction)) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => {
                let table = cipher.component(j, t, direction)?.truth_table()?;
                Ok(e.insert(WalshSpectrum::from_table(&table)?))
            }
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::chi_square_gof;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn linear_fn(s: u64, n_bits: u8) -> BitTable {
        BitTable::from_fn(n_bits, |x| ((x & s).count_ones() & 1) as u8)
    }

    #[test]
    fn linear_function_has_point_spectrum() {
        // f(x) = s.x with s = 0b101: s_hat(s) = 8, everything else 0, so a
        // BV run recovers s with certainty.
        let sp = WalshSpectrum::from_table(&linear_fn(0b101, 3)).unwrap();
        for u in 0..8u64 {
            let expect = if u == 0b101 { 8 } else { 0 };
            assert_eq!(sp.coeff(BitWord::of(u, 3)), expect);
        }
        let sampler = BvSampler::new(&sp).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..64 {
            assert_eq!(sampler.sample(&mut rng).bits(), 0b101);
        }
    }

    #[test]
    fn constant_function_has_zero_point_spectrum() {
        let sp = WalshSpectrum::from_table(&BitTable::from_fn(3, |_| 0)).unwrap();
        assert_eq!(sp.coeff(BitWord::zero(3)), 8);
        assert_eq!(sp.support().count(), 1);
        let sampler = BvSampler::new(&sp).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..32 {
            assert!(sampler.sample(&mut rng).is_zero());
        }
    }

    #[test]
    fn fwht_matches_definitional_sum() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for n_bits in 1..=10u8 {
            let table = BitTable::random(n_bits, &mut rng);
            let sp = WalshSpectrum::from_table(&table).unwrap();
            assert_eq!(sp.coeffs(), WalshSpectrum::definitional(&table).as_slice());
            assert!(sp.parseval_holds());
        }
    }

    #[test]
    fn zero_coefficient_identity() {
        // s_hat(0) = 2^N - 2 * weight(f).
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..20 {
            let table = BitTable::random(8, &mut rng);
            let sp = WalshSpectrum::from_table(&table).unwrap();
            assert_eq!(sp.coeff(BitWord::zero(8)), 256 - 2 * table.weight() as i64);
        }
    }

    #[test]
    fn transform_is_an_involution_up_to_scale() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let table = BitTable::random(6, &mut rng);
        let signs: Vec<i64> = (0..table.len()).map(|x| 1 - 2 * table.get(x) as i64).collect();
        let mut twice = signs.clone();
        fwht_i64(&mut twice);
        fwht_i64(&mut twice);
        let scaled: Vec<i64> = twice.iter().map(|&v| v / 64).collect();
        assert_eq!(scaled, signs);
    }

    #[test]
    fn samples_never_leave_the_support() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let table = BitTable::random(6, &mut rng);
        let sp = WalshSpectrum::from_table(&table).unwrap();
        let sampler = BvSampler::new(&sp).unwrap();
        for _ in 0..20_000 {
            let u = sampler.sample(&mut rng);
            assert_ne!(sp.coeff(u), 0);
        }
    }

    #[test]
    fn sampler_matches_exact_weights_chi_square() {
        // 1e5 draws from a random N=4 spectrum vs s_hat(u)^2 / 2^(2N).
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let table = BitTable::random(4, &mut rng);
        let sp = WalshSpectrum::from_table(&table).unwrap();
        let sampler = BvSampler::new(&sp).unwrap();
        let total = 1u64 << 8;
        let mut counts = alloc::vec![0u64; sampler.support_len()];
        let mut probs = alloc::vec![0.0f64; sampler.support_len()];
        let support: Vec<BitWord> = sp.support().collect();
        for (i, &u) in support.iter().enumerate() {
            let c = sp.coeff(u);
            probs[i] = (c * c) as f64 / total as f64;
        }
        let draws = 100_000u64;
        for _ in 0..draws {
            let u = sampler.sample(&mut rng);
            let i = support.iter().position(|&s| s == u).unwrap();
            counts[i] += 1;
        }
        let (_stat, p) = chi_square_gof(&counts, &probs).unwrap();
        assert!(p > 0.001, "chi-square p-value too small: {p}");
    }

    #[test]
    fn spectrum_cache_builds_each_component_once() {
        let cipher = Cipher::toy8(2);
        let mut cache = SpectrumCache::new();
        let a = cache.spectrum(&cipher, 2, 1, Direction::Forward).unwrap().clone();
        let b = cache.spectrum(&cipher, 2, 1, Direction::Forward).unwrap().clone();
        assert_eq!(a, b);
        assert_eq!(cache.len(), 1);
        cache.spectrum(&cipher, 2, 2, Direction::Inverse).unwrap();
        assert_eq!(cache.len(), 2);
    }
}
