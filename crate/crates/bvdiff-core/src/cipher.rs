//! Pluggable toy block ciphers.
//!
//! Everything the search algorithms consume lives here: reduced-round
//! encryption `Enc_k^t`, suffix decryption (the inverse of the last rounds),
//! the key schedule, and each component function `Enc^t[j]` as a Boolean
//! function of the joint input `x || k`.
//!
//! Built-ins:
//! - `toy8`       - n = m = 8 SPN; round = rotl2(S-layer(x ^ k_i)) with the
//!                  4-bit S-box below applied per nibble, k_i = rotl(k, i) ^ i.
//! - `planted`    - toy8 with the S-layer skipped on the high nibble for
//!                  rounds <= t*, which plants probability-1 truncated
//!                  differentials for positive-control experiments.
//! - `toyfeistel` - n = 8 (two 4-bit branches), F = S-box(R ^ low nibble of k_i).
//! - `randomperm` - a seeded Fisher-Yates permutation per key, the baseline
//!                  target for distinguishing experiments.
//!
//! Custom SPNs are declarative: an S-box table, a bit-index permutation and
//! a rotate/xor key-schedule program.

use crate::bits::{mask, BitWord};
use crate::{Error, Result, MAX_TABLE_BITS};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand_chacha::rand_core::RngCore;

/// The 4-bit S-box used by all built-ins.
pub const TOY8_SBOX: [u8; 16] =
    [0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD, 0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2];

/// Identity S-box table, for degenerate-round variants.
pub const IDENTITY_SBOX: [u8; 16] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];

/// Whether a component function looks at the reduced cipher or at the
/// inverse of its last rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        }
    }
}

/// Linear layer of an SPN round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Permutation {
    /// Rotate the state left by two bit positions.
    RotL2,
    Identity,
    /// `out bit i = in bit map[i]` (LSB-0 positions); must be a permutation.
    BitMap(Vec<u8>),
}

impl Permutation {
    fn apply(&self, x: u64, n: u8) -> u64 {
        match self {
            Permutation::RotL2 => rotl_bits(x, 2, n),
            Permutation::Identity => x,
            Permutation::BitMap(map) => {
                let mut out = 0u64;
                for (i, &src) in map.iter().enumerate() {
                    out |= ((x >> src) & 1) << i;
                }
                out
            }
        }
    }

    fn invert(&self, y: u64, n: u8) -> u64 {
        match self {
            Permutation::RotL2 => rotl_bits(y, n as u32 - 2, n),
            Permutation::Identity => y,
            Permutation::BitMap(map) => {
                let mut out = 0u64;
                for (i, &src) in map.iter().enumerate() {
                    out |= ((y >> i) & 1) << src;
                }
                out
            }
        }
    }

    fn validate(&self, n: u8) -> Result<()> {
        if let Permutation::BitMap(map) = self {
            if map.len() != n as usize {
                return Err(Error::BadCipher("permutation map length must equal n"));
            }
            let mut seen = 0u64;
            for &src in map {
                if src >= n || (seen >> src) & 1 == 1 {
                    return Err(Error::BadCipher("permutation map is not a bijection"));
                }
                seen |= 1 << src;
            }
        }
        Ok(())
    }
}

fn rotl_bits(x: u64, k: u32, n: u8) -> u64 {
    let k = k % n as u32;
    if k == 0 {
        return x;
    }
    ((x << k) | (x >> (n as u32 - k))) & mask(n)
}

/// Round keys as a rotate/xor program: `k_i = rotl(k, a*i + b) ^ (c*i + d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySchedule {
    pub rot_mul: u8,
    pub rot_add: u8,
    pub xor_mul: u8,
    pub xor_add: u8,
}

impl KeySchedule {
    /// The toy8 schedule `k_i = rotl(k, i) ^ i`.
    pub fn rot_xor() -> Self {
        Self { rot_mul: 1, rot_add: 0, xor_mul: 1, xor_add: 0 }
    }

    fn round_key(&self, k: BitWord, i: u8) -> BitWord {
        let rot = self.rot_mul as u32 * i as u32 + self.rot_add as u32;
        let xor = (self.xor_mul as u64 * i as u64 + self.xor_add as u64) & mask(k.width());
        BitWord::of(k.rotl(rot).bits() ^ xor, k.width())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpnParams {
    pub sbox: [u8; 16],
    pub perm: Permutation,
    /// Rounds `1..=skip_high_rounds` leave the high nibble of the state
    /// outside the S-layer (0 disables the weakening). Requires n = 8.
    pub skip_high_rounds: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeistelParams {
    pub sbox: [u8; 16],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Construction {
    Spn(SpnParams),
    Feistel(FeistelParams),
    /// One seeded permutation of `F_2^n` per key; rounds are nominal.
    RandomPerm { perm_seed: u64 },
}

/// A keyed toy block cipher with `r` rounds, block width `n`, key width `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cipher {
    name: String,
    n: u8,
    m: u8,
    r: u8,
    schedule: KeySchedule,
    cons: Construction,
    inv_sbox: [u8; 16],
}

impl Cipher {
    pub fn new(
        name: &str,
        n: u8,
        m: u8,
        r: u8,
        schedule: KeySchedule,
        cons: Construction,
    ) -> Result<Self> {
        if n == 0 || n > 24 || m == 0 || m > 24 {
            return Err(Error::BadCipher("block and key widths must be 1..=24 bits"));
        }
        if n as u16 + m as u16 > MAX_TABLE_BITS as u16 {
            return Err(Error::ResourceGuard {
                bits: n.saturating_add(m),
                limit: MAX_TABLE_BITS,
                what: "cipher truth table",
            });
        }
        if r == 0 {
            return Err(Error::BadCipher("at least one round required"));
        }
        let sbox = match &cons {
            Construction::Spn(p) => {
                if n % 4 != 0 {
                    return Err(Error::BadCipher("SPN width must be a multiple of 4"));
                }
                if n != m {
                    return Err(Error::BadCipher("SPN round keys are XORed into the state; need n = m"));
                }
                if p.skip_high_rounds > 0 && n != 8 {
                    return Err(Error::BadCipher("the high-nibble weakening is defined for n = 8 only"));
                }
                p.perm.validate(n)?;
                Some(p.sbox)
            }
            Construction::Feistel(_) if n != 8 => {
                return Err(Error::BadCipher("the Feistel built-in uses two 4-bit branches (n = 8)"));
            }
            Construction::Feistel(p) => Some(p.sbox),
            Construction::RandomPerm { .. } => None,
        };
        let mut inv_sbox = [0u8; 16];
        if let Some(s) = sbox {
            let mut seen = [false; 16];
            for (x, &y) in s.iter().enumerate() {
                if y > 0xF || seen[y as usize] {
                    return Err(Error::BadCipher("S-box table is not a permutation of 0..16"));
                }
                seen[y as usize] = true;
                inv_sbox[y as usize] = x as u8;
            }
        }
        Ok(Self { name: String::from(name), n, m, r, schedule, cons, inv_sbox })
    }

    /// The full-strength built-in SPN.
    pub fn toy8(r: u8) -> Self {
        Self::new(
            "toy8",
            8,
            8,
            r,
            KeySchedule::rot_xor(),
            Construction::Spn(SpnParams { sbox: TOY8_SBOX, perm: Permutation::RotL2, skip_high_rounds: 0 }),
        )
        .expect("built-in parameters are valid")
    }

    /// toy8 with the high nibble bypassing the S-layer in rounds `1..=t_star`.
    pub fn planted(r: u8, t_star: u8) -> Self {
        Self::new(
            "planted",
            8,
            8,
            r,
            KeySchedule::rot_xor(),
            Construction::Spn(SpnParams { sbox: TOY8_SBOX, perm: Permutation::RotL2, skip_high_rounds: t_star }),
        )
        .expect("built-in parameters are valid")
    }

    pub fn toyfeistel(r: u8) -> Self {
        Self::new(
            "toyfeistel",
            8,
            8,
            r,
            KeySchedule::rot_xor(),
            Construction::Feistel(FeistelParams { sbox: TOY8_SBOX }),
        )
        .expect("built-in parameters are valid")
    }

    pub fn random_perm(r: u8, perm_seed: u64) -> Self {
        Self::new("randomperm", 8, 8, r, KeySchedule::rot_xor(), Construction::RandomPerm { perm_seed })
            .expect("built-in parameters are valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn block_bits(&self) -> u8 {
        self.n
    }

    pub fn key_bits(&self) -> u8 {
        self.m
    }

    pub fn rounds(&self) -> u8 {
        self.r
    }

    pub fn construction(&self) -> &Construction {
        &self.cons
    }

    /// Round keys `k_1..k_r` from the master key.
    pub fn key_schedule(&self, k: BitWord) -> Result<Vec<BitWord>> {
        if k.width() != self.m {
            return Err(Error::WidthMismatch { left: k.width(), right: self.m });
        }
        Ok((1..=self.r).map(|i| self.schedule.round_key(k, i)).collect())
    }

    fn sbox_layer(&self, p: &SpnParams, x: u64, round: u8) -> u64 {
        let skip_high = round <= p.skip_high_rounds;
        let mut out = 0u64;
        let nibbles = self.n / 4;
        for idx in 0..nibbles {
            let shift = 4 * idx as u32;
            let nib = ((x >> shift) & 0xF) as usize;
            // With the weakening active, the top nibble passes unchanged.
            let mapped = if skip_high && idx == nibbles - 1 { nib as u8 } else { p.sbox[nib] };
            out |= (mapped as u64) << shift;
        }
        out
    }

    fn inv_sbox_layer(&self, p: &SpnParams, y: u64, round: u8) -> u64 {
        let skip_high = round <= p.skip_high_rounds;
        let mut out = 0u64;
        let nibbles = self.n / 4;
        for idx in 0..nibbles {
            let shift = 4 * idx as u32;
            let nib = ((y >> shift) & 0xF) as usize;
            let mapped = if skip_high && idx == nibbles - 1 { nib as u8 } else { self.inv_sbox[nib] };
            out |= (mapped as u64) << shift;
        }
        out
    }

    fn round_forward(&self, state: u64, round: u8, rk: u64) -> u64 {
        match &self.cons {
            Construction::Spn(p) => {
                let keyed = state ^ rk;
                let subbed = self.sbox_layer(p, keyed, round);
                p.perm.apply(subbed, self.n)
            }
            Construction::Feistel(p) => {
                let l = (state >> 4) & 0xF;
                let r = state & 0xF;
                let f = p.sbox[(r ^ (rk & 0xF)) as usize] as u64;
                (r << 4) | (l ^ f)
            }
            Construction::RandomPerm { .. } => unreachable!("randomperm has no round function"),
        }
    }

    fn round_inverse(&self, state: u64, round: u8, rk: u64) -> u64 {
        match &self.cons {
            Construction::Spn(p) => {
                let unpermuted = p.perm.invert(state, self.n);
                self.inv_sbox_layer(p, unpermuted, round) ^ rk
            }
            Construction::Feistel(p) => {
                let a = (state >> 4) & 0xF;
                let b = state & 0xF;
                let f = p.sbox[(a ^ (rk & 0xF)) as usize] as u64;
                (((b ^ f) & 0xF) << 4) | a
            }
            Construction::RandomPerm { .. } => unreachable!("randomperm has no round function"),
        }
    }

    /// The per-key permutation table of the `randomperm` construction.
    pub fn keyed_permutation(&self, k: BitWord) -> Result<Vec<u32>> {
        let Construction::RandomPerm { perm_seed } = self.cons else {
            return Err(Error::BadParam("keyed_permutation is only defined for randomperm"));
        };
        if k.width() != self.m {
            return Err(Error::WidthMismatch { left: k.width(), right: self.m });
        }
        let size = 1usize << self.n;
        let mut table: Vec<u32> = (0..size as u32).collect();
        let mut rng = crate::rng::stream(perm_seed, crate::rng::Domain::RandomPerm, 0, k.bits() as u32);
        for i in (1..size).rev() {
            let j = crate::rng::uniform_below(&mut rng, i as u64 + 1) as usize;
            table.swap(i, j);
        }
        Ok(table)
    }

    /// Apply rounds `1..=t` with round keys `k_1..k_t`.
    pub fn encrypt_reduced(&self, x: BitWord, k: BitWord, t: u8) -> Result<BitWord> {
        if x.width() != self.n {
            return Err(Error::WidthMismatch { left: x.width(), right: self.n });
        }
        if t == 0 || t > self.r {
            return Err(Error::RoundRange { got: t, rounds: self.r });
        }
        if let Construction::RandomPerm { .. } = self.cons {
            if t != self.r {
                return Err(Error::BadParam("randomperm has no reduced rounds; use t = r"));
            }
            let perm = self.keyed_permutation(k)?;
            return Ok(BitWord::of(perm[x.bits() as usize] as u64, self.n));
        }
        let keys = self.key_schedule(k)?;
        let mut state = x.bits();
        for round in 1..=t {
            state = self.round_forward(state, round, keys[round as usize - 1].bits());
        }
        Ok(BitWord::of(state, self.n))
    }

    /// Full `r`-round encryption.
    pub fn encrypt(&self, x: BitWord, k: BitWord) -> Result<BitWord> {
        self.encrypt_reduced(x, k, self.r)
    }

    /// Invert rounds `r, r-1, ..., t1+1`, recovering the state after round
    /// `t1`. `decrypt_suffix(encrypt(x, k), k, t1) = encrypt_reduced(x, k, t1)`
    /// (and the plaintext itself for `t1 = 0`).
    pub fn decrypt_suffix(&self, y: BitWord, k: BitWord, t1: u8) -> Result<BitWord> {
        if y.width() != self.n {
            return Err(Error::WidthMismatch { left: y.width(), right: self.n });
        }
        if t1 >= self.r {
            return Err(Error::RoundRange { got: t1, rounds: self.r });
        }
        if let Construction::RandomPerm { .. } = self.cons {
            if t1 != 0 {
                return Err(Error::BadParam("randomperm has no reduced rounds; use t1 = 0"));
            }
            let perm = self.keyed_permutation(k)?;
            let mut inv = vec![0u32; perm.len()];
            for (x, &y_img) in perm.iter().enumerate() {
                inv[y_img as usize] = x as u32;
            }
            return Ok(BitWord::of(inv[y.bits() as usize] as u64, self.n));
        }
        let keys = self.key_schedule(k)?;
        let mut state = y.bits();
        for round in (t1 + 1..=self.r).rev() {
            state = self.round_inverse(state, round, keys[round as usize - 1].bits());
        }
        Ok(BitWord::of(state, self.n))
    }

    /// Full decryption.
    pub fn decrypt(&self, y: BitWord, k: BitWord) -> Result<BitWord> {
        self.decrypt_suffix(y, k, 0)
    }

    /// Invert one round under a hypothesized round key - the primitive a
    /// counting attack applies per candidate subkey.
    pub fn invert_round(&self, y: BitWord, round: u8, round_key: BitWord) -> Result<BitWord> {
        if y.width() != self.n {
            return Err(Error::WidthMismatch { left: y.width(), right: self.n });
        }
        if round == 0 || round > self.r {
            return Err(Error::RoundRange { got: round, rounds: self.r });
        }
        if let Construction::RandomPerm { .. } = self.cons {
            return Err(Error::BadParam("randomperm has no round structure to invert"));
        }
        Ok(BitWord::of(self.round_inverse(y.bits(), round, round_key.bits()), self.n))
    }

    /// Width of the effective last-round-key space a recovery attack
    /// enumerates: the full round key for SPNs, the F-input nibble for the
    /// Feistel (its round function only consumes the low key nibble).
    pub fn recovery_candidate_bits(&self) -> Result<u8> {
        match &self.cons {
            Construction::Spn(_) => Ok(self.n),
            Construction::Feistel(_) => Ok(4),
            Construction::RandomPerm { .. } => {
                Err(Error::BadParam("randomperm admits no key recovery"))
            }
        }
    }

    /// The effective last-round key under the true master key, in the
    /// candidate space of `recovery_candidate_bits`.
    pub fn true_last_round_key(&self, k: BitWord) -> Result<BitWord> {
        let bits = self.recovery_candidate_bits()?;
        let rk = self.key_schedule(k)?[self.r as usize - 1];
        Ok(rk.low(bits))
    }

    /// The component function `Enc^t[j]` (or its inverse-direction twin)
    /// over the joint input `x || k`.
    pub fn component(&self, j: u8, t: u8, direction: Direction) -> Result<ComponentFunction<'_>> {
        if j == 0 || j > self.n {
            return Err(Error::BadParam("component index j must be in 1..=n"));
        }
        if t == 0 || t > self.r {
            return Err(Error::RoundRange { got: t, rounds: self.r });
        }
        Ok(ComponentFunction { cipher: self, j, t, direction })
    }
}

/// Bit `j` (1-based, MSB-first) of the reduced cipher - forward - or of the
/// inverse of the last `t` rounds - inverse - as a Boolean function of the
/// `(n+m)`-bit word `x || k`.
#[derive(Debug, Clone, Copy)]
pub struct ComponentFunction<'a> {
    pub cipher: &'a Cipher,
    pub j: u8,
    pub t: u8,
    pub direction: Direction,
}

impl ComponentFunction<'_> {
    pub fn joint_bits(&self) -> u8 {
        self.cipher.n + self.cipher.m
    }

    /// Evaluate at one joint input.
    pub fn eval(&self, z: BitWord) -> Result<u8> {
        let c = self.cipher;
        if z.width() != c.n + c.m {
            return Err(Error::WidthMismatch { left: z.width(), right: c.n + c.m });
        }
        let x = z.high(c.n);
        let k = z.low(c.m);
        let out = match self.direction {
            Direction::Forward => c.encrypt_reduced(x, k, self.t)?,
            Direction::Inverse => c.decrypt_suffix(x, k, c.r - self.t)?,
        };
        Ok(out.bit_j(self.j))
    }

    /// Full truth table over all `2^(n+m)` joint inputs.
    ///
    /// Round keys and (for randomperm) the keyed permutation are derived
    /// once per key, so generation costs one reduced encryption per entry.
    pub fn truth_table(&self) -> Result<BitTable> {
        let c = self.cipher;
        let total_bits = c.n + c.m;
        if total_bits > MAX_TABLE_BITS {
            return Err(Error::ResourceGuard {
                bits: total_bits,
                limit: MAX_TABLE_BITS,
                what: "component truth table",
            });
        }
        let mut table = BitTable::zeroed(total_bits);
        let pos = c.n - self.j; // output bit position, LSB-0
        match &c.cons {
            Construction::RandomPerm { .. } => {
                for kv in 0..1u64 << c.m {
                    let k = BitWord::of(kv, c.m);
                    let perm = c.keyed_permutation(k)?;
                    match self.direction {
                        Direction::Forward => {
                            for xv in 0..1u64 << c.n {
                                let bit = (perm[xv as usize] as u64 >> pos) & 1;
                                table.set(((xv << c.m) | kv) as usize, bit as u8);
                            }
                        }
                        Direction::Inverse => {
                            for (xv, &img) in perm.iter().enumerate() {
                                let bit = (xv as u64 >> pos) & 1;
                                table.set((((img as u64) << c.m) | kv) as usize, bit as u8);
                            }
                        }
                    }
                }
            }
            _ => {
                let t1 = c.r - self.t;
                for kv in 0..1u64 << c.m {
                    let k = BitWord::of(kv, c.m);
                    let keys = c.key_schedule(k)?;
                    for xv in 0..1u64 << c.n {
                        let mut state = xv;
                        match self.direction {
                            Direction::Forward => {
                                for round in 1..=self.t {
                                    state = c.round_forward(state, round, keys[round as usize - 1].bits());
                                }
                            }
                            Direction::Inverse => {
                                for round in (t1 + 1..=c.r).rev() {
                                    state = c.round_inverse(state, round, keys[round as usize - 1].bits());
                                }
                            }
                        }
                        table.set(((xv << c.m) | kv) as usize, ((state >> pos) & 1) as u8);
                    }
                }
            }
        }
        Ok(table)
    }
}

/// Packed truth table of a Boolean function on `n_bits` inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitTable {
    words: Vec<u64>,
    n_bits: u8,
}

impl BitTable {
    pub fn zeroed(n_bits: u8) -> Self {
        debug_assert!(n_bits >= 1 && n_bits <= MAX_TABLE_BITS);
        let len = 1usize << n_bits;
        Self { words: vec![0u64; len.div_ceil(64)], n_bits }
    }

    /// Build from any evaluator; handy for ad-hoc functions in tests.
    pub fn from_fn(n_bits: u8, mut f: impl FnMut(u64) -> u8) -> Self {
        let mut t = Self::zeroed(n_bits);
        for x in 0..1u64 << n_bits {
            t.set(x as usize, f(x));
        }
        t
    }

    /// Fill from raw RNG bits; a uniformly random Boolean function.
    pub fn random(n_bits: u8, rng: &mut impl RngCore) -> Self {
        let mut t = Self::zeroed(n_bits);
        for w in t.words.iter_mut() {
            *w = rng.next_u64();
        }
        if (1usize << n_bits) < 64 {
            t.words[0] &= mask((1usize << n_bits) as u8);
        }
        t
    }

    pub fn n_bits(&self) -> u8 {
        self.n_bits
    }

    pub fn len(&self) -> usize {
        1usize << self.n_bits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, idx: usize) -> u8 {
        ((self.words[idx >> 6] >> (idx & 63)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, idx: usize, bit: u8) {
        let w = &mut self.words[idx >> 6];
        *w = (*w & !(1u64 << (idx & 63))) | ((bit as u64 & 1) << (idx & 63));
    }

    /// Hamming weight of the whole table.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

#[cfg(test)]
pub(crate) fn identity_round_cipher(r: u8) -> Cipher {
    // S = identity, P = identity: a round is a bare key XOR.
    Cipher::new(
        "identity-variant",
        8,
        8,
        r,
        KeySchedule::rot_xor(),
        Construction::Spn(SpnParams {
            sbox: IDENTITY_SBOX,
            perm: Permutation::Identity,
            skip_high_rounds: 0,
        }),
    )
    .unwrap()
}

#[cfg(test)]
pub(crate) fn sbox_identity_toy8(r: u8) -> Cipher {
    // S = identity but the rotl2 linear layer kept: pure key-XOR rounds
    // followed by the P-layer.
    Cipher::new(
        "identity-sbox-toy8",
        8,
        8,
        r,
        KeySchedule::rot_xor(),
        Construction::Spn(SpnParams {
            sbox: IDENTITY_SBOX,
            perm: Permutation::RotL2,
            skip_high_rounds: 0,
        }),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w8(v: u64) -> BitWord {
        BitWord::of(v, 8)
    }

    #[test]
    fn schedule_zero_key_yields_round_counters() {
        let c = Cipher::toy8(8);
        let keys = c.key_schedule(w8(0)).unwrap();
        for (i, rk) in keys.iter().enumerate() {
            assert_eq!(rk.bits(), i as u64 + 1);
        }
    }

    #[test]
    fn schedule_hand_trace_k80() {
        // rotl(0x80, 1) ^ 1 = 0x01 ^ 0x01 = 0x00
        let c = Cipher::toy8(4);
        let keys = c.key_schedule(w8(0x80)).unwrap();
        assert_eq!(keys[0].bits(), 0x00);
    }

    #[test]
    fn schedule_round_key_collisions_are_rare_and_fixed() {
        // The rotate/xor schedule is almost injective in the round index:
        // exhaustively over all 256 keys and r = 8 there are exactly 20
        // colliding (k, i < j) pairs (e.g. k = 0x7F gives k_1 = k_2 = 0xFF).
        let c = Cipher::toy8(8);
        let mut collisions = 0usize;
        for kv in 0..256u64 {
            let keys = c.key_schedule(w8(kv)).unwrap();
            for i in 0..8 {
                for j in i + 1..8 {
                    collisions += (keys[i] == keys[j]) as usize;
                }
            }
        }
        assert_eq!(collisions, 20);
        let k7f = c.key_schedule(w8(0x7F)).unwrap();
        assert_eq!(k7f[0], k7f[1]);
        assert_eq!(k7f[0].bits(), 0xFF);
    }

    #[test]
    fn toy8_hand_trace_round_one() {
        // x = 0, k = 0: k1 = 1, S-layer(0x01) = 0xC5, rotl2 -> 0x17.
        let c = Cipher::toy8(1);
        assert_eq!(c.encrypt_reduced(w8(0), w8(0), 1).unwrap().bits(), 0x17);
        // Inverse of the trace.
        assert_eq!(c.decrypt_suffix(w8(0x17), w8(0), 0).unwrap().bits(), 0x00);
    }

    #[test]
    fn identity_variant_round_is_key_xor() {
        let c = identity_round_cipher(2);
        assert_eq!(c.encrypt_reduced(w8(0x5A), w8(0), 1).unwrap().bits(), 0x5B);
    }

    #[test]
    fn round_range_errors() {
        let c = Cipher::toy8(4);
        assert!(c.encrypt_reduced(w8(0), w8(0), 0).is_err());
        assert!(c.encrypt_reduced(w8(0), w8(0), 5).is_err());
        assert!(c.decrypt_suffix(w8(0), w8(0), 4).is_err());
    }

    #[test]
    fn encryption_is_a_permutation_for_every_key() {
        for c in [Cipher::toy8(4), Cipher::planted(4, 2), Cipher::toyfeistel(4)] {
            for kv in 0..256u64 {
                let mut seen = [false; 256];
                for xv in 0..256u64 {
                    let y = c.encrypt(w8(xv), w8(kv)).unwrap().bits() as usize;
                    assert!(!seen[y], "{} collides at k={kv:#04x}", c.name());
                    seen[y] = true;
                }
            }
        }
    }

    #[test]
    fn suffix_decryption_inverse_law_exhaustive() {
        // decrypt_suffix(Enc^r(x), k, t1) = Enc^{t1}(x) for all x, k, t1.
        for c in [Cipher::toy8(3), Cipher::planted(4, 4), Cipher::toyfeistel(3)] {
            for kv in 0..256u64 {
                for xv in 0..256u64 {
                    let full = c.encrypt(w8(xv), w8(kv)).unwrap();
                    assert_eq!(c.decrypt_suffix(full, w8(kv), 0).unwrap().bits(), xv);
                    for t1 in 1..c.rounds() {
                        let mid = c.encrypt_reduced(w8(xv), w8(kv), t1).unwrap();
                        assert_eq!(c.decrypt_suffix(full, w8(kv), t1).unwrap(), mid);
                    }
                }
            }
        }
    }

    #[test]
    fn planted_two_round_differential_is_exact() {
        // 0x30 -> 0x03 through two weakened rounds, every (x, k).
        let c = Cipher::planted(4, 2);
        let (a, b) = (w8(0x30), w8(0x03));
        for kv in 0..256u64 {
            for xv in 0..256u64 {
                let y0 = c.encrypt_reduced(w8(xv), w8(kv), 2).unwrap();
                let y1 = c.encrypt_reduced(w8(xv).xor(a).unwrap(), w8(kv), 2).unwrap();
                assert_eq!(y0.xor(y1).unwrap(), b);
            }
        }
    }

    #[test]
    fn planted_inverse_suffix_differential_is_exact() {
        // With all four rounds weakened, 0x03 -> 0x30 through the inverse
        // of rounds 3..4, every (y, k).
        let c = Cipher::planted(4, 4);
        let (a, b) = (w8(0x03), w8(0x30));
        for kv in 0..256u64 {
            for yv in 0..256u64 {
                let m0 = c.decrypt_suffix(w8(yv), w8(kv), 2).unwrap();
                let m1 = c.decrypt_suffix(w8(yv).xor(a).unwrap(), w8(kv), 2).unwrap();
                assert_eq!(m0.xor(m1).unwrap(), b);
            }
        }
    }

    #[test]
    fn component_table_of_identity_variant_is_linear() {
        // t = 1, j = 1: the table is bit 1 (MSB) of x ^ k_1.
        let c = identity_round_cipher(1);
        let cf = c.component(1, 1, Direction::Forward).unwrap();
        let table = cf.truth_table().unwrap();
        for xv in 0..256u64 {
            for kv in 0..256u64 {
                let k1 = c.key_schedule(w8(kv)).unwrap()[0];
                let expect = w8(xv).xor(k1).unwrap().bit_j(1);
                assert_eq!(table.get(((xv << 8) | kv) as usize), expect);
            }
        }
    }

    #[test]
    fn component_table_matches_encrypt_on_probes() {
        let c = Cipher::toy8(4);
        let mut rng = crate::rng::stream(11, crate::rng::Domain::KeyGen, 0, 0);
        for j in [1u8, 5, 8] {
            let table = c.component(j, 4, Direction::Forward).unwrap().truth_table().unwrap();
            for _ in 0..10_000 {
                let z = rng.next_u64() & 0xFFFF;
                let (xv, kv) = (z >> 8, z & 0xFF);
                let y = c.encrypt(w8(xv), w8(kv)).unwrap();
                assert_eq!(table.get(z as usize), y.bit_j(j));
            }
        }
    }

    #[test]
    fn component_tables_are_exactly_balanced() {
        // Bijectivity in x for every fixed k forces exact balance.
        let c = Cipher::toy8(4);
        for j in 1..=8 {
            for dir in [Direction::Forward, Direction::Inverse] {
                let table = c.component(j, 4, dir).unwrap().truth_table().unwrap();
                assert_eq!(table.weight(), 1 << 15);
            }
        }
    }

    #[test]
    fn inverse_direction_component_matches_decrypt_suffix() {
        let c = Cipher::planted(4, 4);
        let cf = c.component(3, 2, Direction::Inverse).unwrap();
        let table = cf.truth_table().unwrap();
        for yv in (0..256u64).step_by(5) {
            for kv in (0..256u64).step_by(3) {
                let mid = c.decrypt_suffix(w8(yv), w8(kv), 2).unwrap();
                assert_eq!(table.get(((yv << 8) | kv) as usize), mid.bit_j(3));
            }
        }
    }

    #[test]
    fn randomperm_is_keyed_deterministic_and_invertible() {
        let c = Cipher::random_perm(4, 99);
        for kv in [0u64, 1, 77, 255] {
            let k = w8(kv);
            let perm = c.keyed_permutation(k).unwrap();
            let mut seen = [false; 256];
            for &img in &perm {
                assert!(!seen[img as usize]);
                seen[img as usize] = true;
            }
            for xv in 0..256u64 {
                let y = c.encrypt(w8(xv), k).unwrap();
                assert_eq!(y.bits(), perm[xv as usize] as u64);
                assert_eq!(c.decrypt(y, k).unwrap().bits(), xv);
            }
        }
        // Same seed, same key => same permutation; different key => different.
        let c2 = Cipher::random_perm(4, 99);
        assert_eq!(c2.keyed_permutation(w8(7)).unwrap(), c.keyed_permutation(w8(7)).unwrap());
        assert_ne!(c.keyed_permutation(w8(7)).unwrap(), c.keyed_permutation(w8(8)).unwrap());
    }

    #[test]
    fn randomperm_rejects_reduced_rounds() {
        let c = Cipher::random_perm(4, 1);
        assert!(c.encrypt_reduced(w8(0), w8(0), 2).is_err());
        assert!(c.decrypt_suffix(w8(0), w8(0), 2).is_err());
    }

    #[test]
    fn feistel_round_structure() {
        // One round sends (L, R) to (R, L ^ S[R ^ nib(k_1)]).
        let c = Cipher::toyfeistel(1);
        let k = w8(0x00); // k1 = 0x01, low nibble 1
        let x = w8(0xA7); // L = 0xA, R = 0x7
        let f = TOY8_SBOX[0x7 ^ 0x1] as u64;
        let expect = (0x7 << 4) | (0xA ^ f);
        assert_eq!(c.encrypt_reduced(x, k, 1).unwrap().bits(), expect);
    }

    #[test]
    fn bad_cipher_definitions_are_rejected() {
        // Non-bijective S-box.
        let mut sbox = TOY8_SBOX;
        sbox[3] = sbox[4];
        assert!(Cipher::new(
            "broken",
            8,
            8,
            2,
            KeySchedule::rot_xor(),
            Construction::Spn(SpnParams { sbox, perm: Permutation::RotL2, skip_high_rounds: 0 }),
        )
        .is_err());
        // Non-bijective bit map.
        assert!(Permutation::BitMap(vec![0, 0, 1, 2, 3, 4, 5, 6]).validate(8).is_err());
        // Oversized table guard.
        assert!(Cipher::new(
            "huge",
            16,
            16,
            2,
            KeySchedule::rot_xor(),
            Construction::Spn(SpnParams { sbox: TOY8_SBOX, perm: Permutation::Identity, skip_high_rounds: 0 }),
        )
        .is_err());
    }

    #[test]
    fn custom_bitmap_perm_roundtrips() {
        let map: Vec<u8> = vec![7, 6, 5, 4, 3, 2, 1, 0]; // bit reversal
        let p = Permutation::BitMap(map);
        p.validate(8).unwrap();
        for x in 0..256u64 {
            assert_eq!(p.invert(p.apply(x, 8), 8), x);
        }
        assert_eq!(p.apply(0b1000_0000, 8), 0b0000_0001);
    }
}
