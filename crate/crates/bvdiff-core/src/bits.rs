//! Fixed-width bit strings and truncated (trit) differences.
//!
//! Bit-order convention, used everywhere in this crate: a `BitWord` stores
//! its bits LSB-first in a `u64`, while *component indices* `j` are 1-based
//! with `j = 1` denoting the most significant bit, i.e. `j` maps to bit
//! position `width - j`. Concatenations `x || k` place `x` in the high bits,
//! so "the first n bits" of a joint word are its top `n` bits.

use crate::{Error, Result};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A bit string of fixed width 1..=64. Bits above `width` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitWord {
    bits: u64,
    width: u8,
}

impl BitWord {
    pub fn new(bits: u64, width: u8) -> Result<Self> {
        if width == 0 || width > 64 {
            return Err(Error::BadWidth(width));
        }
        Ok(Self { bits: bits & mask(width), width })
    }

    /// As `new` but panics on a bad width; for compile-time-known widths.
    pub fn of(bits: u64, width: u8) -> Self {
        Self::new(bits, width).expect("valid width")
    }

    pub fn zero(width: u8) -> Self {
        Self::of(0, width)
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn width(self) -> u8 {
        self.width
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    fn check_width(self, other: Self) -> Result<()> {
        if self.width != other.width {
            return Err(Error::WidthMismatch { left: self.width, right: other.width });
        }
        Ok(())
    }

    pub fn xor(self, other: Self) -> Result<Self> {
        self.check_width(other)?;
        Ok(Self { bits: self.bits ^ other.bits, width: self.width })
    }

    /// GF(2) dot product: parity of the AND.
    pub fn dot(self, other: Self) -> Result<u8> {
        self.check_width(other)?;
        Ok(((self.bits & other.bits).count_ones() & 1) as u8)
    }

    /// Bit at LSB-0 position `pos`.
    pub fn bit(self, pos: u8) -> u8 {
        debug_assert!(pos < self.width);
        ((self.bits >> pos) & 1) as u8
    }

    /// Bit addressed by a 1-based component index (`j = 1` is the MSB).
    pub fn bit_j(self, j: u8) -> u8 {
        debug_assert!(j >= 1 && j <= self.width);
        self.bit(self.width - j)
    }

    /// LSB-0 position corresponding to component index `j`.
    pub fn pos_of_j(width: u8, j: u8) -> u8 {
        debug_assert!(j >= 1 && j <= width);
        width - j
    }

    /// Rotate left within the word's width.
    pub fn rotl(self, k: u32) -> Self {
        let w = self.width as u32;
        let k = k % w;
        if k == 0 {
            return self;
        }
        let b = ((self.bits << k) | (self.bits >> (w - k))) & mask(self.width);
        Self { bits: b, width: self.width }
    }

    /// Concatenate `self || low`, placing `self` in the high bits.
    pub fn concat(self, low: Self) -> Result<Self> {
        let w = self.width as u16 + low.width as u16;
        if w > 64 {
            return Err(Error::BadWidth(w as u8));
        }
        Ok(Self { bits: (self.bits << low.width) | low.bits, width: w as u8 })
    }

    /// The top `n` bits as an `n`-bit word ("the first n bits" of `x || k`).
    pub fn high(self, n: u8) -> Self {
        debug_assert!(n >= 1 && n <= self.width);
        Self { bits: self.bits >> (self.width - n), width: n }
    }

    /// The low `n` bits as an `n`-bit word.
    pub fn low(self, n: u8) -> Self {
        debug_assert!(n >= 1 && n <= self.width);
        Self { bits: self.bits & mask(n), width: n }
    }

    /// All `2^width` words, ascending. Width must stay desk-scale.
    pub fn all(width: u8) -> impl Iterator<Item = BitWord> {
        debug_assert!(width <= 28);
        (0..(1u64 << width)).map(move |b| BitWord { bits: b, width })
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({:0w$b}/{})", self.bits, self.width, w = self.width as usize)
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.width as usize).div_ceil(4);
        write!(f, "{:0w$x}", self.bits, w = digits)
    }
}

pub(crate) fn mask(width: u8) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// A length-`n` trit vector over `{0, 1, *}`: a truncated difference.
///
/// Stored as (care, value) masks: positions set in `care` are predicted and
/// carry the bit from `value`; the rest are `*`. `d` is the number of
/// predicted positions.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncatedDifference {
    care: u64,
    value: u64,
    width: u8,
}

impl TruncatedDifference {
    pub fn new(care: BitWord, value: BitWord) -> Result<Self> {
        care.check_width(value)?;
        if value.bits & !care.bits != 0 {
            return Err(Error::BadParam("truncated difference has value bits outside the care mask"));
        }
        Ok(Self { care: care.bits, value: value.bits, width: care.width() })
    }

    /// Everything unpredicted.
    pub fn all_star(width: u8) -> Self {
        Self { care: 0, value: 0, width }
    }

    /// A fully predicted difference (every position carries a bit).
    pub fn concrete(word: BitWord) -> Self {
        Self { care: mask(word.width()), value: word.bits(), width: word.width() }
    }

    /// Build from 1-based component indices and their predicted bits.
    pub fn from_predictions(width: u8, preds: &[(u8, u8)]) -> Result<Self> {
        let mut care = 0u64;
        let mut value = 0u64;
        for &(j, bit) in preds {
            if j == 0 || j > width {
                return Err(Error::BadParam("component index out of range"));
            }
            let pos = BitWord::pos_of_j(width, j);
            care |= 1 << pos;
            if bit & 1 == 1 {
                value |= 1 << pos;
            }
        }
        Ok(Self { care, value, width })
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    /// Number of predicted bits.
    pub fn d(&self) -> u8 {
        self.care.count_ones() as u8
    }

    pub fn care_mask(&self) -> BitWord {
        BitWord { bits: self.care, width: self.width }
    }

    pub fn value_bits(&self) -> BitWord {
        BitWord { bits: self.value, width: self.width }
    }

    /// The matching relation: `delta ~ self` iff they agree on every
    /// predicted position.
    pub fn matches(&self, delta: BitWord) -> bool {
        debug_assert_eq!(delta.width(), self.width);
        delta.bits() & self.care == self.value
    }

    /// Prediction at component index `j`: `Some(bit)` or `None` for `*`.
    pub fn at_j(&self, j: u8) -> Option<u8> {
        let pos = BitWord::pos_of_j(self.width, j);
        if (self.care >> pos) & 1 == 1 {
            Some(((self.value >> pos) & 1) as u8)
        } else {
            None
        }
    }

    /// Predicted component indices, ascending.
    pub fn predicted_js(&self) -> Vec<u8> {
        (1..=self.width).filter(|&j| self.at_j(j).is_some()).collect()
    }

    /// One concrete member of the Omega-set, with `*` positions taken from
    /// `filler` (zeros give the default concretization).
    pub fn concretize(&self, filler: BitWord) -> BitWord {
        debug_assert_eq!(filler.width(), self.width);
        BitWord { bits: self.value | (filler.bits() & !self.care), width: self.width }
    }

    /// Trit string in component order, e.g. `01**1***` (leftmost = j = 1).
    pub fn to_trit_string(&self) -> String {
        (1..=self.width)
            .map(|j| match self.at_j(j) {
                Some(0) => '0',
                Some(_) => '1',
                None => '*',
            })
            .collect()
    }

    /// Parse a trit string (leftmost character is component `j = 1`).
    pub fn from_trit_string(s: &str) -> Result<Self> {
        let width = s.len();
        if width == 0 || width > 64 {
            return Err(Error::BadWidth(width as u8));
        }
        let mut care = 0u64;
        let mut value = 0u64;
        for (idx, c) in s.chars().enumerate() {
            let pos = width - 1 - idx;
            match c {
                '*' => {}
                '0' => care |= 1 << pos,
                '1' => {
                    care |= 1 << pos;
                    value |= 1 << pos;
                }
                _ => return Err(Error::BadParam("trit string must contain only 0, 1, *")),
            }
        }
        Ok(Self { care, value, width: width as u8 })
    }
}

impl fmt::Debug for TruncatedDifference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_trit_string())
    }
}

impl fmt::Display for TruncatedDifference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_trit_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_basics() {
        let a = BitWord::of(0b0101, 4);
        let b = BitWord::of(0b0011, 4);
        assert_eq!(a.xor(b).unwrap().bits(), 0b0110);
        assert_eq!(a.dot(b).unwrap(), 1); // overlap = one bit
        assert_eq!(a.dot(a).unwrap(), 0); // two bits set
        assert!(BitWord::of(0b1010, 4).xor(BitWord::of(1, 3)).is_err());
    }

    #[test]
    fn width_masking() {
        let w = BitWord::new(0xFFFF, 8).unwrap();
        assert_eq!(w.bits(), 0xFF);
        assert!(BitWord::new(0, 0).is_err());
        assert!(BitWord::new(0, 65).is_err());
        let full = BitWord::new(u64::MAX, 64).unwrap();
        assert_eq!(full.bits(), u64::MAX);
    }

    #[test]
    fn j_indexing_is_msb_first() {
        // j = 1 is the most significant bit.
        let w = BitWord::of(0b1000_0000, 8);
        assert_eq!(w.bit_j(1), 1);
        assert_eq!(w.bit_j(8), 0);
        assert_eq!(BitWord::pos_of_j(8, 1), 7);
    }

    #[test]
    fn rotl_wraps() {
        let w = BitWord::of(0x80, 8);
        assert_eq!(w.rotl(1).bits(), 0x01);
        assert_eq!(BitWord::of(0xC5, 8).rotl(2).bits(), 0x17);
        assert_eq!(w.rotl(8).bits(), 0x80);
    }

    #[test]
    fn concat_and_split() {
        let x = BitWord::of(0xAB, 8);
        let k = BitWord::of(0xCD, 8);
        let z = x.concat(k).unwrap();
        assert_eq!(z.bits(), 0xABCD);
        assert_eq!(z.width(), 16);
        assert_eq!(z.high(8), x);
        assert_eq!(z.low(8), k);
    }

    #[test]
    fn trit_roundtrip_and_matching() {
        let td = TruncatedDifference::from_trit_string("01**1***").unwrap();
        assert_eq!(td.d(), 3);
        assert_eq!(td.to_trit_string(), "01**1***");
        assert_eq!(td.at_j(1), Some(0));
        assert_eq!(td.at_j(2), Some(1));
        assert_eq!(td.at_j(3), None);
        assert_eq!(td.at_j(5), Some(1));
        // 01xx1xxx as bits (MSB first): matches 0b0100_1000 and 0b0111_1111
        assert!(td.matches(BitWord::of(0b0100_1000, 8)));
        assert!(td.matches(BitWord::of(0b0111_1111, 8)));
        assert!(!td.matches(BitWord::of(0b1100_1000, 8)));
        assert!(!td.matches(BitWord::of(0b0100_0000, 8)));
    }

    #[test]
    fn all_star_matches_everything() {
        let td = TruncatedDifference::all_star(8);
        assert_eq!(td.d(), 0);
        for w in BitWord::all(8) {
            assert!(td.matches(w));
        }
    }

    #[test]
    fn concrete_matches_only_itself() {
        let w = BitWord::of(0x5A, 8);
        let td = TruncatedDifference::concrete(w);
        assert_eq!(td.d(), 8);
        assert_eq!(BitWord::all(8).filter(|&v| td.matches(v)).count(), 1);
        assert!(td.matches(w));
    }

    #[test]
    fn concretize_fills_only_stars() {
        let td = TruncatedDifference::from_trit_string("1**0").unwrap();
        let filled = td.concretize(BitWord::of(0b0110, 4));
        assert_eq!(filled.bits(), 0b1110);
        assert!(td.matches(filled));
    }

    #[test]
    fn predictions_builder() {
        let td = TruncatedDifference::from_predictions(8, &[(1, 0), (5, 1)]).unwrap();
        assert_eq!(td.to_trit_string(), "0***1***");
        assert_eq!(td.predicted_js(), alloc::vec![1, 5]);
    }
}
