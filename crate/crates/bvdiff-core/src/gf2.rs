//! Exact affine linear algebra over GF(2).
//!
//! Solves systems of the shape `{x . u = i | u in W}` — one shared
//! right-hand bit for every row — and represents the solution set as a
//! particular solution plus a nullspace basis. Rows arrive by the thousand
//! (BV resampling produces heavy duplication) but there are at most 64
//! unknowns, so rows are folded into a reduced echelon basis incrementally.

use crate::bits::BitWord;
use crate::{Error, Result};
use alloc::vec::Vec;

/// The system `{x . u = rhs for all u in rows}` over `unknowns` variables.
///
/// Duplicate and zero rows are accepted silently; they carry no information
/// (a zero row with `rhs = 1` makes the system unsatisfiable, which is a
/// legitimate outcome, not an error).
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub rows: Vec<BitWord>,
    pub rhs: u8,
    pub unknowns: u8,
}

impl LinearSystem {
    pub fn new(rows: Vec<BitWord>, rhs: u8, unknowns: u8) -> Result<Self> {
        if unknowns == 0 || unknowns > 64 {
            return Err(Error::BadWidth(unknowns));
        }
        for row in &rows {
            if row.width() != unknowns {
                return Err(Error::WidthMismatch { left: row.width(), right: unknowns });
            }
        }
        Ok(Self { rows, rhs: rhs & 1, unknowns })
    }

    /// Does `v` satisfy every row equation? Used as the independent
    /// re-check that membership tests must agree with.
    pub fn satisfied_by(&self, v: BitWord) -> Result<bool> {
        for row in &self.rows {
            if v.dot(*row)? != self.rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Solution set of an affine GF(2) system: empty, or a coset
/// `particular + span(basis)` of size `2^basis.len()`.
///
/// The basis is kept in reduced echelon form (each vector owns a distinct
/// leading bit absent from the others), so membership reduction is a few
/// XORs and linear independence holds by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolutionSet {
    empty: bool,
    particular: BitWord,
    basis: Vec<BitWord>,
    unknowns: u8,
}

impl AffineSolutionSet {
    pub fn empty_set(unknowns: u8) -> Self {
        Self { empty: true, particular: BitWord::zero(unknowns), basis: Vec::new(), unknowns }
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn unknowns(&self) -> u8 {
        self.unknowns
    }

    pub fn particular(&self) -> Option<BitWord> {
        (!self.empty).then_some(self.particular)
    }

    pub fn basis(&self) -> &[BitWord] {
        &self.basis
    }

    /// log2 of the set size, when nonempty.
    pub fn dim(&self) -> u8 {
        self.basis.len() as u8
    }

    /// Exact set size; saturates at `u64::MAX` for dim 64.
    pub fn len(&self) -> u64 {
        if self.empty {
            0
        } else if self.dim() >= 64 {
            u64::MAX
        } else {
            1u64 << self.dim()
        }
    }

    /// True iff the set is empty or `{0}` — i.e. it predicts nothing.
    pub fn at_most_zero(&self) -> bool {
        self.empty || (self.basis.is_empty() && self.particular.is_zero())
    }

    /// Exact membership test, equivalent to re-checking the originating
    /// system (that equivalence is asserted by tests, not assumed).
    pub fn member(&self, v: BitWord) -> Result<bool> {
        if v.width() != self.unknowns {
            return Err(Error::WidthMismatch { left: v.width(), right: self.unknowns });
        }
        if self.empty {
            return Ok(false);
        }
        let mut rem = v.xor(self.particular)?.bits();
        for b in &self.basis {
            let lead = 63 - b.bits().leading_zeros();
            if (rem >> lead) & 1 == 1 {
                rem ^= b.bits();
            }
        }
        Ok(rem == 0)
    }

    /// List `min(2^dim, cap)` members in a deterministic Gray-code order
    /// (the particular solution first). Returns the members and whether the
    /// listing was truncated at `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<(Vec<BitWord>, bool)> {
        if cap == 0 {
            return Err(Error::BadParam("enumeration cap must be >= 1"));
        }
        if self.empty {
            return Ok((Vec::new(), false));
        }
        let total = self.len();
        let truncated = total > cap;
        let count = total.min(cap);
        let mut out = Vec::with_capacity(count as usize);
        let mut current = self.particular;
        out.push(current);
        // Gray-code walk: between step i-1 and i exactly one basis vector
        // toggles, the one at the index of the changed Gray bit.
        for i in 1..count {
            let flipped = (i ^ (i >> 1)) ^ ((i - 1) ^ ((i - 1) >> 1));
            let idx = flipped.trailing_zeros() as usize;
            current = current.xor(self.basis[idx])?;
            out.push(current);
        }
        Ok((out, truncated))
    }
}

/// Solve `{x . u = rhs | u in rows}` exactly.
///
/// For `rhs = 0` the result is the nullspace of the row span (never empty:
/// it always contains the zero word). For `rhs = 1` the system may be
/// inconsistent, yielding the empty set.
pub fn solve_affine(system: &LinearSystem) -> Result<AffineSolutionSet> {
    let n = system.unknowns;
    // Echelon rows as (coefficients, rhs bit), pivot on the highest set bit.
    let mut echelon: Vec<(u64, u8)> = Vec::new();
    for row in &system.rows {
        if row.width() != n {
            return Err(Error::WidthMismatch { left: row.width(), right: n });
        }
        let mut coeffs = row.bits();
        let mut rhs = system.rhs;
        for &(e, er) in &echelon {
            let lead = 63 - e.leading_zeros();
            if (coeffs >> lead) & 1 == 1 {
                coeffs ^= e;
                rhs ^= er;
            }
        }
        if coeffs != 0 {
            echelon.push((coeffs, rhs));
            echelon.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        } else if rhs == 1 {
            return Ok(AffineSolutionSet::empty_set(n));
        }
    }
    // Back-substitute to reduced form: clear pivot bits from other rows.
    let pivots: Vec<u32> = echelon.iter().map(|&(e, _)| 63 - e.leading_zeros()).collect();
    for i in 0..echelon.len() {
        for j in 0..echelon.len() {
            if i != j && (echelon[j].0 >> pivots[i]) & 1 == 1 {
                echelon[j].0 ^= echelon[i].0;
                echelon[j].1 ^= echelon[i].1;
            }
        }
    }
    let pivot_mask: u64 = pivots.iter().map(|&p| 1u64 << p).sum();
    // Free variables set to zero: x_pivot = rhs bit of its row.
    let mut particular = 0u64;
    for &(e, er) in &echelon {
        if er == 1 {
            let lead = 63 - e.leading_zeros();
            particular |= 1 << lead;
        }
    }
    // One basis vector per free column: e_c plus the pivot coefficients of c.
    let mut raw: Vec<u64> = Vec::with_capacity(n as usize - echelon.len());
    for c in (0..n as u32).rev() {
        if (pivot_mask >> c) & 1 == 1 {
            continue;
        }
        let mut v = 1u64 << c;
        for &(e, _) in &echelon {
            if (e >> c) & 1 == 1 {
                let lead = 63 - e.leading_zeros();
                v |= 1 << lead;
            }
        }
        raw.push(v);
    }
    // Re-echelonize the basis so every vector owns a distinct leading bit
    // absent from the others; `member` relies on that for its reduction.
    let mut reduced: Vec<u64> = Vec::with_capacity(raw.len());
    for mut v in raw {
        for &e in &reduced {
            let lead = 63 - e.leading_zeros();
            if (v >> lead) & 1 == 1 {
                v ^= e;
            }
        }
        debug_assert_ne!(v, 0, "basis vectors are linearly independent");
        reduced.push(v);
        reduced.sort_unstable_by(|a, b| b.cmp(a));
    }
    for i in 0..reduced.len() {
        let lead = 63 - reduced[i].leading_zeros();
        for j in 0..reduced.len() {
            if i != j && (reduced[j] >> lead) & 1 == 1 {
                reduced[j] ^= reduced[i];
            }
        }
    }
    let basis = reduced.into_iter().map(|v| BitWord::of(v, n)).collect();
    Ok(AffineSolutionSet { empty: false, particular: BitWord::of(particular, n), basis, unknowns: n })
}
