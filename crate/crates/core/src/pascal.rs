//! The Pascal matrix `P = (binom(i+j, j) mod 2)` and its block identities.
//!
//! Entries are evaluated with the carry-free criterion: `binom(i+j, j)` is odd
//! exactly when `i & j == 0`. [`binomial_exact`] and [`BinomialTable`] compute
//! the same parities from exact big-integer binomials and serve as the
//! independent check for everything here.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::gf2::{BitVec, Gf2Error, Gf2Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PascalError {
    #[error("invalid coordinates k={k}, t={t}, m={m}: {reason}")]
    InvalidCoords {
        k: u64,
        t: u64,
        m: u32,
        reason: &'static str,
    },
    #[error("A_(k={k},t={t}) is singular at m={m} (rank {rank})")]
    RegularityViolation { k: u64, t: u64, m: u32, rank: usize },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("selector with {groups} groups at offset {offset} does not fit in length {len}")]
    SelectorOverflow {
        groups: usize,
        offset: usize,
        len: usize,
    },
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// `p_{i,j} = binom(i+j, j) mod 2`.
#[inline]
pub fn pascal_entry(i: u64, j: u64) -> bool {
    i & j == 0
}

/// `binom(n, r) mod 2`, with `binom(n, r) = 0` for `r < 0` or `r > n`.
#[inline]
pub fn binom_parity(n: i64, r: i64) -> bool {
    if r < 0 || n < 0 || r > n {
        return false;
    }
    r & (n - r) == 0
}

/// Exact `binom(n, r)`; zero when `r > n`.
pub fn binomial_exact(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Exact Pascal triangle rows `0..=n_max`.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<Vec<BigUint>>,
}

impl BinomialTable {
    pub fn new(n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![BigUint::one()]);
        for n in 1..=n_max {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigUint::one());
            for r in 1..n {
                row.push(&prev[r - 1] + &prev[r]);
            }
            row.push(BigUint::one());
            rows.push(row);
        }
        Self { rows }
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `binom(n, r)` with the zero convention outside `0 <= r <= n`.
    pub fn get(&self, n: i64, r: i64) -> BigUint {
        if n < 0 || r < 0 || r > n {
            return BigUint::zero();
        }
        self.rows[n as usize][r as usize].clone()
    }

    pub fn parity(&self, n: i64, r: i64) -> bool {
        if n < 0 || r < 0 || r > n {
            return false;
        }
        self.rows[n as usize][r as usize].bit(0)
    }
}

/// Row `i` of `P` restricted to columns `start..start + len`.
pub fn pascal_row(i: u64, start: u64, len: usize) -> BitVec {
    BitVec::from_fn(len, |j| pascal_entry(i, start + j as u64))
}

/// `xi_t = (binom(t,0), ..., binom(t,t-1)) mod 2`.
pub fn xi(t: u64) -> BitVec {
    BitVec::from_fn(t as usize, |j| binom_parity(t as i64, j as i64))
}

/// The top-left `2^m x 2^m` block of `P`.
pub fn top_left(m: u32) -> Gf2Matrix {
    let n = 1usize << m;
    Gf2Matrix::from_fn(n, n, |i, j| pascal_entry(i as u64, j as u64))
}

/// Checks `A_{m+1} = (A_m A_m / A_m 0)` against the top-left block of `P`.
pub fn is_self_similar(m: u32) -> bool {
    let small = top_left(m);
    let big = top_left(m + 1);
    let h = 1usize << m;
    (0..2 * h).all(|i| {
        (0..2 * h).all(|j| {
            let expected = if i >= h && j >= h { false } else { small.get(i % h, j % h) };
            big.get(i, j) == expected
        })
    })
}

/// Block coordinates `(k, t, m)`: rows `k..k+t` of the `2^m`-column universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct PascalCoords {
    k: u64,
    t: u64,
    m: u32,
}

impl PascalCoords {
    pub fn new(k: u64, t: u64, m: u32) -> Result<Self, PascalError> {
        let invalid = |reason| PascalError::InvalidCoords { k, t, m, reason };
        if m == 0 || m > 40 {
            return Err(invalid("m must lie in 1..=40"));
        }
        let size = 1u64 << m;
        if t == 0 || t > size {
            return Err(invalid("t must satisfy 1 <= t <= 2^m"));
        }
        if k >= size {
            return Err(invalid("k must satisfy k < 2^m"));
        }
        Ok(Self { k, t, m })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn universe(&self) -> u64 {
        1u64 << self.m
    }

    fn require_block(&self) -> Result<(), PascalError> {
        if self.k + self.t > self.universe() {
            return Err(PascalError::InvalidCoords {
                k: self.k,
                t: self.t,
                m: self.m,
                reason: "block extraction needs k + t <= 2^m",
            });
        }
        Ok(())
    }

    fn require_strict(&self) -> Result<(), PascalError> {
        if self.k + self.t >= self.universe() {
            return Err(PascalError::InvalidCoords {
                k: self.k,
                t: self.t,
                m: self.m,
                reason: "needs k + t < 2^m",
            });
        }
        Ok(())
    }
}

/// `A_{k,t}`, `B_{k,t}`, `c_{k+t,t}`, `d_{k+t,t}` and `xi_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PascalBlocks {
    pub a: Gf2Matrix,
    pub b: Gf2Matrix,
    pub c_row: BitVec,
    pub d_row: BitVec,
    pub xi: BitVec,
}

/// Extracts the blocks and checks that `A_{k,t}` is regular.
pub fn submatrices(coords: &PascalCoords) -> Result<PascalBlocks, PascalError> {
    coords.require_block()?;
    let (k, t, size) = (coords.k, coords.t as usize, coords.universe() as usize);
    let a = Gf2Matrix::from_fn(t, t, |r, c| pascal_entry(k + r as u64, c as u64));
    let b = Gf2Matrix::from_fn(t, size - t, |r, c| pascal_entry(k + r as u64, (t + c) as u64));
    let rank = a.rank();
    if rank < t {
        return Err(PascalError::RegularityViolation {
            k,
            t: coords.t,
            m: coords.m,
            rank,
        });
    }
    Ok(PascalBlocks {
        a,
        b,
        c_row: pascal_row(k + t as u64, 0, t),
        d_row: pascal_row(k + t as u64, t as u64, size - t),
        xi: xi(coords.t),
    })
}

/// Outcome of checking both block identities linking `c`, `d` to `xi`, `A`, `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockIdentityCheck {
    /// `c_{k+t,t} = xi_t · A_{k,t}`
    pub row_identity: bool,
    /// `d_{k+t,t} = xi_t · B_{k,t} + (p_{k+t,0}, ..., p_{k+t,2^m-t-1})`
    pub tail_identity: bool,
}

/// Both identities for one `(k, t)` with `k + t <= 2^m - 1`.
///
/// The correction row in the second identity has entries
/// `binom(k+l, l-t) = p_{k+t, l-t}` for `l = t..2^m`.
pub fn block_identities(coords: &PascalCoords) -> Result<BlockIdentityCheck, PascalError> {
    coords.require_strict()?;
    let blocks = submatrices(coords)?;
    let row_identity = blocks.a.vec_mat_mul(&blocks.xi)? == blocks.c_row;
    let width = (coords.universe() - coords.t) as usize;
    let correction = pascal_row(coords.k + coords.t, 0, width);
    let tail = blocks.b.vec_mat_mul(&blocks.xi)?.xor(&correction)?;
    Ok(BlockIdentityCheck {
        row_identity,
        tail_identity: tail == blocks.d_row,
    })
}

/// Both sides of `sum_{j=0}^t binom(t,j) binom(k+l+j,l) = binom(k+l, l-t)` mod 2.
pub fn verify_sum_identity(t: u64, k: u64, l: u64) -> (bool, bool) {
    let lhs = weighted_sum(t, k, l, t);
    let rhs = binom_parity((k + l) as i64, l as i64 - t as i64);
    (lhs, rhs)
}

/// `sum_{j=0}^{upper} binom(t,j) binom(k+l+j, l)` mod 2.
fn weighted_sum(t: u64, k: u64, l: u64, upper: u64) -> bool {
    (0..=upper)
        .filter(|&j| binom_parity(t as i64, j as i64) && binom_parity((k + l + j) as i64, l as i64))
        .count()
        % 2
        == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum CorollaryItem {
    /// full sum vanishes for `l < t`
    A,
    /// truncated sum equals `binom(k+l+t, l)` for `l < t`
    B,
    /// truncated sum equals `binom(k+l+t, l) + binom(k+l, l-t)` for all `l`
    C,
}

/// Both sides of one item of the corollary to the weighted-sum identity.
pub fn verify_corollary(t: u64, k: u64, l: u64, item: CorollaryItem) -> Result<(bool, bool), PascalError> {
    match item {
        CorollaryItem::A | CorollaryItem::B if l >= t => Err(PascalError::Domain(format!(
            "item {item:?} needs 0 <= l <= t-1, got l={l}, t={t}"
        ))),
        CorollaryItem::A => Ok((weighted_sum(t, k, l, t), false)),
        CorollaryItem::B | CorollaryItem::C if t == 0 => {
            Err(PascalError::Domain("truncated sums need t >= 1".into()))
        }
        CorollaryItem::B => Ok((
            weighted_sum(t, k, l, t - 1),
            binom_parity((k + l + t) as i64, l as i64),
        )),
        CorollaryItem::C => Ok((
            weighted_sum(t, k, l, t - 1),
            binom_parity((k + l + t) as i64, l as i64) ^ binom_parity((k + l) as i64, l as i64 - t as i64),
        )),
    }
}

/// Both sides of `sum_{j=1}^u binom(i+j, j) = binom(i+1+u, u) + 1` mod 2.
pub fn verify_prefix_sum(i: u64, u: u64) -> (bool, bool) {
    let lhs = (1..=u).filter(|&j| pascal_entry(i, j)).count() % 2 == 1;
    let rhs = !binom_parity((i + 1 + u) as i64, u as i64);
    (lhs, rhs)
}

fn check_d_scale(m: u32) -> Result<(), PascalError> {
    if m <= 7 {
        return Err(PascalError::Domain(format!("D_m needs m > 7, got {m}")));
    }
    Ok(())
}

/// Row range `[2^{m-3} - 14·2^{m-7}, 2^{m-3})` and column count `2^{m-7}` of `D_m`.
pub fn d_matrix_shape(m: u32) -> Result<(u64, u64, u64), PascalError> {
    check_d_scale(m)?;
    let hi = 1u64 << (m - 3);
    let lo = hi - 14 * (1u64 << (m - 7));
    Ok((lo, hi, 1u64 << (m - 7)))
}

/// Largest `m` for which `D_m` is materialized.
pub const D_MATRIX_MAX_M: u32 = 13;

/// `D_m = (binom(i+1+j, j) + 1 mod 2)` over the row and column ranges above.
pub fn d_matrix(m: u32) -> Result<Gf2Matrix, PascalError> {
    let (lo, hi, cols) = d_matrix_shape(m)?;
    if m > D_MATRIX_MAX_M {
        return Err(PascalError::Domain(format!(
            "D_m is only materialized for m <= {D_MATRIX_MAX_M}, got {m}"
        )));
    }
    Ok(Gf2Matrix::from_fn((hi - lo) as usize, cols as usize, |r, j| {
        let i = lo + r as u64;
        !binom_parity((i + 1 + j as u64) as i64, j as i64)
    }))
}

/// Ones in column `l` of `D_m`, counted without materializing the matrix.
pub fn d_column_ones(m: u32, l: u64) -> Result<u64, PascalError> {
    let (lo, hi, cols) = d_matrix_shape(m)?;
    if l >= cols {
        return Err(PascalError::Domain(format!("column {l} out of range for D_{m}")));
    }
    Ok((lo..hi).filter(|&i| !binom_parity((i + 1 + l) as i64, l as i64)).count() as u64)
}

/// Enumerated and closed-form ones counts of `D_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnesCount {
    pub m: u32,
    pub rows: u64,
    pub cols: u64,
    /// `None` above [`D_MATRIX_MAX_M`].
    pub enumerated: Option<u64>,
    /// `14·2^{m-7}·2^{m-7}·(1 - (3/4)^{m-7})`
    pub formula: BigRational,
}

impl OnesCount {
    pub fn formula_is_integral(&self) -> bool {
        self.formula.is_integer()
    }

    pub fn agrees(&self) -> Option<bool> {
        self.enumerated
            .map(|e| self.formula == BigRational::from_integer(BigInt::from(e)))
    }
}

/// `14·4^r·(1 - (3/4)^r)` with `r = m - 7`.
pub fn ones_formula(m: u32) -> Result<BigRational, PascalError> {
    check_d_scale(m)?;
    let r = (m - 7) as usize;
    let four_r = BigInt::one() << (2 * r);
    let size = BigRational::from_integer(BigInt::from(14) * &four_r);
    let three_quarters = BigRational::new(BigInt::from(3), BigInt::from(4));
    let fraction = BigRational::one() - num_traits::pow(three_quarters, r);
    Ok(size * fraction)
}

pub fn ones_count(m: u32) -> Result<OnesCount, PascalError> {
    let (lo, hi, cols) = d_matrix_shape(m)?;
    let enumerated = if m <= D_MATRIX_MAX_M {
        Some(d_matrix(m)?.count_ones())
    } else {
        None
    };
    Ok(OnesCount {
        m,
        rows: hi - lo,
        cols,
        enumerated,
        formula: ones_formula(m)?,
    })
}

/// A vector made of 8-bit groups: `offset` copies of `0̄ = (0,…,0)`, then
/// `groups` copies of `1̄ = (1,0,…,0)`, then zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct SelectorVec {
    pub groups: usize,
    pub offset: usize,
}

impl SelectorVec {
    /// The shape used throughout the construction: one `0̄` followed by `groups` copies of `1̄`.
    pub fn leading_zero(groups: usize) -> Self {
        Self { groups, offset: 1 }
    }

    /// Positions of the set bits in the expanded vector.
    pub fn positions(&self) -> impl Iterator<Item = usize> {
        (self.offset..self.offset + self.groups).map(|g| 8 * g)
    }

    /// Expanded vector of length `len`.
    pub fn expand(&self, len: usize) -> Result<BitVec, PascalError> {
        if self.groups > 0 && 8 * (self.offset + self.groups - 1) >= len {
            return Err(PascalError::SelectorOverflow {
                groups: self.groups,
                offset: self.offset,
                len,
            });
        }
        let ones: Vec<usize> = self.positions().collect();
        Ok(BitVec::from_fn(len, |i| ones.binary_search(&i).is_ok()))
    }

    /// Collapsed 0/1 vector of length `len` (one entry per group).
    pub fn collapse(&self, len: usize) -> Result<BitVec, PascalError> {
        if self.offset + self.groups > len {
            return Err(PascalError::SelectorOverflow {
                groups: self.groups,
                offset: self.offset,
                len,
            });
        }
        Ok(BitVec::from_fn(len, |g| g >= self.offset && g < self.offset + self.groups))
    }

    /// Length just large enough to hold the last set bit.
    pub fn minimal_len(&self) -> usize {
        8 * (self.offset + self.groups)
    }
}

/// Both sides of the 8-fold decimation identity for Pascal row `i`.
pub fn verify_decimation(i: u64, selector: &SelectorVec) -> (bool, bool) {
    let wide = selector.minimal_len();
    let expanded = selector.expand(wide).expect("minimal length fits");
    let lhs = pascal_row(i, 0, wide).dot_unchecked(&expanded);
    let narrow = selector.offset + selector.groups;
    let collapsed = selector.collapse(narrow).expect("minimal length fits");
    let rhs = pascal_row(i / 8, 0, narrow).dot_unchecked(&collapsed);
    (lhs, rhs)
}

/// `kappa_t = c_{k+t,t} · A_{k,t}^{-1}`, computed by inversion.
pub fn prop1_kappa(coords: &PascalCoords) -> Result<BitVec, PascalError> {
    coords.require_strict()?;
    let blocks = submatrices(coords)?;
    Ok(blocks.a.invert()?.vec_mat_mul(&blocks.c_row)?)
}

/// `(d - c A^{-1} B) · s` by GF(2) algebra, and `binom(⌊(k+t)/8⌋+1+v, v) + 1` mod 2,
/// where `s` has one `0̄` then `v` copies of `1̄` and length `2^m - t`.
pub fn prop1_value(coords: &PascalCoords, v: usize) -> Result<(bool, bool), PascalError> {
    coords.require_strict()?;
    let width = (coords.universe() - coords.t) as usize;
    let selector = SelectorVec::leading_zero(v).expand(width)?;
    let blocks = submatrices(coords)?;
    let b_s = blocks.b.mat_vec_mul(&selector)?;
    let through_inverse = blocks.a.solve(&b_s)?;
    let algebraic = blocks.c_row.dot(&through_inverse)? ^ blocks.d_row.dot(&selector)?;
    Ok((algebraic, prop1_closed_form(coords.k + coords.t, v as u64)))
}

/// `binom(⌊row/8⌋ + 1 + v, v) + 1 mod 2`.
#[inline]
pub fn prop1_closed_form(row: u64, v: u64) -> bool {
    !binom_parity((row / 8 + 1 + v) as i64, v as i64)
}

/// Largest `v` for which a leading-zero selector fits in `width` columns.
pub fn max_selector_groups(width: u64) -> u64 {
    if width == 0 {
        0
    } else {
        (width - 1) / 8
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn entry_examples() {
        for j in 0..100 {
            assert!(pascal_entry(0, j));
        }
        assert!(!pascal_entry(1, 1));
        for m in 1..=6u32 {
            let n = 1u64 << m;
            for i in 0..n {
                for j in 0..n {
                    if i + j >= n {
                        assert!(!pascal_entry(i, j), "p_({i},{j}) at m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn binom_parity_conventions() {
        assert!(!binom_parity(5, -1));
        assert!(!binom_parity(3, 4));
        assert!(binom_parity(0, 0));
        assert!(binom_parity(7, 3));
        assert!(!binom_parity(6, 3));
    }

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial_exact(10, 3), BigUint::from(120u32));
        assert_eq!(binomial_exact(3, 10), BigUint::zero());
        let table = BinomialTable::new(60);
        for n in 0..=60u64 {
            for r in 0..=n {
                assert_eq!(table.get(n as i64, r as i64), binomial_exact(n, r));
            }
        }
    }

    #[test]
    fn first_blocks_match_display() {
        assert_eq!(top_left(1), Gf2Matrix::from_bit_rows(&[&[1, 1], &[1, 0]]));
        assert_eq!(
            top_left(2),
            Gf2Matrix::from_bit_rows(&[&[1, 1, 1, 1], &[1, 0, 1, 0], &[1, 1, 0, 0], &[1, 0, 0, 0]])
        );
        for m in 0..=8 {
            assert!(is_self_similar(m), "m={m}");
        }
    }

    #[test]
    fn submatrix_examples() {
        let blocks = submatrices(&PascalCoords::new(0, 2, 2).unwrap()).unwrap();
        assert_eq!(blocks.a, Gf2Matrix::from_bit_rows(&[&[1, 1], &[1, 0]]));
        assert_eq!(xi(1), BitVec::from_bits(&[1]));
        for t in (1..200).step_by(2) {
            assert!(xi(t).get(t as usize - 1), "t={t}");
        }
    }

    #[test]
    fn coords_validation() {
        assert!(PascalCoords::new(0, 0, 3).is_err());
        assert!(PascalCoords::new(8, 1, 3).is_err());
        assert!(PascalCoords::new(0, 9, 3).is_err());
        let c = PascalCoords::new(5, 4, 3).unwrap();
        assert!(matches!(submatrices(&c), Err(PascalError::InvalidCoords { .. })));
        assert!(prop1_kappa(&PascalCoords::new(4, 4, 3).unwrap()).is_err());
    }

    #[test]
    fn sum_identity_examples() {
        for k in 0..10 {
            for l in 0..10 {
                let (lhs, rhs) = verify_sum_identity(0, k, l);
                assert_eq!(lhs, binom_parity((k + l) as i64, l as i64));
                assert_eq!(lhs, rhs);
            }
        }
        for t in 1..10 {
            for l in 0..t {
                assert!(!verify_sum_identity(t, 3, l).1);
            }
        }
        assert_eq!(verify_sum_identity(2, 1, 3), (false, false));
    }

    #[test]
    fn corollary_examples_and_domains() {
        assert_eq!(verify_corollary(1, 0, 0, CorollaryItem::B).unwrap(), (true, true));
        let (lhs, rhs) = verify_corollary(3, 2, 5, CorollaryItem::C).unwrap();
        assert_eq!(lhs, rhs);
        assert!(verify_corollary(3, 0, 3, CorollaryItem::A).is_err());
        assert!(verify_corollary(3, 0, 4, CorollaryItem::B).is_err());
        assert!(verify_corollary(0, 0, 4, CorollaryItem::C).is_err());
        for t in 1..12 {
            for l in 0..t {
                assert!(!verify_corollary(t, 4, l, CorollaryItem::A).unwrap().0);
            }
        }
    }

    #[test]
    fn prefix_sum_examples() {
        assert_eq!(verify_prefix_sum(9, 0), (false, false));
        assert_eq!(verify_prefix_sum(0, 1), (true, true));
        let (lhs, rhs) = verify_prefix_sum(5, 7);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_matrix_examples() {
        let d8 = d_matrix(8).unwrap();
        assert_eq!((d8.rows(), d8.cols()), (28, 2));
        assert_eq!(d_matrix(9).map(|d| (d.rows(), d.cols())).unwrap(), (56, 4));
        let c8 = ones_count(8).unwrap();
        assert_eq!(c8.formula, BigRational::from_integer(14.into()));
        assert_eq!(c8.agrees(), Some(true));
        let c9 = ones_count(9).unwrap();
        assert_eq!(c9.formula, BigRational::from_integer(98.into()));
        assert_eq!(c9.enumerated, Some(98));
        assert!(d_matrix(7).is_err());
        assert!(ones_count(3).is_err());
        assert!(d_matrix(14).is_err());
        let c20 = ones_count(20).unwrap();
        assert!(c20.enumerated.is_none() && c20.formula_is_integral());
    }

    #[test]
    fn column_ones_sum_to_total() {
        for m in 8..=11 {
            let total: u64 = (0..1u64 << (m - 7)).map(|l| d_column_ones(m, l).unwrap()).sum();
            assert_eq!(Some(total), ones_count(m).unwrap().enumerated);
        }
    }

    #[test]
    fn decimation_examples() {
        assert_eq!(verify_decimation(77, &SelectorVec::leading_zero(0)), (false, false));
        assert_eq!(verify_decimation(0, &SelectorVec::leading_zero(1)), (true, true));
    }

    #[test]
    fn selector_expansion() {
        let s = SelectorVec::leading_zero(2);
        let e = s.expand(24).unwrap();
        assert_eq!(e.to_string(), "000000001000000010000000");
        assert!(s.expand(16).is_err());
        assert_eq!(s.expand(17).unwrap().count_ones(), 2);
        assert_eq!(s.collapse(4).unwrap().to_string(), "0110");
    }

    #[test]
    fn kappa_examples() {
        for k in 0..31 {
            let c = PascalCoords::new(k, 1, 5).unwrap();
            assert_eq!(prop1_kappa(&c).unwrap(), BitVec::from_bits(&[1]));
        }
        let c = PascalCoords::new(3, 7, 5).unwrap();
        assert_eq!(prop1_kappa(&c).unwrap(), xi(7));
        let a = prop1_kappa(&PascalCoords::new(2, 9, 6).unwrap()).unwrap();
        let b = prop1_kappa(&PascalCoords::new(40, 9, 6).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn prop1_value_examples() {
        let c = PascalCoords::new(4, 5, 6).unwrap();
        assert_eq!(prop1_value(&c, 0).unwrap(), (false, false));
        let (alg, closed) = prop1_value(&PascalCoords::new(2, 3, 5).unwrap(), 2).unwrap();
        assert_eq!(alg, closed);
        assert!(matches!(
            prop1_value(&PascalCoords::new(2, 3, 5).unwrap(), 4),
            Err(PascalError::SelectorOverflow { .. })
        ));
    }

    #[test]
    fn prop1_sweep_m6_odd_t() {
        let m = 6;
        for t in (1..64u64).step_by(2) {
            for k in 0..64 - t {
                let c = PascalCoords::new(k, t, m).unwrap();
                for v in 0..=max_selector_groups(64 - t) as usize {
                    let (alg, closed) = prop1_value(&c, v).unwrap();
                    assert_eq!(alg, closed, "k={k} t={t} v={v}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn lucas_matches_exact(i in 0u64..300, j in 0u64..300) {
            prop_assert_eq!(pascal_entry(i, j), binomial_exact(i + j, j).bit(0));
        }

        #[test]
        fn decimation_random(i in 0u64..4096, groups in 0usize..=16, offset in 0usize..4) {
            let (lhs, rhs) = verify_decimation(i, &SelectorVec { groups, offset });
            prop_assert_eq!(lhs, rhs);
        }
    }
}
