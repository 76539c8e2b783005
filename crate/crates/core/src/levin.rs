//! Levin's base-2 normal number `α = 0.α_1 α_2 …`, digit by digit.
//!
//! Block `m >= 1` holds `2^m · 2^{2^m}` digits starting after position `n_m`.
//! Inside a block the digit at offset `2^m·n + k` is `d_k(n)`, the GF(2) inner
//! product of Pascal row `k` with the binary digits of the counter `n`.
//! Positions are 1-based, offsets into `α` (the `n` of `{2^n α}`) are 0-based.

use std::io::{self, Write};
use std::ops::Range;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::pascal::pascal_entry;
use crate::scalar::Scalar;

/// Widest truncation supported for points.
pub const MAX_PRECISION: u32 = 64;
/// Blocks addressable by default.
pub const DEFAULT_MAX_BLOCK: u32 = 5;
/// Largest block any [`LevinNumber`] can address (`n_7` still fits in `u128`).
pub const MAX_ADDRESSABLE_BLOCK: u32 = 6;
/// Blocks `1..=CACHED_BLOCKS` are kept as a bitmap.
pub const CACHED_BLOCKS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LevinError {
    #[error("digit position {position} is beyond the addressable range 1..={limit}")]
    IndexBeyondRange { position: u128, limit: u128 },
    #[error("precision {0} is outside 1..={MAX_PRECISION}")]
    Precision(u32),
    #[error("block {m} is not addressable (supported: 1..={max})")]
    BlockOutOfRange { m: u32, max: u32 },
    #[error("digit positions start at 1")]
    ZeroPosition,
}

/// `n_m = Σ_{j=1}^{m-1} 2^j · 2^{2^j}`, exactly.
pub fn block_start(m: u32) -> BigUint {
    assert!(m >= 1, "blocks are numbered from 1");
    (1..m).map(block_len).sum()
}

/// `2^m · 2^{2^m}`, the number of digits in block `m`.
pub fn block_len(m: u32) -> BigUint {
    BigUint::one() << (m as u64 + (1u64 << m))
}

/// `n_m` for `m <= 7` as a `u128`.
pub fn block_start_u128(m: u32) -> Option<u128> {
    if !(1..=7).contains(&m) {
        return None;
    }
    Some((1..m).map(|j| 1u128 << (j + (1u32 << j))).sum())
}

/// Decomposition of a digit position: `absolute = n_m + 2^m·n + k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPosition {
    pub m: u32,
    pub n: BigUint,
    pub k: u64,
}

/// A 1-based digit position of `α`, of arbitrary size.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LevinIndex {
    absolute: BigUint,
}

impl LevinIndex {
    pub fn new(absolute: impl Into<BigUint>) -> Result<Self, LevinError> {
        let absolute = absolute.into();
        if absolute.is_zero() {
            return Err(LevinError::ZeroPosition);
        }
        Ok(Self { absolute })
    }

    pub fn compose(m: u32, n: &BigUint, k: u64) -> Self {
        assert!(m >= 1 && k < (1u64 << m), "k must be below 2^m");
        assert!(n.bits() <= 1u64 << m, "n must be below 2^(2^m)");
        let absolute = block_start(m) + (n << m as usize) + k + 1u32;
        Self { absolute }
    }

    pub fn absolute(&self) -> &BigUint {
        &self.absolute
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.absolute.to_u128()
    }

    pub fn decompose(&self) -> BlockPosition {
        let mut m = 1u32;
        let mut start = BigUint::zero();
        loop {
            let next = &start + block_len(m);
            if self.absolute <= next {
                let offset = &self.absolute - &start - 1u32;
                let k = (&offset & BigUint::from((1u64 << m) - 1)).to_u64().expect("k < 2^m");
                return BlockPosition {
                    m,
                    n: offset >> m as usize,
                    k,
                };
            }
            start = next;
            m += 1;
        }
    }
}

/// `numerator / 2^precision` with `numerator < 2^precision`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicFraction {
    numerator: u64,
    precision: u32,
}

impl DyadicFraction {
    pub fn new(numerator: u64, precision: u32) -> Result<Self, LevinError> {
        check_precision(precision)?;
        if precision < 64 && numerator >> precision != 0 {
            return Err(LevinError::Precision(precision));
        }
        Ok(Self { numerator, precision })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Keeps the leading `precision` bits.
    pub fn truncate(&self, precision: u32) -> Self {
        assert!(precision >= 1 && precision <= self.precision);
        Self {
            numerator: self.numerator >> (self.precision - precision),
            precision,
        }
    }

    pub fn value<T: Scalar>(&self) -> T {
        T::from_dyadic(self.numerator as u128, self.precision)
    }
}

fn check_precision(precision: u32) -> Result<(), LevinError> {
    if precision == 0 || precision > MAX_PRECISION {
        return Err(LevinError::Precision(precision));
    }
    Ok(())
}

/// Where a point set came from: `count` consecutive sequence indices from `start`,
/// or a block-local selection.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Origin {
    pub label: String,
    pub start: u128,
    pub count: u64,
}

/// Truncated points sharing one precision, in generation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    precision: u32,
    numerators: Vec<u64>,
    origin: Origin,
}

impl PointSet {
    pub fn new(precision: u32, numerators: Vec<u64>, origin: Origin) -> Result<Self, LevinError> {
        check_precision(precision)?;
        if precision < 64 && numerators.iter().any(|&x| x >> precision != 0) {
            return Err(LevinError::Precision(precision));
        }
        Ok(Self {
            precision,
            numerators,
            origin,
        })
    }

    /// Convenience constructor for ad-hoc sets.
    pub fn from_numerators(precision: u32, numerators: Vec<u64>) -> Result<Self, LevinError> {
        let count = numerators.len() as u64;
        Self::new(
            precision,
            numerators,
            Origin {
                label: "explicit".into(),
                start: 0,
                count,
            },
        )
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn get(&self, i: usize) -> DyadicFraction {
        DyadicFraction {
            numerator: self.numerators[i],
            precision: self.precision,
        }
    }

    /// First `count` points.
    pub fn prefix(&self, count: usize) -> PointSet {
        PointSet {
            precision: self.precision,
            numerators: self.numerators[..count].to_vec(),
            origin: Origin {
                count: count as u64,
                ..self.origin.clone()
            },
        }
    }

    /// Same points truncated to a coarser precision.
    pub fn truncated(&self, precision: u32) -> PointSet {
        assert!(precision >= 1 && precision <= self.precision);
        let shift = self.precision - precision;
        PointSet {
            precision,
            numerators: self.numerators.iter().map(|&x| x >> shift).collect(),
            origin: self.origin.clone(),
        }
    }

    pub fn sorted_numerators(&self) -> Vec<u64> {
        let mut v = self.numerators.clone();
        v.sort_unstable();
        v
    }
}

/// Digit source for `α`, addressable up to block `max_block`.
#[derive(Debug, Clone)]
pub struct LevinNumber {
    max_block: u32,
    /// `n_1, …, n_{max_block+1}`, indexed by `m - 1`.
    starts: Vec<u128>,
    /// `masks[m-1][k]` has bit `j` set iff `p_{k,j} = 1`, for `j < 2^m`.
    masks: Vec<Vec<u64>>,
    /// Digits of blocks `1..=CACHED_BLOCKS`, bit `pos-1` in word `(pos-1)/64`.
    cache: Vec<u64>,
    cache_len: u128,
}

impl Default for LevinNumber {
    fn default() -> Self {
        Self::new()
    }
}

impl LevinNumber {
    pub fn new() -> Self {
        Self::with_max_block(DEFAULT_MAX_BLOCK).expect("default block range is valid")
    }

    pub fn with_max_block(max_block: u32) -> Result<Self, LevinError> {
        if !(1..=MAX_ADDRESSABLE_BLOCK).contains(&max_block) {
            return Err(LevinError::BlockOutOfRange {
                m: max_block,
                max: MAX_ADDRESSABLE_BLOCK,
            });
        }
        let starts = (1..=max_block + 1).map(|m| block_start_u128(m).unwrap()).collect();
        let masks = (1..=max_block)
            .map(|m| {
                (0..1u64 << m)
                    .map(|k| (0..1u64 << m).filter(|&j| pascal_entry(k, j)).fold(0u64, |acc, j| acc | 1 << j))
                    .collect()
            })
            .collect();
        let mut levin = Self {
            max_block,
            starts,
            masks,
            cache: Vec::new(),
            cache_len: 0,
        };
        let cached_end = levin.starts[(CACHED_BLOCKS.min(max_block)) as usize];
        let mut cache = vec![0u64; (cached_end as usize).div_ceil(64)];
        for pos in 1..=cached_end {
            if levin.computed_digit(pos) {
                let i = (pos - 1) as usize;
                cache[i / 64] |= 1 << (i % 64);
            }
        }
        levin.cache = cache;
        levin.cache_len = cached_end;
        Ok(levin)
    }

    pub fn max_block(&self) -> u32 {
        self.max_block
    }

    /// Last addressable position, `n_{max_block+1}`.
    pub fn digit_limit(&self) -> u128 {
        self.starts[self.max_block as usize]
    }

    /// `n_m` for an addressable block.
    pub fn block_offset(&self, m: u32) -> Result<u128, LevinError> {
        if m == 0 || m > self.max_block + 1 {
            return Err(LevinError::BlockOutOfRange { m, max: self.max_block });
        }
        Ok(self.starts[m as usize - 1])
    }

    fn computed_digit(&self, pos: u128) -> bool {
        let m = self.starts.partition_point(|&s| s < pos) as u32;
        let offset = pos - self.starts[m as usize - 1] - 1;
        let n = (offset >> m) as u64;
        let k = (offset & ((1u128 << m) - 1)) as usize;
        (n & self.masks[m as usize - 1][k]).count_ones() & 1 == 1
    }

    /// `α_pos` for `1 <= pos <= digit_limit()`.
    pub fn digit(&self, pos: u128) -> Result<bool, LevinError> {
        if pos == 0 {
            return Err(LevinError::ZeroPosition);
        }
        self.check_end(pos)?;
        Ok(self.digit_unchecked(pos))
    }

    #[inline]
    fn digit_unchecked(&self, pos: u128) -> bool {
        if pos <= self.cache_len {
            let i = (pos - 1) as usize;
            self.cache[i / 64] >> (i % 64) & 1 == 1
        } else {
            self.computed_digit(pos)
        }
    }

    pub fn digit_at(&self, idx: &LevinIndex) -> Result<bool, LevinError> {
        let pos = idx.to_u128().ok_or(LevinError::IndexBeyondRange {
            position: u128::MAX,
            limit: self.digit_limit(),
        })?;
        self.digit(pos)
    }

    /// `d_k(n)` in block `m`.
    pub fn block_digit(&self, m: u32, n: u64, k: u64) -> Result<bool, LevinError> {
        if m == 0 || m > self.max_block {
            return Err(LevinError::BlockOutOfRange { m, max: self.max_block });
        }
        assert!(k < 1 << m && (m == 6 || n < 1u64 << (1u32 << m)));
        Ok((n & self.masks[m as usize - 1][k as usize]).count_ones() & 1 == 1)
    }

    fn check_end(&self, last: u128) -> Result<(), LevinError> {
        if last > self.digit_limit() {
            return Err(LevinError::IndexBeyondRange {
                position: last,
                limit: self.digit_limit(),
            });
        }
        Ok(())
    }

    /// Truncation of `{2^n α}` to `precision` bits: digits `α_{n+1} … α_{n+precision}`.
    pub fn point(&self, n: u128, precision: u32) -> Result<DyadicFraction, LevinError> {
        check_precision(precision)?;
        self.check_end(n + precision as u128)?;
        let numerator = (1..=precision as u128).fold(0u64, |acc, j| acc << 1 | self.digit_unchecked(n + j) as u64);
        Ok(DyadicFraction { numerator, precision })
    }

    /// Calls `visit(i, numerator)` for the truncations of `{2^{start+i} α}`, `i < count`.
    pub fn for_each_point(
        &self,
        start: u128,
        count: u64,
        precision: u32,
        mut visit: impl FnMut(u64, u64),
    ) -> Result<(), LevinError> {
        check_precision(precision)?;
        if count == 0 {
            return Ok(());
        }
        self.check_end(start + count as u128 - 1 + precision as u128)?;
        let mask = if precision == 64 { u64::MAX } else { (1u64 << precision) - 1 };
        let mut window = self.point(start, precision)?.numerator;
        visit(0, window);
        for i in 1..count {
            let next = self.digit_unchecked(start + i as u128 + precision as u128);
            window = (window << 1 | next as u64) & mask;
            visit(i, window);
        }
        Ok(())
    }

    /// Truncations of `{2^n α}` for `n = start, …, start + count - 1`.
    pub fn points(&self, start: u128, count: u64, precision: u32) -> Result<PointSet, LevinError> {
        let mut numerators = Vec::with_capacity(count as usize);
        self.for_each_point(start, count, precision, |_, x| numerators.push(x))?;
        Ok(PointSet {
            precision,
            numerators,
            origin: Origin {
                label: "levin".into(),
                start,
                count,
            },
        })
    }

    /// Points `x_{n,k} = {2^{n_m + 2^m n + k} α}` in lexicographic `(n, k)` order.
    pub fn block_points(
        &self,
        m: u32,
        n_range: Range<u64>,
        k_range: Range<u64>,
        precision: u32,
    ) -> Result<PointSet, LevinError> {
        check_precision(precision)?;
        let base = self.block_offset(m)?;
        let width = k_range.end.saturating_sub(k_range.start);
        assert!(k_range.end <= 1 << m, "k must stay below 2^m");
        let count = n_range.end.saturating_sub(n_range.start) * width;
        let mut numerators = Vec::with_capacity(count as usize);
        if count > 0 {
            let last_n = (n_range.end - 1) as u128;
            self.check_end(base + (last_n << m) + k_range.end as u128 - 1 + precision as u128)?;
        }
        for n in n_range.clone() {
            let start = base + ((n as u128) << m) + k_range.start as u128;
            self.for_each_point(start, width, precision, |_, x| numerators.push(x))?;
        }
        Ok(PointSet {
            precision,
            numerators,
            origin: Origin {
                label: format!("levin block {m}, n in {}..{}, k in {}..{}", n_range.start, n_range.end, k_range.start, k_range.end),
                start: base + ((n_range.start as u128) << m) + k_range.start as u128,
                count,
            },
        })
    }

    /// Writes digits `α_start … α_{start+count-1}` packed 8 per byte, most significant first.
    pub fn write_packed_digits(&self, out: &mut impl Write, start: u128, count: u64) -> io::Result<()> {
        if start == 0 {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, LevinError::ZeroPosition));
        }
        if count > 0 {
            self.check_end(start + count as u128 - 1)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
        }
        let mut buf = Vec::with_capacity(1 << 16);
        let mut byte = 0u8;
        for i in 0..count {
            byte = byte << 1 | self.digit_unchecked(start + i as u128) as u8;
            if i % 8 == 7 {
                buf.push(byte);
                byte = 0;
                if buf.len() == buf.capacity() {
                    out.write_all(&buf)?;
                    buf.clear();
                }
            }
        }
        if !count.is_multiple_of(8) {
            buf.push(byte << (8 - count % 8));
        }
        out.write_all(&buf)
    }
}

/// The `idx`-th binary digit (1-based) of `0.(1)(10)(11)(100)…`.
pub fn champernowne_digit(idx: u128) -> bool {
    assert!(idx >= 1, "digit positions start at 1");
    let mut rest = idx - 1;
    let mut width = 1u32;
    loop {
        let group = (width as u128) << (width - 1);
        if rest < group {
            let value = (1u128 << (width - 1)) + rest / width as u128;
            let bit = width - 1 - (rest % width as u128) as u32;
            return value >> bit & 1 == 1;
        }
        rest -= group;
        width += 1;
    }
}

/// Truncations of `{2^n c}` for the binary Champernowne constant `c`.
pub fn champernowne_points(start: u128, count: u64, precision: u32) -> Result<PointSet, LevinError> {
    check_precision(precision)?;
    let mask = if precision == 64 { u64::MAX } else { (1u64 << precision) - 1 };
    let mut window = (1..=precision as u128).fold(0u64, |acc, j| acc << 1 | champernowne_digit(start + j) as u64);
    let mut numerators = Vec::with_capacity(count as usize);
    for i in 0..count {
        if i > 0 {
            window = (window << 1 | champernowne_digit(start + i as u128 + precision as u128) as u64) & mask;
        }
        numerators.push(window);
    }
    Ok(PointSet {
        precision,
        numerators,
        origin: Origin {
            label: "champernowne".into(),
            start,
            count,
        },
    })
}

/// Truncated base-2 radical inverse of `n`.
pub fn van_der_corput(n: u64, precision: u32) -> u64 {
    assert!((1..=64).contains(&precision));
    n.reverse_bits() >> (64 - precision)
}

/// First `count` van der Corput points.
pub fn van_der_corput_points(count: u64, precision: u32) -> Result<PointSet, LevinError> {
    check_precision(precision)?;
    Ok(PointSet {
        precision,
        numerators: (0..count).map(|n| van_der_corput(n, precision)).collect(),
        origin: Origin {
            label: "van der corput".into(),
            start: 0,
            count,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn shared() -> &'static LevinNumber {
        static LEVIN: OnceLock<LevinNumber> = OnceLock::new();
        LEVIN.get_or_init(LevinNumber::new)
    }

    #[test]
    fn block_starts() {
        assert_eq!(block_start(1), BigUint::zero());
        assert_eq!(block_start(2), BigUint::from(8u32));
        assert_eq!(block_start(3), BigUint::from(72u32));
        assert_eq!(block_start(4), BigUint::from(2120u32));
        assert_eq!(block_start(5), BigUint::from(1_050_696u32));
        for m in 1..=7 {
            assert_eq!(BigUint::from(block_start_u128(m).unwrap()), block_start(m));
            assert_eq!(block_start(m + 1), block_start(m) + block_len(m));
        }
        assert!(block_start_u128(8).is_none());
        assert!(block_start(8) > BigUint::from(u128::MAX));
    }

    #[test]
    fn first_digits() {
        let a = LevinNumber::new();
        let d: Vec<u8> = (1..=8).map(|p| a.digit(p).unwrap() as u8).collect();
        assert_eq!(d, [0, 0, 1, 1, 1, 0, 0, 1]);
        for p in 9..=12 {
            assert!(!a.digit(p).unwrap());
        }
        for m in 1..=5 {
            assert!(!a.digit(a.block_offset(m).unwrap() + 1).unwrap());
        }
        assert!(matches!(a.digit(0), Err(LevinError::ZeroPosition)));
    }

    #[test]
    fn digit_range_limits() {
        let a = LevinNumber::new();
        let limit = block_start_u128(6).unwrap();
        assert_eq!(a.digit_limit(), limit);
        assert!(a.digit(limit).is_ok());
        assert!(matches!(a.digit(limit + 1), Err(LevinError::IndexBeyondRange { .. })));
        let wide = LevinNumber::with_max_block(6).unwrap();
        assert!(wide.digit(limit + 1).is_ok());
        assert!(LevinNumber::with_max_block(7).is_err());
    }

    #[test]
    fn cache_agrees_with_computed_digits() {
        let a = LevinNumber::new();
        for pos in (1..=a.cache_len).step_by(97) {
            assert_eq!(a.digit(pos).unwrap(), a.computed_digit(pos));
        }
    }

    #[test]
    fn index_decomposition() {
        let idx = LevinIndex::new(9u32).unwrap();
        let p = idx.decompose();
        assert_eq!((p.m, p.n, p.k), (2, BigUint::zero(), 0));
        let idx = LevinIndex::new(72u32).unwrap();
        let p = idx.decompose();
        assert_eq!((p.m, p.n.clone(), p.k), (2, BigUint::from(15u32), 3));
        assert_eq!(LevinIndex::compose(p.m, &p.n, p.k), idx);
        let far = LevinIndex::new(block_start(9)).unwrap().decompose();
        assert_eq!((far.m, far.k), (8, 255));
        assert!(LevinIndex::new(0u32).is_err());
    }

    #[test]
    fn point_examples() {
        let a = LevinNumber::new();
        assert_eq!(a.point(0, 8).unwrap().numerator(), 57);
        assert_eq!(a.point(0, 1).unwrap().numerator(), 0);
        assert_eq!(a.point(2, 3).unwrap().numerator(), 7);
        assert!(a.point(0, 0).is_err());
        assert!(a.point(0, 65).is_err());
    }

    #[test]
    fn block_point_examples() {
        let a = LevinNumber::new();
        let s = a.block_points(1, 0..4, 0..2, 2).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.numerators()[0], 0);
        assert!(a.block_points(1, 0..0, 0..2, 2).unwrap().is_empty());
        assert_eq!(a.block_points(2, 0..16, 0..4, 4).unwrap().len(), 64);
        let direct = a.points(8, 64, 4).unwrap();
        assert_eq!(a.block_points(2, 0..16, 0..4, 4).unwrap().numerators(), direct.numerators());
    }

    #[test]
    fn block_digits_match_positions() {
        let a = LevinNumber::with_max_block(6).unwrap();
        for m in 1..=6u32 {
            let base = a.block_offset(m).unwrap();
            let n_limit = 1u64 << (1u32 << m).min(63);
            for (n, k) in [(0u64, 0u64), (1, 1), (5 % n_limit, 1), (12345 % n_limit, (1 << m) - 1)] {
                let pos = base + ((n as u128) << m) + k as u128 + 1;
                assert_eq!(a.digit(pos).unwrap(), a.block_digit(m, n, k).unwrap());
            }
        }
    }

    #[test]
    fn champernowne_examples() {
        let d: Vec<u8> = (1..=6).map(|i| champernowne_digit(i) as u8).collect();
        assert_eq!(d, [1, 1, 0, 1, 1, 1]);
        // "100" occupies positions 6..=8, "101" starts at 9
        assert!(!champernowne_digit(7));
        assert!(!champernowne_digit(8));
        assert!(champernowne_digit(9));
        let s = champernowne_points(0, 3, 4).unwrap();
        assert_eq!(s.numerators(), &[0b1101, 0b1011, 0b0111]);
    }

    #[test]
    fn van_der_corput_examples() {
        assert_eq!(van_der_corput(1, 3), 0b100);
        assert_eq!(van_der_corput(6, 3), 0b011);
        let s = van_der_corput_points(8, 3).unwrap();
        let mut sorted = s.sorted_numerators();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
    }

    #[test]
    fn packed_dump() {
        let a = LevinNumber::new();
        let mut buf = Vec::new();
        a.write_packed_digits(&mut buf, 1, 12).unwrap();
        assert_eq!(buf, [0b0011_1001, 0b0000_0000]);
    }

    proptest! {
        #[test]
        fn window_consistency(n in 0u128..2_000_000, p1 in 1u32..=32, extra in 0u32..=32) {
            let a = shared();
            let p2 = p1 + extra;
            let coarse = a.point(n, p1).unwrap();
            let fine = a.point(n, p2).unwrap();
            prop_assert_eq!(fine.truncate(p1), coarse);
        }

        #[test]
        fn shift_law(n in 0u128..2_000_000, p in 2u32..=40) {
            let a = shared();
            let here = a.point(n, p).unwrap().numerator();
            let next = a.point(n + 1, p - 1).unwrap().numerator();
            prop_assert_eq!(next, here & ((1u64 << (p - 1)) - 1));
        }

        #[test]
        fn rolling_matches_direct(start in 0u128..1_100_000, p in 1u32..=64) {
            let a = shared();
            let s = a.points(start, 40, p).unwrap();
            for (i, &x) in s.numerators().iter().enumerate() {
                prop_assert_eq!(x, a.point(start + i as u128, p).unwrap().numerator());
            }
        }
    }
}
