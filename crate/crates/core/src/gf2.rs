//! Bit-packed linear algebra over GF(2).
//!
//! Vectors and matrices are immutable values; every operation returns a fresh
//! result. Elimination pivots on the first set bit in deterministic column
//! order, so pivots (and therefore failures) are reproducible.

use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: {op} expects {expected}, got {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular over GF(2) (rank {rank} < {dim})")]
    SingularMatrix { rank: usize, dim: usize },
}

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A fixed-length vector over GF(2). Bits beyond `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut words = vec![0u64; words_for(len)];
        for i in 0..len {
            if f(i) {
                words[i / WORD] |= 1 << (i % WORD);
            }
        }
        Self { len, words }
    }

    /// Builds a vector from 0/1 entries; any non-zero entry counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self::from_fn(bits.len(), |i| bits[i] != 0)
    }

    /// Builds a vector from packed little-endian words, clearing bits past `len`.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { len, words }
    }

    /// Vector with exactly one set bit.
    pub fn unit(len: usize, index: usize) -> Self {
        Self::from_fn(len, |i| i == index)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// # Panics
    /// Panics if `i >= len`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &Self) -> Result<bool, Gf2Error> {
        self.check_len("dot", other)?;
        Ok(self.dot_unchecked(other))
    }

    #[inline]
    pub(crate) fn dot_unchecked(&self, other: &Self) -> bool {
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Componentwise sum mod 2.
    pub fn xor(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.check_len("xor", other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Ok(Self {
            len: self.len,
            words,
        })
    }

    pub fn and(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.check_len("and", other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Ok(Self {
            len: self.len,
            words,
        })
    }

    /// Copy with bit `i` flipped.
    pub fn with_flipped(&self, i: usize) -> Self {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mut out = self.clone();
        out.words[i / WORD] ^= 1 << (i % WORD);
        out
    }

    /// Bits `start..start + len` as a new vector.
    ///
    /// # Panics
    /// Panics if the range exceeds the vector.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(
            start + len <= self.len,
            "slice {start}..{} out of range (len={})",
            start + len,
            self.len
        );
        let mut words = vec![0u64; words_for(len)];
        let shift = start % WORD;
        let first = start / WORD;
        for (w, out) in words.iter_mut().enumerate() {
            let lo = self.words.get(first + w).copied().unwrap_or(0) >> shift;
            let hi = if shift == 0 {
                0
            } else {
                self.words.get(first + w + 1).copied().unwrap_or(0) << (WORD - shift)
            };
            *out = lo | hi;
        }
        Self::from_words(len, words)
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Self {
        Self::from_fn(self.len + other.len, |i| {
            if i < self.len {
                self.get(i)
            } else {
                other.get(i - self.len)
            }
        })
    }

    fn check_len(&self, op: &'static str, other: &Self) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::DimensionMismatch {
                op,
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{self}]")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2), stored row-major with each row word-aligned.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.words[i * m.stride + j / WORD] |= 1 << (j % WORD);
                }
            }
        }
        m
    }

    /// Stacks row vectors; all must share one length. An empty list gives a 0x0 matrix.
    pub fn from_rows(rows: &[BitVec]) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, BitVec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Gf2Error::DimensionMismatch {
                    op: "from_rows",
                    expected: cols,
                    found: r.len(),
                });
            }
            m.words[i * m.stride..(i + 1) * m.stride].copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Builds a matrix from 0/1 rows.
    ///
    /// # Panics
    /// Panics if the rows are ragged.
    pub fn from_bit_rows(rows: &[&[u8]]) -> Self {
        let vecs: Vec<BitVec> = rows.iter().map(|r| BitVec::from_bits(r)).collect();
        Self::from_rows(&vecs).expect("ragged rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of range");
        (self.words[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(i).to_vec())
    }

    pub fn column(&self, j: usize) -> BitVec {
        BitVec::from_fn(self.rows, |i| self.get(i, j))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Rows `r0..r0 + rows`, columns `c0..c0 + cols`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "submatrix out of range");
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            let r = self.row(r0 + i).slice(c0, cols);
            out.words[i * out.stride..(i + 1) * out.stride].copy_from_slice(r.words());
        }
        out
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    /// `M · v` with `v` a column vector.
    pub fn mat_vec_mul(&self, v: &BitVec) -> Result<BitVec, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                op: "mat_vec_mul",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(BitVec::from_fn(self.rows, |i| {
            self.row_words(i)
                .iter()
                .zip(v.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>()
                & 1
                == 1
        }))
    }

    /// `v · M` with `v` a row vector.
    pub fn vec_mat_mul(&self, v: &BitVec) -> Result<BitVec, Gf2Error> {
        if v.len() != self.rows {
            return Err(Gf2Error::DimensionMismatch {
                op: "vec_mat_mul",
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut acc = vec![0u64; self.stride];
        for i in (0..self.rows).filter(|&i| v.get(i)) {
            for (a, w) in acc.iter_mut().zip(self.row_words(i)) {
                *a ^= w;
            }
        }
        Ok(BitVec::from_words(self.cols, acc))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch {
                op: "mul",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let r = other.vec_mat_mul(&self.row(i))?;
            out.words[i * out.stride..(i + 1) * out.stride].copy_from_slice(r.words());
        }
        Ok(out)
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut work = Elimination::new(self.clone(), None);
        work.forward()
    }

    pub fn invert(&self) -> Result<Self, Gf2Error> {
        if !self.is_square() {
            return Err(Gf2Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut work = Elimination::new(self.clone(), Some(Self::identity(self.rows)));
        work.reduce_full()?;
        Ok(work.companion.expect("companion present"))
    }

    /// The unique `x` with `A · x = b`.
    pub fn solve(&self, b: &BitVec) -> Result<BitVec, Gf2Error> {
        if !self.is_square() {
            return Err(Gf2Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if b.len() != self.rows {
            return Err(Gf2Error::DimensionMismatch {
                op: "solve",
                expected: self.rows,
                found: b.len(),
            });
        }
        let rhs = Gf2Matrix::from_fn(self.rows, 1, |i, _| b.get(i));
        let mut work = Elimination::new(self.clone(), Some(rhs));
        work.reduce_full()?;
        Ok(work.companion.expect("companion present").column(0))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.stride {
                self.words.swap(a * self.stride + w, b * self.stride + w);
            }
        }
    }

    /// `row[dst] ^= row[src]`.
    fn add_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (d, sr) = if dst < src {
            let (lo, hi) = self.words.split_at_mut(src * s);
            (&mut lo[dst * s..dst * s + s], &hi[..s])
        } else {
            let (lo, hi) = self.words.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..src * s + s])
        };
        for (x, y) in d.iter_mut().zip(sr) {
            *x ^= y;
        }
    }
}

/// Row-reduction workspace; row operations on `matrix` are mirrored on `companion`.
struct Elimination {
    matrix: Gf2Matrix,
    companion: Option<Gf2Matrix>,
}

impl Elimination {
    fn new(matrix: Gf2Matrix, companion: Option<Gf2Matrix>) -> Self {
        Self { matrix, companion }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.matrix.swap_rows(a, b);
        if let Some(c) = self.companion.as_mut() {
            c.swap_rows(a, b);
        }
    }

    fn add(&mut self, dst: usize, src: usize) {
        self.matrix.add_row(dst, src);
        if let Some(c) = self.companion.as_mut() {
            c.add_row(dst, src);
        }
    }

    fn pivot_row(&self, col: usize, from: usize) -> Option<usize> {
        (from..self.matrix.rows).find(|&r| self.matrix.get(r, col))
    }

    /// Row echelon form; returns the rank.
    fn forward(&mut self) -> usize {
        let mut rank = 0;
        for col in 0..self.matrix.cols {
            if rank == self.matrix.rows {
                break;
            }
            let Some(p) = self.pivot_row(col, rank) else {
                continue;
            };
            self.swap(rank, p);
            for r in rank + 1..self.matrix.rows {
                if self.matrix.get(r, col) {
                    self.add(r, rank);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Gauss-Jordan to the identity; fails on a singular square matrix.
    fn reduce_full(&mut self) -> Result<(), Gf2Error> {
        let n = self.matrix.rows;
        for col in 0..n {
            let Some(p) = self.pivot_row(col, col) else {
                let rank = self.matrix.rank();
                return Err(Gf2Error::SingularMatrix { rank, dim: n });
            };
            self.swap(col, p);
            for r in 0..n {
                if r != col && self.matrix.get(r, col) {
                    self.add(r, col);
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.row(i))?;
        }
        write!(f, "]")
    }
}
