//! The interval-chain construction that overcounts points of `{2^n α}`.
//!
//! Levels `l = 0..=M` use widths `w_0 > w_1 > … > w_M` (odd, spaced by `s`)
//! and counter blocks `ℬ_l = [B_l, B_l + 2^{w_l})` inside digit block `m`. At
//! each level the chain picks a dyadic piece `J_l` of length `1/2` or `3/2`
//! cells of width `2^{-w_l}`, guided by the γ-bit: which half of a cell the
//! point `x_{n,k}` lands in, as a function of `k`.
//!
//! Everything that can be enumerated at a given scale is enumerated; the rest
//! is evaluated in exact closed form and tagged as such.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::discrepancy::{verify_lemma2_with_budget, DiscrepancyError, DyadicInterval, DEFAULT_POINT_BUDGET};
use crate::gf2::{BitVec, Gf2Error};
use crate::levin::{block_start, LevinError, LevinNumber};
use crate::pascal::{
    binom_parity, d_matrix_shape, ones_count, ones_formula, pascal_entry, prop1_closed_form, submatrices, xi,
    PascalCoords, PascalError, D_MATRIX_MAX_M,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("invalid construction parameters: {0}")]
    InvalidParams(String),
    #[error("needs {needed} points but the budget is {budget}")]
    BudgetExceeded { needed: BigUint, budget: u64 },
    #[error("no admissible window: {0}")]
    NoWindowFound(String),
    #[error("U({level}) = {value} is odd")]
    BoundaryParityViolation { level: u32, value: u128 },
    #[error("γ routes disagree at level {level}, k = {k}")]
    GammaMismatch { level: u32, k: u64 },
    #[error("offset k = {k} needs k + w < 2^m at level {level}")]
    OffsetOutOfRange { level: u32, k: u64 },
    #[error("chain leaves [0, 1) at level {0}")]
    ChainOverflow(u32),
    #[error(transparent)]
    Pascal(#[from] PascalError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error(transparent)]
    Discrepancy(#[from] DiscrepancyError),
    #[error(transparent)]
    Levin(#[from] LevinError),
}

type Result<T> = std::result::Result<T, ConstructionError>;

/// An exact rational as decimal numerator and denominator strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: String,
    pub den: String,
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == "1" {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl From<&BigRational> for Fraction {
    fn from(r: &BigRational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl From<BigRational> for Fraction {
    fn from(r: BigRational) -> Self {
        Self::from(&r)
    }
}

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e as usize
}

/// `num / 2^exp`.
fn dyadic(num: impl Into<BigInt>, exp: u64) -> BigRational {
    BigRational::new(num.into(), pow2(exp))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionParams {
    m: u32,
    /// `M`: the last level.
    #[serde(rename = "M")]
    last_level: u32,
    step: u32,
    /// `w_0, …, w_M`
    widths: Vec<u32>,
    default_scale: bool,
}

/// Widths `w_l = 2^{m-3} - 1 - 8l` for `l = 0, …, M = 2^{m-7} - 1`.
pub fn default_params(m: u32) -> Result<ConstructionParams> {
    if !(7..=30).contains(&m) {
        return Err(ConstructionError::InvalidParams(format!("default widths need 7 <= m <= 30, got {m}")));
    }
    let last_level = (1u32 << (m - 7)) - 1;
    let w0 = (1u32 << (m - 3)) - 1;
    let params = ConstructionParams {
        m,
        last_level,
        step: 8,
        widths: (0..=last_level).map(|l| w0 - 8 * l).collect(),
        default_scale: true,
    };
    let w_last = params.widths[last_level as usize];
    if w_last <= 1 << (m - 4) {
        return Err(ConstructionError::InvalidParams(format!("w_M = {w_last} is not above 2^(m-4)")));
    }
    Ok(params)
}

/// Widths `w_l = w0 - step·l` for `l = 0, …, last_level`.
pub fn reduced_params(m: u32, last_level: u32, w0: u32, step: u32) -> Result<ConstructionParams> {
    let invalid = |msg: String| Err(ConstructionError::InvalidParams(msg));
    if !(1..=30).contains(&m) {
        return invalid(format!("m must lie in 1..=30, got {m}"));
    }
    if step == 0 || !step.is_multiple_of(8) {
        return invalid(format!("step must be a positive multiple of 8, got {step}"));
    }
    if w0.is_multiple_of(2) {
        return invalid(format!("w0 must be odd, got {w0}"));
    }
    if w0 as u64 >= 1u64 << m {
        return invalid(format!("w0 = {w0} must be below 2^m = {}", 1u64 << m));
    }
    let drop = step as u64 * last_level as u64;
    if drop >= w0 as u64 {
        return invalid(format!("w_M = w0 - step·M must stay positive (w0 = {w0}, step = {step}, M = {last_level})"));
    }
    let params = ConstructionParams {
        m,
        last_level,
        step,
        widths: (0..=last_level).map(|l| w0 - step * l).collect(),
        default_scale: false,
    };
    if m <= 16 && params.counter_end() > BigUint::one() << (1usize << m) {
        return invalid("B_M + 2^{w_M} exceeds the counter range 2^(2^m)".into());
    }
    Ok(params)
}

impl ConstructionParams {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn last_level(&self) -> u32 {
        self.last_level
    }

    pub fn levels(&self) -> u32 {
        self.last_level + 1
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    pub fn widths(&self) -> &[u32] {
        &self.widths
    }

    pub fn width(&self, l: u32) -> u32 {
        self.widths[l as usize]
    }

    pub fn is_default_scale(&self) -> bool {
        self.default_scale
    }

    pub fn universe(&self) -> u64 {
        1u64 << self.m
    }

    /// `B_l = 2^{w_0} + … + 2^{w_{l-1}}`.
    pub fn block_offset(&self, l: u32) -> BigUint {
        self.widths[..l as usize].iter().map(|&w| BigUint::one() << w as usize).sum()
    }

    /// `B_M + 2^{w_M}`: the number of counters used.
    pub fn counter_end(&self) -> BigUint {
        self.block_offset(self.last_level) + (BigUint::one() << self.width(self.last_level) as usize)
    }

    /// `N = n_m + 2^m · (B_M + 2^{w_M})`.
    pub fn total_points(&self) -> BigUint {
        block_start(self.m) + (self.counter_end() << self.m as usize)
    }

    /// Points `x_{n,k}` over all blocks `ℬ_l`.
    pub fn block_point_count(&self) -> BigUint {
        self.counter_end() << self.m as usize
    }

    /// Columns (relative to column `w_l`) where the counter bits of `B_l` sit: `w_j - w_l`, `j < l`.
    pub fn selector_positions(&self, l: u32) -> Vec<usize> {
        let w = self.width(l);
        let mut v: Vec<usize> = (0..l).map(|j| (self.width(j) - w) as usize).collect();
        v.sort_unstable();
        v
    }

    fn selector(&self, l: u32) -> BitVec {
        let len = (self.universe() - self.width(l) as u64) as usize;
        let positions = self.selector_positions(l);
        BitVec::from_fn(len, |i| positions.binary_search(&i).is_ok())
    }

    fn check_level(&self, l: u32) -> Result<()> {
        if l > self.last_level {
            return Err(ConstructionError::InvalidParams(format!("level {l} above M = {}", self.last_level)));
        }
        Ok(())
    }

    fn k_count(&self, l: u32) -> u64 {
        self.universe().saturating_sub(self.width(l) as u64)
    }
}

/// `u_0 … u_{w-1}` with `U = Σ u_i 2^{w-1-i}` (so `u_0` is the leading bit).
pub fn cell_bits(u: u128, width: u32) -> BitVec {
    BitVec::from_fn(width as usize, |i| {
        let shift = width as usize - 1 - i;
        shift < 128 && u >> shift & 1 == 1
    })
}

/// The γ-bit by solving the GF(2) systems, and by the closed form when the spacing is 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaRoutes {
    pub solved: bool,
    pub closed_form: Option<bool>,
}

pub fn gamma_routes(
    l: u32,
    k: u64,
    params: &ConstructionParams,
    u_bits: &BitVec,
    bump: bool,
) -> Result<GammaRoutes> {
    params.check_level(l)?;
    let w = params.width(l);
    if u_bits.len() != w as usize {
        return Err(ConstructionError::InvalidParams(format!("u has {} bits, width is {w}", u_bits.len())));
    }
    if k + w as u64 >= params.universe() {
        return Err(ConstructionError::OffsetOutOfRange { level: l, k });
    }
    let u = if bump { u_bits.with_flipped(w as usize - 1) } else { u_bits.clone() };
    let coords = PascalCoords::new(k, w as u64, params.m)?;
    let blocks = submatrices(&coords)?;
    let s = params.selector(l);
    let rhs = u.xor(&blocks.b.mat_vec_mul(&s)?)?;
    let e = blocks.a.solve(&rhs)?;
    let solved = blocks.c_row.dot(&e)? ^ blocks.d_row.dot(&s)?;
    let closed_form = (params.step == 8).then(|| xi(w as u64).dot(&u).expect("lengths match") ^ prop1_closed_form(k + w as u64, l as u64));
    Ok(GammaRoutes { solved, closed_form })
}

/// Which half of the cell `[U/2^w, (U+1)/2^w)` receives `x_{n,k}` (bump: the cell of `U + 1`).
pub fn gamma_bit(l: u32, k: u64, params: &ConstructionParams, u_bits: &BitVec, bump: bool) -> Result<bool> {
    let routes = gamma_routes(l, k, params, u_bits, bump)?;
    match routes.closed_form {
        Some(c) if c != routes.solved => Err(ConstructionError::GammaMismatch { level: l, k }),
        _ => Ok(routes.solved),
    }
}

/// How the `u`-independent part of γ is evaluated in [`a_counts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaRoute {
    /// Full GF(2) solve with `A_{k,w}`.
    Solve,
    /// `ξ_w · B s + d · s`, column parities against `ξ_w`.
    Xi,
    /// `binom(⌊(k+w)/8⌋ + 1 + l, l) + 1 mod 2`.
    ClosedForm,
}

/// `(d - c A^{-1} B) s` for one `(l, k)`.
pub fn selector_term(l: u32, k: u64, params: &ConstructionParams, route: GammaRoute) -> Result<bool> {
    params.check_level(l)?;
    let w = params.width(l) as u64;
    if k + w >= params.universe() {
        return Err(ConstructionError::OffsetOutOfRange { level: l, k });
    }
    match route {
        GammaRoute::Solve => {
            let blocks = submatrices(&PascalCoords::new(k, w, params.m)?)?;
            let s = params.selector(l);
            let e = blocks.a.solve(&blocks.b.mat_vec_mul(&s)?)?;
            Ok(blocks.c_row.dot(&e)? ^ blocks.d_row.dot(&s)?)
        }
        GammaRoute::Xi => {
            let xi_support: Vec<u64> = (0..w).filter(|&r| binom_parity(w as i64, r as i64)).collect();
            Ok(xi_term(k, w, &xi_support, &params.selector_positions(l)))
        }
        GammaRoute::ClosedForm => {
            if params.step != 8 {
                return Err(ConstructionError::InvalidParams("closed form needs step 8".into()));
            }
            Ok(prop1_closed_form(k + w, l as u64))
        }
    }
}

fn xi_term(k: u64, w: u64, xi_support: &[u64], positions: &[usize]) -> bool {
    positions.iter().fold(false, |acc, &pos| {
        let col = w + pos as u64;
        let through_a = xi_support.iter().filter(|&&r| pascal_entry(k + r, col)).count() % 2 == 1;
        acc ^ through_a ^ pascal_entry(k + w, col)
    })
}

/// Counts of the γ-bit's `u`-independent part over `k` with `k + w_l < 2^m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ACounts {
    pub level: u32,
    pub width: u32,
    pub route: GammaRoute,
    pub zeros: u64,
    pub ones: u64,
    /// `max(zeros, ones)`
    pub a: u64,
    /// `a / 2^m`
    pub q: Fraction,
}

pub fn a_counts(l: u32, params: &ConstructionParams, route: GammaRoute) -> Result<ACounts> {
    params.check_level(l)?;
    let count = params.k_count(l);
    if count == 0 {
        return Err(ConstructionError::InvalidParams(format!("no k with k + w_{l} < 2^m")));
    }
    let w = params.width(l) as u64;
    let ones = match route {
        GammaRoute::Xi => {
            let xi_support: Vec<u64> = (0..w).filter(|&r| binom_parity(w as i64, r as i64)).collect();
            let positions = params.selector_positions(l);
            (0..count)
                .into_par_iter()
                .filter(|&k| xi_term(k, w, &xi_support, &positions))
                .count() as u64
        }
        _ => (0..count)
            .into_par_iter()
            .map(|k| selector_term(l, k, params, route))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&b| b)
            .count() as u64,
    };
    let zeros = count - ones;
    let a = zeros.max(ones);
    Ok(ACounts {
        level: l,
        width: w as u32,
        route,
        zeros,
        ones,
        a,
        q: dyadic(a, params.m as u64).into(),
    })
}

/// Every `z` in the top `14·2^{m-7}` rows of `D_m` is `⌊(k + w_l)/8⌋` for exactly 8 values of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttainedZ {
    pub level: u32,
    pub z_lo: u64,
    pub z_hi: u64,
    pub all_eight: bool,
    /// First `(z, multiplicity)` that is not 8.
    pub first_failure: Option<(u64, u64)>,
    /// `⌊(8 + w_0)/8⌋ <= z_lo`
    pub lower_boundary: bool,
    /// `⌊(2^m - 8 + w_M)/8⌋ >= 2^{m-3} - 1`
    pub upper_boundary: bool,
}

impl AttainedZ {
    pub fn passes(&self) -> bool {
        self.all_eight && self.lower_boundary && self.upper_boundary
    }
}

pub fn attained_z_check(l: u32, params: &ConstructionParams) -> Result<AttainedZ> {
    params.check_level(l)?;
    if !params.default_scale {
        return Err(ConstructionError::InvalidParams("attained-z check needs default widths".into()));
    }
    let m = params.m;
    let (z_lo, z_hi, _) = d_matrix_shape(m)?;
    let w = params.width(l) as u64;
    let mut hits = vec![0u64; (z_hi - z_lo) as usize];
    for k in 0..params.universe() {
        let z = (k + w) / 8;
        if (z_lo..z_hi).contains(&z) {
            hits[(z - z_lo) as usize] += 1;
        }
    }
    let first_failure = hits
        .iter()
        .enumerate()
        .find(|(_, &h)| h != 8)
        .map(|(i, &h)| (z_lo + i as u64, h));
    let w_last = params.width(params.last_level) as u64;
    Ok(AttainedZ {
        level: l,
        z_lo,
        z_hi: z_hi - 1,
        all_eight: first_failure.is_none(),
        first_failure,
        lower_boundary: (8 + params.width(0) as u64) / 8 <= z_lo,
        upper_boundary: (params.universe() - 8 + w_last) / 8 >= (1u64 << (m - 3)) - 1,
    })
}

/// Cells at one level that do not hold exactly `2^m` points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelExceptions {
    pub level: u32,
    pub resolution: u32,
    pub cells: Vec<u64>,
    /// `cells.len() <= 2^{m+1}`
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionalScan {
    pub levels: Vec<LevelExceptions>,
    /// Total length of all exceptional cells.
    pub measure: Fraction,
    /// Resolution `2m + 1` of the candidate windows.
    pub window_resolution: u32,
    /// Maximal exception-free dyadic windows, left to right.
    pub free_windows: Vec<DyadicInterval>,
    /// The leftmost free window.
    pub z: DyadicInterval,
}

impl ExceptionalScan {
    pub fn exceptional_intervals(&self) -> impl Iterator<Item = (u32, DyadicInterval)> + '_ {
        self.levels.iter().flat_map(|lvl| {
            lvl.cells
                .iter()
                .map(move |&c| (lvl.level, DyadicInterval::cell(c as u128, lvl.resolution).expect("cell in range")))
        })
    }

    pub fn is_exceptional(&self, level: u32, cell: u64) -> bool {
        self.levels[level as usize].cells.binary_search(&cell).is_ok()
    }
}

fn check_enumeration(levin: &LevinNumber, params: &ConstructionParams, budget: u64) -> Result<()> {
    let needed = params.block_point_count();
    if needed > BigUint::from(budget) {
        return Err(ConstructionError::BudgetExceeded { needed, budget });
    }
    if params.m > levin.max_block() {
        return Err(LevinError::BlockOutOfRange {
            m: params.m,
            max: levin.max_block(),
        }
        .into());
    }
    if params.width(0) + 2 > 64 {
        return Err(ConstructionError::InvalidParams("w_0 + 2 exceeds the 64-bit point precision".into()));
    }
    Ok(())
}

/// Exceptional cells of every level and the exception-free window `Z`.
pub fn exceptional_scan(levin: &LevinNumber, params: &ConstructionParams, budget: u64) -> Result<ExceptionalScan> {
    check_enumeration(levin, params, budget)?;
    let m = params.m;
    let levels = (0..=params.last_level)
        .into_par_iter()
        .map(|l| {
            let w = params.width(l);
            let b = (params.block_offset(l) >> w as usize).to_u64().expect("block index fits");
            let counts = verify_lemma2_with_budget(levin, m, w, b, budget)?;
            let cells = counts.exceptions();
            Ok(LevelExceptions {
                level: l,
                resolution: w,
                within_bound: cells.len() as u64 <= 1u64 << (m + 1),
                cells,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let measure = levels
        .iter()
        .map(|lvl| dyadic(lvl.cells.len() as u64, lvl.resolution as u64))
        .fold(BigRational::zero(), |a, b| a + b);

    let q = 2 * m + 1;
    if q > 24 {
        return Err(ConstructionError::InvalidParams(format!("window resolution {q} too fine to scan")));
    }
    let cells = 1usize << q;
    let mut blocked = vec![false; cells];
    for lvl in &levels {
        for &c in &lvl.cells {
            let (lo, hi) = covering_range(c as u128, lvl.resolution, q);
            blocked[lo..hi].iter_mut().for_each(|b| *b = true);
        }
    }
    let window_free = |c: usize, res: u32| {
        let span = 1usize << (q - res);
        blocked[c * span..(c + 1) * span].iter().all(|b| !b)
    };
    let mut free_windows: Vec<DyadicInterval> = Vec::new();
    for (c, _) in blocked.iter().enumerate().filter(|(_, b)| !**b) {
        let (mut cell, mut res) = (c, q);
        while res > 0 && window_free(cell >> 1, res - 1) {
            cell >>= 1;
            res -= 1;
        }
        let window = DyadicInterval::cell(cell as u128, res)?;
        if free_windows.last() != Some(&window) {
            free_windows.push(window);
        }
    }
    let Some(&z) = free_windows.first() else {
        return Err(ConstructionError::NoWindowFound(format!(
            "every resolution-{q} window meets an exceptional cell"
        )));
    };
    Ok(ExceptionalScan {
        levels,
        measure: measure.into(),
        window_resolution: q,
        free_windows,
        z,
    })
}

/// Resolution-`q` cells meeting `[c/2^res, (c+1)/2^res)`, as a half-open index range.
fn covering_range(c: u128, res: u32, q: u32) -> (usize, usize) {
    if res <= q {
        let span = 1u128 << (q - res);
        ((c * span) as usize, ((c + 1) * span) as usize)
    } else {
        let lo = c >> (res - q);
        (lo as usize, lo as usize + 1)
    }
}

/// How `U(M)` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainPolicy {
    /// Least even `U(M)` with `U(M)/2^{w_M}` in `Z`.
    Strict,
    /// Least even `U(M)` whose level-`M` cell is not exceptional; `Z` is not consulted.
    FirstRegularCell,
}

/// One piece `J_l = [U(l)/2^{w_l}, V(l)/2^{w_l})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainLevel {
    pub level: u32,
    pub width: u32,
    pub u: u128,
    /// `2·V(l)`
    pub v_doubled: u128,
    pub gamma: bool,
    pub gamma_zeros: u64,
    pub gamma_ones: u64,
    /// `max(gamma_zeros, gamma_ones)`
    pub a: u64,
    /// The predicted γ matched the digits of the point in the cell for every `k`.
    pub confirmed_by_digits: bool,
}

impl ChainLevel {
    /// `J_l` at resolution `w_l + 1`.
    pub fn interval(&self) -> DyadicInterval {
        DyadicInterval::new(2 * self.u, self.v_doubled, self.width + 1).expect("chain pieces are valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainChecks {
    /// `V(l) - U(l)` is `1/2` or `3/2` everywhere.
    pub piece_lengths: bool,
    /// `V(l)/2^{w_l} = U(l-1)/2^{w_{l-1}}`.
    pub boundaries_match: bool,
    pub all_u_even: bool,
    /// `J ⊆ Z`; `None` when the chain was not anchored in `Z`.
    pub contained_in_z: bool,
    /// `J` meets no exceptional cell.
    pub avoids_exceptional: bool,
    /// `(level, cell)` of every exceptional cell meeting `J`.
    pub exceptional_cells_touched: Vec<(u32, u64)>,
    /// `λ(J) <= 4 / 2^{w_M}`.
    pub length_bound: bool,
    pub gamma_confirmed: bool,
}

impl ChainChecks {
    pub fn all_hold(&self) -> bool {
        self.piece_lengths
            && self.boundaries_match
            && self.all_u_even
            && self.contained_in_z
            && self.avoids_exceptional
            && self.length_bound
            && self.gamma_confirmed
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalChain {
    pub policy: ChainPolicy,
    pub z: DyadicInterval,
    /// Indexed by level `l`.
    pub levels: Vec<ChainLevel>,
    /// `J = J_M ∪ … ∪ J_0`
    pub union: DyadicInterval,
    pub checks: ChainChecks,
}

impl IntervalChain {
    /// `J_M ∪ … ∪ J_l` at resolution `w_l + 1`.
    pub fn union_down_to(&self, l: u32, params: &ConstructionParams) -> DyadicInterval {
        let top = &self.levels[params.last_level as usize];
        let res = params.width(l) + 1;
        let lo = top.u << (res - top.width);
        DyadicInterval::new(lo, self.levels[l as usize].v_doubled, res).expect("union is valid")
    }
}

fn least_even_in(z: &DyadicInterval, width: u32) -> Option<u128> {
    let q = z.resolution();
    let lo = if width >= q {
        z.lo() << (width - q)
    } else {
        z.lo().div_ceil(1u128 << (q - width))
    };
    let u = lo + (lo & 1);
    // u/2^width < hi/2^q
    let inside = if width >= q { u < z.hi() << (width - q) } else { u << (q - width) < z.hi() };
    inside.then_some(u)
}

/// Builds `J_M, …, J_0` from the top level down.
pub fn build_chain(
    levin: &LevinNumber,
    params: &ConstructionParams,
    scan: &ExceptionalScan,
    policy: ChainPolicy,
) -> Result<IntervalChain> {
    let top = params.last_level;
    let w_top = params.width(top);
    let u_top = match policy {
        ChainPolicy::Strict => least_even_in(&scan.z, w_top).ok_or_else(|| {
            ConstructionError::NoWindowFound(format!("Z = {} contains no even multiple of 2^-{w_top}", scan.z))
        })?,
        ChainPolicy::FirstRegularCell => (0..1u128 << w_top)
            .step_by(2)
            .find(|&u| !scan.is_exceptional(top, u as u64))
            .ok_or_else(|| ConstructionError::NoWindowFound(format!("every even cell at level {top} is exceptional")))?,
    };

    let mut levels: Vec<ChainLevel> = Vec::with_capacity(params.levels() as usize);
    let mut u = u_top;
    for l in (0..=top).rev() {
        let w = params.width(l);
        if l < top {
            let above = levels.last().expect("upper level built");
            let shift = w - above.width - 1;
            u = above.v_doubled << shift;
            if u % 2 == 1 {
                return Err(ConstructionError::BoundaryParityViolation { level: l, value: u });
            }
        }
        let level = chain_level(levin, params, l, u)?;
        if level.v_doubled > 2u128 << w {
            return Err(ConstructionError::ChainOverflow(l));
        }
        levels.push(level);
    }
    levels.reverse();
    let boundaries_match = levels
        .windows(2)
        .all(|pair| dyadic(pair[0].u, pair[0].width as u64) == dyadic(pair[1].v_doubled, pair[1].width as u64 + 1));

    let union = DyadicInterval::new(u_top << (params.width(0) + 1 - w_top), levels[0].v_doubled, params.width(0) + 1)?;
    let touched: Vec<(u32, u64)> = scan
        .exceptional_intervals()
        .filter(|(_, cell)| cell.intersects(&union))
        .map(|(l, cell)| (l, cell.lo() as u64))
        .collect();
    let length_bound = union.length::<BigRational>() <= dyadic(4, w_top as u64);
    let checks = ChainChecks {
        piece_lengths: levels.iter().all(|lv| matches!(lv.v_doubled - 2 * lv.u, 1 | 3)),
        boundaries_match,
        all_u_even: levels.iter().all(|lv| lv.u % 2 == 0),
        contained_in_z: union.is_subset_of(&scan.z),
        avoids_exceptional: touched.is_empty(),
        exceptional_cells_touched: touched,
        length_bound,
        gamma_confirmed: levels.iter().all(|lv| lv.confirmed_by_digits),
    };
    Ok(IntervalChain {
        policy,
        z: scan.z,
        levels,
        union,
        checks,
    })
}

/// Chooses `J_l` for a given `U(l)` and confirms each predicted γ against the digits.
fn chain_level(levin: &LevinNumber, params: &ConstructionParams, l: u32, u: u128) -> Result<ChainLevel> {
    let w = params.width(l);
    if u >= 1u128 << w {
        return Err(ConstructionError::ChainOverflow(l));
    }
    let u_bits = cell_bits(u, w);
    let s = params.selector(l);
    let base = levin.block_offset(params.m)?;
    let b_l = params.block_offset(l).to_u128().expect("counter fits");
    let outcomes = (0..params.k_count(l))
        .into_par_iter()
        .map(|k| {
            let gamma = gamma_bit(l, k, params, &u_bits, false)?;
            // the counter n in ℬ_l whose point x_{n,k} lies in the cell of U
            let blocks = submatrices(&PascalCoords::new(k, w as u64, params.m)?)?;
            let e = blocks.a.solve(&u_bits.xor(&blocks.b.mat_vec_mul(&s)?)?)?;
            let n = b_l + (0..w as usize).filter(|&j| e.get(j)).map(|j| 1u128 << j).sum::<u128>();
            let x = levin.point(base + (n << params.m) + k as u128, w + 1)?.numerator() as u128;
            Ok((gamma, x >> 1 == u && (x & 1 == 1) == gamma))
        })
        .collect::<Result<Vec<_>>>()?;
    let ones = outcomes.iter().filter(|(g, _)| *g).count() as u64;
    let zeros = outcomes.len() as u64 - ones;
    let gamma = ones > zeros;
    Ok(ChainLevel {
        level: l,
        width: w,
        u,
        v_doubled: 2 * u + if gamma { 3 } else { 1 },
        gamma,
        gamma_zeros: zeros,
        gamma_ones: ones,
        a: zeros.max(ones),
        confirmed_by_digits: outcomes.iter().all(|(_, ok)| *ok),
    })
}

/// Enumerated count over `ℬ_l` in `J_M ∪ … ∪ J_l` against `2^m 2^{w_l} λ + (q(l) - 1/2) 2^m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockInequality {
    pub level: u32,
    pub count: u64,
    pub length: Fraction,
    pub bound: Fraction,
    pub surplus: Fraction,
    pub holds: bool,
}

fn count_block(levin: &LevinNumber, params: &ConstructionParams, l: u32, interval: &DyadicInterval) -> Result<u64> {
    let w = params.width(l);
    let precision = interval.resolution().max(1);
    let start = levin.block_offset(params.m)? + (params.block_offset(l).to_u128().expect("counter fits") << params.m);
    let mut count = 0u64;
    levin.for_each_point(start, 1u64 << (params.m + w), precision, |_, x| {
        count += interval.contains(x, precision) as u64;
    })?;
    Ok(count)
}

pub fn verify_block_inequality(
    levin: &LevinNumber,
    l: u32,
    chain: &IntervalChain,
    params: &ConstructionParams,
    budget: u64,
) -> Result<BlockInequality> {
    params.check_level(l)?;
    let w = params.width(l);
    let needed = BigUint::one() << (params.m + w) as usize;
    if needed > BigUint::from(budget) {
        return Err(ConstructionError::BudgetExceeded { needed, budget });
    }
    let union = chain.union_down_to(l, params);
    let count = count_block(levin, params, l, &union)?;
    let length: BigRational = union.length();
    let a = chain.levels[l as usize].a;
    let bound = int(pow2((params.m + w) as u64)) * &length + int(a) - int(pow2(params.m as u64 - 1));
    let surplus = int(count) - &bound;
    Ok(BlockInequality {
        level: l,
        count,
        length: length.into(),
        bound: (&bound).into(),
        holds: surplus >= BigRational::zero(),
        surplus: surplus.into(),
    })
}

/// `8 · ones(D_m)` against `Σ 𝒜(l)` and against `2^{2m} · 7 · 31 / 2^15`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurplusBound {
    pub m: u32,
    pub route: Option<GammaRoute>,
    /// `Σ 𝒜(l)`, when enumerated.
    pub a_sum: Option<u64>,
    pub ones_enumerated: Option<u64>,
    pub ones_formula: Fraction,
    /// `8 · ones(D_m)`
    pub eight_ones: Fraction,
    /// `2^{2m} · 217 / 2^15`
    pub target: Fraction,
    /// `1 - (3/4)^{m-7} >= 31/32`
    pub proviso: bool,
    pub a_sum_covers_ones: Option<bool>,
    pub ones_cover_target: bool,
}

pub fn total_surplus_bound(params: &ConstructionParams, route: Option<GammaRoute>) -> Result<SurplusBound> {
    if !params.default_scale {
        return Err(ConstructionError::InvalidParams("surplus bound needs default widths".into()));
    }
    let m = params.m;
    let formula = ones_formula(m)?;
    let ones_enumerated = if m <= D_MATRIX_MAX_M { ones_count(m)?.enumerated } else { None };
    let ones = ones_enumerated.map(int).unwrap_or_else(|| formula.clone());
    let eight_ones = int(8) * ones;
    let target = dyadic(217, 15) * int(pow2(2 * m as u64));
    let three_quarters = BigRational::new(3.into(), 4.into());
    let proviso = BigRational::one() - num_traits::pow(three_quarters, (m - 7) as usize) >= BigRational::new(31.into(), 32.into());
    let a_sum = match route {
        Some(route) if m <= D_MATRIX_MAX_M => Some(
            (0..=params.last_level)
                .map(|l| a_counts(l, params, route).map(|c| c.a))
                .sum::<Result<u64>>()?,
        ),
        _ => None,
    };
    Ok(SurplusBound {
        m,
        route: a_sum.and(route),
        a_sum,
        ones_enumerated,
        ones_formula: (&formula).into(),
        a_sum_covers_ones: a_sum.map(|s| int(s) >= eight_ones),
        ones_cover_target: eight_ones >= target,
        eight_ones: (&eight_ones).into(),
        target: target.into(),
        proviso,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermSource {
    Enumerated,
    ClosedForm,
    /// Taken as given at this scale, not evaluated.
    Assumed,
}

/// One additive term of the lower bound for `#{n < N : x_n ∈ J} - N·λ(J)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccountingTerm {
    pub name: String,
    pub value: Option<Fraction>,
    pub symbolic: Option<String>,
    pub source: TermSource,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Accounting {
    pub terms: Vec<AccountingTerm>,
    /// Sum of the valued terms.
    pub guaranteed_surplus: Option<Fraction>,
    /// `#{n < N : x_n ∈ J} - N·λ(J)`, when enumerated.
    pub actual_surplus: Option<Fraction>,
    pub count: Option<u64>,
    /// `N · λ(J)`
    pub expected: Option<Fraction>,
    /// Guaranteed surplus is positive.
    pub positive: bool,
    /// Actual surplus is at least the guaranteed one.
    pub consistent: Option<bool>,
    /// `(ln N)^2`
    pub log_n_sq: f64,
    /// `surplus / (ln N)^2`
    pub implied_c: f64,
    /// `2^{2m} >= (ln N)^2 / 16`
    pub scale_relation: bool,
}

fn term(name: &str, value: Option<&BigRational>, symbolic: Option<&str>, source: TermSource) -> AccountingTerm {
    AccountingTerm {
        name: name.into(),
        value: value.map(Fraction::from),
        symbolic: symbolic.map(str::to_string),
        source,
    }
}

/// `ln N` from the bit length and leading bits of `N`.
fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(53);
    let top = (n >> shift as usize).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Enumerated ledger for a constructed chain.
pub fn enumerated_accounting(
    levin: &LevinNumber,
    params: &ConstructionParams,
    chain: &IntervalChain,
    budget: u64,
) -> Result<(Accounting, Vec<BlockInequality>)> {
    let n_total = params.total_points();
    if n_total > BigUint::from(budget) {
        return Err(ConstructionError::BudgetExceeded { needed: n_total, budget });
    }
    let n_total = n_total.to_u64().expect("within budget");
    let m = params.m;
    let j = chain.union;
    let precision = j.resolution();
    let lambda: BigRational = j.length();
    let prefix_len = levin.block_offset(m)? as u64;

    let mut count = 0u64;
    let mut prefix_count = 0u64;
    levin.for_each_point(0, n_total, precision, |i, x| {
        if j.contains(x, precision) {
            count += 1;
            prefix_count += (i < prefix_len) as u64;
        }
    })?;

    let blocks = (0..=params.last_level)
        .map(|l| verify_block_inequality(levin, l, chain, params, budget))
        .collect::<Result<Vec<_>>>()?;

    let mut block_mass = BigRational::zero();
    let mut tail_mass = BigRational::zero();
    let mut tail_bound = BigRational::zero();
    let mut tail_counts = 0u64;
    for l in 0..=params.last_level {
        let scale = int(pow2((m + params.width(l)) as u64));
        block_mass += &scale * &lambda;
        if l > 0 {
            let above = chain.union_down_to(l, params);
            let below = DyadicInterval::new(above.hi() << (precision - above.resolution()), j.hi(), precision)?;
            tail_mass += &scale * below.length::<BigRational>();
            tail_counts += count_block(levin, params, l, &below)?;
            tail_bound += int(3 << m) * dyadic(1, params.step as u64);
        }
    }
    let a_sum: u64 = chain.levels.iter().map(|lv| lv.a).sum();
    let half_blocks = int(params.levels()) * int(pow2(m as u64 - 1));
    let prefix_dev = int(prefix_count) - int(prefix_len) * &lambda;
    let expected = int(n_total) * &lambda;
    let guaranteed = &prefix_dev - &tail_mass + int(a_sum) - &half_blocks;
    let actual = int(count) - &expected;
    let log_n = (n_total as f64).ln();
    let terms = vec![
        term("prefix count minus n_m·λ(J)", Some(&prefix_dev), None, TermSource::Enumerated),
        term("Σ_l 2^m 2^{w_l} λ(J) (part of N·λ(J))", Some(&block_mass), None, TermSource::ClosedForm),
        term("-Σ_l 2^m 2^{w_l} λ(J_{l-1} ∪ … ∪ J_0)", Some(&-tail_mass.clone()), None, TermSource::ClosedForm),
        term(
            "tail bound -Σ_l 2^m · 3/2^{s}",
            Some(&-tail_bound.clone()),
            None,
            TermSource::ClosedForm,
        ),
        term("Σ_l 𝒜(l)", Some(&int(a_sum)), None, TermSource::Enumerated),
        term("-(M+1)·2^{m-1}", Some(&-half_blocks.clone()), None, TermSource::ClosedForm),
        term(
            "dropped: Σ_l #{ℬ_l points in J_{l-1} ∪ … ∪ J_0}",
            Some(&int(tail_counts)),
            None,
            TermSource::Enumerated,
        ),
    ];
    let accounting = Accounting {
        terms,
        positive: guaranteed > BigRational::zero(),
        consistent: Some(actual >= guaranteed),
        guaranteed_surplus: Some((&guaranteed).into()),
        implied_c: actual.to_f64().unwrap_or(f64::NAN) / (log_n * log_n),
        actual_surplus: Some(actual.into()),
        count: Some(count),
        expected: Some(expected.into()),
        log_n_sq: log_n * log_n,
        scale_relation: 4f64.powi(m as i32) >= log_n * log_n / 16.0,
    };
    Ok((accounting, blocks))
}

/// Closed-form ledger at default widths, where nothing below block `m` is enumerated.
pub fn closed_form_accounting(params: &ConstructionParams) -> Result<Accounting> {
    if !params.default_scale {
        return Err(ConstructionError::InvalidParams("closed-form ledger needs default widths".into()));
    }
    let m = params.m as u64;
    let four_m = int(pow2(2 * m));
    let tail = -(int(pow2(2 * m - 7)) * dyadic(3, 8));
    let half_blocks = -(int(pow2(2 * m - 7)) * dyadic(1, 1));
    let a_sum = &four_m * dyadic(217, 15);
    let net = &tail + &half_blocks + &a_sum;
    let log_n = ln_big(&params.total_points());
    let terms = vec![
        term("prefix deviation", None, Some("-δ·log n_m, δ fixed"), TermSource::Assumed),
        term("tail bound -2^{2m-7}·3/2^8", Some(&tail), None, TermSource::ClosedForm),
        term("-(M+1)·2^{m-1} = -2^{2m-7}/2", Some(&half_blocks), None, TermSource::ClosedForm),
        term("Σ_l 𝒜(l) >= 2^{2m}·7·31/2^15", Some(&a_sum), None, TermSource::ClosedForm),
        term("net 2^{2m}·86/2^15", Some(&net), None, TermSource::ClosedForm),
    ];
    Ok(Accounting {
        terms,
        positive: net > BigRational::zero(),
        guaranteed_surplus: Some((&net).into()),
        actual_surplus: None,
        count: None,
        expected: None,
        consistent: None,
        log_n_sq: log_n * log_n,
        implied_c: net.to_f64().unwrap_or(f64::NAN) / (log_n * log_n),
        scale_relation: 4f64.powi(m as i32) >= log_n * log_n / 16.0,
    })
}

/// Enumerated ledger when a chain is given and the budget allows, closed-form ledger otherwise.
pub fn final_accounting(
    levin: &LevinNumber,
    params: &ConstructionParams,
    chain: Option<&IntervalChain>,
    budget: u64,
) -> Result<Accounting> {
    match chain {
        Some(chain) => enumerated_accounting(levin, params, chain, budget).map(|(acc, _)| acc),
        None => closed_form_accounting(params),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructOptions {
    pub policy: ChainPolicy,
    pub budget: u64,
    pub route: GammaRoute,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        Self {
            policy: ChainPolicy::Strict,
            budget: DEFAULT_POINT_BUDGET,
            route: GammaRoute::Solve,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionReport {
    pub params: ConstructionParams,
    /// `N`, in decimal.
    pub n: String,
    pub scan: Option<ExceptionalScan>,
    /// Why the requested chain policy failed, if it did.
    pub strict_chain_error: Option<String>,
    pub chain: Option<IntervalChain>,
    pub a_counts: Vec<ACounts>,
    pub attained_z: Vec<AttainedZ>,
    pub block_inequalities: Vec<BlockInequality>,
    pub surplus_bound: Option<SurplusBound>,
    pub accounting: Option<Accounting>,
}

impl ConstructionReport {
    /// Minimum block surplus, when blocks were enumerated.
    pub fn all_blocks_hold(&self) -> bool {
        !self.block_inequalities.is_empty() && self.block_inequalities.iter().all(|b| b.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Key-value text with one indented section per nested object.
    pub fn to_text(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut out = String::new();
        write_text(&mut out, "", &value, 0);
        out
    }
}

fn write_text(out: &mut String, key: &str, value: &serde_json::Value, depth: usize) {
    use serde_json::Value;
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) if map.keys().all(|k| k == "num" || k == "den") && map.len() == 2 => {
            let num = map["num"].as_str().unwrap_or_default();
            let den = map["den"].as_str().unwrap_or_default();
            if den == "1" {
                let _ = writeln!(out, "{pad}{key}: {num}");
            } else {
                let _ = writeln!(out, "{pad}{key}: {num}/{den}");
            }
        }
        Value::Object(map) => {
            if !key.is_empty() {
                let _ = writeln!(out, "{pad}[{key}]");
            }
            let depth = if key.is_empty() { depth } else { depth + 1 };
            for (k, v) in map {
                write_text(out, k, v, depth);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar_text).collect();
            let _ = writeln!(out, "{pad}{key}: [{}]", joined.join(", "));
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                write_text(out, &format!("{key}.{i}"), item, depth);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {}", scalar_text(other));
        }
    }
}

fn scalar_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => "none".into(),
        other => other.to_string(),
    }
}

/// Runs every part of the construction that the scale and budget allow.
pub fn construct(levin: &LevinNumber, params: &ConstructionParams, options: ConstructOptions) -> Result<ConstructionReport> {
    let enumerable = check_enumeration(levin, params, options.budget).is_ok()
        && params.total_points() <= BigUint::from(options.budget);
    let mut report = ConstructionReport {
        params: params.clone(),
        n: params.total_points().to_string(),
        scan: None,
        strict_chain_error: None,
        chain: None,
        a_counts: Vec::new(),
        attained_z: Vec::new(),
        block_inequalities: Vec::new(),
        surplus_bound: None,
        accounting: None,
    };
    if params.m <= D_MATRIX_MAX_M {
        report.a_counts = (0..=params.last_level)
            .map(|l| a_counts(l, params, options.route))
            .collect::<Result<_>>()?;
    }
    if params.default_scale {
        if params.m <= 20 {
            report.attained_z = (0..=params.last_level)
                .map(|l| attained_z_check(l, params))
                .collect::<Result<_>>()?;
        }
        let route = (params.m <= D_MATRIX_MAX_M).then_some(options.route);
        report.surplus_bound = Some(total_surplus_bound(params, route)?);
        if params.m >= 8 {
            report.accounting = Some(closed_form_accounting(params)?);
        }
    }
    if enumerable {
        let scan = exceptional_scan(levin, params, options.budget)?;
        let chain = match build_chain(levin, params, &scan, options.policy) {
            Ok(chain) => chain,
            Err(ConstructionError::NoWindowFound(why)) if options.policy == ChainPolicy::Strict => {
                report.strict_chain_error = Some(why);
                build_chain(levin, params, &scan, ChainPolicy::FirstRegularCell)?
            }
            Err(e) => return Err(e),
        };
        let (accounting, blocks) = enumerated_accounting(levin, params, &chain, options.budget)?;
        report.accounting = Some(accounting);
        report.block_inequalities = blocks;
        report.chain = Some(chain);
        report.scan = Some(scan);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pascal::d_column_ones;
    use std::sync::OnceLock;

    fn shared() -> &'static LevinNumber {
        static LEVIN: OnceLock<LevinNumber> = OnceLock::new();
        LEVIN.get_or_init(LevinNumber::new)
    }

    #[test]
    fn default_param_examples() {
        let p7 = default_params(7).unwrap();
        assert_eq!((p7.last_level(), p7.widths()), (0, &[15][..]));
        assert_eq!(default_params(8).unwrap().widths(), &[31, 23]);
        let p10 = default_params(10).unwrap();
        assert_eq!(p10.last_level(), 7);
        assert_eq!((p10.width(0), p10.width(7)), (127, 71));
        assert!(p10.widths().iter().all(|w| w % 2 == 1));
        assert!(p10.widths().windows(2).all(|w| w[0] > w[1]));
        assert!(default_params(6).is_err());
    }

    #[test]
    fn reduced_param_examples() {
        assert_eq!(reduced_params(4, 1, 11, 8).unwrap().widths(), &[11, 3]);
        assert_eq!(reduced_params(5, 1, 11, 8).unwrap().widths(), &[11, 3]);
        assert_eq!(reduced_params(4, 0, 9, 8).unwrap().levels(), 1);
        assert!(reduced_params(4, 1, 11, 4).is_err());
        assert!(reduced_params(4, 1, 10, 8).is_err());
        assert!(reduced_params(4, 2, 11, 8).is_err());
        assert!(reduced_params(3, 0, 9, 8).is_err());
        let p = reduced_params(4, 1, 11, 8).unwrap();
        assert_eq!(p.block_offset(1), BigUint::from(2048u32));
        assert_eq!(p.total_points(), BigUint::from(2120u32 + 16 * 2056));
        assert_eq!(p.selector_positions(1), vec![8]);
    }

    #[test]
    fn cell_bits_are_msb_first() {
        assert_eq!(cell_bits(0b110, 3).to_string(), "110");
        assert_eq!(cell_bits(1, 4).to_string(), "0001");
    }

    #[test]
    fn gamma_with_empty_selector_is_xi_dot_u() {
        let p = reduced_params(5, 1, 11, 8).unwrap();
        let u = cell_bits(0b101_1001_0110, 11);
        let expected = xi(11).dot(&u).unwrap();
        for k in 0..32 - 11 {
            assert_eq!(gamma_bit(0, k, &p, &u, false).unwrap(), expected);
        }
    }

    #[test]
    fn bump_flips_gamma_for_odd_width() {
        let p = reduced_params(5, 1, 11, 8).unwrap();
        for l in 0..=1 {
            let w = p.width(l);
            for u in [0u128, 2, 6, 100 % (1 << w)] {
                let bits = cell_bits(u & !1, w);
                for k in 0..32 - w as u64 {
                    let plain = gamma_bit(l, k, &p, &bits, false).unwrap();
                    let bumped = gamma_bit(l, k, &p, &bits, true).unwrap();
                    assert_ne!(plain, bumped, "l={l} k={k}");
                }
            }
        }
        assert!(matches!(
            gamma_bit(0, 21, &p, &cell_bits(0, 11), false),
            Err(ConstructionError::OffsetOutOfRange { .. })
        ));
    }

    #[test]
    fn gamma_routes_agree_on_m5() {
        let p = reduced_params(5, 2, 19, 8).unwrap();
        for l in 0..=2 {
            let w = p.width(l);
            for k in 0..32 - w as u64 {
                let r = gamma_routes(l, k, &p, &cell_bits(5, w), false).unwrap();
                assert_eq!(Some(r.solved), r.closed_form);
            }
        }
    }

    #[test]
    fn a_count_routes_agree() {
        let p = default_params(9).unwrap();
        for l in 0..=p.last_level() {
            let solve = a_counts(l, &p, GammaRoute::Solve).unwrap();
            let xi_route = a_counts(l, &p, GammaRoute::Xi).unwrap();
            let closed = a_counts(l, &p, GammaRoute::ClosedForm).unwrap();
            assert_eq!((solve.zeros, solve.ones), (xi_route.zeros, xi_route.ones));
            assert_eq!((solve.zeros, solve.ones), (closed.zeros, closed.ones));
            assert_eq!(solve.zeros + solve.ones, 512 - p.width(l) as u64);
        }
    }

    #[test]
    fn a_count_examples() {
        let p = default_params(8).unwrap();
        let c0 = a_counts(0, &p, GammaRoute::Solve).unwrap();
        assert_eq!(c0.a, 256 - 31);
        let c1 = a_counts(1, &p, GammaRoute::Solve).unwrap();
        assert!(c1.a >= 8 * d_column_ones(8, 1).unwrap());
    }

    #[test]
    fn attained_z_examples() {
        for m in [8, 10] {
            let p = default_params(m).unwrap();
            for l in 0..=p.last_level() {
                assert!(attained_z_check(l, &p).unwrap().passes(), "m={m} l={l}");
            }
        }
        assert!(attained_z_check(0, &reduced_params(4, 1, 11, 8).unwrap()).is_err());
    }

    #[test]
    fn surplus_bound_examples() {
        let s8 = total_surplus_bound(&default_params(8).unwrap(), Some(GammaRoute::Solve)).unwrap();
        assert_eq!(s8.a_sum_covers_ones, Some(true));
        assert!(!s8.ones_cover_target && !s8.proviso);
        assert_eq!(s8.eight_ones, Fraction::from(int(112)));
        assert_eq!(s8.target, Fraction::from(int(434)));
        let s20 = total_surplus_bound(&default_params(20).unwrap(), None).unwrap();
        assert!(s20.proviso && s20.ones_cover_target);
        assert!(s20.a_sum.is_none());
    }

    #[test]
    fn reduced_scan_and_chain() {
        let a = shared();
        let p = reduced_params(4, 1, 11, 8).unwrap();
        let scan = exceptional_scan(a, &p, DEFAULT_POINT_BUDGET).unwrap();
        assert!(scan.levels.iter().all(|l| l.within_bound));
        for (_, cell) in scan.exceptional_intervals() {
            assert!(!cell.intersects(&scan.z));
        }
        let chain = build_chain(a, &p, &scan, ChainPolicy::FirstRegularCell).unwrap();
        assert_eq!(chain.levels.len(), 2);
        assert!(chain.checks.piece_lengths && chain.checks.boundaries_match && chain.checks.all_u_even);
        assert!(chain.checks.length_bound && chain.checks.gamma_confirmed);
        for l in 0..=1 {
            let b = verify_block_inequality(a, l, &chain, &p, DEFAULT_POINT_BUDGET).unwrap();
            assert!(b.holds, "level {l}: {b:?}");
        }
    }

    #[test]
    fn single_level_chain() {
        let a = shared();
        let p = reduced_params(4, 0, 9, 8).unwrap();
        let scan = exceptional_scan(a, &p, DEFAULT_POINT_BUDGET).unwrap();
        let chain = build_chain(a, &p, &scan, ChainPolicy::FirstRegularCell).unwrap();
        let len = chain.union.length::<BigRational>();
        assert!(len == dyadic(1, 10) || len == dyadic(3, 10));
        let (acc, _) = enumerated_accounting(a, &p, &chain, DEFAULT_POINT_BUDGET).unwrap();
        let tail = acc.terms.iter().find(|t| t.name.starts_with("-Σ_l 2^m")).unwrap();
        assert_eq!(tail.value, Some(Fraction::from(BigRational::zero())));
    }

    #[test]
    fn construct_report_serializes() {
        let a = shared();
        let p = reduced_params(4, 1, 11, 8).unwrap();
        let report = construct(a, &p, ConstructOptions::default()).unwrap();
        assert!(report.all_blocks_hold());
        let json = report.to_json();
        assert!(json.contains("\"block_inequalities\""));
        let text = report.to_text();
        assert!(text.contains("[params]"));
        let full = construct(a, &default_params(20).unwrap(), ConstructOptions::default()).unwrap();
        assert!(full.chain.is_none());
        assert!(full.accounting.unwrap().positive);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn params() -> impl Strategy<Value = ConstructionParams> {
            (4u32..=6, 0u32..=2).prop_flat_map(|(m, last)| {
                let lo = 8 * last + 1;
                let hi = ((1u32 << m) - 2).max(lo);
                (Just(m), Just(last), (lo / 2..=hi / 2).prop_map(|h| 2 * h + 1))
            })
            .prop_filter_map("valid widths", |(m, last, w0)| reduced_params(m, last, w0, 8).ok())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn a_counts_partition_k_range(p in params()) {
                for l in 0..=p.last_level() {
                    if p.k_count(l) == 0 {
                        continue;
                    }
                    let c = a_counts(l, &p, GammaRoute::Xi).unwrap();
                    prop_assert_eq!(c.zeros + c.ones, (1u64 << p.m()) - p.width(l) as u64);
                    prop_assert_eq!(c.a, c.zeros.max(c.ones));
                    let closed = a_counts(l, &p, GammaRoute::ClosedForm).unwrap();
                    prop_assert_eq!((c.zeros, c.ones), (closed.zeros, closed.ones));
                }
            }

            #[test]
            fn bump_always_flips_gamma(p in params(), u in any::<u64>(), k_seed in any::<u64>()) {
                let l = p.last_level();
                let w = p.width(l);
                prop_assume!(p.k_count(l) > 0);
                let k = k_seed % p.k_count(l);
                let bits = cell_bits(u as u128 & ((1u128 << w) - 1), w);
                prop_assert_ne!(
                    gamma_bit(l, k, &p, &bits, false).unwrap(),
                    gamma_bit(l, k, &p, &bits, true).unwrap()
                );
            }
        }
    }
}
