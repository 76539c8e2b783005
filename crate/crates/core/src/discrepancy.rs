//! Exact counting and discrepancy of dyadic point sets.
//!
//! A point set of precision `P` holds numerators `a` standing for `a / 2^P`.
//! All engines work with integers scaled by `2^P` (and by `N` where needed);
//! the result is converted to the caller's [`Scalar`] only at the end.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::levin::{LevinError, LevinNumber, PointSet};
use crate::scalar::Scalar;

/// Default cap on points any single verification may enumerate.
pub const DEFAULT_POINT_BUDGET: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscrepancyError {
    #[error("interval resolution {resolution} exceeds point precision {precision}")]
    ResolutionExceedsPrecision { resolution: u32, precision: u32 },
    #[error("point set is empty")]
    EmptySet,
    #[error("invalid dyadic interval [{lo}, {hi}) / 2^{resolution}")]
    InvalidInterval { lo: u128, hi: u128, resolution: u32 },
    #[error("needs {needed} points but the budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no certified outcome up to N = {0}")]
    Inconclusive(u64),
    #[error(transparent)]
    Levin(#[from] LevinError),
}

/// `[lo / 2^resolution, hi / 2^resolution)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct DyadicInterval {
    lo: u128,
    hi: u128,
    resolution: u32,
}

impl DyadicInterval {
    pub fn new(lo: u128, hi: u128, resolution: u32) -> Result<Self, DiscrepancyError> {
        if resolution > 126 || lo >= hi || hi > 1u128 << resolution {
            return Err(DiscrepancyError::InvalidInterval { lo, hi, resolution });
        }
        Ok(Self { lo, hi, resolution })
    }

    pub fn unit() -> Self {
        Self {
            lo: 0,
            hi: 1,
            resolution: 0,
        }
    }

    /// `[c / 2^i, (c+1) / 2^i)`.
    pub fn cell(c: u128, i: u32) -> Result<Self, DiscrepancyError> {
        Self::new(c, c + 1, i)
    }

    pub fn lo(&self) -> u128 {
        self.lo
    }

    pub fn hi(&self) -> u128 {
        self.hi
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn length<T: Scalar>(&self) -> T {
        T::from_dyadic(self.hi - self.lo, self.resolution)
    }

    /// The same interval with endpoints scaled to a finer resolution.
    pub fn refine(&self, resolution: u32) -> Self {
        assert!(resolution >= self.resolution && resolution <= 126);
        let shift = resolution - self.resolution;
        Self {
            lo: self.lo << shift,
            hi: self.hi << shift,
            resolution,
        }
    }

    /// Whether a `precision`-bit numerator lies in the interval.
    #[inline]
    pub fn contains(&self, numerator: u64, precision: u32) -> bool {
        debug_assert!(self.resolution <= precision);
        let shift = precision - self.resolution;
        let x = numerator as u128;
        x >= self.lo << shift && x < self.hi << shift
    }

    pub fn intersects(&self, other: &Self) -> bool {
        let q = self.resolution.max(other.resolution);
        let (a, b) = (self.refine(q), other.refine(q));
        a.lo < b.hi && b.lo < a.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        let q = self.resolution.max(other.resolution);
        let (a, b) = (self.refine(q), other.refine(q));
        b.lo <= a.lo && a.hi <= b.hi
    }
}

impl std::fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}/2^{}, {}/2^{})", self.lo, self.resolution, self.hi, self.resolution)
    }
}

/// Number of points of `points` lying in `interval`.
pub fn count_in(points: &PointSet, interval: &DyadicInterval) -> Result<u64, DiscrepancyError> {
    if interval.resolution > points.precision() {
        return Err(DiscrepancyError::ResolutionExceedsPrecision {
            resolution: interval.resolution,
            precision: points.precision(),
        });
    }
    let p = points.precision();
    Ok(points.numerators().iter().filter(|&&x| interval.contains(x, p)).count() as u64)
}

/// A discrepancy value kept as `N · D_N · 2^P`, an exact integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledDiscrepancy {
    pub scaled: i128,
    pub n: u64,
    pub precision: u32,
}

impl ScaledDiscrepancy {
    /// `D_N`.
    pub fn value<T: Scalar>(&self) -> T {
        T::from_ratio(&BigInt::from(self.scaled), &(BigInt::from(self.n) << self.precision as usize))
    }

    /// `N · D_N`.
    pub fn times_n<T: Scalar>(&self) -> T {
        T::from_ratio(&BigInt::from(self.scaled), &(BigInt::from(1u8) << self.precision as usize))
    }
}

fn check_size(points: &PointSet) -> Result<(), DiscrepancyError> {
    if points.is_empty() {
        return Err(DiscrepancyError::EmptySet);
    }
    if points.len() as u128 >= 1 << 40 {
        return Err(DiscrepancyError::BudgetExceeded {
            needed: points.len() as u128,
            budget: 1 << 40,
        });
    }
    Ok(())
}

/// Star discrepancy, scaled.
pub fn star_discrepancy_scaled(points: &PointSet) -> Result<ScaledDiscrepancy, DiscrepancyError> {
    check_size(points)?;
    let sorted = points.sorted_numerators();
    let n = sorted.len() as i128;
    let one = 1i128 << points.precision();
    let best = sorted
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let i = i as i128 + 1;
            let x = n * a as i128;
            (i * one - x).max(x - (i - 1) * one)
        })
        .max()
        .unwrap();
    Ok(ScaledDiscrepancy {
        scaled: best,
        n: sorted.len() as u64,
        precision: points.precision(),
    })
}

/// `D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N)`.
pub fn star_discrepancy<T: Scalar>(points: &PointSet) -> Result<T, DiscrepancyError> {
    Ok(star_discrepancy_scaled(points)?.value())
}

/// Extreme discrepancy, scaled.
///
/// With `G(y) = #{x < y} - N·y` the deviation of `[a, b)` is `G(b) - G(a)`.
/// `G` drops linearly between point values and jumps at them, so the extremes
/// are attained (or approached) at point values, their right limits, 0 and 1.
pub fn extreme_discrepancy_scaled(points: &PointSet) -> Result<ScaledDiscrepancy, DiscrepancyError> {
    check_size(points)?;
    let sorted = points.sorted_numerators();
    let n = sorted.len() as i128;
    let one = 1i128 << points.precision();
    // (G at v, G just right of v) for each distinct value v, ascending
    let mut levels: Vec<(i128, i128)> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        let drift = n * v as i128;
        levels.push((i as i128 * one - drift, j as i128 * one - drift));
        i = j;
    }

    // too many points: right limit late, point value (or 0) early
    let mut lowest = 0i128;
    let mut over = 0i128;
    for &(at, right) in &levels {
        lowest = lowest.min(at);
        over = over.max(right - lowest);
    }
    over = over.max(-lowest);

    // too few points: right limit (or 0) early, point value (or 1) strictly later
    let mut highest = 0i128;
    let mut under = 0i128;
    for &(at, right) in &levels {
        under = under.max(highest - at);
        highest = highest.max(right);
    }
    under = under.max(highest);

    Ok(ScaledDiscrepancy {
        scaled: over.max(under),
        n: sorted.len() as u64,
        precision: points.precision(),
    })
}

/// `D_N = sup_{0 <= a < b <= 1} |#{x in [a,b)}/N - (b - a)|`.
pub fn extreme_discrepancy<T: Scalar>(points: &PointSet) -> Result<T, DiscrepancyError> {
    Ok(extreme_discrepancy_scaled(points)?.value())
}

/// Maximum of `|count/N - length|` over every interval with endpoints on the
/// `2^-q` grid, each endpoint open or closed.
///
/// Closed and open endpoints at grid points stand in for the one-sided limits
/// of half-open intervals.
pub fn brute_force_discrepancy<T: Scalar>(points: &PointSet, q: u32) -> Result<T, DiscrepancyError> {
    if q > points.precision() {
        return Err(DiscrepancyError::ResolutionExceedsPrecision {
            resolution: q,
            precision: points.precision(),
        });
    }
    check_size(points)?;
    if q > 16 {
        return Err(DiscrepancyError::BudgetExceeded {
            needed: 1u128 << (2 * q),
            budget: 1 << 32,
        });
    }
    let grid = 1usize << q;
    let shift = points.precision() - q;
    // below[g] = #{x < g/2^q}, at_most[g] = #{x <= g/2^q}
    let mut below = vec![0i128; grid + 1];
    let mut at_most = vec![0i128; grid + 1];
    for g in 0..=grid {
        let edge = (g as u128) << shift;
        below[g] = points.numerators().iter().filter(|&&x| (x as u128) < edge).count() as i128;
        at_most[g] = points.numerators().iter().filter(|&&x| (x as u128) <= edge).count() as i128;
    }
    let n = points.len() as i128;
    let one = 1i128 << q;
    let mut best = 0i128;
    for a in 0..=grid {
        for b in a..=grid {
            let drift = n * (b - a) as i128;
            let closed = at_most[b] - below[a];
            let mut counts = vec![closed];
            if b > a {
                counts.push(below[b] - below[a]);
                counts.push(below[b] - at_most[a]);
                counts.push(at_most[b] - at_most[a]);
            }
            for c in counts {
                best = best.max((c * one - drift).abs());
            }
        }
    }
    Ok(T::from_ratio(&BigInt::from(best), &(BigInt::from(n) << q as usize)))
}

/// `ε = (count - γ·2^m·2^{2^m}) / 2^m` for `γ = gamma_num / 2^gamma_exp` over block `m`.
pub fn verify_lemma1(
    levin: &LevinNumber,
    m: u32,
    gamma_num: u64,
    gamma_exp: u32,
) -> Result<BigRational, DiscrepancyError> {
    let sweep = lemma1_sweep(levin, m, gamma_exp.max(1), DEFAULT_POINT_BUDGET)?;
    let c = if gamma_exp == 0 { gamma_num << 1 } else { gamma_num };
    sweep
        .epsilons
        .get(c as usize)
        .cloned()
        .ok_or_else(|| DiscrepancyError::Precondition(format!("γ = {gamma_num}/2^{gamma_exp} is not below 1")))
}

/// `ε` for every `γ = c / 2^resolution` over one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma1Sweep {
    pub m: u32,
    pub resolution: u32,
    /// Indexed by `c`.
    pub epsilons: Vec<BigRational>,
}

impl Lemma1Sweep {
    pub fn max_abs(&self) -> BigRational {
        self.epsilons.iter().map(|e| e.abs()).max().unwrap_or_else(BigRational::zero)
    }
}

fn block_size(m: u32) -> u128 {
    1u128 << (m + (1 << m))
}

fn check_budget(needed: u128, budget: u64) -> Result<(), DiscrepancyError> {
    if needed > budget as u128 {
        return Err(DiscrepancyError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

pub fn lemma1_sweep(levin: &LevinNumber, m: u32, resolution: u32, budget: u64) -> Result<Lemma1Sweep, DiscrepancyError> {
    if m == 0 || m >= 32 {
        return Err(DiscrepancyError::Precondition(format!("block {m} out of range")));
    }
    check_budget(block_size(m), budget)?;
    if !(1..=24).contains(&resolution) {
        return Err(DiscrepancyError::Precondition(format!("resolution {resolution} outside 1..=24")));
    }
    let total = block_size(m) as u64;
    let start = levin.block_offset(m)?;
    let mut histogram = vec![0u64; 1 << resolution];
    levin.for_each_point(start, total, resolution, |_, x| histogram[x as usize] += 1)?;
    let mut below = 0u64;
    let epsilons = histogram
        .iter()
        .enumerate()
        .map(|(c, &h)| {
            // count in [0, c/2^res) minus c/2^res · total, divided by 2^m
            let eps = BigRational::new(
                (BigInt::from(below) << resolution as usize) - BigInt::from(c) * BigInt::from(total),
                BigInt::from(1u8) << (resolution + m) as usize,
            );
            below += h;
            eps
        })
        .collect();
    Ok(Lemma1Sweep {
        m,
        resolution,
        epsilons,
    })
}

/// Cell counts `N(c)` for one `(m, i, B)`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Lemma2Counts {
    pub m: u32,
    pub i: u32,
    pub b: u64,
    /// Indexed by `c < 2^i`.
    pub counts: Vec<u64>,
}

impl Lemma2Counts {
    /// Cells that do not hold exactly `2^m` points.
    pub fn exceptions(&self) -> Vec<u64> {
        let full = 1u64 << self.m;
        (0..self.counts.len() as u64).filter(|&c| self.counts[c as usize] != full).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn conserved(&self) -> bool {
        self.total() == 1u64 << (self.m + self.i)
    }
}

/// Counts of `x_{n,k}`, `B·2^i <= n < (B+1)·2^i`, `k < 2^m`, in each `[c/2^i, (c+1)/2^i)`.
pub fn verify_lemma2(levin: &LevinNumber, m: u32, i: u32, b: u64) -> Result<Lemma2Counts, DiscrepancyError> {
    verify_lemma2_with_budget(levin, m, i, b, DEFAULT_POINT_BUDGET)
}

pub fn verify_lemma2_with_budget(
    levin: &LevinNumber,
    m: u32,
    i: u32,
    b: u64,
    budget: u64,
) -> Result<Lemma2Counts, DiscrepancyError> {
    if m == 0 || m > 6 || i >= 1 << m {
        return Err(DiscrepancyError::Precondition(format!("need 0 <= i < 2^m, got m={m}, i={i}")));
    }
    let span = (1u32 << m) - i;
    if span < 64 && b >> span != 0 {
        return Err(DiscrepancyError::Precondition(format!("need B < 2^(2^m - i), got B={b}")));
    }
    check_budget(1u128 << (m + i), budget)?;
    let precision = i.max(1);
    let shift = precision - i;
    let start = levin.block_offset(m)? + (((b as u128) << i) << m);
    let mut counts = vec![0u64; 1 << i];
    levin.for_each_point(start, 1u64 << (m + i), precision, |_, x| counts[(x >> shift) as usize] += 1)?;
    Ok(Lemma2Counts { m, i, b, counts })
}

/// Per-`i` summary of the exceptional-cell sweep over all `B`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Lemma2Level {
    pub i: u32,
    pub blocks: u64,
    pub max_exceptions: usize,
    pub all_conserved: bool,
}

/// Runs [`verify_lemma2`] for every `i < 2^m` and every `B`.
pub fn lemma2_sweep(levin: &LevinNumber, m: u32, budget: u64) -> Result<Vec<Lemma2Level>, DiscrepancyError> {
    if m == 0 || m > 6 {
        return Err(DiscrepancyError::Precondition(format!("block {m} out of range")));
    }
    check_budget(block_size(m) * (1u128 << m), budget)?;
    (0..1u32 << m)
        .into_par_iter()
        .map(|i| {
            let blocks = 1u64 << ((1u32 << m) - i);
            let mut level = Lemma2Level {
                i,
                blocks,
                max_exceptions: 0,
                all_conserved: true,
            };
            for b in 0..blocks {
                let counts = verify_lemma2_with_budget(levin, m, i, b, budget)?;
                level.max_exceptions = level.max_exceptions.max(counts.exceptions().len());
                level.all_conserved &= counts.conserved();
            }
            Ok(level)
        })
        .collect()
}

/// One row of a growth table.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow<T> {
    pub n: u64,
    pub precision: u32,
    /// `N · D_N` of the truncated points.
    pub nd: T,
    /// Certified enclosure of `N · D_N` for the untruncated points.
    pub nd_lower: T,
    pub nd_upper: T,
    /// `(log2 N)^2`
    pub log2_n_sq: f64,
    /// `N · D_N / (log2 N)^2`; `None` for `N = 1`.
    pub ratio: Option<f64>,
}

/// `⌈log2 N⌉ + 4`.
pub fn growth_precision(n: u64) -> u32 {
    let ceil_log = if n <= 1 { 0 } else { 64 - (n - 1).leading_zeros() };
    ceil_log + 4
}

/// Exact `N · D_N` over the first `N` points of `{2^n α}` for each `N`.
pub fn growth_table<T: Scalar>(levin: &LevinNumber, ns: &[u64]) -> Result<Vec<GrowthRow<T>>, DiscrepancyError> {
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns.first() == Some(&0) {
        return Err(DiscrepancyError::Precondition("N values must be positive and strictly increasing".into()));
    }
    let Some(&n_max) = ns.last() else {
        return Ok(Vec::new());
    };
    let top = growth_precision(n_max);
    let all = levin.points(0, n_max, top)?;
    ns.par_iter()
        .map(|&n| {
            let precision = growth_precision(n);
            let set = all.prefix(n as usize).truncated(precision);
            let d = extreme_discrepancy_scaled(&set)?;
            let nd: BigRational = d.times_n();
            // |D(true) - D(trunc)| <= 2^{1-P}
            let slack = BigRational::new(BigInt::from(n) * 2, BigInt::from(1u8) << precision as usize);
            let lower = (&nd - &slack).max(BigRational::zero());
            let upper = &nd + &slack;
            let log2 = (n as f64).log2();
            let log2_n_sq = log2 * log2;
            let ratio = (n >= 2).then(|| nd.to_f64().unwrap_or(f64::NAN) / log2_n_sq);
            Ok(GrowthRow {
                n,
                precision,
                nd: T::from_ratio(nd.numer(), nd.denom()),
                nd_lower: T::from_ratio(lower.numer(), lower.denom()),
                nd_upper: T::from_ratio(upper.numer(), upper.denom()),
                log2_n_sq,
                ratio,
            })
        })
        .collect()
}

/// CSV with header `N,ND_N_num,ND_N_den,log2N_sq,ratio`, plus enclosure columns on request.
pub fn growth_csv(rows: &[GrowthRow<BigRational>], enclosure: bool) -> String {
    let mut out = String::from("N,ND_N_num,ND_N_den,log2N_sq,ratio");
    if enclosure {
        out.push_str(",precision,ND_N_lower_num,ND_N_lower_den,ND_N_upper_num,ND_N_upper_den");
    }
    out.push('\n');
    for row in rows {
        let ratio = row.ratio.map(|r| format!("{r:.9}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{:.9},{}",
            row.n,
            row.nd.numer(),
            row.nd.denom(),
            row.log2_n_sq,
            ratio
        ));
        if enclosure {
            out.push_str(&format!(
                ",{},{},{},{},{}",
                row.precision,
                row.nd_lower.numer(),
                row.nd_lower.denom(),
                row.nd_upper.numer(),
                row.nd_upper.denom()
            ));
        }
        out.push('\n');
    }
    out
}

/// Result of the pigeonhole argument for `D_N ≥ c · log N / N`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum SchmidtOutcome {
    /// `|count(J) - N·λ(J)| >= L/4` for the first `n` points.
    Witness {
        n: u64,
        interval: DyadicInterval,
        count: u64,
        /// `|count - N·λ(J)|` as `num/den`
        defect: (String, String),
        /// `L / 4`
        threshold: (String, String),
    },
    /// `N · D_N > ln N`, so `D_N <= log N / N` already fails at this `N`.
    AssumptionViolated { n: u64, nd: (String, String) },
}

fn rational_pair(r: &BigRational) -> (String, String) {
    (r.numer().to_string(), r.denom().to_string())
}

/// `⌊log M / (2 log 2)⌋`, computed exactly as `⌊⌊log2 M⌋ / 2⌋`.
pub fn schmidt_l(m: u64) -> u32 {
    assert!(m >= 1);
    (63 - m.leading_zeros()) / 2
}

/// Finds a certified `N <= M + L` for the first `M + L` points of `points`.
pub fn schmidt_witness(points: &PointSet, m: u64) -> Result<SchmidtOutcome, DiscrepancyError> {
    if m < 2 {
        return Err(DiscrepancyError::Precondition("M must be at least 2".into()));
    }
    let l = schmidt_l(m);
    let u = m + l as u64;
    let slack = m as f64 / (1u64 << l) as f64 - (m as f64).ln();
    if slack <= 0.0 {
        return Err(DiscrepancyError::Precondition(format!(
            "M / 2^L - log M = {slack} is not positive for M = {m}"
        )));
    }
    if (points.len() as u64) < u {
        return Err(DiscrepancyError::Precondition(format!(
            "need {u} points, got {}",
            points.len()
        )));
    }
    if points.precision() < l.max(1) {
        return Err(DiscrepancyError::ResolutionExceedsPrecision {
            resolution: l,
            precision: points.precision(),
        });
    }
    let xs = points.numerators();
    let p = points.precision();
    let half = DyadicInterval::cell(0, 1)?;
    let tiny = DyadicInterval::cell(0, l)?;
    let threshold = BigRational::new(BigInt::from(l), BigInt::from(4));

    let Some(first) = (0..m as usize).find(|&i| tiny.contains(xs[i], p)) else {
        return assumption_violation(points, m);
    };
    let run_holds = (first..first + l as usize).all(|i| half.contains(xs[i], p));
    if run_holds {
        let below = xs[..first].iter().filter(|&&x| half.contains(x, p)).count() as u64;
        let quota = BigRational::new(BigInt::from(first), BigInt::from(2)) - &threshold;
        let n = if BigRational::from_integer(below.into()) <= quota {
            first as u64
        } else {
            first as u64 + l as u64
        };
        if let Some(witness) = certify(points, n, half, &threshold)? {
            return Ok(witness);
        }
    }
    // the run argument needs x_{n+1} = {2x_n}; otherwise scan prefixes directly
    let mut in_half = 0u64;
    let mut in_tiny = 0u64;
    for n in 1..=u {
        let x = xs[n as usize - 1];
        in_half += half.contains(x, p) as u64;
        in_tiny += tiny.contains(x, p) as u64;
        for (interval, count) in [(half, in_half), (tiny, in_tiny)] {
            if defect(n, count, &interval) >= threshold {
                if let Some(witness) = certify(points, n, interval, &threshold)? {
                    return Ok(witness);
                }
            }
        }
    }
    for n in 2..=u {
        let set = points.prefix(n as usize);
        let nd: BigRational = extreme_discrepancy_scaled(&set)?.times_n();
        if nd.to_f64().unwrap_or(0.0) > (n as f64).ln() {
            return Ok(SchmidtOutcome::AssumptionViolated {
                n,
                nd: rational_pair(&nd),
            });
        }
    }
    Err(DiscrepancyError::Inconclusive(u))
}

fn defect(n: u64, count: u64, interval: &DyadicInterval) -> BigRational {
    let expected = BigRational::from_integer(n.into()) * interval.length::<BigRational>();
    (BigRational::from_integer(count.into()) - expected).abs()
}

/// Recounts with [`count_in`] and returns the witness if the defect reaches the threshold.
fn certify(
    points: &PointSet,
    n: u64,
    interval: DyadicInterval,
    threshold: &BigRational,
) -> Result<Option<SchmidtOutcome>, DiscrepancyError> {
    if n == 0 {
        return Ok(None);
    }
    let count = count_in(&points.prefix(n as usize), &interval)?;
    let d = defect(n, count, &interval);
    Ok((d >= *threshold).then(|| SchmidtOutcome::Witness {
        n,
        interval,
        count,
        defect: rational_pair(&d),
        threshold: rational_pair(threshold),
    }))
}

fn assumption_violation(points: &PointSet, m: u64) -> Result<SchmidtOutcome, DiscrepancyError> {
    let nd: BigRational = extreme_discrepancy_scaled(&points.prefix(m as usize))?.times_n();
    if nd.to_f64().unwrap_or(0.0) > (m as f64).ln() {
        Ok(SchmidtOutcome::AssumptionViolated {
            n: m,
            nd: rational_pair(&nd),
        })
    } else {
        Err(DiscrepancyError::Inconclusive(m))
    }
}
