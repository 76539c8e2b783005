//! Exhaustive sweeps of the identities, counted as checks and failures.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::discrepancy::{
    count_in, extreme_discrepancy_scaled, lemma1_sweep, lemma2_sweep, schmidt_witness, DiscrepancyError,
    SchmidtOutcome,
};
use crate::levin::{van_der_corput_points, LevinNumber};
use crate::pascal::{
    block_identities, max_selector_groups, ones_count, prop1_kappa, prop1_value, submatrices, verify_corollary,
    verify_decimation, verify_prefix_sum, verify_sum_identity, xi, CorollaryItem, PascalCoords, PascalError,
    SelectorVec,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub name: String,
    pub checked: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl SweepSummary {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            checked: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.checked += other.checked;
        self.failures += other.failures;
        self.first_failure = self.first_failure.or(other.first_failure);
        self
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// `(k, t)` with `k + t < 2^m`, `1 <= t`, for `m = 1..=max_m`.
fn strict_pairs(max_m: u32) -> Vec<(u32, u64, u64)> {
    (1..=max_m)
        .flat_map(|m| {
            let size = 1u64 << m;
            (1..size).flat_map(move |t| (0..size - t).map(move |k| (m, k, t)))
        })
        .collect()
}

fn par_sweep<I, F>(name: &str, items: Vec<I>, check: F) -> Result<SweepSummary, PascalError>
where
    I: Send + Sync,
    F: Fn(&I, &mut SweepSummary) -> Result<(), PascalError> + Send + Sync,
{
    items
        .par_iter()
        .map(|item| {
            let mut s = SweepSummary::new(name);
            check(item, &mut s)?;
            Ok(s)
        })
        .try_reduce(|| SweepSummary::new(name), |a, b| Ok(a.merge(b)))
}

/// Weighted-sum identity for `t <= max_t`, `k, l <= max_kl`.
pub fn lemma7(max_t: u64, max_kl: u64) -> SweepSummary {
    let mut s = SweepSummary::new("lemma7");
    for t in 0..=max_t {
        for k in 0..=max_kl {
            for l in 0..=max_kl {
                let (lhs, rhs) = verify_sum_identity(t, k, l);
                s.record(lhs == rhs, || format!("t={t} k={k} l={l}"));
            }
        }
    }
    s
}

/// All three items over their domains for `t <= max_t`, `k, l <= max_kl`.
pub fn corollary1(max_t: u64, max_kl: u64) -> Result<SweepSummary, PascalError> {
    let mut s = SweepSummary::new("corollary1");
    for t in 0..=max_t {
        for k in 0..=max_kl {
            for l in 0..=max_kl {
                let mut items = vec![];
                if l < t {
                    items.extend([CorollaryItem::A, CorollaryItem::B]);
                }
                if t >= 1 {
                    items.push(CorollaryItem::C);
                }
                for item in items {
                    let (lhs, rhs) = verify_corollary(t, k, l, item)?;
                    s.record(lhs == rhs, || format!("{item:?} t={t} k={k} l={l}"));
                }
            }
        }
    }
    Ok(s)
}

/// `rank A_{k,t} = t` for `m <= max_m`, `1 <= t <= 2^m`, `k <= 2^m - t`.
pub fn regularity(max_m: u32) -> Result<SweepSummary, PascalError> {
    let pairs: Vec<(u32, u64, u64)> = (1..=max_m)
        .flat_map(|m| {
            let size = 1u64 << m;
            (1..=size).flat_map(move |t| (0..=size - t).map(move |k| (m, k, t)))
        })
        .collect();
    par_sweep("regularity", pairs, |&(m, k, t), s| {
        let ok = match submatrices(&PascalCoords::new(k, t, m)?) {
            Ok(_) => true,
            Err(PascalError::RegularityViolation { .. }) => false,
            Err(e) => return Err(e),
        };
        s.record(ok, || format!("m={m} k={k} t={t}"));
        Ok(())
    })
}

/// Both block identities for every strict `(k, t)` at `m <= max_m`.
pub fn lemma6(max_m: u32) -> Result<SweepSummary, PascalError> {
    par_sweep("lemma6", strict_pairs(max_m), |&(m, k, t), s| {
        let check = block_identities(&PascalCoords::new(k, t, m)?)?;
        s.record(check.row_identity, || format!("row identity m={m} k={k} t={t}"));
        s.record(check.tail_identity, || format!("tail identity m={m} k={k} t={t}"));
        Ok(())
    })
}

/// `c A^{-1} = ξ_t`, and the selector term against its closed form for every valid `v`.
pub fn prop1(max_m: u32) -> Result<SweepSummary, PascalError> {
    par_sweep("prop1", strict_pairs(max_m), |&(m, k, t), s| {
        let coords = PascalCoords::new(k, t, m)?;
        s.record(prop1_kappa(&coords)? == xi(t), || format!("kappa m={m} k={k} t={t}"));
        for v in 0..=max_selector_groups((1u64 << m) - t) as usize {
            let (algebraic, closed) = prop1_value(&coords, v)?;
            s.record(algebraic == closed, || format!("selector m={m} k={k} t={t} v={v}"));
        }
        Ok(())
    })
}

/// `Σ_{j=1}^u binom(i+j, j)` against its closed form for `i, u <= max`.
pub fn lemma3(max_i: u64, max_u: u64) -> SweepSummary {
    let mut s = SweepSummary::new("lemma3");
    for i in 0..=max_i {
        for u in 0..=max_u {
            let (lhs, rhs) = verify_prefix_sum(i, u);
            s.record(lhs == rhs, || format!("i={i} u={u}"));
        }
    }
    s
}

/// Enumerated ones of `D_m` against the closed form.
pub fn lemma4(ms: impl IntoIterator<Item = u32>) -> Result<SweepSummary, PascalError> {
    let mut s = SweepSummary::new("lemma4");
    for m in ms {
        let count = ones_count(m)?;
        s.record(count.agrees() == Some(true), || {
            format!("m={m}: enumerated {:?}, formula {}", count.enumerated, count.formula)
        });
    }
    Ok(s)
}

/// Decimation for rows `i < rows` and selectors with offsets `0..=2`, up to `max_groups` groups.
pub fn lemma5(rows: u64, max_groups: usize) -> SweepSummary {
    let selectors: Vec<SelectorVec> = (0..=2)
        .flat_map(|offset| (1..=max_groups).map(move |groups| SelectorVec { groups, offset }))
        .collect();
    let mut s = SweepSummary::new("lemma5");
    for i in 0..rows {
        for sel in &selectors {
            let (lhs, rhs) = verify_decimation(i, sel);
            s.record(lhs == rhs, || format!("i={i} {sel:?}"));
        }
    }
    s
}

/// `|ε| < 5` for every `γ = c / 2^resolution` over blocks `1..=max_m`.
pub fn lemma1(levin: &LevinNumber, max_m: u32, resolution: u32, budget: u64) -> Result<SweepSummary, DiscrepancyError> {
    let five = BigRational::from_integer(BigInt::from(5));
    let mut s = SweepSummary::new("lemma1");
    for m in 1..=max_m {
        let sweep = lemma1_sweep(levin, m, resolution, budget)?;
        for (c, eps) in sweep.epsilons.iter().enumerate() {
            s.record(num_traits::Signed::abs(eps) < five, || format!("m={m} c={c}: ε = {eps}"));
        }
    }
    Ok(s)
}

/// Exception bound and conservation for every `i < 2^m` and every `B`, blocks `1..=max_m`.
pub fn lemma2(levin: &LevinNumber, max_m: u32, budget: u64) -> Result<SweepSummary, DiscrepancyError> {
    let mut s = SweepSummary::new("lemma2");
    for m in 1..=max_m {
        for level in lemma2_sweep(levin, m, budget)? {
            s.record(level.max_exceptions <= 1 << (m + 1), || {
                format!("m={m} i={}: {} exceptions", level.i, level.max_exceptions)
            });
            s.record(level.all_conserved, || format!("m={m} i={}: count not conserved", level.i));
        }
    }
    Ok(s)
}

/// Checks a pigeonhole outcome independently of how it was found.
pub fn certify_schmidt(points: &crate::levin::PointSet, outcome: &SchmidtOutcome, m: u64) -> Result<bool, DiscrepancyError> {
    let limit = m + crate::discrepancy::schmidt_l(m) as u64;
    match outcome {
        SchmidtOutcome::Witness {
            n,
            interval,
            count,
            defect,
            threshold,
        } => {
            let recount = count_in(&points.prefix(*n as usize), interval)?;
            let expected = BigRational::from_integer((*n).into()) * interval.length::<BigRational>();
            let actual = num_traits::Signed::abs(&(BigRational::from_integer(recount.into()) - expected));
            let parse = |(a, b): &(String, String)| {
                BigRational::new(a.parse::<BigInt>().unwrap_or_default(), b.parse::<BigInt>().unwrap_or(BigInt::from(1)))
            };
            let quarter = BigRational::new(crate::discrepancy::schmidt_l(m).into(), 4.into());
            Ok(*n <= limit && recount == *count && actual == parse(defect) && parse(threshold) == quarter && actual >= quarter)
        }
        SchmidtOutcome::AssumptionViolated { n, nd } => {
            let scaled: BigRational = extreme_discrepancy_scaled(&points.prefix(*n as usize))?.times_n();
            let reported = BigRational::new(nd.0.parse::<BigInt>().unwrap_or_default(), nd.1.parse::<BigInt>().unwrap_or(BigInt::from(1)));
            Ok(*n <= limit && scaled == reported && num_traits::ToPrimitive::to_f64(&scaled).unwrap_or(0.0) > (*n as f64).ln())
        }
    }
}

/// Pigeonhole outcomes on the digit prefix and on the van der Corput control, each certified.
pub fn schmidt(levin: &LevinNumber, m: u64, precision: u32) -> Result<(SweepSummary, Vec<SchmidtOutcome>), DiscrepancyError> {
    let count = m + crate::discrepancy::schmidt_l(m) as u64;
    let sets = [levin.points(1, count, precision)?, van_der_corput_points(count, precision)?];
    let mut s = SweepSummary::new("schmidt");
    let mut outcomes = Vec::new();
    for (label, set) in ["levin", "van-der-corput"].into_iter().zip(sets.iter()) {
        let outcome = schmidt_witness(set, m)?;
        s.record(certify_schmidt(set, &outcome, m)?, || format!("{label}: {outcome:?}"));
        outcomes.push(outcome);
    }
    Ok((s, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        assert!(lemma7(4, 8).passed());
        assert!(corollary1(4, 8).unwrap().passed());
        assert!(regularity(3).unwrap().passed());
        assert!(lemma6(3).unwrap().passed());
        assert!(prop1(4).unwrap().passed());
        assert!(lemma3(16, 16).passed());
        assert!(lemma4([8, 9]).unwrap().passed());
        assert!(lemma5(64, 4).passed());
    }

    #[test]
    fn counts_are_exhaustive() {
        // t = 0..=2, k, l = 0..=3
        assert_eq!(lemma7(2, 3).checked, 3 * 16);
        // m = 1: (k, t) in {(0,1), (1,1), (0,2)}
        assert_eq!(regularity(1).unwrap().checked, 3);
    }

    #[test]
    fn failures_are_recorded() {
        let mut s = SweepSummary::new("x");
        s.record(true, || unreachable!());
        s.record(false, || "first".into());
        s.record(false, || "second".into());
        assert_eq!((s.checked, s.failures), (3, 2));
        assert_eq!(s.first_failure.as_deref(), Some("first"));
    }

    #[test]
    fn schmidt_outcomes_certify() {
        let levin = LevinNumber::new();
        let (summary, outcomes) = schmidt(&levin, 1 << 12, 16).unwrap();
        assert!(summary.passed(), "{summary:?}");
        assert_eq!(outcomes.len(), 2);
    }
}
