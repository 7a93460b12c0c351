//! The three-way rule: accept when the region sits inside the hypothesis, reject
//! when it sits inside the complement, and remain agnostic otherwise.

use serde::{Deserialize, Serialize};

use crate::dist::student_t_cdf;
use crate::error::{ReactError, Result};
use crate::hypotheses::{complement, is_subset, HypothesisRegion, Shape, Subset};
use crate::regions::{
    invert_pvalue_region, welch_components, ConvexRegion, EllipsoidRegion, IntervalRegion, Region,
};
use crate::scalar::Scalar;

/// Outcome of a three-way test, ordered Accept (0) < Agnostic (1/2) < Reject (1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Agnostic,
    Reject,
}

impl Decision {
    /// Numeric code in {0, 1/2, 1}.
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Decision::Accept => T::zero(),
            Decision::Agnostic => T::lit(0.5),
            Decision::Reject => T::one(),
        }
    }

    /// The decision about the complementary hypothesis.
    pub fn invert(self) -> Self {
        match self {
            Decision::Accept => Decision::Reject,
            Decision::Agnostic => Decision::Agnostic,
            Decision::Reject => Decision::Accept,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Accept => "accept",
            Decision::Agnostic => "agnostic",
            Decision::Reject => "reject",
        }
    }
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One hypothesis decided against one region.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar", into = "TestRecord<T>")]
pub struct TestResult<T: Scalar> {
    pub hypothesis_id: String,
    pub hypothesis: HypothesisRegion<T>,
    pub decision: Decision,
    /// Range of the tested contrast over the region, for linear hypotheses.
    pub extent: Option<IntervalRegion<T>>,
    pub level: T,
    pub region_key: u64,
}

/// Serialized form of a [`TestResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TestRecord<T: Scalar> {
    pub hypothesis: String,
    pub decision: Decision,
    pub extent: Option<[T; 2]>,
    pub level: T,
}

impl<T: Scalar> From<TestResult<T>> for TestRecord<T> {
    fn from(r: TestResult<T>) -> Self {
        Self {
            hypothesis: r.hypothesis_id,
            decision: r.decision,
            extent: r.extent.map(|e| [e.lower, e.upper]),
            level: r.level,
        }
    }
}

fn check_dims<T: Scalar>(region: &Region<T>, h: &HypothesisRegion<T>) -> Result<()> {
    if region.dimension() != h.dimension() {
        return Err(ReactError::DimensionMismatch {
            expected: region.dimension(),
            actual: h.dimension(),
        });
    }
    Ok(())
}

/// Classifies the closed segment `[lo, hi]` against a one-dimensional set.
fn classify_segment<T: Scalar>(
    spans: &[crate::hypotheses::Span<T>],
    lo: T,
    hi: T,
) -> Decision {
    if spans.iter().any(|s| s.contains_segment(lo, hi)) {
        Decision::Accept
    } else if spans.iter().all(|s| s.misses_segment(lo, hi)) {
        Decision::Reject
    } else {
        Decision::Agnostic
    }
}

pub(crate) fn decide_points<'a, T: Scalar>(
    points: impl Iterator<Item = &'a [T]>,
    h: &HypothesisRegion<T>,
) -> Result<Decision> {
    let (mut inside, mut outside) = (false, false);
    for p in points {
        if h.contains(p) {
            inside = true;
        } else {
            outside = true;
        }
        if inside && outside {
            return Ok(Decision::Agnostic);
        }
    }
    match (inside, outside) {
        (true, false) => Ok(Decision::Accept),
        (false, true) => Ok(Decision::Reject),
        _ => Err(ReactError::EmptyRegion),
    }
}

fn decide_max_pairwise<T: Scalar>(
    region: &EllipsoidRegion<T>,
    delta: T,
    closed: bool,
) -> Result<Decision> {
    let p = region.dimension();
    let mut all_inside = true;
    for i in 0..p {
        for j in (i + 1)..p {
            let band = HypothesisRegion::pairwise_band(p, i, j, delta)?.with_closed(closed);
            match decide_convex(region, &band)?.0 {
                Decision::Reject => return Ok(Decision::Reject),
                Decision::Agnostic => all_inside = false,
                Decision::Accept => {}
            }
        }
    }
    if all_inside {
        return Ok(Decision::Accept);
    }
    // no single pair is conclusive; the region may still miss the intersection
    let gap = region.min_distance_sq_to_spread_set(delta);
    let slack = T::lit(1e-9) * region.radius_sq().max(T::one());
    if gap > region.radius_sq() + slack {
        Ok(Decision::Reject)
    } else {
        Ok(Decision::Agnostic)
    }
}

fn decide_convex<T: Scalar, R: ConvexRegion<T>>(
    region: &R,
    h: &HypothesisRegion<T>,
) -> Result<(Decision, Option<IntervalRegion<T>>)> {
    match h.linear() {
        Some(lin) => {
            let ext = region.contrast_extent(&lin.weights, T::zero())?;
            Ok((classify_segment(lin.set.spans(), ext.lower, ext.upper), Some(ext)))
        }
        None => Err(ReactError::UnsupportedPair {
            region: "convex",
            hypothesis: h.variant_name(),
        }),
    }
}

/// Decision together with the contrast extent it was based on, if any.
pub fn decide_with_extent<T: Scalar>(
    region: &Region<T>,
    h: &HypothesisRegion<T>,
) -> Result<(Decision, Option<IntervalRegion<T>>)> {
    check_dims(region, h)?;
    match region {
        Region::Grid(g) => Ok((decide_points(g.members(), h)?, None)),
        Region::Interval(iv) => decide_convex(iv, h),
        Region::Ellipsoid(e) => {
            if h.linear().is_some() {
                return decide_convex(e, h);
            }
            match h.shape() {
                Shape::MaxPairwiseBand { delta, .. } => {
                    Ok((decide_max_pairwise(e, *delta, h.is_closed())?, None))
                }
                Shape::Complement { inner } => {
                    let (d, _) = decide_with_extent(region, inner)?;
                    Ok((d.invert(), None))
                }
                _ => Err(ReactError::UnsupportedPair {
                    region: region.kind(),
                    hypothesis: h.variant_name(),
                }),
            }
        }
    }
}

/// Accept iff `region ⊆ h`, reject iff `region ⊆ complement(h)`, agnostic otherwise.
pub fn decide<T: Scalar>(region: &Region<T>, h: &HypothesisRegion<T>) -> Result<Decision> {
    decide_with_extent(region, h).map(|(d, _)| d)
}

/// Decides every hypothesis against the same region, without any level correction.
/// Hypotheses are labelled `H1`, `H2`, ... in order.
pub fn decide_family<T: Scalar>(
    region: &Region<T>,
    hs: &[HypothesisRegion<T>],
) -> Result<Vec<TestResult<T>>> {
    decide_family_named(
        region,
        hs.iter()
            .enumerate()
            .map(|(i, h)| (format!("H{}", i + 1), h.clone())),
    )
}

pub fn decide_family_named<T: Scalar>(
    region: &Region<T>,
    hs: impl IntoIterator<Item = (String, HypothesisRegion<T>)>,
) -> Result<Vec<TestResult<T>>> {
    let key = region.fingerprint();
    hs.into_iter()
        .map(|(id, h)| {
            let (decision, extent) = decide_with_extent(region, &h)?;
            Ok(TestResult {
                hypothesis_id: id,
                hypothesis: h,
                decision,
                extent,
                level: region.level(),
                region_key: key,
            })
        })
        .collect()
}

/// Three-way decision straight from a p-value function: accept when every point
/// outside `h` has p-value at most alpha, reject when every point inside does.
pub fn decide_via_pvalues<T, F>(
    pvalue_fn: F,
    grid: &[Vec<T>],
    alpha: T,
    h: &HypothesisRegion<T>,
) -> Result<Decision>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
{
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(ReactError::InvalidAlpha(alpha.as_f64()));
    }
    if grid.is_empty() {
        return Err(ReactError::EmptyGrid);
    }
    let mut max_in: Option<T> = None;
    let mut max_out: Option<T> = None;
    for point in grid {
        if point.len() != h.dimension() {
            return Err(ReactError::DimensionMismatch {
                expected: h.dimension(),
                actual: point.len(),
            });
        }
        let p = pvalue_fn(point);
        let slot = if h.contains(point) { &mut max_in } else { &mut max_out };
        *slot = Some(slot.map_or(p, |m: T| m.max(p)));
    }
    let (max_in, max_out) = match (max_in, max_out) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(ReactError::GridNotStraddling),
    };
    if max_in <= alpha && max_out <= alpha {
        return Err(ReactError::EmptyRegion);
    }
    Ok(if max_out <= alpha {
        Decision::Accept
    } else if max_in <= alpha {
        Decision::Reject
    } else {
        Decision::Agnostic
    })
}

/// Same as [`decide_via_pvalues`] but through the inverted region.
pub fn decide_on_inverted_grid<T, F>(
    pvalue_fn: F,
    grid: Vec<Vec<T>>,
    alpha: T,
    h: &HypothesisRegion<T>,
) -> Result<Decision>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
{
    let region = invert_pvalue_region(pvalue_fn, grid, alpha)?;
    decide(&Region::Grid(region), h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TostOutcome {
    EquivalenceEstablished,
    NotEstablished,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TostResult<T: Scalar> {
    pub outcome: TostOutcome,
    pub estimate: T,
    pub std_error: T,
    pub df: T,
    /// p-value against `diff <= -delta`.
    pub p_lower: T,
    /// p-value against `diff >= delta`.
    pub p_upper: T,
}

/// Classical two one-sided Welch t-tests for `|mean(a) - mean(b)| <= delta`.
pub fn tost_decision<T: Scalar>(a: &[T], b: &[T], delta: T, alpha: T) -> Result<TostResult<T>> {
    if !(alpha > T::zero() && alpha < T::lit(0.5)) {
        return Err(ReactError::InvalidAlpha(alpha.as_f64()));
    }
    if !(delta >= T::zero()) {
        return Err(ReactError::NegativeDelta(delta.as_f64()));
    }
    let (diff, se, df) = welch_components(a, b)?;
    let p_lower = T::one() - student_t_cdf((diff + delta) / se, df);
    let p_upper = student_t_cdf((diff - delta) / se, df);
    let outcome = if p_lower <= alpha && p_upper <= alpha {
        TostOutcome::EquivalenceEstablished
    } else {
        TostOutcome::NotEstablished
    };
    Ok(TostResult {
        outcome,
        estimate: diff,
        std_error: se,
        df,
        p_lower,
        p_upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceRule {
    Propriety,
    Monotonicity,
    Invertibility,
    Consonance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: CoherenceRule,
    pub hypotheses: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub violations: Vec<Violation>,
}

impl CoherenceReport {
    pub fn is_coherent(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, rule: CoherenceRule) -> usize {
        self.violations.iter().filter(|v| v.rule == rule).count()
    }
}

/// Audits a set of results from one region for propriety, monotonicity,
/// invertibility and intersection consonance. Only hypothesis pairs the
/// `subset` oracle can decide are checked.
pub fn check_coherence<T, S>(results: &[TestResult<T>], subset: S) -> Result<CoherenceReport>
where
    T: Scalar,
    S: Fn(&HypothesisRegion<T>, &HypothesisRegion<T>) -> Subset,
{
    if let Some(first) = results.first() {
        if results.iter().any(|r| r.region_key != first.region_key) {
            return Err(ReactError::MixedRegions);
        }
    }
    let mut violations = Vec::new();
    let mut flag = |rule, ids: &[&str]| {
        violations.push(Violation {
            rule,
            hypotheses: ids.iter().map(|s| s.to_string()).collect(),
        })
    };

    for r in results {
        let whole = HypothesisRegion::whole_space(r.hypothesis.dimension());
        let empty = complement(&whole);
        if subset(&whole, &r.hypothesis) == Subset::Yes && r.decision != Decision::Accept {
            flag(CoherenceRule::Propriety, &[&r.hypothesis_id]);
        }
        if subset(&r.hypothesis, &empty) == Subset::Yes && r.decision != Decision::Reject {
            flag(CoherenceRule::Propriety, &[&r.hypothesis_id]);
        }
    }

    let complements: Vec<HypothesisRegion<T>> =
        results.iter().map(|r| complement(&r.hypothesis)).collect();
    for (i, a) in results.iter().enumerate() {
        for (j, b) in results.iter().enumerate() {
            if i == j {
                continue;
            }
            // a ⊆ b forces R_b <= R_a
            if subset(&a.hypothesis, &b.hypothesis) == Subset::Yes && b.decision > a.decision {
                flag(CoherenceRule::Monotonicity, &[&a.hypothesis_id, &b.hypothesis_id]);
            }
            if i < j
                && subset(&b.hypothesis, &complements[i]) == Subset::Yes
                && subset(&complements[i], &b.hypothesis) == Subset::Yes
                && b.decision != a.decision.invert()
            {
                flag(CoherenceRule::Invertibility, &[&a.hypothesis_id, &b.hypothesis_id]);
            }
        }
    }

    // intersections of two accepted hypotheses
    let accepted: Vec<&TestResult<T>> =
        results.iter().filter(|r| r.decision == Decision::Accept).collect();
    for (x, a) in accepted.iter().enumerate() {
        for b in accepted.iter().skip(x + 1) {
            let Some(meet) = linear_intersection(&a.hypothesis, &b.hypothesis) else {
                continue;
            };
            for c in results {
                if c.decision != Decision::Accept && subset(&meet, &c.hypothesis) == Subset::Yes {
                    flag(
                        CoherenceRule::Consonance,
                        &[&a.hypothesis_id, &b.hypothesis_id, &c.hypothesis_id],
                    );
                }
            }
        }
    }

    // accepted pairwise bands covering a max-pairwise band
    for m in results {
        let Shape::MaxPairwiseBand { delta, dimension } = m.hypothesis.shape() else {
            continue;
        };
        if m.decision == Decision::Accept {
            continue;
        }
        let mut witnesses = Vec::new();
        let mut covered = true;
        'pairs: for i in 0..*dimension {
            for j in (i + 1)..*dimension {
                let target = HypothesisRegion::pairwise_band(*dimension, i, j, *delta)?
                    .with_closed(m.hypothesis.is_closed());
                match accepted
                    .iter()
                    .find(|r| subset(&r.hypothesis, &target) == Subset::Yes)
                {
                    Some(r) => witnesses.push(r.hypothesis_id.as_str()),
                    None => {
                        covered = false;
                        break 'pairs;
                    }
                }
            }
        }
        if covered {
            witnesses.push(&m.hypothesis_id);
            flag(CoherenceRule::Consonance, &witnesses);
        }
    }

    Ok(CoherenceReport { violations })
}

/// [`check_coherence`] with the built-in closed-form subset test.
pub fn check_coherence_default<T: Scalar>(results: &[TestResult<T>]) -> Result<CoherenceReport> {
    check_coherence(results, is_subset)
}

/// Intersection of two hypotheses on parallel contrasts, when it is a single
/// band, half-space or interval.
fn linear_intersection<T: Scalar>(
    a: &HypothesisRegion<T>,
    b: &HypothesisRegion<T>,
) -> Option<HypothesisRegion<T>> {
    let (la, lb) = (a.linear()?, b.linear()?);
    if a.dimension() != b.dimension() {
        return None;
    }
    let (sa, sb) = (la.set.spans(), lb.set.spans());
    if sa.len() != 1 || sb.len() != 1 {
        return None;
    }
    let lambda = crate::hypotheses::parallel_factor(&la.weights, &lb.weights)?;
    let (lo_a, hi_a, lc_a, hc_a) = sa[0].parts();
    let (lo_b, hi_b, lc_b, hc_b) = sb[0].scaled(T::one() / lambda).parts();
    let (lo, lo_closed) = if lo_a > lo_b || (lo_a == lo_b && !lc_a) {
        (lo_a, lc_a)
    } else {
        (lo_b, lc_b)
    };
    let (hi, hi_closed) = if hi_a < hi_b || (hi_a == hi_b && !hc_a) {
        (hi_a, hc_a)
    } else {
        (hi_b, hc_b)
    };
    if lo > hi {
        return None;
    }
    if lo_closed != hi_closed && lo.is_finite() && hi.is_finite() {
        // half-open slabs have no representation here
        return None;
    }
    let w = la.weights;
    let h = if lo.is_finite() && hi.is_finite() {
        let mid = (lo + hi) * T::lit(0.5);
        HypothesisRegion::band(w, mid, (hi - lo) * T::lit(0.5)).ok()?.with_closed(lo_closed)
    } else if hi.is_finite() {
        HypothesisRegion::half_space(w, hi, crate::hypotheses::Direction::AtMost)
            .ok()?
            .with_closed(hi_closed)
    } else if lo.is_finite() {
        HypothesisRegion::half_space(w, lo, crate::hypotheses::Direction::AtLeast)
            .ok()?
            .with_closed(lo_closed)
    } else {
        HypothesisRegion::whole_space(a.dimension())
    };
    Some(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn iv(lo: f64, hi: f64) -> Region<f64> {
        Region::Interval(IntervalRegion::from_bounds(lo, hi, 0.95).unwrap())
    }

    fn abs_le(delta: f64) -> HypothesisRegion<f64> {
        HypothesisRegion::band(vec![1.0], 0.0, delta).unwrap()
    }

    #[test]
    fn three_simple_cases() {
        let h = abs_le(0.5);
        assert_eq!(decide(&iv(0.1, 0.3), &h).unwrap(), Decision::Accept);
        assert_eq!(decide(&iv(0.6, 0.9), &h).unwrap(), Decision::Reject);
        assert_eq!(decide(&iv(0.4, 0.6), &h).unwrap(), Decision::Agnostic);
    }

    #[test]
    fn boundary_endpoint_counts_as_inside() {
        let h = abs_le(0.5);
        assert_eq!(decide(&iv(0.2, 0.5), &h).unwrap(), Decision::Accept);
        assert_eq!(decide(&iv(0.5, 0.8), &h).unwrap(), Decision::Agnostic);
        let open = abs_le(0.5).with_closed(false);
        assert_eq!(decide(&iv(0.5, 0.8), &open).unwrap(), Decision::Reject);
    }

    #[test]
    fn decision_codes() {
        assert_eq!(Decision::Accept.value::<f64>(), 0.0);
        assert_eq!(Decision::Agnostic.value::<f64>(), 0.5);
        assert_eq!(Decision::Reject.value::<f64>(), 1.0);
        for d in [Decision::Accept, Decision::Agnostic, Decision::Reject] {
            assert_eq!(d.invert().value::<f64>(), 1.0 - d.value::<f64>());
        }
    }

    #[test]
    fn dimension_mismatch() {
        let h = HypothesisRegion::pairwise_band(3, 0, 1, 1.0).unwrap();
        assert!(matches!(
            decide(&iv(0.0, 1.0), &h),
            Err(ReactError::DimensionMismatch { .. })
        ));
    }

    fn ellipsoid3(center: [f64; 3], prec: f64) -> Region<f64> {
        Region::Ellipsoid(
            EllipsoidRegion::new(center.to_vec(), Matrix::diagonal(&[prec; 3]), 7.814727903251179, 0.95)
                .unwrap(),
        )
    }

    #[test]
    fn family_on_shared_ellipsoid() {
        // half-width of every pairwise extent: sqrt(7.8147 * 2 / 100) ≈ 0.395
        let region = ellipsoid3([0.0, 0.1, 2.0], 100.0);
        let hs: Vec<_> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| HypothesisRegion::pairwise_band(3, i, j, 1.0).unwrap())
            .collect();
        let res = decide_family(&region, &hs).unwrap();
        let got: Vec<Decision> = res.iter().map(|r| r.decision).collect();
        assert_eq!(got, vec![Decision::Accept, Decision::Reject, Decision::Reject]);

        let region = ellipsoid3([0.0, 0.1, 1.2], 100.0);
        let res = decide_family(&region, &hs).unwrap();
        assert_eq!(res[0].decision, Decision::Accept);
        assert_eq!(res[1].decision, Decision::Agnostic);
        assert!(check_coherence_default(&res).unwrap().is_coherent());
        assert!(decide_family(&region, &[]).unwrap().is_empty());
    }

    #[test]
    fn family_with_complement_is_invertible() {
        let region = ellipsoid3([0.0, 0.3, 0.9], 50.0);
        let h = HypothesisRegion::pairwise_band(3, 0, 2, 1.0).unwrap();
        let res = decide_family(&region, &[h.clone(), complement(&h)]).unwrap();
        assert_eq!(res[1].decision, res[0].decision.invert());
        assert_eq!(check_coherence_default(&res).unwrap().count(CoherenceRule::Invertibility), 0);
    }

    #[test]
    fn max_pairwise_follows_pairwise_bands() {
        let m = HypothesisRegion::max_pairwise(1.0, 3).unwrap();
        assert_eq!(decide(&ellipsoid3([0.0, 0.1, 0.2], 100.0), &m).unwrap(), Decision::Accept);
        assert_eq!(decide(&ellipsoid3([0.0, 0.1, 3.0], 100.0), &m).unwrap(), Decision::Reject);
        assert_eq!(decide(&ellipsoid3([0.0, 0.1, 1.0], 100.0), &m).unwrap(), Decision::Agnostic);
    }

    #[test]
    fn max_pairwise_rejects_when_no_pair_is_conclusive() {
        // every pair straddles its band, but no point of the ellipsoid has all
        // three differences within 1 at once
        let center = [0.0, 1.0, 2.0];
        let region = ellipsoid3(center, 30.0);
        let Region::Ellipsoid(e) = &region else { unreachable!() };
        for (i, j) in [(0, 1), (1, 2)] {
            let b = HypothesisRegion::pairwise_band(3, i, j, 1.0).unwrap();
            assert_eq!(decide(&region, &b).unwrap(), Decision::Agnostic);
        }
        let m = HypothesisRegion::max_pairwise(1.0, 3).unwrap();
        let expect = if e.min_distance_sq_to_spread_set(1.0) > e.radius_sq() {
            Decision::Reject
        } else {
            Decision::Agnostic
        };
        assert_eq!(decide(&region, &m).unwrap(), expect);
        assert_eq!(decide(&region, &complement(&m)).unwrap(), expect.invert());
    }

    #[test]
    fn grid_region_decisions() {
        let grid: Vec<Vec<f64>> = (0..=100).map(|k| vec![k as f64 / 100.0]).collect();
        let h = HypothesisRegion::interval(0.0, 0.5).unwrap();
        // p-value 1 everywhere: the region is the whole grid
        assert_eq!(decide_via_pvalues(|_| 1.0, &grid, 0.05, &h).unwrap(), Decision::Agnostic);
        // p-values small exactly on h's points
        let p = |t: &[f64]| if t[0] <= 0.5 { 0.01 } else { 0.5 };
        assert_eq!(decide_via_pvalues(p, &grid, 0.05, &h).unwrap(), Decision::Reject);
        assert_eq!(
            decide_on_inverted_grid(p, grid.clone(), 0.05, &h).unwrap(),
            Decision::Reject
        );
        let narrow: Vec<Vec<f64>> = (0..10).map(|k| vec![k as f64 / 100.0]).collect();
        assert_eq!(
            decide_via_pvalues(|_| 1.0, &narrow, 0.05, &h).unwrap_err(),
            ReactError::GridNotStraddling
        );
        assert_eq!(
            decide_via_pvalues(|_: &[f64]| 1.0, &[], 0.05, &h).unwrap_err(),
            ReactError::EmptyGrid
        );
        assert_eq!(
            decide_via_pvalues(|_| 0.0, &grid, 0.05, &h).unwrap_err(),
            ReactError::EmptyRegion
        );
    }

    #[test]
    fn gaussian_pvalues_far_from_null() {
        let xbar = 3.0;
        let p = move |t: &[f64]| crate::dist::erfc((xbar - t[0]).abs() / std::f64::consts::SQRT_2);
        let grid: Vec<Vec<f64>> = (0..=1000).map(|k| vec![-5.0 + k as f64 * 0.01]).collect();
        let h = abs_le(0.5);
        let direct = decide_via_pvalues(p, &grid, 0.05, &h).unwrap();
        assert_eq!(direct, Decision::Reject);
        assert_eq!(decide_on_inverted_grid(p, grid, 0.05, &h).unwrap(), direct);
    }

    #[test]
    fn tost_examples() {
        // symmetric samples centred at 0 with small spread: tight interval
        let a = [0.05, -0.05, 0.05, -0.05, 0.0, 0.0];
        let b = [0.0, 0.0, 0.01, -0.01, 0.0, 0.0];
        let r = tost_decision(&a, &b, 0.5, 0.05).unwrap();
        assert_eq!(r.outcome, TostOutcome::EquivalenceEstablished);
        // mean difference 0.5 sits on the margin
        let a2: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let r = tost_decision(&a2, &b, 0.5, 0.05).unwrap();
        assert_eq!(r.outcome, TostOutcome::NotEstablished);
        assert!(tost_decision(&a, &b, 0.5, 0.6).is_err());
    }

    #[test]
    fn coherence_flags_injected_monotonicity_violation() {
        let small = abs_le(0.3);
        let big = abs_le(0.6);
        let r1 = decide_family(&iv(0.0, 0.1), &[small, big]).unwrap();
        let mut tampered = r1.clone();
        tampered[1].decision = Decision::Reject;
        let report = check_coherence_default(&tampered).unwrap();
        assert!(report.count(CoherenceRule::Monotonicity) >= 1);
        assert!(check_coherence_default(&r1).unwrap().is_coherent());
    }

    #[test]
    fn coherence_detects_mixed_regions() {
        let h = abs_le(0.3);
        let mut a = decide_family(&iv(0.0, 0.1), std::slice::from_ref(&h)).unwrap();
        let b = decide_family(&iv(0.0, 0.2), &[h]).unwrap();
        a.extend(b);
        assert_eq!(check_coherence_default(&a).unwrap_err(), ReactError::MixedRegions);
    }

    #[test]
    fn coherence_half_space_consonance() {
        let w = vec![1.0, -1.0];
        let le1 = HypothesisRegion::half_space(w.clone(), 1.0, crate::hypotheses::Direction::AtMost).unwrap();
        let ge0 = HypothesisRegion::half_space(w.clone(), 0.0, crate::hypotheses::Direction::AtLeast).unwrap();
        let both = HypothesisRegion::band(w, 0.5, 0.5).unwrap();
        let region = Region::Ellipsoid(
            EllipsoidRegion::new(vec![0.5, 0.0], Matrix::diagonal(&[400.0, 400.0]), 5.99, 0.95).unwrap(),
        );
        let res = decide_family(&region, &[le1, ge0, both]).unwrap();
        assert!(res.iter().all(|r| r.decision == Decision::Accept));
        let mut tampered = res.clone();
        tampered[2].decision = Decision::Agnostic;
        let report = check_coherence_default(&tampered).unwrap();
        assert!(report.count(CoherenceRule::Consonance) >= 1);
    }

    #[test]
    fn record_serialization() {
        let res = decide_family(&iv(0.4, 0.6), &[abs_le(0.5)]).unwrap();
        let s = serde_json::to_string(&res[0]).unwrap();
        assert_eq!(
            s,
            r#"{"hypothesis":"H1","decision":"agnostic","extent":[0.4,0.6],"level":0.95}"#
        );
        let rec: TestRecord<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(rec.decision, Decision::Agnostic);
    }
}
