//! Confidence regions and their one-dimensional shadows along linear contrasts.

use serde::{Deserialize, Serialize};

use crate::dist::{chi_squared_quantile, student_t_quantile};
use crate::error::{ReactError, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, mean, sample_variance, Scalar};

pub(crate) fn check_level<T: Scalar>(level: T) -> Result<()> {
    if level > T::zero() && level < T::one() {
        Ok(())
    } else {
        Err(ReactError::InvalidLevel(level.as_f64()))
    }
}

/// A closed interval `[lower, upper]` carrying its confidence level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IntervalRegion<T> {
    pub lower: T,
    pub upper: T,
    pub level: T,
    pub point_estimate: T,
}

impl<T: Scalar> IntervalRegion<T> {
    pub fn new(lower: T, upper: T, level: T, point_estimate: T) -> Result<Self> {
        check_level(level)?;
        if !(lower <= point_estimate && point_estimate <= upper) {
            return Err(ReactError::InvalidRegion(format!(
                "need lower <= estimate <= upper, got {lower} / {point_estimate} / {upper}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            level,
            point_estimate,
        })
    }

    /// Interval from its endpoints, with the midpoint as the estimate.
    pub fn from_bounds(lower: T, upper: T, level: T) -> Result<Self> {
        Self::new(lower, upper, level, (lower + upper) * T::lit(0.5))
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn contains(&self, x: T) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }
}

/// `{μ : (c - μ)' P (c - μ) <= r²}` with P the precision matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", try_from = "EllipsoidParts<T>", into = "EllipsoidParts<T>")]
pub struct EllipsoidRegion<T: Scalar> {
    center: Vec<T>,
    precision: Matrix<T>,
    radius_sq: T,
    level: T,
    covariance: Matrix<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct EllipsoidParts<T: Scalar> {
    center: Vec<T>,
    precision: Matrix<T>,
    radius_sq: T,
    level: T,
}

impl<T: Scalar> TryFrom<EllipsoidParts<T>> for EllipsoidRegion<T> {
    type Error = ReactError;
    fn try_from(p: EllipsoidParts<T>) -> Result<Self> {
        Self::new(p.center, p.precision, p.radius_sq, p.level)
    }
}

impl<T: Scalar> From<EllipsoidRegion<T>> for EllipsoidParts<T> {
    fn from(e: EllipsoidRegion<T>) -> Self {
        Self {
            center: e.center,
            precision: e.precision,
            radius_sq: e.radius_sq,
            level: e.level,
        }
    }
}

impl<T: Scalar> EllipsoidRegion<T> {
    pub fn new(center: Vec<T>, precision: Matrix<T>, radius_sq: T, level: T) -> Result<Self> {
        check_level(level)?;
        if precision.dim() != center.len() {
            return Err(ReactError::DimensionMismatch {
                expected: center.len(),
                actual: precision.dim(),
            });
        }
        if center.is_empty() {
            return Err(ReactError::InvalidRegion("ellipsoid needs at least one dimension".into()));
        }
        if !(radius_sq > T::zero()) {
            return Err(ReactError::InvalidRegion(format!("radius_sq must be positive, got {radius_sq}")));
        }
        if !precision.is_symmetric(T::lit(1e-10)) {
            return Err(ReactError::NotPositiveDefinite);
        }
        let covariance = precision.cholesky()?.inverse();
        Ok(Self {
            center,
            precision,
            radius_sq,
            level,
            covariance,
        })
    }

    pub fn center(&self) -> &[T] {
        &self.center
    }

    pub fn precision(&self) -> &Matrix<T> {
        &self.precision
    }

    /// Inverse of the precision matrix.
    pub fn covariance(&self) -> &Matrix<T> {
        &self.covariance
    }

    pub fn radius_sq(&self) -> T {
        self.radius_sq
    }

    pub fn level(&self) -> T {
        self.level
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    /// Squared Mahalanobis distance of `point` from the center.
    pub fn distance_sq(&self, point: &[T]) -> T {
        let diff: Vec<T> = self.center.iter().zip(point).map(|(&c, &x)| c - x).collect();
        self.precision.quad_form(&diff)
    }

    pub fn contains(&self, point: &[T]) -> bool {
        self.distance_sq(point) <= self.radius_sq
    }

    /// Smallest squared Mahalanobis distance from the center to the set
    /// `{θ : max_k θ_k - min_k θ_k <= spread}`.
    ///
    /// The set is the union over `l` of boxes `[l, l + spread]^p`; the distance to
    /// each box is a box-constrained convex quadratic (solved by coordinate descent),
    /// and the outer minimum over `l` is convex, found by golden-section search.
    pub fn min_distance_sq_to_spread_set(&self, spread: T) -> T {
        let p = self.dimension();
        if p < 2 || spread.is_infinite() {
            return T::zero();
        }
        let (lo_c, hi_c) = self
            .center
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &c| (lo.min(c), hi.max(c)));
        if hi_c - lo_c <= spread {
            return T::zero();
        }
        // outside this bracket the box misses the ellipsoid's bounding box entirely
        let reach = (0..p)
            .map(|k| (self.radius_sq * self.covariance.get(k, k)).sqrt())
            .fold(T::zero(), T::max);
        let mut a = lo_c - spread - reach;
        let mut b = hi_c + reach;
        let inv_phi = T::lit(0.618_033_988_749_894_8);
        let mut warm = self.center.clone();
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let mut f1 = self.box_distance_sq(x1, spread, &mut warm);
        let mut f2 = self.box_distance_sq(x2, spread, &mut warm);
        for _ in 0..200 {
            if b - a <= T::epsilon() * (T::one() + a.abs().max(b.abs())) {
                break;
            }
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = self.box_distance_sq(x1, spread, &mut warm);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = self.box_distance_sq(x2, spread, &mut warm);
            }
        }
        f1.min(f2)
    }

    /// min over θ ∈ [low, low + width]^p of (θ - c)' P (θ - c)
    fn box_distance_sq(&self, low: T, width: T, theta: &mut [T]) -> T {
        let p = self.dimension();
        let high = low + width;
        for t in theta.iter_mut() {
            *t = t.max(low).min(high);
        }
        for _ in 0..1000 {
            let mut moved = T::zero();
            for k in 0..p {
                let mut s = T::zero();
                for m in 0..p {
                    if m != k {
                        s = s + self.precision.get(k, m) * (theta[m] - self.center[m]);
                    }
                }
                let target = (self.center[k] - s / self.precision.get(k, k)).max(low).min(high);
                moved = moved.max((target - theta[k]).abs());
                theta[k] = target;
            }
            if moved <= T::epsilon() * (T::one() + high.abs()) {
                break;
            }
        }
        self.distance_sq(theta)
    }
}

/// A region given by p-value inversion over an explicit grid of parameter points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GridRegion<T> {
    pub grid_points: Vec<Vec<T>>,
    pub membership: Vec<bool>,
    pub level: T,
}

impl<T: Scalar> GridRegion<T> {
    pub fn members(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.grid_points
            .iter()
            .zip(&self.membership)
            .filter(|(_, &m)| m)
            .map(|(p, _)| p.as_slice())
    }

    pub fn member_count(&self) -> usize {
        self.membership.iter().filter(|&&m| m).count()
    }

    pub fn dimension(&self) -> usize {
        self.grid_points.first().map_or(0, Vec::len)
    }
}

/// Any region the decision engine understands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", tag = "kind", rename_all = "snake_case")]
pub enum Region<T: Scalar> {
    Interval(IntervalRegion<T>),
    Ellipsoid(EllipsoidRegion<T>),
    Grid(GridRegion<T>),
}

impl<T: Scalar> Region<T> {
    pub fn dimension(&self) -> usize {
        match self {
            Region::Interval(_) => 1,
            Region::Ellipsoid(e) => e.dimension(),
            Region::Grid(g) => g.dimension(),
        }
    }

    pub fn level(&self) -> T {
        match self {
            Region::Interval(i) => i.level,
            Region::Ellipsoid(e) => e.level,
            Region::Grid(g) => g.level,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Region::Interval(_) => "interval",
            Region::Ellipsoid(_) => "ellipsoid",
            Region::Grid(_) => "grid",
        }
    }

    /// Stable fingerprint of the region's numeric content.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        let mut put = |x: T| x.as_f64().to_bits().hash(&mut h);
        match self {
            Region::Interval(i) => {
                put(i.lower);
                put(i.upper);
                put(i.level);
            }
            Region::Ellipsoid(e) => {
                e.center.iter().copied().for_each(&mut put);
                e.precision.rows().into_iter().flatten().for_each(&mut put);
                put(e.radius_sq);
                put(e.level);
            }
            Region::Grid(g) => {
                g.members().flatten().copied().for_each(&mut put);
                put(g.level);
            }
        }
        h.finish()
    }
}

impl<T: Scalar> From<IntervalRegion<T>> for Region<T> {
    fn from(r: IntervalRegion<T>) -> Self {
        Region::Interval(r)
    }
}

impl<T: Scalar> From<EllipsoidRegion<T>> for Region<T> {
    fn from(r: EllipsoidRegion<T>) -> Self {
        Region::Ellipsoid(r)
    }
}

impl<T: Scalar> From<GridRegion<T>> for Region<T> {
    fn from(r: GridRegion<T>) -> Self {
        Region::Grid(r)
    }
}

/// Compact convex regions whose image under a linear functional is an interval.
pub trait ConvexRegion<T: Scalar> {
    fn dimension(&self) -> usize;

    /// Range of `weights · θ + offset` over the region.
    fn contrast_extent(&self, weights: &[T], offset: T) -> Result<IntervalRegion<T>>;
}

fn check_weights<T: Scalar>(weights: &[T], dim: usize) -> Result<()> {
    if weights.len() != dim {
        return Err(ReactError::DimensionMismatch {
            expected: dim,
            actual: weights.len(),
        });
    }
    if weights.iter().all(|w| w.is_zero()) {
        return Err(ReactError::ZeroContrast);
    }
    Ok(())
}

impl<T: Scalar> ConvexRegion<T> for IntervalRegion<T> {
    fn dimension(&self) -> usize {
        1
    }

    fn contrast_extent(&self, weights: &[T], offset: T) -> Result<IntervalRegion<T>> {
        check_weights(weights, 1)?;
        let w = weights[0];
        let (a, b) = (w * self.lower + offset, w * self.upper + offset);
        Ok(IntervalRegion {
            lower: a.min(b),
            upper: a.max(b),
            level: self.level,
            point_estimate: w * self.point_estimate + offset,
        })
    }
}

impl<T: Scalar> ConvexRegion<T> for EllipsoidRegion<T> {
    fn dimension(&self) -> usize {
        self.center.len()
    }

    fn contrast_extent(&self, weights: &[T], offset: T) -> Result<IntervalRegion<T>> {
        check_weights(weights, self.dimension())?;
        let centre = dot(weights, &self.center) + offset;
        let half = (self.radius_sq * self.covariance.quad_form(weights)).sqrt();
        Ok(IntervalRegion {
            lower: centre - half,
            upper: centre + half,
            level: self.level,
            point_estimate: centre,
        })
    }
}

/// Range of `weights · θ + offset` over `region`.
pub fn contrast_extent<T: Scalar, R: ConvexRegion<T>>(
    region: &R,
    weights: &[T],
    offset: T,
) -> Result<IntervalRegion<T>> {
    region.contrast_extent(weights, offset)
}

struct SampleSummary<T> {
    n: usize,
    mean: T,
    var: T,
}

fn summarize<T: Scalar>(xs: &[T], min_n: usize, label: &str) -> Result<SampleSummary<T>> {
    if xs.len() < min_n {
        return Err(ReactError::InsufficientData(format!(
            "{label} needs at least {min_n} observations, got {}",
            xs.len()
        )));
    }
    let var = if xs.len() >= 2 {
        sample_variance(xs)
    } else {
        T::zero()
    };
    Ok(SampleSummary {
        n: xs.len(),
        mean: mean(xs),
        var,
    })
}

/// Difference of means, its standard error and Welch–Satterthwaite degrees of freedom.
pub(crate) fn welch_components<T: Scalar>(a: &[T], b: &[T]) -> Result<(T, T, T)> {
    let sa = summarize(a, 2, "sample a")?;
    let sb = summarize(b, 2, "sample b")?;
    if sa.var.is_zero() && sb.var.is_zero() {
        return Err(ReactError::DegenerateVariance(
            "both samples have zero variance".into(),
        ));
    }
    let va = sa.var / T::from_usize_lossy(sa.n);
    let vb = sb.var / T::from_usize_lossy(sb.n);
    let se = (va + vb).sqrt();
    let df = (va + vb) * (va + vb)
        / (va * va / T::from_usize_lossy(sa.n - 1) + vb * vb / T::from_usize_lossy(sb.n - 1));
    Ok((sa.mean - sb.mean, se, df))
}

/// Welch confidence interval for mean(a) − mean(b).
pub fn welch_mean_diff_interval<T: Scalar>(a: &[T], b: &[T], level: T) -> Result<IntervalRegion<T>> {
    check_level(level)?;
    let (diff, se, df) = welch_components(a, b)?;
    let half = student_t_quantile((T::one() + level) * T::lit(0.5), df) * se;
    Ok(IntervalRegion {
        lower: diff - half,
        upper: diff + half,
        level,
        point_estimate: diff,
    })
}

/// Joint confidence ellipsoid for the vector of group means, assuming independent
/// groups (diagonal covariance of the mean vector) and a chi-squared radius.
pub fn mean_vector_ellipsoid<T: Scalar>(groups: &[Vec<T>], level: T) -> Result<EllipsoidRegion<T>> {
    check_level(level)?;
    if groups.is_empty() {
        return Err(ReactError::InsufficientData("no groups supplied".into()));
    }
    let mut center = Vec::with_capacity(groups.len());
    let mut diag = Vec::with_capacity(groups.len());
    for (i, g) in groups.iter().enumerate() {
        let s = summarize(g, 2, &format!("group {i}"))?;
        if !(s.var > T::zero()) {
            return Err(ReactError::DegenerateVariance(format!("group {i} has zero variance")));
        }
        center.push(s.mean);
        diag.push(T::from_usize_lossy(s.n) / s.var);
    }
    let p = T::from_usize_lossy(groups.len());
    let radius_sq = chi_squared_quantile(level, p);
    EllipsoidRegion::new(center, Matrix::diagonal(&diag), radius_sq, level)
}

/// Interval for Cohen's d (pooled-sd standardized mean difference) with the usual
/// large-sample standard error and a t quantile on n_a + n_b − 2 degrees of freedom.
pub fn cohens_d_interval<T: Scalar>(a: &[T], b: &[T], level: T) -> Result<IntervalRegion<T>> {
    check_level(level)?;
    let sa = summarize(a, 1, "sample a")?;
    let sb = summarize(b, 1, "sample b")?;
    if sa.n + sb.n < 3 {
        return Err(ReactError::InsufficientData(
            "Cohen's d needs at least three observations in total".into(),
        ));
    }
    let (na, nb) = (T::from_usize_lossy(sa.n), T::from_usize_lossy(sb.n));
    let two = T::lit(2.0);
    let pooled_var = ((na - T::one()) * sa.var + (nb - T::one()) * sb.var) / (na + nb - two);
    if !(pooled_var > T::zero()) {
        return Err(ReactError::DegenerateVariance("pooled standard deviation is zero".into()));
    }
    let d = (sa.mean - sb.mean) / pooled_var.sqrt();
    let se = ((na + nb) / (na * nb) + d * d / (two * (na + nb))).sqrt();
    let half = se * student_t_quantile((T::one() + level) * T::lit(0.5), na + nb - two);
    Ok(IntervalRegion {
        lower: d - half,
        upper: d + half,
        level,
        point_estimate: d,
    })
}

/// `{θ in grid : p-value(θ) > alpha}`.
pub fn invert_pvalue_region<T, F>(pvalue_fn: F, grid: Vec<Vec<T>>, alpha: T) -> Result<GridRegion<T>>
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
    let dim = grid[0].len();
    if let Some(bad) = grid.iter().find(|p| p.len() != dim) {
        return Err(ReactError::DimensionMismatch {
            expected: dim,
            actual: bad.len(),
        });
    }
    let membership = grid.iter().map(|p| pvalue_fn(p) > alpha).collect();
    Ok(GridRegion {
        grid_points: grid,
        membership,
        level: T::one() - alpha,
    })
}

/// Shadow of an ellipsoid on coordinates `(i, j)`: the set of `(θ_i, θ_j)` that
/// admit a completion lying inside the full ellipsoid.
pub fn project_ellipsoid<T: Scalar>(
    region: &EllipsoidRegion<T>,
    indices: (usize, usize),
) -> Result<EllipsoidRegion<T>> {
    let (i, j) = indices;
    let p = region.dimension();
    if i >= p || j >= p {
        return Err(ReactError::DimensionMismatch {
            expected: p,
            actual: i.max(j) + 1,
        });
    }
    if i == j {
        return Err(ReactError::InvalidRegion("projection indices must be distinct".into()));
    }
    let shape = region.covariance.select(&[i, j]);
    let precision = shape.cholesky()?.inverse();
    EllipsoidRegion::new(
        vec![region.center[i], region.center[j]],
        precision,
        region.radius_sq,
        region.level,
    )
}
