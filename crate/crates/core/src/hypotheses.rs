//! Pragmatic hypotheses: sets of parameter values within a tolerance of an anchor.
//!
//! Null regions are closed by default (`|a'θ - c| <= Δ`); taking a complement flips
//! closedness, so `H` and `complement(H)` always partition the parameter space.
//! Boundary comparisons inflate closed sets and shrink open sets by
//! [`Scalar::boundary_tol`], which keeps membership of a set and of its complement
//! exact logical negations of each other.

use serde::{Deserialize, Serialize};

use crate::error::{ReactError, Result};
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `a'θ <= bound`
    AtMost,
    /// `a'θ >= bound`
    AtLeast,
}

impl Direction {
    fn flip(self) -> Self {
        match self {
            Direction::AtMost => Direction::AtLeast,
            Direction::AtLeast => Direction::AtMost,
        }
    }
}

/// Geometric description of a hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", tag = "variant", rename_all = "snake_case")]
pub enum Shape<T: Scalar> {
    /// `|weights·θ - offset| <= delta`
    Band { weights: Vec<T>, offset: T, delta: T },
    HalfSpace {
        weights: Vec<T>,
        bound: T,
        direction: Direction,
    },
    /// `lo <= θ <= hi` for a scalar parameter.
    Interval { lo: T, hi: T },
    /// `max_{i,j} |θ_i - θ_j| <= delta`
    MaxPairwiseBand { delta: T, dimension: usize },
    Complement { inner: Box<HypothesisRegion<T>> },
}

/// A hypothesis `H0: θ ∈ Θ0` represented by the set Θ0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", try_from = "RawHypothesis<T>", into = "RawHypothesis<T>")]
pub struct HypothesisRegion<T: Scalar> {
    shape: Shape<T>,
    closed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct RawHypothesis<T: Scalar> {
    #[serde(flatten)]
    shape: Shape<T>,
    #[serde(default = "default_closed")]
    closed: bool,
}

fn default_closed() -> bool {
    true
}

impl<T: Scalar> TryFrom<RawHypothesis<T>> for HypothesisRegion<T> {
    type Error = ReactError;
    fn try_from(raw: RawHypothesis<T>) -> Result<Self> {
        let closed = match &raw.shape {
            Shape::Complement { inner } => !inner.closed,
            _ => raw.closed,
        };
        Self::validated(raw.shape, closed)
    }
}

impl<T: Scalar> From<HypothesisRegion<T>> for RawHypothesis<T> {
    fn from(h: HypothesisRegion<T>) -> Self {
        Self {
            shape: h.shape,
            closed: h.closed,
        }
    }
}

/// Dissimilarity used to build a pragmatic hypothesis around an anchor.
#[derive(Debug, Clone, PartialEq)]
pub enum Dissimilarity<T> {
    /// `d(φ0, φ) = |w'φ - w'φ0|`
    AbsContrast(Vec<T>),
    /// `d(φ0, φ) = max_{i,j} |φ_i - φ_j|` for an anchor with equal coordinates.
    MaxPairwise,
}

/// Answer of a subset query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subset {
    Yes,
    No,
    Undecidable,
}

impl Subset {
    fn from_bool(b: bool) -> Self {
        if b {
            Subset::Yes
        } else {
            Subset::No
        }
    }
}

fn nonzero<T: Scalar>(w: &[T]) -> Result<()> {
    if w.is_empty() || w.iter().all(|x| x.is_zero()) {
        Err(ReactError::InvalidHypothesis("weights must not be all zero".into()))
    } else {
        Ok(())
    }
}

impl<T: Scalar> HypothesisRegion<T> {
    fn validated(shape: Shape<T>, closed: bool) -> Result<Self> {
        match &shape {
            Shape::Band { weights, delta, .. } => {
                nonzero(weights)?;
                if !(*delta >= T::zero()) {
                    return Err(ReactError::NegativeDelta(delta.as_f64()));
                }
            }
            Shape::HalfSpace { weights, bound, .. } => {
                nonzero(weights)?;
                if bound.is_nan() {
                    return Err(ReactError::InvalidHypothesis("bound is NaN".into()));
                }
            }
            Shape::Interval { lo, hi } => {
                if !(lo <= hi) {
                    return Err(ReactError::InvalidHypothesis(format!(
                        "interval needs lo <= hi, got [{lo}, {hi}]"
                    )));
                }
            }
            Shape::MaxPairwiseBand { delta, dimension } => {
                if *dimension < 2 {
                    return Err(ReactError::InvalidHypothesis(
                        "max-pairwise band needs dimension >= 2".into(),
                    ));
                }
                if !(*delta >= T::zero()) {
                    return Err(ReactError::NegativeDelta(delta.as_f64()));
                }
            }
            Shape::Complement { .. } => {}
        }
        Ok(Self { shape, closed })
    }

    /// `|weights·θ - offset| <= delta`
    pub fn band(weights: Vec<T>, offset: T, delta: T) -> Result<Self> {
        Self::validated(
            Shape::Band {
                weights,
                offset,
                delta,
            },
            true,
        )
    }

    /// `|θ_i - θ_j| <= delta` in `dimension` coordinates.
    pub fn pairwise_band(dimension: usize, i: usize, j: usize, delta: T) -> Result<Self> {
        if i >= dimension || j >= dimension || i == j {
            return Err(ReactError::InvalidHypothesis(format!(
                "bad coordinate pair ({i}, {j}) for dimension {dimension}"
            )));
        }
        let mut w = vec![T::zero(); dimension];
        w[i] = T::one();
        w[j] = -T::one();
        Self::band(w, T::zero(), delta)
    }

    pub fn half_space(weights: Vec<T>, bound: T, direction: Direction) -> Result<Self> {
        Self::validated(
            Shape::HalfSpace {
                weights,
                bound,
                direction,
            },
            true,
        )
    }

    pub fn interval(lo: T, hi: T) -> Result<Self> {
        Self::validated(Shape::Interval { lo, hi }, true)
    }

    pub fn max_pairwise(delta: T, dimension: usize) -> Result<Self> {
        Self::validated(Shape::MaxPairwiseBand { delta, dimension }, true)
    }

    /// The whole parameter space of the given dimension.
    pub fn whole_space(dimension: usize) -> Self {
        let mut w = vec![T::zero(); dimension.max(1)];
        w[0] = T::one();
        Self {
            shape: Shape::HalfSpace {
                weights: w,
                bound: T::infinity(),
                direction: Direction::AtMost,
            },
            closed: true,
        }
    }

    /// Same set with its boundary included (`true`) or excluded.
    pub fn with_closed(mut self, closed: bool) -> Self {
        if !matches!(self.shape, Shape::Complement { .. }) {
            self.closed = closed;
        }
        self
    }

    pub fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn dimension(&self) -> usize {
        match &self.shape {
            Shape::Band { weights, .. } | Shape::HalfSpace { weights, .. } => weights.len(),
            Shape::Interval { .. } => 1,
            Shape::MaxPairwiseBand { dimension, .. } => *dimension,
            Shape::Complement { inner } => inner.dimension(),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match &self.shape {
            Shape::Band { .. } => "band",
            Shape::HalfSpace { .. } => "half_space",
            Shape::Interval { .. } => "interval",
            Shape::MaxPairwiseBand { .. } => "max_pairwise_band",
            Shape::Complement { .. } => "complement",
        }
    }

    /// Membership of a parameter point.
    pub fn contains(&self, theta: &[T]) -> bool {
        if let Some(lin) = self.linear() {
            return lin.set.contains(dot(&lin.weights, theta));
        }
        match &self.shape {
            Shape::MaxPairwiseBand { delta, .. } => {
                let (lo, hi) = theta
                    .iter()
                    .fold((T::infinity(), T::neg_infinity()), |(a, b), &x| (a.min(x), b.max(x)));
                let spread = hi - lo;
                if self.closed {
                    spread <= *delta + T::boundary_tol()
                } else {
                    spread < *delta - T::boundary_tol()
                }
            }
            Shape::Complement { inner } => !inner.contains(theta),
            _ => unreachable!("linear shapes handled above"),
        }
    }

    /// `{θ : w'θ ∈ S}` form, available for every shape except max-pairwise bands in
    /// three or more dimensions (and their complements).
    pub(crate) fn linear(&self) -> Option<Linear<T>> {
        let closed = self.closed;
        match &self.shape {
            Shape::Band {
                weights,
                offset,
                delta,
            } => Some(Linear {
                weights: weights.clone(),
                set: SpanSet::single(Span::new(*offset - *delta, *offset + *delta, closed, closed)),
            }),
            Shape::HalfSpace {
                weights,
                bound,
                direction,
            } => {
                let span = match direction {
                    Direction::AtMost => Span::new(T::neg_infinity(), *bound, false, closed),
                    Direction::AtLeast => Span::new(*bound, T::infinity(), closed, false),
                };
                Some(Linear {
                    weights: weights.clone(),
                    set: SpanSet::single(span),
                })
            }
            Shape::Interval { lo, hi } => Some(Linear {
                weights: vec![T::one()],
                set: SpanSet::single(Span::new(*lo, *hi, closed, closed)),
            }),
            Shape::MaxPairwiseBand { delta, dimension } if *dimension == 2 => Some(Linear {
                weights: vec![T::one(), -T::one()],
                set: SpanSet::single(Span::new(-*delta, *delta, closed, closed)),
            }),
            Shape::MaxPairwiseBand { .. } => None,
            Shape::Complement { inner } => inner.linear().map(|l| Linear {
                weights: l.weights,
                set: l.set.complement(),
            }),
        }
    }
}

/// Builds the pragmatic hypothesis `{φ : d(anchor, φ) <= delta}`.
pub fn build_pragmatic<T: Scalar>(
    anchor: &[T],
    dissimilarity: Dissimilarity<T>,
    delta: T,
) -> Result<HypothesisRegion<T>> {
    if !(delta >= T::zero()) {
        return Err(ReactError::NegativeDelta(delta.as_f64()));
    }
    match dissimilarity {
        Dissimilarity::AbsContrast(weights) => {
            if weights.len() != anchor.len() {
                return Err(ReactError::DimensionMismatch {
                    expected: anchor.len(),
                    actual: weights.len(),
                });
            }
            let offset = dot(&weights, anchor);
            HypothesisRegion::band(weights, offset, delta)
        }
        Dissimilarity::MaxPairwise => {
            if anchor.windows(2).any(|w| w[0] != w[1]) {
                return Err(ReactError::InvalidHypothesis(
                    "max-pairwise dissimilarity needs an anchor with equal coordinates".into(),
                ));
            }
            HypothesisRegion::max_pairwise(delta, anchor.len())
        }
    }
}

/// Risk-difference threshold equivalent to a number-needed-to-treat.
pub fn nnt_to_delta<T: Scalar>(nnt: T) -> Result<T> {
    if nnt > T::zero() && nnt.is_finite() {
        Ok(T::one() / nnt)
    } else {
        Err(ReactError::NonpositiveNnt(nnt.as_f64()))
    }
}

/// Set complement. Involutive: `complement(complement(h)) == h`.
pub fn complement<T: Scalar>(h: &HypothesisRegion<T>) -> HypothesisRegion<T> {
    match &h.shape {
        Shape::Complement { inner } => (**inner).clone(),
        Shape::HalfSpace {
            weights,
            bound,
            direction,
        } => HypothesisRegion {
            shape: Shape::HalfSpace {
                weights: weights.clone(),
                bound: *bound,
                direction: direction.flip(),
            },
            closed: !h.closed,
        },
        _ => HypothesisRegion {
            shape: Shape::Complement {
                inner: Box::new(h.clone()),
            },
            closed: !h.closed,
        },
    }
}

/// Whether `h1 ⊆ h2`, when a closed-form answer exists.
pub fn is_subset<T: Scalar>(h1: &HypothesisRegion<T>, h2: &HypothesisRegion<T>) -> Subset {
    if h1.dimension() != h2.dimension() {
        return Subset::Undecidable;
    }
    let (l1, l2) = (h1.linear(), h2.linear());
    if let (Some(a), Some(b)) = (&l1, &l2) {
        if a.set.is_empty() || b.set.is_whole() {
            return Subset::Yes;
        }
        if a.set.is_whole() {
            return Subset::No;
        }
        return match parallel_factor(&a.weights, &b.weights) {
            Some(lambda) => Subset::from_bool(a.set.is_subset(&b.set.scaled(T::one() / lambda))),
            None => Subset::Undecidable,
        };
    }
    match (&h1.shape, &h2.shape) {
        (Shape::MaxPairwiseBand { delta: d1, .. }, Shape::MaxPairwiseBand { delta: d2, .. }) => {
            let s1 = Span::new(-*d1, *d1, h1.closed, h1.closed);
            let s2 = Span::new(-*d2, *d2, h2.closed, h2.closed);
            Subset::from_bool(s1.is_subset(&s2))
        }
        (Shape::MaxPairwiseBand { delta, .. }, _) if l2.is_some() => {
            let b = l2.unwrap();
            let total: T = b.weights.iter().copied().sum();
            let scale: T = b.weights.iter().map(|w| w.abs()).sum();
            if total.abs() > T::lit(1e-12) * scale {
                // the projection is the whole line
                return Subset::from_bool(b.set.is_whole());
            }
            let positive: T = b.weights.iter().filter(|w| **w > T::zero()).copied().sum();
            let reach = *delta * positive;
            let shadow = SpanSet::single(Span::new(-reach, reach, h1.closed, h1.closed));
            Subset::from_bool(shadow.is_subset(&b.set))
        }
        (_, Shape::MaxPairwiseBand { .. }) if l1.is_some() => {
            // dimension >= 3: a non-empty linear slab always contains points of
            // arbitrarily large spread
            Subset::from_bool(l1.unwrap().set.is_empty())
        }
        (Shape::Complement { inner: a }, Shape::Complement { inner: b }) => is_subset(b, a),
        _ => Subset::Undecidable,
    }
}

/// λ with `b = λ a`, if the two weight vectors are parallel.
pub(crate) fn parallel_factor<T: Scalar>(a: &[T], b: &[T]) -> Option<T> {
    let aa = dot(a, a);
    let lambda = dot(a, b) / aa;
    let resid: T = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (y - lambda * x) * (y - lambda * x))
        .sum();
    let bb = dot(b, b);
    if lambda.is_zero() || resid > T::lit(1e-24) * bb {
        None
    } else {
        Some(lambda)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Linear<T> {
    pub(crate) weights: Vec<T>,
    pub(crate) set: SpanSet<T>,
}

/// Connected subset of the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Span<T> {
    lo: T,
    hi: T,
    lo_closed: bool,
    hi_closed: bool,
}

impl<T: Scalar> Span<T> {
    fn new(lo: T, hi: T, lo_closed: bool, hi_closed: bool) -> Self {
        Self {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    fn whole() -> Self {
        Self::new(T::neg_infinity(), T::infinity(), false, false)
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    fn is_whole(&self) -> bool {
        self.lo == T::neg_infinity() && self.hi == T::infinity()
    }

    fn above_lower(&self, x: T) -> bool {
        let tol = T::boundary_tol();
        if self.lo_closed {
            x >= self.lo - tol
        } else {
            x > self.lo + tol
        }
    }

    fn below_upper(&self, x: T) -> bool {
        let tol = T::boundary_tol();
        if self.hi_closed {
            x <= self.hi + tol
        } else {
            x < self.hi - tol
        }
    }

    pub(crate) fn contains(&self, x: T) -> bool {
        !self.is_empty() && self.above_lower(x) && self.below_upper(x)
    }

    /// Whether the closed segment [m, big_m] lies inside.
    pub(crate) fn contains_segment(&self, m: T, big_m: T) -> bool {
        self.contains(m) && self.contains(big_m)
    }

    /// Whether the closed segment [m, big_m] misses the span entirely.
    pub(crate) fn misses_segment(&self, m: T, big_m: T) -> bool {
        self.is_empty() || !self.above_lower(big_m) || !self.below_upper(m)
    }

    fn is_subset(&self, other: &Self) -> bool {
        if self.is_empty() {
            return true;
        }
        if other.is_empty() {
            return false;
        }
        let tol = T::boundary_tol();
        let lower_ok = other.lo == T::neg_infinity()
            || (self.lo != T::neg_infinity()
                && (other.lo < self.lo - tol
                    || ((self.lo - other.lo).abs() <= tol && (other.lo_closed || !self.lo_closed))));
        let upper_ok = other.hi == T::infinity()
            || (self.hi != T::infinity()
                && (other.hi > self.hi + tol
                    || ((self.hi - other.hi).abs() <= tol && (other.hi_closed || !self.hi_closed))));
        lower_ok && upper_ok
    }

    pub(crate) fn parts(&self) -> (T, T, bool, bool) {
        (self.lo, self.hi, self.lo_closed, self.hi_closed)
    }

    pub(crate) fn scaled(&self, factor: T) -> Self {
        let (a, b) = (self.lo * factor, self.hi * factor);
        if factor > T::zero() {
            Self::new(a, b, self.lo_closed, self.hi_closed)
        } else {
            Self::new(b, a, self.hi_closed, self.lo_closed)
        }
    }
}

/// Finite union of disjoint spans, sorted left to right.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SpanSet<T> {
    spans: Vec<Span<T>>,
}

impl<T: Scalar> SpanSet<T> {
    fn single(span: Span<T>) -> Self {
        let spans = if span.is_empty() { vec![] } else { vec![span] };
        Self { spans }
    }

    fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    fn is_whole(&self) -> bool {
        self.spans.len() == 1 && self.spans[0].is_whole()
    }

    pub(crate) fn contains(&self, x: T) -> bool {
        self.spans.iter().any(|s| s.contains(x))
    }

    pub(crate) fn spans(&self) -> &[Span<T>] {
        &self.spans
    }

    fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.spans.len() + 1);
        let mut lo = T::neg_infinity();
        let mut lo_closed = false;
        for s in &self.spans {
            let gap = Span::new(lo, s.lo, lo_closed, !s.lo_closed);
            if !gap.is_empty() && !(s.lo == T::neg_infinity()) {
                out.push(gap);
            }
            lo = s.hi;
            lo_closed = !s.hi_closed;
        }
        if lo != T::infinity() {
            let tail = Span::new(lo, T::infinity(), lo_closed, false);
            if !tail.is_empty() {
                out.push(tail);
            }
        }
        if self.spans.is_empty() {
            out = vec![Span::whole()];
        }
        Self { spans: out }
    }

    fn scaled(&self, factor: T) -> Self {
        let mut spans: Vec<Span<T>> = self.spans.iter().map(|s| s.scaled(factor)).collect();
        if factor < T::zero() {
            spans.reverse();
        }
        Self { spans }
    }

    fn is_subset(&self, other: &Self) -> bool {
        self.spans
            .iter()
            .all(|a| other.spans.iter().any(|b| a.is_subset(b)))
    }
}
