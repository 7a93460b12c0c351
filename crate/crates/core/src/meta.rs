//! Two-arm binary-outcome meta-analysis on the risk-difference scale.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decision::{decide_with_extent, Decision};
use crate::dist::normal_quantile;
use crate::error::{ReactError, Result};
use crate::hypotheses::HypothesisRegion;
use crate::regions::{IntervalRegion, Region};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudySummary {
    pub id: String,
    #[serde(rename = "events_t")]
    pub events_treatment: u64,
    #[serde(rename = "n_t")]
    pub n_treatment: u64,
    #[serde(rename = "events_c")]
    pub events_control: u64,
    #[serde(rename = "n_c")]
    pub n_control: u64,
}

impl StudySummary {
    pub fn new(id: impl Into<String>, events_t: u64, n_t: u64, events_c: u64, n_c: u64) -> Result<Self> {
        let s = Self {
            id: id.into(),
            events_treatment: events_t,
            n_treatment: n_t,
            events_control: events_c,
            n_control: n_c,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (arm, e, n) in [
            ("treatment", self.events_treatment, self.n_treatment),
            ("control", self.events_control, self.n_control),
        ] {
            if n == 0 {
                return Err(ReactError::EmptyArm(format!("{}: {arm} arm has no participants", self.id)));
            }
            if e > n {
                return Err(ReactError::InvalidStudy {
                    id: self.id.clone(),
                    reason: format!("{arm} events {e} exceed arm size {n}"),
                });
            }
        }
        Ok(())
    }

    fn has_zero_cell(&self) -> bool {
        self.events_treatment == 0
            || self.events_control == 0
            || self.events_treatment == self.n_treatment
            || self.events_control == self.n_control
    }
}

/// An effect estimate with its sampling variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EffectEstimate<T> {
    pub effect: T,
    pub variance: T,
}

impl<T: Scalar> EffectEstimate<T> {
    /// Two-sided Wald interval at `level`.
    pub fn wald_interval(&self, level: T) -> Result<IntervalRegion<T>> {
        let z = normal_quantile((T::one() + level) * T::lit(0.5));
        let half = z * self.variance.sqrt();
        IntervalRegion::new(self.effect - half, self.effect + half, level, self.effect)
    }
}

/// Risk difference `p_t - p_c` with its Wald variance. With `correction` on,
/// 0.5 is added to all four cells of a table containing a zero cell before the
/// variance is computed; the effect itself is never corrected.
pub fn risk_difference<T: Scalar>(study: &StudySummary, correction: bool) -> Result<EffectEstimate<T>> {
    study.validate()?;
    let f = |x: u64| T::lit(x as f64);
    let (et, nt, ec, nc) = (
        f(study.events_treatment),
        f(study.n_treatment),
        f(study.events_control),
        f(study.n_control),
    );
    let effect = et / nt - ec / nc;
    let (add, extra) = if correction && study.has_zero_cell() {
        (T::lit(0.5), T::one())
    } else {
        (T::zero(), T::zero())
    };
    let (pt, pc) = ((et + add) / (nt + extra), (ec + add) / (nc + extra));
    let variance = pt * (T::one() - pt) / (nt + extra) + pc * (T::one() - pc) / (nc + extra);
    if !(variance > T::zero()) {
        return Err(ReactError::DegenerateVariance(format!(
            "study {} has zero variance; enable the continuity correction",
            study.id
        )));
    }
    Ok(EffectEstimate { effect, variance })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolingMethod {
    Fixed,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PooledResult<T> {
    pub effect: T,
    pub variance: T,
    pub method: PoolingMethod,
    pub tau_sq: T,
    pub level: T,
}

impl<T: Scalar> PooledResult<T> {
    pub fn estimate(&self) -> EffectEstimate<T> {
        EffectEstimate {
            effect: self.effect,
            variance: self.variance,
        }
    }

    pub fn interval(&self) -> Result<IntervalRegion<T>> {
        self.estimate().wald_interval(self.level)
    }
}

fn inverse_variance<T: Scalar>(estimates: &[EffectEstimate<T>], tau_sq: T) -> (T, T) {
    let (mut sw, mut swy) = (T::zero(), T::zero());
    for e in estimates {
        let w = T::one() / (e.variance + tau_sq);
        sw = sw + w;
        swy = swy + w * e.effect;
    }
    (swy / sw, T::one() / sw)
}

/// Inverse-variance weighted mean with variance `1 / Σ(1/v_i)`.
pub fn fixed_effects<T: Scalar>(estimates: &[EffectEstimate<T>], level: T) -> Result<PooledResult<T>> {
    if estimates.is_empty() {
        return Err(ReactError::NoStudies);
    }
    let (effect, variance) = inverse_variance(estimates, T::zero());
    Ok(PooledResult {
        effect,
        variance,
        method: PoolingMethod::Fixed,
        tau_sq: T::zero(),
        level,
    })
}

/// DerSimonian–Laird between-study variance.
pub fn dersimonian_laird_tau_sq<T: Scalar>(estimates: &[EffectEstimate<T>]) -> T {
    let (pooled, _) = inverse_variance(estimates, T::zero());
    let (mut q, mut sw, mut sw2) = (T::zero(), T::zero(), T::zero());
    for e in estimates {
        let w = T::one() / e.variance;
        q = q + w * (e.effect - pooled) * (e.effect - pooled);
        sw = sw + w;
        sw2 = sw2 + w * w;
    }
    let df = T::from_usize_lossy(estimates.len() - 1);
    ((q - df) / (sw - sw2 / sw)).max(T::zero())
}

pub fn random_effects<T: Scalar>(estimates: &[EffectEstimate<T>], level: T) -> Result<PooledResult<T>> {
    match estimates.len() {
        0 => return Err(ReactError::NoStudies),
        1 => return Err(ReactError::SingleStudy),
        _ => {}
    }
    let tau_sq = dersimonian_laird_tau_sq(estimates);
    if tau_sq == T::zero() {
        // identical to fixed effects, bit for bit
        return fixed_effects(estimates, level).map(|r| PooledResult {
            method: PoolingMethod::Random,
            ..r
        });
    }
    let (effect, variance) = inverse_variance(estimates, tau_sq);
    Ok(PooledResult {
        effect,
        variance,
        method: PoolingMethod::Random,
        tau_sq,
        level,
    })
}

fn study_effects<T: Scalar>(studies: &[StudySummary], correction: bool) -> Result<Vec<EffectEstimate<T>>> {
    studies.iter().map(|s| risk_difference(s, correction)).collect()
}

pub fn fixed_effects_pool<T: Scalar>(
    studies: &[StudySummary],
    level: T,
    correction: bool,
) -> Result<PooledResult<T>> {
    fixed_effects(&study_effects(studies, correction)?, level)
}

pub fn random_effects_pool<T: Scalar>(
    studies: &[StudySummary],
    level: T,
    correction: bool,
) -> Result<PooledResult<T>> {
    random_effects(&study_effects(studies, correction)?, level)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    Fixed,
    Random,
    Both,
}

impl Pooling {
    fn methods(self) -> &'static [PoolingMethod] {
        match self {
            Pooling::Fixed => &[PoolingMethod::Fixed],
            Pooling::Random => &[PoolingMethod::Random],
            Pooling::Both => &[PoolingMethod::Fixed, PoolingMethod::Random],
        }
    }
}

impl FromStr for Pooling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fixed" => Ok(Pooling::Fixed),
            "random" => Ok(Pooling::Random),
            "both" => Ok(Pooling::Both),
            other => Err(format!("unknown pooling `{other}` (expected fixed, random or both)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ForestRow<T> {
    pub label: String,
    pub effect: T,
    pub variance: T,
    pub lower: T,
    pub upper: T,
    pub decision: Decision,
    /// Proportional to inverse variance, largest row scaled to 1.
    pub marker_size: T,
    /// `None` for individual studies.
    pub pooled: Option<PoolingMethod>,
    pub tau_sq: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ForestData<T> {
    /// Equivalence region `[lower, upper]` on the risk-difference scale.
    pub region: [T; 2],
    pub alpha: T,
    pub level: T,
    pub rows: Vec<ForestRow<T>>,
}

impl<T: Scalar> ForestData<T> {
    pub fn studies(&self) -> impl Iterator<Item = &ForestRow<T>> {
        self.rows.iter().filter(|r| r.pooled.is_none())
    }

    pub fn pooled(&self, method: PoolingMethod) -> Option<&ForestRow<T>> {
        self.rows.iter().find(|r| r.pooled == Some(method))
    }
}

/// Per-study and pooled Wald intervals at `1 - alpha`, each decided against
/// the region `[-1, delta_hi]`.
pub fn forest<T: Scalar>(
    studies: &[StudySummary],
    delta_hi: T,
    alpha: T,
    pooling: Pooling,
    correction: bool,
) -> Result<ForestData<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(ReactError::InvalidAlpha(alpha.as_f64()));
    }
    if !(delta_hi > T::zero() && delta_hi <= T::one()) {
        return Err(ReactError::InvalidHypothesis(format!(
            "upper bound of the region must lie in (0, 1], got {delta_hi}"
        )));
    }
    if studies.is_empty() {
        return Err(ReactError::NoStudies);
    }
    let level = T::one() - alpha;
    let h = HypothesisRegion::interval(-T::one(), delta_hi)?;
    let effects = study_effects::<T>(studies, correction)?;

    let mut rows = Vec::with_capacity(studies.len() + 2);
    let row = |label: String, est: EffectEstimate<T>, pooled, tau_sq| -> Result<ForestRow<T>> {
        let iv = est.wald_interval(level)?;
        let (decision, _) = decide_with_extent(&Region::Interval(iv), &h)?;
        Ok(ForestRow {
            label,
            effect: est.effect,
            variance: est.variance,
            lower: iv.lower,
            upper: iv.upper,
            decision,
            marker_size: T::one() / est.variance,
            pooled,
            tau_sq,
        })
    };
    for (s, e) in studies.iter().zip(&effects) {
        rows.push(row(s.id.clone(), *e, None, None)?);
    }
    for &method in pooling.methods() {
        let p = match method {
            PoolingMethod::Fixed => fixed_effects(&effects, level)?,
            PoolingMethod::Random => random_effects(&effects, level)?,
        };
        let label = match method {
            PoolingMethod::Fixed => "Fixed effects",
            PoolingMethod::Random => "Random effects",
        };
        rows.push(row(label.to_string(), p.estimate(), Some(method), Some(p.tau_sq))?);
    }
    let max = rows.iter().map(|r| r.marker_size).fold(T::zero(), T::max);
    for r in &mut rows {
        r.marker_size = r.marker_size / max;
    }
    Ok(ForestData {
        region: [-T::one(), delta_hi],
        alpha,
        level,
        rows,
    })
}
