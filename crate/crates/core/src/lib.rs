//! Three-way hypothesis testing with region estimators.

pub mod bayes;
pub mod decision;
pub mod dist;
pub mod error;
pub mod hypotheses;
pub mod linalg;
pub mod meta;
pub mod regions;
mod rng;
pub mod scalar;
pub mod simulate;

pub use bayes::{
    beta_jeffreys_posterior, breact_decide, e_value, hpd_region, posterior_prob, BetaPosterior,
    Draws, GroupMeansPosterior, HpdRegion, NigPosterior, PriorSpec, RiskDifferencePosterior,
};
pub use decision::{
    check_coherence, check_coherence_default, decide, decide_family, decide_family_named,
    decide_via_pvalues, decide_with_extent, tost_decision, CoherenceReport, CoherenceRule,
    Decision, TestRecord, TestResult, TostOutcome, TostResult, Violation,
};
pub use error::{ReactError, Result};
pub use hypotheses::{
    build_pragmatic, complement, is_subset, nnt_to_delta, Direction, Dissimilarity,
    HypothesisRegion, Shape, Subset,
};
pub use linalg::Matrix;
pub use meta::{
    dersimonian_laird_tau_sq, fixed_effects, fixed_effects_pool, forest, random_effects,
    random_effects_pool, risk_difference, EffectEstimate, ForestData, ForestRow, PooledResult,
    Pooling, PoolingMethod, StudySummary,
};
pub use regions::{
    cohens_d_interval, contrast_extent, invert_pvalue_region, mean_vector_ellipsoid,
    project_ellipsoid, welch_mean_diff_interval, ConvexRegion, EllipsoidRegion, GridRegion,
    IntervalRegion, Region,
};
pub use scalar::Scalar;
pub use simulate::{
    consistency_curve, sequential_decisions, simulate_bayes_fwer, simulate_error_rates,
    simulate_fwer, BayesErrorReport, BayesScenario, CurvePoint, ErrorRateReport, HypothesisRates,
    Scenario, SequentialStep,
};

pub type Interval = IntervalRegion<f64>;
pub type Ellipsoid = EllipsoidRegion<f64>;
pub type Grid = GridRegion<f64>;
pub type AnyRegion = Region<f64>;
pub type Hypothesis = HypothesisRegion<f64>;
pub type Outcome = TestResult<f64>;
