//! Seeded Monte Carlo checks of the error-rate guarantees and of consistency.
//!
//! Every replication draws from its own counter-based stream, so a report
//! depends only on the scenario, the replication count and the seed, never on
//! the thread count.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{breact_decide, hpd_region, posterior_prob, GroupMeansPosterior, NigPosterior};
use crate::decision::{decide, Decision};
use crate::dist::chi_squared_quantile;
use crate::error::{ReactError, Result};
use crate::hypotheses::HypothesisRegion;
use crate::linalg::Matrix;
use crate::regions::{mean_vector_ellipsoid, welch_mean_diff_interval, EllipsoidRegion, Region};
use crate::rng::stream;
use crate::scalar::Scalar;

pub const MIN_REPS: usize = 1_000;

/// Independent Gaussian groups `Y_ik = μ_i + ε_ik`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Scenario<T> {
    pub group_means: Vec<T>,
    pub group_sds: Vec<T>,
    pub group_ns: Vec<usize>,
    pub delta: T,
    pub alpha: T,
}

impl<T: Scalar> Scenario<T> {
    pub fn validate(&self) -> Result<()> {
        let p = self.group_means.len();
        let bad = |msg: String| Err(ReactError::InvalidScenario(msg));
        if p < 2 {
            return bad(format!("need at least two groups, got {p}"));
        }
        if self.group_sds.len() != p || self.group_ns.len() != p {
            return bad("group_means, group_sds and group_ns must have equal length".into());
        }
        if self.group_sds.iter().any(|&s| !(s > T::zero() && s.is_finite())) {
            return bad("every standard deviation must be positive".into());
        }
        if self.group_ns.iter().any(|&n| n < 2) {
            return bad("every group needs at least two observations".into());
        }
        if !(self.delta >= T::zero()) {
            return Err(ReactError::NegativeDelta(self.delta.as_f64()));
        }
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(ReactError::InvalidAlpha(self.alpha.as_f64()));
        }
        Ok(())
    }

    pub fn groups(&self) -> usize {
        self.group_means.len()
    }

    fn with_n(&self, n: usize) -> Self {
        Self {
            group_ns: vec![n; self.groups()],
            ..self.clone()
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Vec<Vec<T>> {
        self.group_means
            .iter()
            .zip(&self.group_sds)
            .zip(&self.group_ns)
            .map(|((&mu, &sd), &n)| (0..n).map(|_| mu + sd * normal(rng)).collect())
            .collect()
    }

    /// The pairwise bands `|μ_i - μ_j| ≤ Δ`, plus the max-pairwise band when
    /// there are three or more groups.
    pub fn family(&self) -> Result<Vec<(String, HypothesisRegion<T>)>> {
        let p = self.groups();
        let mut out = Vec::new();
        for i in 0..p {
            for j in (i + 1)..p {
                out.push((
                    format!("mu{}-mu{}", i + 1, j + 1),
                    HypothesisRegion::pairwise_band(p, i, j, self.delta)?,
                ));
            }
        }
        if p >= 3 {
            out.push(("max-pairwise".to_string(), HypothesisRegion::max_pairwise(self.delta, p)?));
        }
        Ok(out)
    }
}

fn normal<T: Scalar, R: Rng>(rng: &mut R) -> T {
    let z: f64 = StandardNormal.sample(rng);
    T::lit(z)
}

fn check_reps(reps: usize) -> Result<()> {
    if reps < MIN_REPS {
        return Err(ReactError::TooFewReps {
            required: MIN_REPS,
            actual: reps,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRates {
    pub id: String,
    /// Whether the true parameter lies in the hypothesis (boundary included).
    pub true_in_null: bool,
    pub accept: f64,
    pub reject: f64,
    pub agnostic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateReport {
    /// Largest per-hypothesis rate of rejecting a true hypothesis.
    pub type_i: f64,
    /// Largest per-hypothesis rate of accepting a false hypothesis.
    pub type_ii: f64,
    /// Mean agnostic rate over the hypotheses.
    pub agnostic_rate: f64,
    pub fwer_i: f64,
    pub fwer_ii: f64,
    pub fwer_any: f64,
    pub reps: usize,
    pub seed: u64,
    pub hypotheses: Vec<HypothesisRates>,
}

/// Integer counts from a batch of replications; sums are order independent.
#[derive(Debug, Clone, Default)]
struct Tally {
    // per hypothesis: [accept, agnostic, reject]
    counts: Vec<[u64; 3]>,
    false_reject: u64,
    false_accept: u64,
    any_error: u64,
}

impl Tally {
    fn zero(k: usize) -> Self {
        Self {
            counts: vec![[0; 3]; k],
            ..Self::default()
        }
    }

    fn record(mut self, decisions: &[Decision], truth: &[bool]) -> Self {
        let (mut fr, mut fa) = (false, false);
        for ((c, &d), &t) in self.counts.iter_mut().zip(decisions).zip(truth) {
            c[d as usize] += 1;
            fr |= t && d == Decision::Reject;
            fa |= !t && d == Decision::Accept;
        }
        self.false_reject += fr as u64;
        self.false_accept += fa as u64;
        self.any_error += (fr || fa) as u64;
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for k in 0..3 {
                a[k] += b[k];
            }
        }
        self.false_reject += other.false_reject;
        self.false_accept += other.false_accept;
        self.any_error += other.any_error;
        self
    }

    fn report(&self, ids: &[String], truth: &[bool], reps: usize, seed: u64) -> ErrorRateReport {
        let r = reps as f64;
        let hypotheses: Vec<HypothesisRates> = ids
            .iter()
            .zip(truth)
            .zip(&self.counts)
            .map(|((id, &t), c)| HypothesisRates {
                id: id.clone(),
                true_in_null: t,
                accept: c[0] as f64 / r,
                agnostic: c[1] as f64 / r,
                reject: c[2] as f64 / r,
            })
            .collect();
        let type_i = hypotheses
            .iter()
            .filter(|h| h.true_in_null)
            .map(|h| h.reject)
            .fold(0.0, f64::max);
        let type_ii = hypotheses
            .iter()
            .filter(|h| !h.true_in_null)
            .map(|h| h.accept)
            .fold(0.0, f64::max);
        let agnostic_rate =
            hypotheses.iter().map(|h| h.agnostic).sum::<f64>() / hypotheses.len().max(1) as f64;
        ErrorRateReport {
            type_i,
            type_ii,
            agnostic_rate,
            fwer_i: self.false_reject as f64 / r,
            fwer_ii: self.false_accept as f64 / r,
            fwer_any: self.any_error as f64 / r,
            reps,
            seed,
            hypotheses,
        }
    }
}

fn run_reps<F>(reps: usize, k: usize, truth: &[bool], stream_base: u64, seed: u64, decide_rep: F) -> Result<Tally>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Vec<Decision>> + Sync,
{
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream(seed, stream_base + rep as u64);
            decide_rep(&mut rng).map(|d| Tally::zero(k).record(&d, truth))
        })
        .try_reduce(|| Tally::zero(k), |a, b| Ok(a.merge(b)))
}

fn two_group_band<T: Scalar>(s: &Scenario<T>) -> Result<HypothesisRegion<T>> {
    HypothesisRegion::band(vec![T::one()], T::zero(), s.delta)
}

fn welch_decision<T: Scalar>(s: &Scenario<T>, h: &HypothesisRegion<T>, rng: &mut rand_chacha::ChaCha8Rng) -> Result<Decision> {
    let data = s.draw(rng);
    let iv = welch_mean_diff_interval(&data[0], &data[1], T::one() - s.alpha)?;
    decide(&Region::Interval(iv), h)
}

/// Welch interval at `1 - alpha` against `|μ1 - μ2| ≤ Δ`.
pub fn simulate_error_rates<T: Scalar>(scenario: &Scenario<T>, reps: usize, seed: u64) -> Result<ErrorRateReport> {
    scenario.validate()?;
    check_reps(reps)?;
    if scenario.groups() != 2 {
        return Err(ReactError::InvalidScenario(format!(
            "error rates need exactly two groups, got {}",
            scenario.groups()
        )));
    }
    let h = two_group_band(scenario)?;
    let truth = [h.contains(&[scenario.group_means[0] - scenario.group_means[1]])];
    let tally = run_reps(reps, 1, &truth, 0, seed, |rng| Ok(vec![welch_decision(scenario, &h, rng)?]))?;
    Ok(tally.report(&["mu1-mu2".to_string()], &truth, reps, seed))
}

/// One ellipsoid per replication, every hypothesis of [`Scenario::family`]
/// decided against it with no multiplicity correction.
pub fn simulate_fwer<T: Scalar>(scenario: &Scenario<T>, reps: usize, seed: u64) -> Result<ErrorRateReport> {
    scenario.validate()?;
    check_reps(reps)?;
    if scenario.groups() < 3 {
        return Err(ReactError::InvalidScenario(format!(
            "family-wise rates need at least three groups, got {}",
            scenario.groups()
        )));
    }
    let family = scenario.family()?;
    let (ids, hs): (Vec<String>, Vec<HypothesisRegion<T>>) = family.into_iter().unzip();
    let truth: Vec<bool> = hs.iter().map(|h| h.contains(&scenario.group_means)).collect();
    let level = T::one() - scenario.alpha;
    let tally = run_reps(reps, hs.len(), &truth, 0, seed, |rng| {
        let region = Region::Ellipsoid(mean_vector_ellipsoid(&scenario.draw(rng), level)?);
        hs.iter().map(|h| decide(&region, h)).collect()
    })?;
    Ok(tally.report(&ids, &truth, reps, seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    pub accept: f64,
    pub agnostic: f64,
    pub reject: f64,
}

/// Decision rates as the per-group sample size grows. Two groups use the
/// Welch interval and the band on the difference; more groups use the
/// ellipsoid and the max-pairwise band.
pub fn consistency_curve<T: Scalar>(
    scenario: &Scenario<T>,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    scenario.validate()?;
    check_reps(reps)?;
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] < 2 {
        return Err(ReactError::InvalidScenario(
            "n_grid must be strictly increasing and start at 2 or more".into(),
        ));
    }
    let p = scenario.groups();
    let h = if p == 2 {
        two_group_band(scenario)?
    } else {
        HypothesisRegion::max_pairwise(scenario.delta, p)?
    };
    let level = T::one() - scenario.alpha;
    n_grid
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let s = scenario.with_n(n);
            let tally = run_reps(reps, 1, &[true], (k as u64) << 40, seed, |rng| {
                let d = if p == 2 {
                    welch_decision(&s, &h, rng)?
                } else {
                    let region = Region::Ellipsoid(mean_vector_ellipsoid(&s.draw(rng), level)?);
                    decide(&region, &h)?
                };
                Ok(vec![d])
            })?;
            let c = tally.counts[0];
            let r = reps as f64;
            Ok(CurvePoint {
                n,
                accept: c[0] as f64 / r,
                agnostic: c[1] as f64 / r,
                reject: c[2] as f64 / r,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequentialStep {
    pub total_n: usize,
    pub group_ns: Vec<usize>,
    pub decisions: Vec<Decision>,
}

/// Grows one synthetic data set an observation at a time, the receiving group
/// chosen uniformly, and decides the whole family after every addition.
/// The first step uses the scenario's initial group sizes.
pub fn sequential_decisions<T: Scalar>(
    scenario: &Scenario<T>,
    additions: usize,
    seed: u64,
) -> Result<(Vec<String>, Vec<SequentialStep>)> {
    scenario.validate()?;
    let p = scenario.groups();
    let (ids, hs): (Vec<String>, Vec<HypothesisRegion<T>>) = scenario.family()?.into_iter().unzip();
    let level = T::one() - scenario.alpha;
    let radius_sq = chi_squared_quantile(level, T::from_usize_lossy(p));
    let mut rng = stream(seed, 0);

    let mut sums = vec![(T::zero(), T::zero()); p];
    let mut ns = vec![0usize; p];
    let mut add = |g: usize, rng: &mut rand_chacha::ChaCha8Rng, sums: &mut Vec<(T, T)>| {
        let y = scenario.group_means[g] + scenario.group_sds[g] * normal::<T, _>(rng);
        sums[g].0 = sums[g].0 + y;
        sums[g].1 = sums[g].1 + y * y;
        ns[g] += 1;
        ns.clone()
    };
    for g in 0..p {
        for _ in 0..scenario.group_ns[g] {
            add(g, &mut rng, &mut sums);
        }
    }
    let mut current = scenario.group_ns.clone();
    let mut steps = Vec::with_capacity(additions + 1);
    for step in 0..=additions {
        if step > 0 {
            let g = rng.random_range(0..p);
            current = add(g, &mut rng, &mut sums);
        }
        let mut center = Vec::with_capacity(p);
        let mut precision = Vec::with_capacity(p);
        for (g, &(s, ss)) in sums.iter().enumerate() {
            let n = T::from_usize_lossy(current[g]);
            let m = s / n;
            let var = ((ss - n * m * m) / (n - T::one())).max(T::min_positive_value());
            center.push(m);
            precision.push(n / var);
        }
        let region = Region::Ellipsoid(EllipsoidRegion::new(
            center,
            Matrix::diagonal(&precision),
            radius_sq,
            level,
        )?);
        let decisions = hs.iter().map(|h| decide(&region, h)).collect::<Result<Vec<_>>>()?;
        steps.push(SequentialStep {
            total_n: current.iter().sum(),
            group_ns: current.clone(),
            decisions,
        });
    }
    Ok((ids, steps))
}

/// Prior-predictive setting for the Bayesian family-wise check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BayesScenario<T> {
    pub prior: NigPosterior<T>,
    pub groups: usize,
    pub n_per_group: usize,
    pub delta: T,
    pub alpha: T,
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesErrorReport {
    pub sims: usize,
    pub draws: usize,
    pub seed: u64,
    /// Rate of {some true hypothesis rejected or some false one accepted}.
    pub family_error_rate: f64,
    pub family_error_se: f64,
    pub accepts: u64,
    pub rejects: u64,
    /// Smallest posterior probability of a hypothesis that was accepted.
    pub min_prob_given_accept: f64,
    /// Largest posterior probability of a hypothesis that was rejected.
    pub max_prob_given_reject: f64,
}

#[derive(Debug, Clone, Copy)]
struct BayesTally {
    errors: u64,
    accepts: u64,
    rejects: u64,
    min_accept: f64,
    max_reject: f64,
}

impl BayesTally {
    const ZERO: Self = Self {
        errors: 0,
        accepts: 0,
        rejects: 0,
        min_accept: f64::INFINITY,
        max_reject: f64::NEG_INFINITY,
    };

    fn merge(self, o: Self) -> Self {
        Self {
            errors: self.errors + o.errors,
            accepts: self.accepts + o.accepts,
            rejects: self.rejects + o.rejects,
            min_accept: self.min_accept.min(o.min_accept),
            max_reject: self.max_reject.max(o.max_reject),
        }
    }
}

/// Draws (θ, data) from the prior predictive, decides the pairwise and
/// max-pairwise family against the HPD set of the group means, and records
/// false conclusions together with the posterior probabilities behind each
/// accept and reject.
pub fn simulate_bayes_fwer<T: Scalar>(scn: &BayesScenario<T>, sims: usize, seed: u64) -> Result<BayesErrorReport> {
    check_reps(sims)?;
    let base = Scenario {
        group_means: vec![scn.prior.m; scn.groups],
        group_sds: vec![T::one(); scn.groups],
        group_ns: vec![scn.n_per_group; scn.groups],
        delta: scn.delta,
        alpha: scn.alpha,
    };
    base.validate()?;
    let hs: Vec<HypothesisRegion<T>> = base.family()?.into_iter().map(|(_, h)| h).collect();
    let level = T::one() - scn.alpha;

    let tally = (0..sims)
        .into_par_iter()
        .map(|sim| -> Result<BayesTally> {
            let mut rng = stream(seed, sim as u64);
            let thetas: Vec<(T, T)> = (0..scn.groups).map(|_| scn.prior.sample(&mut rng)).collect();
            let scenario = Scenario {
                group_means: thetas.iter().map(|t| t.0).collect(),
                group_sds: thetas.iter().map(|t| t.1.sqrt()).collect(),
                ..base.clone()
            };
            let data = scenario.draw(&mut rng);
            let post = GroupMeansPosterior::from_prior(scn.prior, &data)?;
            let draws = post.sample_means(scn.draws, rng.random());
            let hpd = hpd_region(draws, post.ln_density_kernel(), level)?;
            let mut t = BayesTally::ZERO;
            let mut error = false;
            for h in &hs {
                let truth = h.contains(&scenario.group_means);
                match breact_decide(&hpd, h)? {
                    Decision::Accept => {
                        t.accepts += 1;
                        t.min_accept = t.min_accept.min(posterior_prob(h, &hpd.draws)?.as_f64());
                        error |= !truth;
                    }
                    Decision::Reject => {
                        t.rejects += 1;
                        t.max_reject = t.max_reject.max(posterior_prob(h, &hpd.draws)?.as_f64());
                        error |= truth;
                    }
                    Decision::Agnostic => {}
                }
            }
            t.errors = error as u64;
            Ok(t)
        })
        .try_reduce(|| BayesTally::ZERO, |a, b| Ok(a.merge(b)))?;

    let rate = tally.errors as f64 / sims as f64;
    Ok(BayesErrorReport {
        sims,
        draws: scn.draws,
        seed,
        family_error_rate: rate,
        family_error_se: (rate * (1.0 - rate) / sims as f64).sqrt(),
        accepts: tally.accepts,
        rejects: tally.rejects,
        min_prob_given_accept: tally.min_accept,
        max_prob_given_reject: tally.max_reject,
    })
}
