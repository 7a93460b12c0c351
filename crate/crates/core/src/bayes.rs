//! Bayesian regions: conjugate posteriors, highest-posterior-density sets
//! represented by draws, e-values and posterior probabilities.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{decide_points, Decision};
use crate::dist::{beta_inc, gauss_legendre, ln_gamma, student_t_ln_pdf};
use crate::error::{ReactError, Result};
use crate::hypotheses::HypothesisRegion;
use crate::regions::{check_level, IntervalRegion};
use crate::scalar::{mean, Scalar};

pub const DEFAULT_DRAWS: usize = 50_000;
pub const MIN_DRAWS: usize = 1_000;
const CHUNK: usize = 4_096;

/// Normal-inverse-gamma over (μ, σ²): σ² ~ InvGamma(a, b), μ | σ² ~ N(m, σ²/k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NigPosterior<T> {
    pub m: T,
    pub k: T,
    pub a: T,
    pub b: T,
}

impl<T: Scalar> NigPosterior<T> {
    pub fn new(m: T, k: T, a: T, b: T) -> Result<Self> {
        let ok = m.is_finite()
            && [k, a, b].iter().all(|&v| v > T::zero() && v.is_finite());
        if !ok {
            return Err(ReactError::InvalidPosterior(format!(
                "normal-inverse-gamma needs k, a, b > 0 (got m={m}, k={k}, a={a}, b={b})"
            )));
        }
        Ok(Self { m, k, a, b })
    }

    /// Conjugate update with a sample of observations.
    pub fn update(&self, sample: &[T]) -> Result<Self> {
        if sample.is_empty() {
            return Err(ReactError::EmptySample);
        }
        let n = T::from_usize_lossy(sample.len());
        let ybar = mean(sample);
        let ss: T = sample.iter().map(|&y| (y - ybar) * (y - ybar)).sum();
        let k = self.k + n;
        let half = T::lit(0.5);
        Self::new(
            (self.k * self.m + n * ybar) / k,
            k,
            self.a + n * half,
            self.b + half * ss + self.k * n * (ybar - self.m) * (ybar - self.m) / (T::lit(2.0) * k),
        )
    }

    /// The marginal of μ is Student t with `2a` df, location `m`, scale² `b / (a k)`.
    pub fn mu_scale(&self) -> T {
        (self.b / (self.a * self.k)).sqrt()
    }

    pub fn mu_ln_pdf(&self, mu: T) -> T {
        let s = self.mu_scale();
        student_t_ln_pdf((mu - self.m) / s, T::lit(2.0) * self.a) - s.ln()
    }

    /// Draws (μ, σ²).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (T, T) {
        let precision = Gamma::new(self.a.as_f64(), 1.0 / self.b.as_f64())
            .expect("validated shape and rate")
            .sample(rng);
        let var = 1.0 / precision;
        let z: f64 = StandardNormal.sample(rng);
        let mu = self.m.as_f64() + z * (var / self.k.as_f64()).sqrt();
        (T::lit(mu), T::lit(var))
    }
}

/// Independent NIG posteriors for several group means; the joint density of the
/// means is the product of the Student-t marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GroupMeansPosterior<T> {
    pub groups: Vec<NigPosterior<T>>,
}

impl<T: Scalar> GroupMeansPosterior<T> {
    pub fn from_prior(prior: NigPosterior<T>, samples: &[Vec<T>]) -> Result<Self> {
        let groups = samples
            .iter()
            .map(|s| prior.update(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { groups })
    }

    pub fn dimension(&self) -> usize {
        self.groups.len()
    }

    pub fn ln_density(&self, mu: &[T]) -> T {
        self.groups.iter().zip(mu).map(|(g, &x)| g.mu_ln_pdf(x)).sum()
    }

    /// Same as [`Self::ln_density`] up to an additive constant, with the
    /// per-group terms precomputed. Fine for thresholding and e-values.
    pub fn ln_density_kernel(&self) -> impl Fn(&[T]) -> T + Sync + '_ {
        let terms: Vec<(T, T, T)> = self
            .groups
            .iter()
            .map(|g| {
                let df = T::lit(2.0) * g.a;
                (g.m, T::one() / (g.mu_scale() * g.mu_scale() * df), (df + T::one()) * T::lit(0.5))
            })
            .collect();
        move |mu: &[T]| {
            terms
                .iter()
                .zip(mu)
                .map(|(&(m, inv, power), &x)| -power * (T::one() + (x - m) * (x - m) * inv).ln())
                .sum()
        }
    }

    /// `count` draws of the mean vector, reproducible for a given seed.
    pub fn sample_means(&self, count: usize, seed: u64) -> Draws<T> {
        let dim = self.dimension();
        let dists: Vec<(Gamma<f64>, f64, f64)> = self
            .groups
            .iter()
            .map(|g| {
                let gamma = Gamma::new(g.a.as_f64(), 1.0 / g.b.as_f64()).expect("validated shape and rate");
                (gamma, g.m.as_f64(), g.k.as_f64())
            })
            .collect();
        let data = chunked(count, seed, dim, |rng, out| {
            for (gamma, m, k) in &dists {
                let precision = gamma.sample(rng);
                let z: f64 = StandardNormal.sample(rng);
                out.push(T::lit(m + z / (precision * k).sqrt()));
            }
        });
        Draws { dim, data }
    }
}

/// Fills `count * dim` values chunk by chunk, each chunk on its own stream.
fn chunked<T, F>(count: usize, seed: u64, dim: usize, draw: F) -> Vec<T>
where
    T: Scalar,
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut Vec<T>) + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = crate::rng::stream(seed, c as u64);
            let len = CHUNK.min(count - c * CHUNK);
            let mut out = Vec::with_capacity(len * dim);
            for _ in 0..len {
                draw(&mut rng, &mut out);
            }
            out
        })
        .collect();
    parts.concat()
}

/// Posterior draws stored as a flat row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Draws<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Draws<T> {
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(ReactError::DimensionMismatch {
                expected: dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_scalars(values: Vec<T>) -> Self {
        Self { dim: 1, data: values }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks(self.dim)
    }
}

/// `{θ : f(θ | D) ≥ t}` at the level where it holds the stated posterior mass,
/// represented by the draws that fall inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HpdRegion<T> {
    pub draws: Draws<T>,
    /// Log posterior density at each draw.
    pub log_density: Vec<T>,
    /// Log of the density threshold.
    pub log_threshold: T,
    pub level: T,
}

impl<T: Scalar> HpdRegion<T> {
    pub fn threshold(&self) -> T {
        self.log_threshold.exp()
    }

    pub fn retained(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.draws
            .iter()
            .zip(&self.log_density)
            .filter(move |(_, &ld)| ld >= self.log_threshold)
            .map(|(d, _)| d)
    }

    pub fn retained_fraction(&self) -> T {
        T::from_usize_lossy(self.retained().count()) / T::from_usize_lossy(self.draws.len())
    }

    /// Smallest and largest retained value of one coordinate.
    pub fn hull(&self, coord: usize) -> (T, T) {
        self.retained().fold((T::infinity(), T::neg_infinity()), |(lo, hi), d| {
            (lo.min(d[coord]), hi.max(d[coord]))
        })
    }
}

fn check_draws<T: Scalar>(draws: &Draws<T>) -> Result<()> {
    if draws.len() < MIN_DRAWS {
        return Err(ReactError::TooFewDraws {
            required: MIN_DRAWS,
            actual: draws.len(),
        });
    }
    Ok(())
}

/// Thresholds the exact log density at its empirical `1 - level` quantile over the draws.
pub fn hpd_region<T, F>(draws: Draws<T>, log_density: F, level: T) -> Result<HpdRegion<T>>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
{
    check_level(level)?;
    check_draws(&draws)?;
    let log_density: Vec<T> = draws.data.par_chunks(draws.dim).map(&log_density).collect();
    let mut sorted = log_density.clone();
    let cut = ((T::one() - level) * T::from_usize_lossy(sorted.len()))
        .floor()
        .to_usize()
        .unwrap_or(0)
        .min(sorted.len() - 1);
    let (_, &mut log_threshold, _) =
        sorted.select_nth_unstable_by(cut, |a, b| a.partial_cmp(b).expect("finite log density"));
    Ok(HpdRegion {
        draws,
        log_density,
        log_threshold,
        level,
    })
}

/// Evidence value of `theta0`: posterior mass outside the set of points at
/// least as dense as `theta0`.
pub fn e_value<T, F>(theta0: &[T], draws: &Draws<T>, log_density: F) -> Result<T>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
{
    check_draws(draws)?;
    if theta0.len() != draws.dimension() {
        return Err(ReactError::DimensionMismatch {
            expected: draws.dimension(),
            actual: theta0.len(),
        });
    }
    let t0 = log_density(theta0);
    let denser = draws.iter().filter(|d| log_density(d) >= t0).count();
    Ok(T::one() - T::from_usize_lossy(denser) / T::from_usize_lossy(draws.len()))
}

/// Three-way decision with the HPD set as the region.
pub fn breact_decide<T: Scalar>(hpd: &HpdRegion<T>, h: &HypothesisRegion<T>) -> Result<Decision> {
    if hpd.draws.dimension() != h.dimension() {
        return Err(ReactError::DimensionMismatch {
            expected: hpd.draws.dimension(),
            actual: h.dimension(),
        });
    }
    decide_points(hpd.retained(), h)
}

/// Fraction of draws inside `h`.
pub fn posterior_prob<T: Scalar>(h: &HypothesisRegion<T>, draws: &Draws<T>) -> Result<T> {
    if draws.is_empty() {
        return Err(ReactError::EmptySample);
    }
    if draws.dimension() != h.dimension() {
        return Err(ReactError::DimensionMismatch {
            expected: draws.dimension(),
            actual: h.dimension(),
        });
    }
    let inside = draws.iter().filter(|d| h.contains(d)).count();
    Ok(T::from_usize_lossy(inside) / T::from_usize_lossy(draws.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BetaPosterior<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> BetaPosterior<T> {
    pub fn ln_pdf(&self, p: T) -> T {
        let one = T::one();
        if p <= T::zero() || p >= one {
            return T::neg_infinity();
        }
        (self.a - one) * p.ln() + (self.b - one) * (one - p).ln() - self.ln_beta()
    }

    fn ln_beta(&self) -> T {
        ln_gamma(self.a) + ln_gamma(self.b) - ln_gamma(self.a + self.b)
    }

    pub fn cdf(&self, p: T) -> T {
        if p <= T::zero() {
            T::zero()
        } else if p >= T::one() {
            T::one()
        } else {
            beta_inc(self.a, self.b, p)
        }
    }

    pub fn mean(&self) -> T {
        self.a / (self.a + self.b)
    }

    pub fn sample_many(&self, count: usize, seed: u64) -> Vec<T> {
        let dist = Beta::new(self.a.as_f64(), self.b.as_f64()).expect("positive parameters");
        chunked(count, seed, 1, |rng, out| out.push(T::lit(dist.sample(rng))))
    }
}

/// Posterior for a binomial proportion under the Jeffreys Beta(1/2, 1/2) prior.
pub fn beta_jeffreys_posterior<T: Scalar>(successes: u64, trials: u64) -> Result<BetaPosterior<T>> {
    if successes > trials {
        return Err(ReactError::InvalidCounts { successes, trials });
    }
    let half = T::lit(0.5);
    Ok(BetaPosterior {
        a: T::lit(successes as f64) + half,
        b: T::lit((trials - successes) as f64) + half,
    })
}

/// Prior specification as read from JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", bound = "T: Scalar")]
pub enum PriorSpec<T> {
    #[serde(rename = "nig")]
    Nig { m: T, k: T, a: T, b: T },
    #[serde(rename = "beta-jeffreys")]
    BetaJeffreys,
}

impl<T: Scalar> PriorSpec<T> {
    pub fn nig(&self) -> Result<NigPosterior<T>> {
        match *self {
            PriorSpec::Nig { m, k, a, b } => NigPosterior::new(m, k, a, b),
            PriorSpec::BetaJeffreys => Err(ReactError::InvalidPosterior(
                "a normal-inverse-gamma prior is required here".into(),
            )),
        }
    }
}

/// Posterior distribution of `p_t - p_c` for independent Beta posteriors.
#[derive(Debug, Clone)]
pub struct RiskDifferencePosterior<T> {
    pub treatment: BetaPosterior<T>,
    pub control: BetaPosterior<T>,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> RiskDifferencePosterior<T> {
    pub fn new(treatment: BetaPosterior<T>, control: BetaPosterior<T>) -> Self {
        let (nodes, weights) = gauss_legendre(64);
        Self {
            treatment,
            control,
            nodes,
            weights,
        }
    }

    /// P(p_t - p_c ≤ d) = E[I_{d + p_c}(a_t, b_t)] over p_c, integrated after
    /// the substitution p_c = sin²u which removes the endpoint singularities.
    pub fn cdf(&self, d: T) -> T {
        let (one, two, half) = (T::one(), T::lit(2.0), T::lit(0.5));
        if d <= -one {
            return T::zero();
        }
        if d >= one {
            return one;
        }
        let c = self.control;
        let ln_beta = c.ln_beta();
        let integrand = |u: T| {
            let (s, co) = (u.sin(), u.cos());
            let y = s * s;
            let ln_w = (two * c.a - one) * s.ln() + (two * c.b - one) * co.ln() - ln_beta;
            two * ln_w.exp() * self.treatment.cdf(d + y)
        };
        // split where d + y crosses 0 or 1 so each piece is smooth
        let u_of = |y: T| y.max(T::zero()).min(one).sqrt().asin();
        let mut cuts = [T::zero(), u_of(-d), u_of(one - d), T::FRAC_PI_2()];
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let mut total = T::zero();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let (mid, rad) = ((lo + hi) * half, (hi - lo) * half);
            let piece: T = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &wt)| wt * integrand(mid + rad * x))
                .sum();
            total = total + rad * piece;
        }
        total.max(T::zero()).min(one)
    }

    pub fn quantile(&self, p: T) -> T {
        let (mut lo, mut hi) = (-T::one(), T::one());
        for _ in 0..60 {
            let mid = (lo + hi) * T::lit(0.5);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) * T::lit(0.5)
    }

    /// Shortest interval holding posterior mass `level`; for a unimodal
    /// density this is the highest-density interval.
    pub fn hpd_interval(&self, level: T) -> Result<IntervalRegion<T>> {
        check_level(level)?;
        let width = |p: T| self.quantile(p + level) - self.quantile(p);
        let inv_phi = T::lit(0.618_033_988_749_894_8);
        let (mut a, mut b) = (T::zero(), T::one() - level);
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let (mut f1, mut f2) = (width(x1), width(x2));
        while b - a > T::lit(1e-7) {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = width(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = width(x2);
            }
        }
        let p = (a + b) * T::lit(0.5);
        IntervalRegion::new(
            self.quantile(p),
            self.quantile(p + level),
            level,
            self.treatment.mean() - self.control.mean(),
        )
    }
}
