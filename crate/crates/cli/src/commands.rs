//! One function per subcommand; each returns the bytes of its artifact.

use std::path::{Path, PathBuf};

use react_core::bayes::RiskDifferencePosterior;
use react_core::{
    beta_jeffreys_posterior, breact_decide, check_coherence_default, decide, decide_family_named,
    forest, hpd_region, mean_vector_ellipsoid, posterior_prob, tost_decision,
    welch_mean_diff_interval, CoherenceReport, Decision, ErrorRateReport, GroupMeansPosterior,
    Hypothesis, NigPosterior, Pooling, PriorSpec, Region, Scenario, TestRecord,
};
use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::io::{csv_bytes, json_arg, read_groups, read_json, read_studies, to_json};
use crate::svg;

/// Entry of a `--hypotheses` file.
#[derive(Debug, Clone, Deserialize)]
pub struct NamedHypothesis {
    pub id: String,
    #[serde(flatten)]
    pub hypothesis: Hypothesis,
}

fn load_hypotheses(path: &Path, dim: usize) -> CliResult<Vec<(String, Hypothesis)>> {
    let list: Vec<NamedHypothesis> = read_json(path)?;
    list.into_iter()
        .map(|n| {
            if n.hypothesis.dimension() != dim {
                return Err(CliError::config(
                    "--hypotheses",
                    format!("`{}` has dimension {}, expected {dim}", n.id, n.hypothesis.dimension()),
                ));
            }
            Ok((n.id, n.hypothesis))
        })
        .collect()
}

/// Pairwise bands, then the max-pairwise band for three or more groups.
fn default_family(names: &[String], delta: f64) -> CliResult<Vec<(String, Hypothesis)>> {
    let p = names.len();
    let mut out = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            out.push((
                format!("{}-{}", names[i], names[j]),
                Hypothesis::pairwise_band(p, i, j, delta)?,
            ));
        }
    }
    if p >= 3 {
        out.push(("max-pairwise".to_string(), Hypothesis::max_pairwise(delta, p)?));
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct RecordRow {
    hypothesis: String,
    decision: Decision,
    extent_lower: Option<f64>,
    extent_upper: Option<f64>,
    level: f64,
}

fn record_rows(records: &[TestRecord<f64>]) -> Vec<RecordRow> {
    records
        .iter()
        .map(|r| RecordRow {
            hypothesis: r.hypothesis.clone(),
            decision: r.decision,
            extent_lower: r.extent.map(|e| e[0]),
            extent_upper: r.extent.map(|e| e[1]),
            level: r.level,
        })
        .collect()
}

pub fn test(cfg: &RunConfig, inputs: &[PathBuf], hypotheses: Option<&Path>, tost: bool) -> CliResult<Vec<u8>> {
    cfg.require_format(&[Format::Json, Format::Csv], "test")?;
    let (names, groups) = read_groups(inputs)?;
    if groups.len() != 2 {
        return Err(CliError::config(
            "INPUT",
            format!("`test` needs exactly two groups, found {} ({})", groups.len(), names.join(", ")),
        ));
    }
    if tost {
        if cfg.alpha >= 0.5 {
            return Err(CliError::config("--alpha", "two one-sided tests need alpha < 0.5"));
        }
        let r = tost_decision(&groups[0], &groups[1], cfg.require_delta()?, cfg.alpha)?;
        return Ok(match cfg.format {
            Format::Csv => csv_bytes(&[r]),
            _ => to_json(&r),
        });
    }
    let region = Region::Interval(welch_mean_diff_interval(&groups[0], &groups[1], cfg.level)?);
    let family = match hypotheses {
        Some(path) => load_hypotheses(path, 1)?,
        None => vec![(
            format!("{}-{}", names[0], names[1]),
            Hypothesis::band(vec![1.0], 0.0, cfg.require_delta()?)?,
        )],
    };
    let single = hypotheses.is_none();
    let records: Vec<TestRecord<f64>> = decide_family_named(&region, family)?
        .into_iter()
        .map(TestRecord::from)
        .collect();
    Ok(match cfg.format {
        Format::Csv => csv_bytes(&record_rows(&records)),
        _ if single => to_json(&records[0]),
        _ => to_json(&records),
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FamilyReport {
    pub groups: Vec<String>,
    pub level: f64,
    pub center: Vec<f64>,
    pub results: Vec<TestRecord<f64>>,
    pub coherence: CoherenceReport,
}

pub fn family(cfg: &RunConfig, inputs: &[PathBuf], hypotheses: Option<&Path>) -> CliResult<Vec<u8>> {
    let (names, groups) = read_groups(inputs)?;
    if groups.len() < 2 {
        return Err(CliError::config("INPUT", "`family` needs at least two groups"));
    }
    let ellipsoid = mean_vector_ellipsoid(&groups, cfg.level)?;
    let region = Region::Ellipsoid(ellipsoid.clone());

    if cfg.format == Format::Svg {
        let delta = cfg.require_delta()?;
        let p = names.len();
        let mut panels = Vec::new();
        for i in 0..p {
            for j in (i + 1)..p {
                let d = decide(&region, &Hypothesis::pairwise_band(p, i, j, delta)?)?;
                panels.push(((i, j), d));
            }
        }
        return Ok(svg::pairwise_panels(&ellipsoid, &names, delta, &panels));
    }

    let family = match hypotheses {
        Some(path) => load_hypotheses(path, names.len())?,
        None => default_family(&names, cfg.require_delta()?)?,
    };
    let results = decide_family_named(&region, family)?;
    let coherence = check_coherence_default(&results)?;
    let records: Vec<TestRecord<f64>> = results.into_iter().map(TestRecord::from).collect();
    Ok(match cfg.format {
        Format::Csv => csv_bytes(&record_rows(&records)),
        _ => to_json(&FamilyReport {
            groups: names,
            level: cfg.level,
            center: ellipsoid.center().to_vec(),
            results: records,
            coherence,
        }),
    })
}

#[derive(Debug, Serialize)]
struct ForestCsvRow<'a> {
    label: &'a str,
    effect: f64,
    variance: f64,
    lower: f64,
    upper: f64,
    decision: Decision,
    marker_size: f64,
    pooled: &'a str,
    tau_sq: Option<f64>,
}

pub fn meta(cfg: &RunConfig, input: &Path, pooling: Pooling, correction: bool) -> CliResult<Vec<u8>> {
    let studies = read_studies(input)?;
    let data = forest(&studies, cfg.require_delta()?, cfg.alpha, pooling, correction)?;
    Ok(match cfg.format {
        Format::Json => to_json(&data),
        Format::Svg => svg::forest(&data),
        Format::Csv => {
            let rows: Vec<ForestCsvRow> = data
                .rows
                .iter()
                .map(|r| ForestCsvRow {
                    label: &r.label,
                    effect: r.effect,
                    variance: r.variance,
                    lower: r.lower,
                    upper: r.upper,
                    decision: r.decision,
                    marker_size: r.marker_size,
                    pooled: match r.pooled {
                        None => "",
                        Some(react_core::PoolingMethod::Fixed) => "fixed",
                        Some(react_core::PoolingMethod::Random) => "random",
                    },
                    tau_sq: r.tau_sq,
                })
                .collect();
            csv_bytes(&rows)
        }
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CurveReport {
    pub scenario: Scenario<f64>,
    pub reps: usize,
    pub seed: u64,
    pub curve: Vec<react_core::CurvePoint>,
}

pub fn simulate(cfg: &RunConfig, input: &Path, reps: usize, n_grid: Option<&[usize]>) -> CliResult<Vec<u8>> {
    cfg.require_format(&[Format::Json, Format::Csv], "simulate")?;
    let mut scenario: Scenario<f64> = read_json(input)?;
    if let Some(d) = cfg.delta {
        scenario.delta = d;
    }
    if let Some(a) = cfg.alpha_flag {
        scenario.alpha = a;
    }
    if let Some(grid) = n_grid {
        let curve = react_core::consistency_curve(&scenario, grid, reps, cfg.seed)?;
        return Ok(match cfg.format {
            Format::Csv => csv_bytes(&curve),
            _ => to_json(&CurveReport {
                scenario,
                reps,
                seed: cfg.seed,
                curve,
            }),
        });
    }
    let report: ErrorRateReport = if scenario.groups() == 2 {
        react_core::simulate_error_rates(&scenario, reps, cfg.seed)?
    } else {
        react_core::simulate_fwer(&scenario, reps, cfg.seed)?
    };
    Ok(match cfg.format {
        Format::Csv => csv_bytes(&report.hypotheses),
        _ => to_json(&report),
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BayesResult {
    pub hypothesis: String,
    pub decision: Decision,
    pub posterior_prob: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BayesReport {
    pub groups: Vec<String>,
    pub level: f64,
    pub draws: usize,
    pub seed: u64,
    pub posteriors: Vec<NigPosterior<f64>>,
    pub results: Vec<BayesResult>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BetaStudyResult {
    pub id: String,
    pub lower: f64,
    pub upper: f64,
    pub decision: Decision,
    /// Posterior probability that the risk difference lies in the region.
    pub posterior_prob: f64,
}

pub fn bayes(
    cfg: &RunConfig,
    inputs: &[PathBuf],
    prior: &str,
    draws: usize,
    hypotheses: Option<&Path>,
) -> CliResult<Vec<u8>> {
    cfg.require_format(&[Format::Json, Format::Csv], "bayes")?;
    let spec: PriorSpec<f64> = json_arg(prior)?;
    match spec {
        PriorSpec::BetaJeffreys => {
            if inputs.len() != 1 {
                return Err(CliError::config("INPUT", "a beta-jeffreys prior takes one study file"));
            }
            let delta = cfg.require_delta()?;
            let h = Hypothesis::interval(-1.0, delta)?;
            let rows = read_studies(&inputs[0])?
                .into_iter()
                .map(|s| {
                    let t = beta_jeffreys_posterior(s.events_treatment, s.n_treatment)?;
                    let c = beta_jeffreys_posterior(s.events_control, s.n_control)?;
                    let rd = RiskDifferencePosterior::new(t, c);
                    let iv = rd.hpd_interval(cfg.level)?;
                    Ok(BetaStudyResult {
                        id: s.id,
                        lower: iv.lower,
                        upper: iv.upper,
                        decision: decide(&Region::Interval(iv), &h)?,
                        posterior_prob: rd.cdf(delta),
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(match cfg.format {
                Format::Csv => csv_bytes(&rows),
                _ => to_json(&rows),
            })
        }
        PriorSpec::Nig { .. } => {
            let prior = spec.nig()?;
            let (names, groups) = read_groups(inputs)?;
            let family = match hypotheses {
                Some(path) => load_hypotheses(path, names.len())?,
                None if names.len() >= 2 => default_family(&names, cfg.require_delta()?)?,
                None => {
                    return Err(CliError::config(
                        "--hypotheses",
                        "a single group needs an explicit hypotheses file",
                    ))
                }
            };
            let post = GroupMeansPosterior::from_prior(prior, &groups)?;
            let sample = post.sample_means(draws, cfg.seed);
            let hpd = hpd_region(sample, post.ln_density_kernel(), cfg.level)?;
            let results = family
                .into_iter()
                .map(|(id, h)| {
                    Ok(BayesResult {
                        decision: breact_decide(&hpd, &h)?,
                        posterior_prob: posterior_prob(&h, &hpd.draws)?,
                        hypothesis: id,
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(match cfg.format {
                Format::Csv => csv_bytes(&results),
                _ => to_json(&BayesReport {
                    groups: names,
                    level: cfg.level,
                    draws,
                    seed: cfg.seed,
                    posteriors: post.groups,
                    results,
                }),
            })
        }
    }
}
