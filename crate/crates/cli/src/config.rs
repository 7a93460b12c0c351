//! Command-line surface and the validated run configuration built from it.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use react_core::{nnt_to_delta, Pooling};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "react", version, about = "Three-way (accept / reject / agnostic) tests of pragmatic hypotheses")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Error level; regions are built at 1 - alpha unless --level is given.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Equivalence margin.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Number needed to treat; the margin becomes 1 / NNT.
    #[arg(long, global = true)]
    pub nnt: Option<f64>,
    /// Confidence or credibility level of the region.
    #[arg(long, global = true)]
    pub level: Option<f64>,
    #[arg(long, global = true, env = "REACT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-sample test of |mean(a) - mean(b)| <= delta with a Welch interval.
    Test {
        /// Two single-column files, or one long-format file with two groups.
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
        /// JSON array of hypotheses on the mean difference.
        #[arg(long)]
        hypotheses: Option<PathBuf>,
        /// Report the two one-sided tests instead.
        #[arg(long)]
        tost: bool,
    },
    /// Every pairwise band and the max-pairwise band against one mean ellipsoid.
    Family {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        hypotheses: Option<PathBuf>,
    },
    /// Risk-difference meta-analysis against the region [-1, delta].
    Meta {
        /// CSV with header id,events_t,n_t,events_c,n_c.
        input: PathBuf,
        #[arg(long, default_value = "both", value_parser = parse_pooling)]
        pooling: Pooling,
        /// Skip the 0.5 correction for tables with a zero cell.
        #[arg(long)]
        no_correction: bool,
    },
    /// Monte Carlo error rates, or decision rates by sample size with --n-grid.
    Simulate {
        /// Scenario JSON.
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
    },
    /// Decisions with the highest-posterior-density set as the region.
    Bayes {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Inline JSON or a file: {"family":"nig","m":..,"k":..,"a":..,"b":..} or {"family":"beta-jeffreys"}.
        #[arg(long)]
        prior: String,
        #[arg(long, default_value_t = react_core::bayes::DEFAULT_DRAWS)]
        draws: usize,
        #[arg(long)]
        hypotheses: Option<PathBuf>,
    },
}

fn parse_pooling(s: &str) -> Result<Pooling, String> {
    s.parse()
}

/// Validated settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Explicit alpha, if given.
    pub alpha_flag: Option<f64>,
    pub alpha: f64,
    pub level: f64,
    pub delta: Option<f64>,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_common(c: &Common) -> CliResult<Self> {
        let alpha = c.alpha.unwrap_or(0.05);
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(CliError::config("--alpha", format!("{alpha} is not in (0, 1)")));
        }
        let level = c.level.unwrap_or(1.0 - alpha);
        if !(level > 0.0 && level < 1.0) {
            return Err(CliError::config("--level", format!("{level} is not in (0, 1)")));
        }
        let delta = match (c.delta, c.nnt) {
            (Some(_), Some(_)) => return Err(CliError::config("--nnt", "give either --delta or --nnt, not both")),
            (Some(d), None) if !(d >= 0.0 && d.is_finite()) => {
                return Err(CliError::config("--delta", format!("{d} must be a finite non-negative number")))
            }
            (Some(d), None) => Some(d),
            (None, Some(n)) => {
                Some(nnt_to_delta(n).map_err(|e| CliError::config("--nnt", e.to_string()))?)
            }
            (None, None) => None,
        };
        Ok(Self {
            alpha_flag: c.alpha,
            alpha,
            level,
            delta,
            seed: c.seed,
            format: c.format,
            out: c.out.clone(),
        })
    }

    pub fn require_delta(&self) -> CliResult<f64> {
        self.delta
            .ok_or_else(|| CliError::config("--delta", "one of --delta or --nnt is required"))
    }

    pub fn require_format(&self, allowed: &[Format], command: &str) -> CliResult<()> {
        if allowed.contains(&self.format) {
            Ok(())
        } else {
            Err(CliError::config(
                "--format",
                format!("`{command}` does not produce {:?} output", self.format).to_lowercase(),
            ))
        }
    }
}
