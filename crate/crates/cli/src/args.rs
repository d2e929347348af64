use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Config;
use crate::error::{usage, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "cvqkd",
    version,
    about = "CV-QKD key rates under a Trojan-horse side channel"
)]
pub struct Cli {
    /// Flat key=value file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Key rate at a single parameter point, as JSON.
    Rate(RateArgs),
    /// Key rates over a one-dimensional grid, as CSV.
    Sweep(SweepArgs),
    /// Maximal tolerable excess noise versus loss, as CSV.
    Threshold(ThresholdArgs),
    /// Check the reduction circuit against its closed forms.
    Verify(VerifyArgs),
    /// Simulate a session and estimate the channel, as JSON.
    Simulate(SimulateArgs),
}

/// Transmittance given either directly or as loss in dB.
#[derive(Debug, Clone, Default, Args)]
pub struct TransmittanceArgs {
    /// Channel transmittance in (0, 1].
    #[arg(long, conflicts_with = "eta_db")]
    pub eta: Option<f64>,
    /// Channel loss in dB, -10 log10(eta).
    #[arg(long)]
    pub eta_db: Option<f64>,
}

impl TransmittanceArgs {
    pub fn merge(&mut self, cfg: &mut Config) -> CliResult<()> {
        let from_file = (cfg.take::<f64>("eta")?, cfg.take::<f64>("eta-db")?);
        if self.eta.is_some() || self.eta_db.is_some() {
            return Ok(());
        }
        match from_file {
            (Some(_), Some(_)) => Err(usage("config sets both eta and eta-db")),
            (eta, eta_db) => {
                self.eta = eta;
                self.eta_db = eta_db;
                Ok(())
            }
        }
    }

    pub fn is_set(&self) -> bool {
        self.eta.is_some() || self.eta_db.is_some()
    }

    pub fn resolve(&self) -> CliResult<f64> {
        match (self.eta, self.eta_db) {
            (Some(_), Some(_)) => Err(usage("--eta and --eta-db are mutually exclusive")),
            (Some(eta), None) => Ok(eta),
            (None, Some(db)) => Ok(cvqkd_core::threshold::db_to_eta(db)),
            (None, None) => Err(usage("one of --eta or --eta-db is required")),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub transmittance: TransmittanceArgs,
    /// Excess noise [default: 0].
    #[arg(long)]
    pub eps: Option<f64>,
    /// Mean photon number of the injected Trojan mode [default: 0].
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Modulation gain of the Trojan mode [default: 1].
    #[arg(long)]
    pub m: Option<f64>,
    /// Modulation variance; selects the finite-modulation rate.
    #[arg(long)]
    pub mu: Option<f64>,
}

impl RateArgs {
    pub fn merge(&mut self, cfg: &mut Config) -> CliResult<()> {
        self.transmittance.merge(cfg)?;
        cfg.fill(&mut self.eps, "eps")?;
        cfg.fill(&mut self.nbar, "nbar")?;
        cfg.fill(&mut self.m, "m")?;
        cfg.fill(&mut self.mu, "mu")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    Eta,
    EtaDb,
    Eps,
    Nbar,
    M,
    Mu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

macro_rules! value_enum_from_str {
    ($($t:ty),*) => {$(
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s, false)
            }
        }
    )*};
}

value_enum_from_str!(SweepVar, Scale);

/// Comma-separated list of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct NumList(pub Vec<f64>);

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let values = s
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NumList(values))
    }
}

impl fmt::Display for NumList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// A quadrature pair `x,p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub [f64; 2]);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match NumList::from_str(s)?.0.as_slice() {
            [x, p] => Ok(Pair([*x, *p])),
            other => Err(format!("expected two values x,p, got {}", other.len())),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// Swept parameter.
    #[arg(long, value_enum)]
    pub var: Option<SweepVar>,
    #[arg(long, allow_negative_numbers = true)]
    pub start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: Option<f64>,
    /// Number of grid points, at least 2.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Grid spacing [default: linear].
    #[arg(long, value_enum)]
    pub scale: Option<Scale>,
    #[command(flatten)]
    pub transmittance: TransmittanceArgs,
    /// Excess noise [default: 0].
    #[arg(long)]
    pub eps: Option<f64>,
    /// Trojan photon numbers, one curve each [default: 0].
    #[arg(long)]
    pub nbar: Option<NumList>,
    /// Trojan modulation gains, one curve each [default: 1].
    #[arg(long)]
    pub m: Option<NumList>,
    /// Modulation variance; selects finite-modulation rates.
    #[arg(long)]
    pub mu: Option<f64>,
}

impl SweepArgs {
    pub fn merge(&mut self, cfg: &mut Config) -> CliResult<()> {
        cfg.fill(&mut self.var, "var")?;
        cfg.fill(&mut self.start, "start")?;
        cfg.fill(&mut self.stop, "stop")?;
        cfg.fill(&mut self.steps, "steps")?;
        cfg.fill(&mut self.scale, "scale")?;
        self.transmittance.merge(cfg)?;
        cfg.fill(&mut self.eps, "eps")?;
        cfg.fill(&mut self.nbar, "nbar")?;
        cfg.fill(&mut self.m, "m")?;
        cfg.fill(&mut self.mu, "mu")
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ThresholdArgs {
    /// First loss in dB [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub db_start: Option<f64>,
    /// Last loss in dB [default: 30].
    #[arg(long, allow_negative_numbers = true)]
    pub db_stop: Option<f64>,
    /// Number of dB grid points, at least 2 [default: 30].
    #[arg(long)]
    pub steps: Option<usize>,
    /// Trojan photon numbers, one curve each [default: 0].
    #[arg(long)]
    pub nbar: Option<NumList>,
    /// Trojan modulation gains, one curve each; 0 means no side channel
    /// [default: 1].
    #[arg(long)]
    pub m: Option<NumList>,
    /// Bisection tolerance in excess noise [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
}

impl ThresholdArgs {
    pub fn merge(&mut self, cfg: &mut Config) -> CliResult<()> {
        cfg.fill(&mut self.db_start, "db-start")?;
        cfg.fill(&mut self.db_stop, "db-stop")?;
        cfg.fill(&mut self.steps, "steps")?;
        cfg.fill(&mut self.nbar, "nbar")?;
        cfg.fill(&mut self.m, "m")?;
        cfg.fill(&mut self.tol, "tol")
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Single modulation variance instead of the grid {0, 1, 10}.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Single photon number instead of the grid {0, 0.5, 2}.
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Single modulation gain instead of the grid {0.5, 1, 2}.
    #[arg(long)]
    pub m: Option<f64>,
    /// Modulation `x,p` of the conditional state [default: 0.7,-1.3].
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<Pair>,
    /// Largest accepted deviation [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
}

impl VerifyArgs {
    pub fn merge(&mut self, cfg: &mut Config) -> CliResult<()> {
        cfg.fill(&mut self.mu, "mu")?;
        cfg.fill(&mut self.nbar, "nbar")?;
        cfg.fill(&mut self.m, "m")?;
        cfg.fill(&mut self.alpha, "alpha")?;
        cfg.fill(&mut self.tol, "tol")
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    /// Modulation variance.
    #[arg(long)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub transmittance: TransmittanceArgs,
    /// Excess noise [default: 0].
    #[arg(long)]
    pub eps: Option<f64>,
    /// Number of channel uses.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Generator seed [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the raw samples to this CSV file.
    #[arg(long, value_name = "PATH")]
    pub dump_samples: Option<PathBuf>,
}

impl SimulateArgs {
    pub fn merge(&mut self, cfg: &mut Config) -> CliResult<()> {
        cfg.fill(&mut self.mu, "mu")?;
        self.transmittance.merge(cfg)?;
        cfg.fill(&mut self.eps, "eps")?;
        cfg.fill(&mut self.samples, "samples")?;
        cfg.fill(&mut self.seed, "seed")?;
        cfg.fill(&mut self.dump_samples, "dump-samples")
    }
}
