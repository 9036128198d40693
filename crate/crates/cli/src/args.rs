use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "cnls",
    version,
    about = "Solvers, limit sweeps and estimate checks for the point-concentrated NLS"
)]
pub struct Cli {
    /// JSON or TOML file of run keys; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Exit with status 2 when a run's assertions fail.
    #[arg(long, global = true)]
    pub check: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split-step solve of the mollified NLS.
    Snls(ModelArgs),
    /// Split-step solve of the mollified Ginzburg-Landau equation.
    Scgl(ModelArgs),
    /// Volterra solve for the charge u(x0, t).
    Charge(ModelArgs),
    /// Concentration sweep over an epsilon ladder.
    SweepEps(SweepArgs),
    /// Inviscid sweep over a gamma ladder.
    SweepGamma(SweepArgs),
    /// Both limit orders on the same data.
    Diagram(SweepArgs),
    /// Windowed H^-s norms of the truncated kernels.
    Kernels(KernelArgs),
    /// Closed-form estimate checks.
    Validate(ValidateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Snls(_) => "snls",
            Command::Scgl(_) => "scgl",
            Command::Charge(_) => "charge",
            Command::SweepEps(_) => "sweep-eps",
            Command::SweepGamma(_) => "sweep-gamma",
            Command::Diagram(_) => "diagram",
            Command::Kernels(_) => "kernels",
            Command::Validate(_) => "validate",
        }
    }

    pub fn overrides(&self) -> RunConfig {
        match self {
            Command::Snls(a) | Command::Scgl(a) | Command::Charge(a) => a.overrides(),
            Command::SweepEps(a) | Command::SweepGamma(a) | Command::Diagram(a) => a.overrides(),
            Command::Kernels(a) => a.overrides(),
            Command::Validate(a) => a.overrides(),
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// preset:plane_wave(k,amp), preset:constant(c), preset:random_hs(s,seed) or file:<path>.
    #[arg(long)]
    pub u0: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Mode cutoff; fields carry modes |n| <= N.
    #[arg(long = "N")]
    pub mode_cutoff: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Final time.
    #[arg(long = "T", allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// +1 defocusing, -1 focusing, 0 linear.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<i8>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long)]
    pub dealias: Option<bool>,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub snapshot_stride: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub blowup_threshold: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub picard_tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

impl ModelArgs {
    fn overrides(&self) -> RunConfig {
        RunConfig {
            u0: self.u0.clone(),
            seed: self.seed,
            mode_cutoff: self.mode_cutoff,
            dt: self.dt,
            horizon: self.horizon,
            epsilon: self.epsilon,
            gamma: self.gamma,
            lambda: self.lambda,
            p: self.p,
            dealias: self.dealias,
            x0: self.x0,
            snapshot_stride: self.snapshot_stride,
            blowup_threshold: self.blowup_threshold,
            picard_tol: self.picard_tol,
            max_iters: self.max_iters,
            ..RunConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub eps_ladder: Option<Vec<f64>>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub gamma_ladder: Option<Vec<f64>>,
    /// Sobolev exponent of the field metric, in (1/2, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub metric_s: Option<f64>,
}

impl SweepArgs {
    fn overrides(&self) -> RunConfig {
        RunConfig {
            eps_ladder: self.eps_ladder.clone(),
            gamma_ladder: self.gamma_ladder.clone(),
            metric_s: self.metric_s,
            ..self.model.overrides()
        }
    }
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub gamma_ladder: Option<Vec<f64>>,
    /// Kernel mode cutoff.
    #[arg(long = "N-k")]
    pub kernel_modes: Option<usize>,
    /// Negative Sobolev order, in [0, 1/2).
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
}

impl KernelArgs {
    fn overrides(&self) -> RunConfig {
        RunConfig {
            gamma_ladder: self.gamma_ladder.clone(),
            kernel_modes: self.kernel_modes,
            s: self.s,
            ..RunConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// indicator, heat, lorentzian, lemmaB or all.
    #[arg(long)]
    pub suite: Option<String>,
    /// Seed of the random fields in the heat suite.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ValidateArgs {
    fn overrides(&self) -> RunConfig {
        RunConfig {
            suite: self.suite.clone(),
            seed: self.seed,
            ..RunConfig::default()
        }
    }
}
