//! Keyed run configuration. Values come from `--config` (JSON or TOML),
//! are overridden by flags, and are completed with defaults; the completed
//! form is what gets echoed next to the outputs.

use std::path::{Path, PathBuf};

use cnls_core::solvers::Nonlinearity;
use cnls_core::{SolverConfig, VolterraConfig};
use serde::{Deserialize, Serialize};

use crate::error::{io_error, CliError};
use crate::preset::InitialData;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<String>,
    pub u0: Option<String>,
    pub seed: Option<u64>,
    /// Not echoed, so outputs do not depend on where they are written.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub check: Option<bool>,
    #[serde(rename = "N")]
    pub mode_cutoff: Option<usize>,
    pub dt: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda: Option<i8>,
    pub p: Option<f64>,
    pub dealias: Option<bool>,
    pub x0: Option<f64>,
    pub snapshot_stride: Option<usize>,
    pub blowup_threshold: Option<f64>,
    pub picard_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub eps_ladder: Option<Vec<f64>>,
    pub gamma_ladder: Option<Vec<f64>>,
    pub metric_s: Option<f64>,
    #[serde(rename = "N_k")]
    pub kernel_modes: Option<usize>,
    pub s: Option<f64>,
    pub suite: Option<String>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),* $(,)?) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        let is_toml = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        if is_toml {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        } else {
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }

    /// `top`'s values win wherever they are set.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        overlay!(
            self,
            top,
            subcommand,
            u0,
            seed,
            out,
            check,
            mode_cutoff,
            dt,
            horizon,
            epsilon,
            gamma,
            lambda,
            p,
            dealias,
            x0,
            snapshot_stride,
            blowup_threshold,
            picard_tol,
            max_iters,
            eps_ladder,
            gamma_ladder,
            metric_s,
            kernel_modes,
            s,
            suite,
        )
    }

    /// Every field set. The charge solver defaults to the undamped problem,
    /// the field solvers to `γ = 0.05`.
    pub fn completed(self, subcommand: &str) -> RunConfig {
        let solver = SolverConfig::default();
        let volterra = VolterraConfig::default();
        let gamma = if subcommand == "charge" {
            volterra.gamma
        } else {
            solver.gamma
        };
        let defaults = RunConfig {
            subcommand: Some(subcommand.to_string()),
            u0: Some(InitialData::default().to_string()),
            seed: Some(0),
            out: Some(PathBuf::from("out")),
            check: Some(false),
            mode_cutoff: Some(solver.mode_cutoff),
            dt: Some(solver.dt),
            horizon: Some(solver.horizon),
            epsilon: Some(solver.epsilon),
            gamma: Some(gamma),
            lambda: Some(solver.nonlinearity.into()),
            p: Some(solver.p),
            dealias: Some(solver.dealias),
            x0: Some(solver.x0),
            snapshot_stride: Some(solver.snapshot_stride),
            blowup_threshold: Some(solver.blowup_threshold),
            picard_tol: Some(volterra.picard_tol),
            max_iters: Some(volterra.max_iters),
            eps_ladder: Some(vec![0.4, 0.2, 0.1, 0.05]),
            gamma_ladder: Some(vec![0.2, 0.1, 0.05, 0.025]),
            metric_s: Some(0.75),
            kernel_modes: Some(64),
            s: Some(0.45),
            suite: Some("all".into()),
        };
        let mut done = defaults.overlay(self);
        done.subcommand = Some(subcommand.to_string());
        done
    }

    pub(crate) fn need<T: Clone>(v: &Option<T>, key: &str) -> Result<T, CliError> {
        v.clone()
            .ok_or_else(|| CliError::Config(format!("missing key {key}")))
    }

    pub fn initial_data(&self) -> Result<InitialData, CliError> {
        Self::need(&self.u0, "u0")?.parse()
    }

    fn nonlinearity(&self) -> Result<Nonlinearity, CliError> {
        Nonlinearity::try_from(Self::need(&self.lambda, "lambda")?).map_err(CliError::Config)
    }

    pub fn solver(&self) -> Result<SolverConfig, CliError> {
        let cfg = SolverConfig {
            mode_cutoff: Self::need(&self.mode_cutoff, "N")?,
            dt: Self::need(&self.dt, "dt")?,
            horizon: Self::need(&self.horizon, "T")?,
            epsilon: Self::need(&self.epsilon, "epsilon")?,
            gamma: Self::need(&self.gamma, "gamma")?,
            nonlinearity: self.nonlinearity()?,
            p: Self::need(&self.p, "p")?,
            dealias: Self::need(&self.dealias, "dealias")?,
            x0: Self::need(&self.x0, "x0")?,
            snapshot_stride: Self::need(&self.snapshot_stride, "snapshot_stride")?,
            blowup_threshold: Self::need(&self.blowup_threshold, "blowup_threshold")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn volterra(&self) -> Result<VolterraConfig, CliError> {
        let cfg = VolterraConfig {
            dt: Self::need(&self.dt, "dt")?,
            horizon: Self::need(&self.horizon, "T")?,
            mode_cutoff: Self::need(&self.mode_cutoff, "N")?,
            gamma: Self::need(&self.gamma, "gamma")?,
            nonlinearity: self.nonlinearity()?,
            p: Self::need(&self.p, "p")?,
            picard_tol: Self::need(&self.picard_tol, "picard_tol")?,
            max_iters: Self::need(&self.max_iters, "max_iters")?,
            blowup_threshold: Self::need(&self.blowup_threshold, "blowup_threshold")?,
            x0: Self::need(&self.x0, "x0")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn ladder(&self, which: Ladder) -> Result<Vec<f64>, CliError> {
        match which {
            Ladder::Epsilon => Self::need(&self.eps_ladder, "eps_ladder"),
            Ladder::Gamma => Self::need(&self.gamma_ladder, "gamma_ladder"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Ladder {
    Epsilon,
    Gamma,
}
