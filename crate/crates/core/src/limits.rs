//! Convergence sweeps for the concentration limit (ε → 0) and the inviscid
//! limit (γ → 0), the two-path comparison of both limits, mild-equation
//! residuals and conservation reports.
//!
//! Every sweep runs its rungs in parallel and assembles the report in ladder
//! order, so reports are identical across runs and thread counts.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charge::{
    field_history, solve_charge, ChargeTrajectory, ModeAccumulators, VolterraConfig,
};
use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::io::Float;
use crate::solvers::{snls_solve, Nonlinearity, SolverConfig, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `"epsilon"` or `"gamma"`.
    pub parameter: String,
    pub ladder: Vec<f64>,
    /// Description of the error metric, e.g. `"max_t H^0.75"`.
    pub metric: String,
    /// One entry per consecutive pair (ε-sweeps) or per rung (γ-sweeps).
    pub errors: Vec<f64>,
    /// Distance of the finest rung to the limit reference, when computed.
    pub reference_error: Option<f64>,
    /// Errors strictly decreasing along the ladder.
    pub monotone: bool,
    /// `log2(e_k / e_{k+1}) / log2(p_k / p_{k+1})` for the last pair, if defined.
    pub richardson_rate: Option<f64>,
    /// Wall-clock seconds per rung. Not serialized, so reports stay
    /// byte-identical between runs.
    #[serde(skip)]
    pub runtimes: Vec<f64>,
}

impl ConvergenceReport {
    fn assemble(
        parameter: &str,
        ladder: &[f64],
        metric: String,
        errors: Vec<f64>,
        reference_error: Option<f64>,
        runtimes: Vec<f64>,
        rate_ladder: &[f64],
    ) -> Self {
        let monotone = errors.windows(2).all(|w| w[1] < w[0]);
        let richardson_rate = rate(&errors, rate_ladder);
        Self {
            parameter: parameter.into(),
            ladder: ladder.to_vec(),
            metric,
            errors,
            reference_error,
            monotone,
            richardson_rate,
            runtimes,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},error\n", self.parameter);
        let offset = self.ladder.len() - self.errors.len().min(self.ladder.len());
        for (k, e) in self.errors.iter().enumerate() {
            out.push_str(&format!(
                "{},{}\n",
                Float(self.ladder[k + offset]),
                Float(*e)
            ));
        }
        out
    }
}

/// Observed order from the last two errors against the parameters they sit at.
fn rate(errors: &[f64], params: &[f64]) -> Option<f64> {
    let n = errors.len();
    if n < 2 || params.len() < n {
        return None;
    }
    let (e0, e1) = (errors[n - 2], errors[n - 1]);
    let (p0, p1) = (params[n - 2], params[n - 1]);
    if e0 > 0.0 && e1 > 0.0 && p0 != p1 {
        Some((e0 / e1).ln() / (p0 / p1).ln())
    } else {
        None
    }
}

fn check_ladder(ladder: &[f64], name: &str) -> Result<()> {
    if ladder.is_empty() {
        return Err(invalid(format!("{name} ladder is empty")));
    }
    if ladder.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid(format!("{name} ladder values must be positive")));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid(format!(
            "{name} ladder must be strictly decreasing"
        )));
    }
    Ok(())
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

/// `max_t ‖a(t) − b(t)‖_{H^s}` over matching snapshot lists.
fn max_hs_distance(a: &[SpectralField], b: &[SpectralField], s: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.difference(y).hs_norm(s))
        .fold(0.0, f64::max)
}

/// The cNLS charge configuration matching a field-solver configuration.
pub fn volterra_config(config: &SolverConfig, gamma: f64) -> VolterraConfig {
    VolterraConfig {
        dt: config.dt,
        horizon: config.horizon,
        mode_cutoff: config.mode_cutoff,
        gamma,
        nonlinearity: config.nonlinearity,
        p: config.p,
        blowup_threshold: config.blowup_threshold,
        x0: config.x0,
        ..VolterraConfig::default()
    }
}

/// sNLS solutions along a decreasing ε ladder, compared rung to rung in
/// `max_t H^{s}` and the finest rung against the charge-solver cNLS field.
pub fn concentration_sweep(
    u0: &SpectralField,
    eps_ladder: &[f64],
    base: &SolverConfig,
    s_metric: f64,
) -> Result<ConvergenceReport> {
    check_ladder(eps_ladder, "epsilon")?;
    if !(s_metric > 0.5 && s_metric < 1.0) {
        return Err(invalid(format!(
            "metric exponent must lie in (1/2, 1), got {s_metric}"
        )));
    }
    base.validate()?;
    let runs: Vec<(Trajectory, f64)> = eps_ladder
        .par_iter()
        .map(|&eps| {
            let cfg = SolverConfig {
                epsilon: eps,
                gamma: 0.0,
                ..base.clone()
            };
            timed(|| snls_solve(u0, &cfg))
        })
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = runs
        .windows(2)
        .map(|w| max_hs_distance(&w[0].0.snapshots, &w[1].0.snapshots, s_metric))
        .collect();

    let charge = solve_charge(u0, &volterra_config(base, 0.0))?;
    let reference: Vec<SpectralField> =
        field_history(u0, &charge, base.mode_cutoff, base.snapshot_stride)
            .into_iter()
            .map(|(_, f)| f)
            .collect();
    let finest = &runs.last().expect("non-empty ladder").0;
    let reference_error = Some(max_hs_distance(&finest.snapshots, &reference, s_metric));

    // consecutive error k sits at the finer parameter of the pair
    let rate_params: Vec<f64> = eps_ladder.iter().skip(1).copied().collect();
    Ok(ConvergenceReport::assemble(
        "epsilon",
        eps_ladder,
        format!("max_t H^{s_metric}"),
        errors,
        reference_error,
        runs.iter().map(|r| r.1).collect(),
        &rate_params,
    ))
}

fn sup_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// cCGL charges along a decreasing γ ladder against the γ = 0 charge.
pub fn inviscid_sweep(
    u0: &SpectralField,
    gamma_ladder: &[f64],
    base: &VolterraConfig,
) -> Result<ConvergenceReport> {
    check_ladder(gamma_ladder, "gamma")?;
    base.validate()?;
    let reference = solve_charge(
        u0,
        &VolterraConfig {
            gamma: 0.0,
            ..base.clone()
        },
    )?;
    let runs: Vec<(ChargeTrajectory, f64)> = gamma_ladder
        .par_iter()
        .map(|&gamma| {
            timed(|| {
                solve_charge(
                    u0,
                    &VolterraConfig {
                        gamma,
                        ..base.clone()
                    },
                )
            })
        })
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = runs
        .iter()
        .map(|r| sup_distance(&r.0.q, &reference.q))
        .collect();
    Ok(ConvergenceReport::assemble(
        "gamma",
        gamma_ladder,
        "sup_t |q^gamma - q^0|".into(),
        errors,
        None,
        runs.iter().map(|r| r.1).collect(),
        gamma_ladder,
    ))
}

/// Both routes around the limit square, measured on the charge `u(x0, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramReport {
    pub eps_ladder: Vec<f64>,
    pub gamma_ladder: Vec<f64>,
    /// `sup_t` distance between consecutive cCGL charges (γ ladder).
    pub gamma_path_increments: Vec<f64>,
    /// `sup_t` distance between consecutive sNLS traces at `x0` (ε ladder).
    pub eps_path_increments: Vec<f64>,
    /// Geometric-tail estimate of the finest γ rung's distance to its limit.
    pub gamma_path_extrapolated_error: f64,
    /// Same for the finest ε rung.
    pub eps_path_extrapolated_error: f64,
    /// Finest cCGL charge against the cNLS charge.
    pub gamma_path_reference_error: f64,
    /// Finest sNLS trace against the cNLS charge.
    pub eps_path_reference_error: f64,
    /// `sup_t |q^{γ_min}(t) − u^{ε_min}(x0, t)|`.
    pub finest_rung_discrepancy: f64,
    /// `sup_t` distance between the two extrapolated path limits.
    pub discrepancy: f64,
    /// Extrapolated γ-path limit against the cNLS charge.
    pub gamma_limit_reference_error: f64,
    /// Extrapolated ε-path limit against the cNLS charge.
    pub eps_limit_reference_error: f64,
    /// `discrepancy ≤ max(extrapolated errors)`.
    pub consistent: bool,
}

/// Estimated distance from the last rung to the limit: with increments
/// `d_k`, ratio `r = d_last / d_prev`, the remaining geometric tail is
/// `d_last · r / (1 − r)`. Falls back to `d_last` when the ratio is not a
/// contraction or only one increment exists.
pub fn geometric_tail(increments: &[f64]) -> f64 {
    match increments {
        [] => 0.0,
        [d] => *d,
        [.., prev, last] => {
            if *prev > 0.0 && last < prev {
                let r = last / prev;
                last * r / (1.0 - r)
            } else {
                *last
            }
        }
    }
}

/// Limit estimate of a ladder of charge samples: the finest rung plus the
/// geometric tail of its last increment, `q_K + (q_K − q_{K−1}) r/(1 − r)`.
pub fn extrapolate_path(rungs: &[Vec<Complex64>]) -> Vec<Complex64> {
    let last = rungs.last().expect("non-empty ladder");
    if rungs.len() < 3 {
        return last.clone();
    }
    let k = rungs.len();
    let prev_inc = sup_distance(&rungs[k - 3], &rungs[k - 2]);
    let last_inc = sup_distance(&rungs[k - 2], last);
    if !(prev_inc > 0.0 && last_inc < prev_inc) {
        return last.clone();
    }
    let r = last_inc / prev_inc;
    let factor = r / (1.0 - r);
    last.iter()
        .zip(&rungs[k - 2])
        .map(|(a, b)| a + (a - b) * factor)
        .collect()
}

/// Runs both paths to the cNLS limit: ε → 0 first (cCGL charges, then
/// γ → 0) and γ → 0 first (sNLS traces at `x0`, then ε → 0).
///
/// Each path's limit is estimated by [`extrapolate_path`]; the paths are
/// consistent when their limits differ by no more than the larger of the
/// two tail estimates. The raw finest-rung gap is reported alongside.
pub fn commuting_diagram(
    u0: &SpectralField,
    eps_ladder: &[f64],
    gamma_ladder: &[f64],
    config: &SolverConfig,
) -> Result<DiagramReport> {
    check_ladder(eps_ladder, "epsilon")?;
    check_ladder(gamma_ladder, "gamma")?;
    config.validate()?;
    let reference = solve_charge(u0, &volterra_config(config, 0.0))?;

    let charges: Vec<Vec<Complex64>> = gamma_ladder
        .par_iter()
        .map(|&g| solve_charge(u0, &volterra_config(config, g)).map(|c| c.q))
        .collect::<Result<_>>()?;
    let traces: Vec<Vec<Complex64>> = eps_ladder
        .par_iter()
        .map(|&eps| {
            let cfg = SolverConfig {
                epsilon: eps,
                gamma: 0.0,
                snapshot_stride: 1,
                ..config.clone()
            };
            snls_solve(u0, &cfg).map(|t| t.snapshots.iter().map(|f| f.eval_at(config.x0)).collect())
        })
        .collect::<Result<_>>()?;

    let increments = |rungs: &[Vec<Complex64>]| -> Vec<f64> {
        rungs
            .windows(2)
            .map(|w| sup_distance(&w[0], &w[1]))
            .collect()
    };
    let gamma_inc = increments(&charges);
    let eps_inc = increments(&traces);
    let gamma_err = geometric_tail(&gamma_inc);
    let eps_err = geometric_tail(&eps_inc);
    let finest_charge = charges.last().expect("non-empty");
    let finest_trace = traces.last().expect("non-empty");
    let limit_a = extrapolate_path(&charges);
    let limit_b = extrapolate_path(&traces);
    let discrepancy = sup_distance(&limit_a, &limit_b);
    Ok(DiagramReport {
        eps_ladder: eps_ladder.to_vec(),
        gamma_ladder: gamma_ladder.to_vec(),
        gamma_path_increments: gamma_inc,
        eps_path_increments: eps_inc,
        gamma_path_extrapolated_error: gamma_err,
        eps_path_extrapolated_error: eps_err,
        gamma_path_reference_error: sup_distance(finest_charge, &reference.q),
        eps_path_reference_error: sup_distance(finest_trace, &reference.q),
        finest_rung_discrepancy: sup_distance(finest_charge, finest_trace),
        discrepancy,
        gamma_limit_reference_error: sup_distance(&limit_a, &reference.q),
        eps_limit_reference_error: sup_distance(&limit_b, &reference.q),
        consistent: discrepancy <= gamma_err.max(eps_err),
    })
}

/// `‖u(t) − S(t)u₀ − μ ∫₀ᵗ S(t−t') δ_{x0} F(q(t')) dt'‖_{H^{−s}}` for a
/// candidate pair (charge samples, field at `t`), with the Duhamel integral
/// built mode by mode from the candidate charge by Filon panels.
pub fn mild_residual(
    candidate_charge: &ChargeTrajectory,
    candidate_field: &SpectralField,
    u0: &SpectralField,
    t: f64,
    mode_cutoff: usize,
    s: f64,
) -> Result<f64> {
    if !(s > 0.5 && s < 1.0) {
        return Err(invalid(format!(
            "residual exponent must lie in (1/2, 1), got {s}"
        )));
    }
    let j = candidate_charge.index_of(t)?;
    let cfg = &candidate_charge.config;
    let forcing = candidate_charge.nonlinearity();
    let mut acc = ModeAccumulators::new(mode_cutoff, cfg.gamma, cfg.dt);
    for i in 1..=j {
        acc.advance(forcing[i - 1], forcing[i]);
    }
    let t = candidate_charge.times[j];
    let mu = cfg.coupling();
    let mut mild = u0
        .translate(cfg.x0)
        .with_cutoff(mode_cutoff)
        .cgl_evolve(t, cfg.gamma);
    for (c, a) in mild.coeffs_mut().iter_mut().zip(acc.values()) {
        *c += mu * a;
    }
    let mild = mild.translate(-cfg.x0);
    Ok(candidate_field
        .with_cutoff(mode_cutoff)
        .difference(&mild)
        .hs_norm(-s))
}

/// Drift of the conserved quantities, or monotonicity of the dissipated ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `max_t |M(t) − M(0)| / M(0)` (0 for zero data).
    pub mass_drift: f64,
    /// `max_t |E(t) − E(0)| / |E(0)|` (0 when `E(0) = 0`).
    pub energy_drift: f64,
    /// Steps where mass increased by more than the slack.
    pub mass_violations: usize,
    /// Steps where energy increased by more than the slack.
    pub energy_violations: usize,
    pub samples: usize,
}

/// Absolute per-step slack for the monotonicity counts.
pub const MONOTONE_SLACK: f64 = 1e-10;

fn report_from(mass: &[f64], energy: &[f64]) -> ConservationReport {
    let rel = |v: &[f64]| {
        let v0 = v.first().copied().unwrap_or(0.0);
        if v0 == 0.0 {
            return 0.0;
        }
        v.iter().map(|x| (x - v0).abs()).fold(0.0, f64::max) / v0.abs()
    };
    let ups = |v: &[f64]| {
        v.windows(2)
            .filter(|w| w[1] > w[0] + MONOTONE_SLACK)
            .count()
    };
    ConservationReport {
        mass_drift: rel(mass),
        energy_drift: rel(energy),
        mass_violations: ups(mass),
        energy_violations: ups(energy),
        samples: mass.len(),
    }
}

/// Conservation report of a field-solver trajectory (`E^ε` observable).
pub fn trajectory_conservation(traj: &Trajectory) -> ConservationReport {
    report_from(&traj.mass, &traj.energy_eps)
}

/// Conservation report of the cNLS/cCGL field reconstructed from a charge,
/// with `E = ‖∂_x u‖² + λ|u(x0)|^{2p+2}/(p+1)`.
pub fn charge_conservation(u0: &SpectralField, charge: &ChargeTrajectory) -> ConservationReport {
    let cfg = &charge.config;
    let lambda = cfg.nonlinearity.coefficient();
    let history = field_history(u0, charge, cfg.mode_cutoff, 1);
    let mut mass = Vec::with_capacity(history.len());
    let mut energy = Vec::with_capacity(history.len());
    for ((_, field), q) in history.iter().zip(&charge.q) {
        mass.push(field.mass());
        let potential = q.norm().powf(2.0 * cfg.p + 2.0) / (cfg.p + 1.0);
        energy.push(field.kinetic() + lambda * potential);
    }
    report_from(&mass, &energy)
}

/// Disabled nonlinearity turns every sweep into exact semigroup identities.
pub fn is_linear(config: &SolverConfig) -> bool {
    config.nonlinearity == Nonlinearity::Disabled
}
