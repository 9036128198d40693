//! Strang-split pseudo-spectral integrators for the smoothed NLS and the
//! smoothed complex Ginzburg–Landau equation.
//!
//! Both equations split into a linear flow that is diagonal in Fourier space
//! and a pointwise flow on the collocation grid that is solved in closed form:
//!
//! * sNLS: `u ↦ u · exp(−iλ dt V^ε(x) |u|^{2p})`,
//! * sCGL: `|u|² ↦ |u|² (1 + 2pγλ a |u|^{2p} dt)^{−1/p}` with phase shift
//!   `−ln(1 + 2pγλ a |u|^{2p} dt) / (2pγ)`, `a = V^ε(x)`.
//!
//! On the native `2N+1` point grid the map between grid values and
//! coefficients is unitary, so the sNLS step conserves mass to roundoff.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::grid::Collocation;
use crate::io::Float;
use crate::mollifier::Mollifier;

/// Sign of the point nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Nonlinearity {
    Defocusing,
    Focusing,
    /// Linear problem; the nonlinear term is multiplied by zero.
    Disabled,
}

impl Nonlinearity {
    pub fn coefficient(self) -> f64 {
        match self {
            Nonlinearity::Defocusing => 1.0,
            Nonlinearity::Focusing => -1.0,
            Nonlinearity::Disabled => 0.0,
        }
    }
}

impl TryFrom<i8> for Nonlinearity {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Nonlinearity::Defocusing),
            -1 => Ok(Nonlinearity::Focusing),
            0 => Ok(Nonlinearity::Disabled),
            other => Err(format!("lambda must be +1, -1 or 0, got {other}")),
        }
    }
}

impl From<Nonlinearity> for i8 {
    fn from(n: Nonlinearity) -> i8 {
        n.coefficient() as i8
    }
}

fn default_blowup() -> f64 {
    1e6
}
fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(rename = "N")]
    pub mode_cutoff: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub epsilon: f64,
    pub gamma: f64,
    #[serde(rename = "lambda")]
    pub nonlinearity: Nonlinearity,
    pub p: f64,
    pub dealias: bool,
    /// Location of the point interaction.
    pub x0: f64,
    /// Keep every `snapshot_stride`-th field (the final field is always kept).
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode_cutoff: 64,
            dt: 1e-3,
            horizon: 0.5,
            epsilon: 0.1,
            gamma: 0.05,
            nonlinearity: Nonlinearity::Defocusing,
            p: 1.0,
            dealias: false,
            x0: 0.0,
            snapshot_stride: 1,
            blowup_threshold: default_blowup(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(invalid(format!("T must be >= 0, got {}", self.horizon)));
        }
        if !(self.p >= 1.0) {
            return Err(invalid(format!("p must be >= 1, got {}", self.p)));
        }
        if !(self.gamma >= 0.0) {
            return Err(invalid(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if self.snapshot_stride == 0 {
            return Err(invalid("snapshot_stride must be >= 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

/// Time series produced by a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    /// `∫|∂_x u|² + λ/(p+1) ∫ V^ε |u|^{2p+2}`.
    pub energy_eps: Vec<f64>,
    /// `|u(x0, t)|`.
    pub abs_u0: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    pub snapshots: Vec<SpectralField>,
}

impl Trajectory {
    pub fn final_field(&self) -> &SpectralField {
        self.snapshots
            .last()
            .expect("trajectory keeps the final field")
    }

    /// CSV with columns `t, mass, energy_eps, abs_u0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mass,energy_eps,abs_u0\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                Float(self.times[i]),
                Float(self.mass[i]),
                Float(self.energy_eps[i]),
                Float(self.abs_u0[i])
            ));
        }
        out
    }
}

/// Pointwise sNLS substep: exact phase rotation.
#[inline]
pub fn snls_pointwise(u: Complex64, a: f64, lambda: f64, p: f64, dt: f64) -> Complex64 {
    let r2 = u.norm_sqr();
    if r2 == 0.0 {
        return u;
    }
    u * Complex64::cis(-lambda * dt * a * r2.powf(p))
}

/// Pointwise sCGL substep: exact solution of `u' = −(γ+i) λ a |u|^{2p} u`
/// over a time `dt > 0`; `None` when the focusing flow blows up within `dt`.
#[inline]
pub fn scgl_pointwise(
    u: Complex64,
    a: f64,
    lambda: f64,
    p: f64,
    gamma: f64,
    dt: f64,
) -> Option<Complex64> {
    let r2 = u.norm_sqr();
    if r2 == 0.0 || a == 0.0 || lambda == 0.0 {
        return Some(u);
    }
    let drive = lambda * a * r2.powf(p) * dt;
    let x = 2.0 * p * gamma * drive;
    if 1.0 + x <= 0.0 {
        return None;
    }
    let log = x.ln_1p();
    let modulus = (-log / (2.0 * p)).exp();
    // ln(1+x)/(2pγ) → drive as γ → 0
    let phase = if x.abs() < 1e-300 {
        drive
    } else {
        log / (2.0 * p * gamma)
    };
    Some(u * Complex64::from_polar(modulus, -phase))
}

/// Reusable workspace for split steps at a fixed resolution and potential.
pub struct SplitStepper {
    mode_cutoff: usize,
    grid: Collocation,
    potential: Vec<f64>,
    values: Vec<Complex64>,
    lambda: f64,
    p: f64,
    gamma: f64,
}

impl SplitStepper {
    /// `dealias = false` uses the native `2N+1` grid; `true` evaluates the
    /// pointwise flow on a zero-padded `2(2N+1)` grid and truncates back to
    /// `|n| ≤ N`.
    pub fn new(
        moll: &Mollifier,
        mode_cutoff: usize,
        nonlinearity: Nonlinearity,
        p: f64,
        gamma: f64,
        dealias: bool,
        x0: f64,
    ) -> Self {
        let native = 2 * mode_cutoff + 1;
        let points = if dealias { 2 * native } else { native };
        let mut grid = Collocation::new(points);
        let potential = if moll.mode_cutoff() == mode_cutoff {
            moll.grid_values(&mut grid, x0)
        } else {
            let centred = moll.centered_at(x0).with_cutoff(mode_cutoff);
            let mut v = Vec::new();
            grid.to_grid(&centred, &mut v);
            v.into_iter().map(|c| c.re).collect()
        };
        Self {
            mode_cutoff,
            grid,
            potential,
            values: Vec::new(),
            lambda: nonlinearity.coefficient(),
            p,
            gamma,
        }
    }

    pub fn potential_on_grid(&self) -> &[f64] {
        &self.potential
    }

    /// One Strang step of sNLS. Any nonzero `dt` is allowed; the step is
    /// reversible (`step(step(u, dt), −dt) = u` up to roundoff).
    pub fn snls_step(&mut self, field: &SpectralField, dt: f64) -> SpectralField {
        let half = field.free_evolve(0.5 * dt);
        self.grid.to_grid(&half, &mut self.values);
        for (u, &a) in self.values.iter_mut().zip(&self.potential) {
            *u = snls_pointwise(*u, a, self.lambda, self.p, dt);
        }
        let mid = self.grid.from_grid(&mut self.values, self.mode_cutoff);
        mid.free_evolve(0.5 * dt)
    }

    /// One Strang step of sCGL (`dt > 0`).
    pub fn scgl_step(&mut self, field: &SpectralField, dt: f64, t: f64) -> Result<SpectralField> {
        let half = field.cgl_evolve(0.5 * dt, self.gamma);
        self.grid.to_grid(&half, &mut self.values);
        for (u, &a) in self.values.iter_mut().zip(&self.potential) {
            *u = scgl_pointwise(*u, a, self.lambda, self.p, self.gamma, dt)
                .ok_or(Error::SubstepSingular { t })?;
        }
        let mid = self.grid.from_grid(&mut self.values, self.mode_cutoff);
        Ok(mid.cgl_evolve(0.5 * dt, self.gamma))
    }

    /// `λ/(p+1) ∫ V^ε |u|^{2p+2}` by the grid trapezoid rule.
    pub fn potential_energy(&mut self, field: &SpectralField) -> f64 {
        self.grid.to_grid(field, &mut self.values);
        let sum: f64 = self
            .values
            .iter()
            .zip(&self.potential)
            .map(|(u, &a)| a * u.norm_sqr().powf(self.p + 1.0))
            .sum();
        self.lambda / (self.p + 1.0) * sum * 2.0 * std::f64::consts::PI / self.grid.points() as f64
    }

    /// `E^ε = ∫|∂_x u|² + λ/(p+1) ∫ V^ε |u|^{2p+2}`.
    pub fn energy_eps(&mut self, field: &SpectralField) -> f64 {
        field.kinetic() + self.potential_energy(field)
    }
}

/// One sNLS Strang step with a freshly built workspace.
pub fn snls_step(
    field: &SpectralField,
    dt: f64,
    moll: &Mollifier,
    nonlinearity: Nonlinearity,
    p: f64,
    dealias: bool,
) -> SpectralField {
    SplitStepper::new(
        moll,
        field.mode_cutoff(),
        nonlinearity,
        p,
        0.0,
        dealias,
        0.0,
    )
    .snls_step(field, dt)
}

/// One sCGL Strang step with a freshly built workspace.
pub fn scgl_step(
    field: &SpectralField,
    dt: f64,
    moll: &Mollifier,
    nonlinearity: Nonlinearity,
    p: f64,
    gamma: f64,
    dealias: bool,
) -> Result<SpectralField> {
    if !(gamma > 0.0) {
        return Err(invalid("scgl_step requires gamma > 0"));
    }
    if !(dt > 0.0) {
        return Err(invalid("scgl_step requires dt > 0"));
    }
    SplitStepper::new(
        moll,
        field.mode_cutoff(),
        nonlinearity,
        p,
        gamma,
        dealias,
        0.0,
    )
    .scgl_step(field, dt, 0.0)
}

fn run(
    u0: &SpectralField,
    config: &SolverConfig,
    moll: &Mollifier,
    mut step: impl FnMut(&mut SplitStepper, &SpectralField, f64) -> Result<SpectralField>,
    gamma: f64,
) -> Result<Trajectory> {
    config.validate()?;
    let n = config.mode_cutoff;
    let u0 = u0.with_cutoff(n);
    let mut stepper = SplitStepper::new(
        moll,
        n,
        config.nonlinearity,
        config.p,
        gamma,
        config.dealias,
        config.x0,
    );
    let steps = config.steps();
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        mass: Vec::with_capacity(steps + 1),
        energy_eps: Vec::with_capacity(steps + 1),
        abs_u0: Vec::with_capacity(steps + 1),
        snapshot_times: Vec::new(),
        snapshots: Vec::new(),
    };
    let mut field = u0;
    for j in 0..=steps {
        let t = j as f64 * config.dt;
        if j > 0 {
            field = step(&mut stepper, &field, t)?;
        }
        if !field.is_finite() {
            return Err(Error::NonFinite { t });
        }
        let at_x0 = field.eval_at(config.x0).norm();
        if at_x0 > config.blowup_threshold {
            return Err(Error::BlowUpDetected {
                t,
                magnitude: at_x0,
            });
        }
        traj.times.push(t);
        traj.mass.push(field.mass());
        traj.energy_eps.push(stepper.energy_eps(&field));
        traj.abs_u0.push(at_x0);
        if j % config.snapshot_stride == 0 || j == steps {
            traj.snapshot_times.push(t);
            traj.snapshots.push(field.clone());
        }
    }
    Ok(traj)
}

/// Integrates sNLS on `[0, T]` (`config.gamma` is ignored).
pub fn snls_solve(u0: &SpectralField, config: &SolverConfig) -> Result<Trajectory> {
    let moll = Mollifier::new(config.epsilon, config.mode_cutoff)?;
    snls_solve_with(u0, config, &moll)
}

/// [`snls_solve`] with a caller-supplied potential.
pub fn snls_solve_with(
    u0: &SpectralField,
    config: &SolverConfig,
    moll: &Mollifier,
) -> Result<Trajectory> {
    let dt = config.dt;
    run(u0, config, moll, |s, f, _| Ok(s.snls_step(f, dt)), 0.0)
}

/// Integrates sCGL on `[0, T]`; requires `config.gamma > 0`.
pub fn scgl_solve(u0: &SpectralField, config: &SolverConfig) -> Result<Trajectory> {
    let moll = Mollifier::new(config.epsilon, config.mode_cutoff)?;
    scgl_solve_with(u0, config, &moll)
}

pub fn scgl_solve_with(
    u0: &SpectralField,
    config: &SolverConfig,
    moll: &Mollifier,
) -> Result<Trajectory> {
    if !(config.gamma > 0.0) {
        return Err(invalid("sCGL requires gamma > 0"));
    }
    let dt = config.dt;
    run(
        u0,
        config,
        moll,
        |s, f, t| s.scgl_step(f, dt, t),
        config.gamma,
    )
}

/// Runs a forward solver on `[−T, 0]`: the equations are only integrated
/// forward, from the conjugate-reflected data, and the result is reflected
/// back. Times are returned in increasing order, ending at `t = 0`.
pub fn solve_backward(
    u0: &SpectralField,
    config: &SolverConfig,
    forward: impl Fn(&SpectralField, &SolverConfig) -> Result<Trajectory>,
) -> Result<Trajectory> {
    let fwd = forward(&u0.conj_reflect(), config)?;
    let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
    Ok(Trajectory {
        times: fwd.times.iter().rev().map(|t| -t).collect(),
        mass: rev(&fwd.mass),
        energy_eps: rev(&fwd.energy_eps),
        abs_u0: rev(&fwd.abs_u0),
        snapshot_times: fwd.snapshot_times.iter().rev().map(|t| -t).collect(),
        snapshots: fwd
            .snapshots
            .iter()
            .rev()
            .map(|f| f.conj_reflect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_hs_field;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn snls_pointwise_phase() {
        let out = snls_pointwise(c(2.0, 0.0), 0.3, 1.0, 1.0, 0.1);
        assert!((out - 2.0 * Complex64::cis(-0.12)).norm() < 1e-15);
    }

    /// Classical RK4 on `u' = −(γ+i) λ a |u|^{2p} u`.
    fn rk4_oracle(u: Complex64, a: f64, lambda: f64, p: f64, gamma: f64, dt: f64) -> Complex64 {
        let rhs = |v: Complex64| -c(gamma, 1.0) * lambda * a * v.norm_sqr().powf(p) * v;
        let steps = 20_000;
        let h = dt / steps as f64;
        let mut v = u;
        for _ in 0..steps {
            let k1 = rhs(v);
            let k2 = rhs(v + 0.5 * h * k1);
            let k3 = rhs(v + 0.5 * h * k2);
            let k4 = rhs(v + h * k3);
            v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        v
    }

    #[test]
    fn scgl_pointwise_reference_value() {
        let out = scgl_pointwise(c(1.0, 0.0), 1.0, 1.0, 1.0, 0.5, 1.0).unwrap();
        let expected = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -(2.0f64).ln());
        assert!((out - expected).norm() < 1e-15);
        assert!((out - rk4_oracle(c(1.0, 0.0), 1.0, 1.0, 1.0, 0.5, 1.0)).norm() < 1e-8);
    }

    #[test]
    fn scgl_pointwise_identity_and_contraction() {
        let u = c(0.7, -0.2);
        assert_eq!(scgl_pointwise(u, 0.0, 1.0, 1.0, 0.3, 0.1).unwrap(), u);
        for gamma in [1e-9, 1e-4, 0.1] {
            let v = scgl_pointwise(u, 2.0, 1.0, 2.0, gamma, 0.5).unwrap();
            assert!(v.norm() <= u.norm());
        }
        // γ → 0 recovers the sNLS phase rotation
        let v = scgl_pointwise(u, 2.0, 1.0, 1.0, 1e-12, 0.1).unwrap();
        assert!((v - snls_pointwise(u, 2.0, 1.0, 1.0, 0.1)).norm() < 1e-10);
    }

    #[test]
    fn scgl_pointwise_focusing_singularity() {
        // 1 + 2pγλ a r^{2p} dt = 1 − 2·0.5·1·4·1 < 0
        assert!(scgl_pointwise(c(2.0, 0.0), 1.0, -1.0, 1.0, 0.5, 1.0).is_none());
        let moll = Mollifier::new(0.5, 16).unwrap();
        let big = SpectralField::constant(16, c(20.0, 0.0));
        let err = scgl_step(&big, 1.0, &moll, Nonlinearity::Focusing, 1.0, 0.5, false);
        assert!(matches!(err, Err(Error::SubstepSingular { .. })));
    }

    #[test]
    fn zero_potential_gives_free_flow() {
        let f = random_hs_field(1.0, 16, 3).unwrap();
        let moll = Mollifier::zero(16);
        let g = snls_step(&f, 0.05, &moll, Nonlinearity::Defocusing, 1.0, false);
        assert!(g.max_coeff_distance(&f.free_evolve(0.05)) < 1e-15);
    }

    #[test]
    fn snls_step_conserves_mass() {
        let f = random_hs_field(1.0, 32, 21).unwrap();
        let moll = Mollifier::new(0.25, 32).unwrap();
        let g = snls_step(&f, 0.01, &moll, Nonlinearity::Defocusing, 1.0, false);
        assert!((g.mass() - f.mass()).abs() / f.mass() < 1e-12);
    }

    #[test]
    fn snls_step_is_reversible() {
        let f = random_hs_field(1.0, 32, 22).unwrap();
        let moll = Mollifier::new(0.25, 32).unwrap();
        let mut s = SplitStepper::new(&moll, 32, Nonlinearity::Defocusing, 1.0, 0.0, false, 0.0);
        let mid = s.snls_step(&f, 0.01);
        let back = s.snls_step(&mid, -0.01);
        assert!(back.max_coeff_distance(&f) < 1e-11);
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = SolverConfig {
            mode_cutoff: 16,
            horizon: 0.05,
            ..SolverConfig::default()
        };
        let traj = snls_solve(&SpectralField::zeros(16), &cfg).unwrap();
        assert_eq!(traj.times.len(), 51);
        assert!(traj.final_field().coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn scgl_requires_positive_gamma() {
        let cfg = SolverConfig {
            mode_cutoff: 16,
            gamma: 0.0,
            ..SolverConfig::default()
        };
        assert!(scgl_solve(&SpectralField::zeros(16), &cfg).is_err());
    }

    #[test]
    fn backward_run_inverts_forward_run() {
        let u0 = random_hs_field(1.0, 24, 5).unwrap();
        let cfg = SolverConfig {
            mode_cutoff: 24,
            horizon: 0.1,
            dt: 1e-3,
            epsilon: 0.3,
            x0: 0.4,
            ..SolverConfig::default()
        };
        let fwd = snls_solve(&u0, &cfg).unwrap();
        let back = solve_backward(fwd.final_field(), &cfg, snls_solve).unwrap();
        assert!((back.times[0] + 0.1).abs() < 1e-12);
        assert_eq!(*back.times.last().unwrap(), 0.0);
        // The split scheme is symmetric, so integrating back recovers u0.
        assert!(back.snapshots[0].max_coeff_distance(&u0) < 1e-10);
    }

    #[test]
    fn nonlinearity_serde() {
        let n: Nonlinearity = serde_json::from_str("-1").unwrap();
        assert_eq!(n, Nonlinearity::Focusing);
        assert!(serde_json::from_str::<Nonlinearity>("2").is_err());
        let cfg: std::result::Result<SolverConfig, _> = serde_json::from_str(
            r#"{"N":8,"dt":0.1,"T":1,"epsilon":0.5,"gamma":0,"lambda":1,"p":1,"dealias":false,"x0":0,"bogus":1}"#,
        );
        assert!(cfg.is_err());
    }
}
