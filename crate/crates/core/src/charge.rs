//! Volterra formulation of the point-interaction problem.
//!
//! With the delta moved to the origin, each Fourier mode obeys the linear ODE
//! `c_n' = −z_n c_n + μ F(t)`, `z_n = (γ+i)n²`, `μ = −(γ+i) λ κ`, driven by
//! the charge nonlinearity `F = |q|^{2p} q` with `q(t) = Σ c_n(t)`. Hence
//!
//! ```text
//! c_n(t) = e^{−z_n t} c_n(0) + μ A_n(t),   A_n(t) = ∫₀ᵗ e^{−z_n (t−t')} F(t') dt'
//! q(t)   = Σ e^{−z_n t} c_n(0) + μ Σ A_n(t)
//! ```
//!
//! `A_n` is advanced panel by panel: exact decay `e^{−z_n dt}` of the old value
//! plus a Filon rule that integrates the linear interpolant of `F` exactly
//! against the exponential. The unknown endpoint value `F(t+dt)` is found by a
//! scalar Picard iteration, since `q(t+dt)` depends on it only through
//! `μ Σ w1_n F(t+dt)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::io::Float;
use crate::solvers::Nonlinearity;
use crate::KAPPA;

fn default_picard_tol() -> f64 {
    1e-12
}
fn default_max_iters() -> usize {
    50
}
fn default_blowup() -> f64 {
    1e6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolterraConfig {
    pub dt: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "N")]
    pub mode_cutoff: usize,
    pub gamma: f64,
    #[serde(rename = "lambda")]
    pub nonlinearity: Nonlinearity,
    pub p: f64,
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
    #[serde(default)]
    pub x0: f64,
}

impl Default for VolterraConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 0.5,
            mode_cutoff: 64,
            gamma: 0.0,
            nonlinearity: Nonlinearity::Defocusing,
            p: 1.0,
            picard_tol: default_picard_tol(),
            max_iters: default_max_iters(),
            blowup_threshold: default_blowup(),
            x0: 0.0,
        }
    }
}

impl VolterraConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(invalid(format!("T must be >= 0, got {}", self.horizon)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(invalid(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.p >= 1.0) {
            return Err(invalid(format!("p must be >= 1, got {}", self.p)));
        }
        if !(self.picard_tol > 0.0) {
            return Err(invalid("picard_tol must be > 0"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be >= 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// `μ = −(γ+i) λ κ`, i.e. `−iλκ` at γ = 0 and `−i(1−γi)λκ` otherwise.
    pub fn coupling(&self) -> Complex64 {
        -Complex64::new(self.gamma, 1.0) * self.nonlinearity.coefficient() * KAPPA
    }

    fn nonlinearity_of(&self, q: Complex64) -> Complex64 {
        q * q.norm_sqr().powf(self.p)
    }
}

/// Solution of the charge equation on the uniform grid `t_j = j·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeTrajectory {
    pub times: Vec<f64>,
    pub q: Vec<Complex64>,
    pub picard_iters: Vec<usize>,
    pub gamma: f64,
    pub config: VolterraConfig,
}

impl ChargeTrajectory {
    pub fn dt(&self) -> f64 {
        self.config.dt
    }

    /// Grid index of `t`, or `GridMismatch`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let dt = self.config.dt;
        let j = (t / dt).round();
        let horizon = *self.times.last().unwrap_or(&0.0);
        if !t.is_finite() || j < 0.0 || (j * dt - t).abs() > 1e-9 * dt.max(t.abs()) {
            return Err(Error::GridMismatch { t, dt, horizon });
        }
        let j = j as usize;
        if j >= self.times.len() {
            return Err(Error::GridMismatch { t, dt, horizon });
        }
        Ok(j)
    }

    /// `F(t_j) = |q_j|^{2p} q_j`.
    pub fn nonlinearity(&self) -> Vec<Complex64> {
        self.q
            .iter()
            .map(|&q| self.config.nonlinearity_of(q))
            .collect()
    }

    /// CSV with columns `t, re_q, im_q, abs_q, picard_iters`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re_q,im_q,abs_q,picard_iters\n");
        for ((t, q), it) in self.times.iter().zip(&self.q).zip(&self.picard_iters) {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                Float(*t),
                Float(q.re),
                Float(q.im),
                Float(q.norm()),
                it
            ));
        }
        out
    }
}

/// `(w0, w1)` with `∫₀^h e^{−z(h−τ)} [F₀(1−τ/h) + F₁τ/h] dτ = w0·F₀ + w1·F₁`.
pub fn filon_weights(z: Complex64, h: f64) -> (Complex64, Complex64) {
    let x = z * h;
    if x.norm() < 0.5 {
        // w0/h = Σ_{k≥2} (−1)^k (k−1)/k! x^{k−2},  w1/h = Σ_{k≥2} (−1)^k/k! x^{k−2}
        let mut w0 = Complex64::new(0.0, 0.0);
        let mut w1 = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        let mut factorial = 2.0;
        for k in 2..30 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            w0 += power * (sign * (k as f64 - 1.0) / factorial);
            w1 += power * (sign / factorial);
            power *= x;
            factorial *= (k + 1) as f64;
        }
        (w0 * h, w1 * h)
    } else {
        let e = (-x).exp();
        let x2 = x * x;
        let w0 = (Complex64::new(1.0, 0.0) - e * (1.0 + x)) / x2;
        let w1 = (x - 1.0 + e) / x2;
        (w0 * h, w1 * h)
    }
}

/// Per-mode memory integrals `A_n(t) = ∫₀ᵗ e^{−z_n(t−t')} F(t') dt'`.
#[derive(Debug, Clone)]
pub struct ModeAccumulators {
    mode_cutoff: usize,
    values: Vec<Complex64>,
    decay: Vec<Complex64>,
    w0: Vec<Complex64>,
    w1: Vec<Complex64>,
}

impl ModeAccumulators {
    pub fn new(mode_cutoff: usize, gamma: f64, dt: f64) -> Self {
        let len = 2 * mode_cutoff + 1;
        let mut decay = Vec::with_capacity(len);
        let mut w0 = Vec::with_capacity(len);
        let mut w1 = Vec::with_capacity(len);
        let cutoff = mode_cutoff as i64;
        for n in -cutoff..=cutoff {
            let z = Complex64::new(gamma, 1.0) * (n * n) as f64;
            decay.push((-z * dt).exp());
            let (a, b) = filon_weights(z, dt);
            w0.push(a);
            w1.push(b);
        }
        Self {
            mode_cutoff,
            values: vec![Complex64::new(0.0, 0.0); len],
            decay,
            w0,
            w1,
        }
    }

    pub fn mode_cutoff(&self) -> usize {
        self.mode_cutoff
    }

    /// Current `A_n`, ordered `n = -N..=N`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Exact per-step decay factors `e^{−z_n dt}`.
    pub fn decay(&self) -> &[Complex64] {
        &self.decay
    }

    /// `Σ_n e^{−z_n dt} A_n` (the memory carried into the next panel).
    pub fn decayed_sum(&self) -> Complex64 {
        self.values
            .iter()
            .zip(&self.decay)
            .map(|(a, d)| a * d)
            .sum()
    }

    pub fn weight_sums(&self) -> (Complex64, Complex64) {
        (self.w0.iter().sum(), self.w1.iter().sum())
    }

    /// Advance by one panel with endpoint values `F(t)`, `F(t+dt)`.
    pub fn advance(&mut self, f_start: Complex64, f_end: Complex64) {
        for i in 0..self.values.len() {
            self.values[i] =
                self.decay[i] * self.values[i] + self.w0[i] * f_start + self.w1[i] * f_end;
        }
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }
}

fn free_trace_with(u0: &SpectralField, t: f64, gamma: f64) -> Complex64 {
    u0.modes()
        .map(|(n, c)| {
            let k2 = (n * n) as f64;
            c * Complex64::from_polar((-gamma * k2 * t.abs()).exp(), -k2 * t)
        })
        .sum()
}

/// `q₁(t) = Σ c_n(0) e^{−in²t}`, the point trace of the free flow at `x = 0`.
pub fn free_trace(u0: &SpectralField, times: &[f64]) -> Vec<Complex64> {
    times.iter().map(|&t| free_trace_with(u0, t, 0.0)).collect()
}

/// Solves the charge equation for `q(t) = u(x0, t)` on `[0, T]`.
pub fn solve_charge(u0: &SpectralField, cfg: &VolterraConfig) -> Result<ChargeTrajectory> {
    cfg.validate()?;
    let n = cfg.mode_cutoff;
    let v0 = u0.translate(cfg.x0).with_cutoff(n);
    let steps = cfg.steps();
    let mu = cfg.coupling();
    let mut acc = ModeAccumulators::new(n, cfg.gamma, cfg.dt);
    let (w0_sum, w1_sum) = acc.weight_sums();
    let (w0_sum, w1_sum) = (mu * w0_sum, mu * w1_sum);

    let mut times = Vec::with_capacity(steps + 1);
    let mut q = Vec::with_capacity(steps + 1);
    let mut iters = Vec::with_capacity(steps + 1);
    let q0 = v0.eval_at(0.0);
    times.push(0.0);
    q.push(q0);
    iters.push(0);
    let mut f_prev = cfg.nonlinearity_of(q0);

    for j in 1..=steps {
        let t = j as f64 * cfg.dt;
        let base = free_trace_with(&v0, t, cfg.gamma) + mu * acc.decayed_sum() + w0_sum * f_prev;
        let mut guess = *q.last().expect("non-empty");
        let mut converged = false;
        let mut count = 0;
        let mut update = f64::INFINITY;
        while count < cfg.max_iters {
            let next = base + w1_sum * cfg.nonlinearity_of(guess);
            count += 1;
            update = (next - guess).norm();
            guess = next;
            if !guess.re.is_finite() || !guess.im.is_finite() {
                return Err(Error::NonFinite { t });
            }
            if update < cfg.picard_tol * guess.norm().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::PicardDiverged {
                t,
                iterations: count,
                last_update: update,
            });
        }
        if guess.norm() > cfg.blowup_threshold {
            return Err(Error::BlowUpDetected {
                t,
                magnitude: guess.norm(),
            });
        }
        let f_next = cfg.nonlinearity_of(guess);
        acc.advance(f_prev, f_next);
        f_prev = f_next;
        times.push(t);
        q.push(guess);
        iters.push(count);
    }

    Ok(ChargeTrajectory {
        times,
        q,
        picard_iters: iters,
        gamma: cfg.gamma,
        config: cfg.clone(),
    })
}

/// Replays the Filon panels of a charge trajectory on `|n| ≤ mode_cutoff`,
/// calling `visit(j, accumulators)` at every grid index up to `last`.
fn replay(
    charge: &ChargeTrajectory,
    mode_cutoff: usize,
    last: usize,
    mut visit: impl FnMut(usize, &ModeAccumulators),
) {
    let cfg = &charge.config;
    let forcing = charge.nonlinearity();
    let mut acc = ModeAccumulators::new(mode_cutoff, cfg.gamma, cfg.dt);
    visit(0, &acc);
    for j in 1..=last {
        acc.advance(forcing[j - 1], forcing[j]);
        visit(j, &acc);
    }
}

fn assemble(
    v0: &SpectralField,
    acc: &ModeAccumulators,
    t: f64,
    cfg: &VolterraConfig,
) -> SpectralField {
    let mu = cfg.coupling();
    let free = v0.cgl_evolve(t, cfg.gamma);
    let mut field = free;
    for (c, a) in field.coeffs_mut().iter_mut().zip(acc.values()) {
        *c += mu * a;
    }
    field.translate(-cfg.x0)
}

/// Field at grid time `t`: `c_k(t) = e^{−z_k t} c_k(0) + μ A_k(t)`, built
/// from the charge by the same Filon panels the solver used.
pub fn reconstruct_field(
    u0: &SpectralField,
    charge: &ChargeTrajectory,
    t: f64,
    mode_cutoff: usize,
) -> Result<SpectralField> {
    let j = charge.index_of(t)?;
    let cfg = &charge.config;
    let v0 = u0.translate(cfg.x0).with_cutoff(mode_cutoff);
    let mut out = None;
    replay(charge, mode_cutoff, j, |i, acc| {
        if i == j {
            out = Some(assemble(&v0, acc, charge.times[j], cfg));
        }
    });
    Ok(out.expect("replay visits the target index"))
}

/// Reconstructed fields at every `stride`-th grid time (and the final one),
/// in a single replay pass.
pub fn field_history(
    u0: &SpectralField,
    charge: &ChargeTrajectory,
    mode_cutoff: usize,
    stride: usize,
) -> Vec<(f64, SpectralField)> {
    let cfg = &charge.config;
    let v0 = u0.translate(cfg.x0).with_cutoff(mode_cutoff);
    let last = charge.times.len() - 1;
    let stride = stride.max(1);
    let mut out = Vec::new();
    replay(charge, mode_cutoff, last, |j, acc| {
        if j % stride == 0 || j == last {
            out.push((charge.times[j], assemble(&v0, acc, charge.times[j], cfg)));
        }
    });
    out
}

/// `Σ |c_n|`.
pub fn wiener_norm(field: &SpectralField) -> f64 {
    field.wiener_norm()
}

/// Terms of the mass decomposition `M(u(t)) = I + II + III`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassIdentity {
    /// `‖S(t)u₀‖² = M(u₀)`.
    pub free_mass: f64,
    /// Cross term between the free trace and the Duhamel integral.
    pub cross: f64,
    /// Squared norm of the Duhamel integral.
    pub duhamel: f64,
    /// `|II + III|`.
    pub residual: f64,
    /// `|M(reconstruct_field(t)) − M(u₀)|`.
    pub mass_defect: f64,
}

/// Evaluates `II` and `III` of the mass decomposition with the Filon panels
/// of a γ = 0 charge trajectory.
pub fn mass_identity_residual(
    u0: &SpectralField,
    charge: &ChargeTrajectory,
    t: f64,
) -> Result<MassIdentity> {
    let cfg = &charge.config;
    if cfg.gamma != 0.0 {
        return Err(invalid("mass identity applies to γ = 0 trajectories"));
    }
    let j = charge.index_of(t)?;
    let t = charge.times[j];
    let n = cfg.mode_cutoff;
    let v0 = u0.translate(cfg.x0).with_cutoff(n);
    let mu = cfg.coupling();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut result = None;
    replay(charge, n, j, |i, acc| {
        if i != j {
            return;
        }
        let mut cross = 0.0;
        let mut duhamel = 0.0;
        for ((k, c), a) in v0.modes().zip(acc.values()) {
            // J_k = e^{ik²t} A_k pairs with the undisturbed coefficient c_k(0)
            let pulled_back = Complex64::cis((k * k) as f64 * t) * a;
            cross += (c.conj() * mu * pulled_back).re;
            duhamel += (mu * a).norm_sqr();
        }
        let cross = 2.0 * two_pi * cross;
        let duhamel = two_pi * duhamel;
        let field = assemble(&v0, acc, t, cfg);
        result = Some(MassIdentity {
            free_mass: u0.with_cutoff(n).mass(),
            cross,
            duhamel,
            residual: (cross + duhamel).abs(),
            mass_defect: (field.mass() - u0.with_cutoff(n).mass()).abs(),
        });
    });
    Ok(result.expect("replay visits the target index"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_hs_field;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg(n: usize, horizon: f64) -> VolterraConfig {
        VolterraConfig {
            mode_cutoff: n,
            horizon,
            ..VolterraConfig::default()
        }
    }

    #[test]
    fn filon_weights_match_quadrature() {
        for z in [
            c(0.0, 0.0),
            c(0.0, 1.0),
            c(0.3, 25.0),
            c(0.0, 4096.0),
            c(2.0, 0.1),
        ] {
            let h = 1e-3 * 7.0;
            let (w0, w1) = filon_weights(z, h);
            // brute-force midpoint rule with many panels
            let m = 200_000;
            let (mut r0, mut r1) = (c(0.0, 0.0), c(0.0, 0.0));
            for i in 0..m {
                let tau = (i as f64 + 0.5) * h / m as f64;
                let k = (-z * (h - tau)).exp() * (h / m as f64);
                r0 += k * (1.0 - tau / h);
                r1 += k * (tau / h);
            }
            assert!((w0 - r0).norm() < 1e-10 * h, "{z}: {w0} vs {r0}");
            assert!((w1 - r1).norm() < 1e-10 * h, "{z}: {w1} vs {r1}");
        }
        // continuity across the series / closed-form switch
        let h = 1.0;
        let (a, b) = filon_weights(c(0.0, 0.4999999), h);
        let (a2, b2) = filon_weights(c(0.0, 0.5000001), h);
        assert!((a - a2).norm() < 1e-7 && (b - b2).norm() < 1e-7);
    }

    #[test]
    fn free_trace_examples() {
        let times = [0.0, 0.3, 1.1];
        let pw = SpectralField::plane_wave(4, 1, c(1.0, 0.0));
        for (q, &t) in free_trace(&pw, &times).iter().zip(&times) {
            assert!((q - Complex64::cis(-t)).norm() < 1e-15);
        }
        let r = random_hs_field(1.0, 8, 1).unwrap();
        assert!((free_trace(&r, &[0.0])[0] - r.eval_at(0.0)).norm() < 1e-14);
        let k = SpectralField::constant(8, c(0.2, 0.1));
        assert!(free_trace(&k, &times)
            .iter()
            .all(|q| (q - c(0.2, 0.1)).norm() < 1e-15));
    }

    #[test]
    fn zero_data_and_linear_problem() {
        let z = solve_charge(&SpectralField::zeros(16), &cfg(16, 0.1)).unwrap();
        assert!(z.q.iter().all(|q| q.norm() == 0.0));

        let u0 = random_hs_field(0.8, 16, 4).unwrap();
        let linear = VolterraConfig {
            nonlinearity: Nonlinearity::Disabled,
            ..cfg(16, 0.2)
        };
        let ch = solve_charge(&u0, &linear).unwrap();
        for (q, q1) in ch.q.iter().zip(free_trace(&u0, &ch.times)) {
            assert!((q - q1).norm() < 1e-14);
        }
        let rec = reconstruct_field(&u0, &ch, 0.2, 16).unwrap();
        assert!(rec.max_coeff_distance(&u0.free_evolve(0.2)) < 1e-14);
    }

    #[test]
    fn reconstruction_is_self_consistent() {
        let u0 = random_hs_field(1.0, 32, 9)
            .unwrap()
            .map_modes(|_, c| c * 0.5);
        let cf = VolterraConfig {
            x0: 0.7,
            ..cfg(32, 0.2)
        };
        let ch = solve_charge(&u0, &cf).unwrap();
        assert!((ch.q[0] - u0.eval_at(0.7)).norm() < 1e-15);
        for t in [0.05, 0.2] {
            let j = ch.index_of(t).unwrap();
            let rec = reconstruct_field(&u0, &ch, t, 32).unwrap();
            assert!((rec.eval_at(0.7) - ch.q[j]).norm() < 10.0 * cf.picard_tol);
        }
        assert!(matches!(
            reconstruct_field(&u0, &ch, 0.0105, 32),
            Err(Error::GridMismatch { .. })
        ));
        assert!(reconstruct_field(&u0, &ch, 0.3, 32).is_err());
    }

    #[test]
    fn small_data_stays_near_free_trace() {
        let u0 = SpectralField::plane_wave(64, 1, c(0.01, 0.0));
        let ch = solve_charge(&u0, &cfg(64, 0.5)).unwrap();
        let q1 = free_trace(&u0, &ch.times);
        let gap =
            ch.q.iter()
                .zip(&q1)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
        assert!(gap <= 1e-4, "{gap}");
        assert!(ch.picard_iters.iter().all(|&k| k <= 8));
    }

    #[test]
    fn gamma_continuity() {
        let u0 = SpectralField::plane_wave(64, 1, c(0.5, 0.0));
        let a = solve_charge(&u0, &cfg(64, 0.5)).unwrap();
        let b = solve_charge(
            &u0,
            &VolterraConfig {
                gamma: 1e-8,
                ..cfg(64, 0.5)
            },
        )
        .unwrap();
        let gap =
            a.q.iter()
                .zip(&b.q)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
        assert!(gap < 1e-5, "{gap}");
    }

    #[test]
    fn determinism() {
        let u0 = random_hs_field(0.75, 32, 11).unwrap();
        let a = solve_charge(&u0, &cfg(32, 0.1)).unwrap();
        let b = solve_charge(&u0, &cfg(32, 0.1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn picard_cap_is_reported() {
        let u0 = SpectralField::constant(16, c(3.0, 0.0));
        let cf = VolterraConfig {
            max_iters: 1,
            ..cfg(16, 0.01)
        };
        assert!(matches!(
            solve_charge(&u0, &cf),
            Err(Error::PicardDiverged { .. })
        ));
    }

    #[test]
    fn blowup_threshold_is_enforced() {
        // The truncated system conserves mass, so |q| ≤ Σ|c_n| stays bounded;
        // the guard is exercised with a threshold below the data.
        let u0 = SpectralField::constant(16, c(4.0, 0.0));
        let cf = VolterraConfig {
            nonlinearity: Nonlinearity::Focusing,
            blowup_threshold: 3.0,
            ..cfg(16, 0.01)
        };
        assert!(matches!(
            solve_charge(&u0, &cf),
            Err(Error::BlowUpDetected { .. })
        ));
    }

    #[test]
    fn mass_identity_trivial_cases() {
        let z = SpectralField::zeros(16);
        let ch = solve_charge(&z, &cfg(16, 0.1)).unwrap();
        let m = mass_identity_residual(&z, &ch, 0.1).unwrap();
        assert_eq!(m.residual, 0.0);

        let u0 = random_hs_field(1.0, 16, 2).unwrap();
        let lin = VolterraConfig {
            nonlinearity: Nonlinearity::Disabled,
            ..cfg(16, 0.1)
        };
        let ch = solve_charge(&u0, &lin).unwrap();
        let m = mass_identity_residual(&u0, &ch, 0.1).unwrap();
        assert!(m.residual < 1e-15 && m.mass_defect < 1e-13);
        assert!((m.free_mass - u0.mass()).abs() < 1e-15);
    }

    #[test]
    fn charge_csv_layout() {
        let u0 = SpectralField::plane_wave(8, 1, c(1.0, 0.0));
        let ch = solve_charge(&u0, &cfg(8, 0.002)).unwrap();
        let csv = ch.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,re_q,im_q,abs_q,picard_iters"));
        assert_eq!(lines.next(), Some("0,1,0,1,0"));
        assert_eq!(csv.lines().count(), 4);
    }
}
