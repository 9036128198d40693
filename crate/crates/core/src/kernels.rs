//! Truncated Volterra kernels `Σ e^{−in²t−γn²|t|}` and their negative-order
//! Sobolev norms in time.
//!
//! Time norms use the convention `‖F‖²_{H^b(ℝ)} = (1/2π) ∫ (1+η²)^b |F̂(η)|² dη`
//! with `F̂(η) = ∫ F(t) e^{−itη} dt`. Windowed norms are evaluated by the
//! discrete rule described on [`windowed_kernel_sobolev_norm`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::io::Float;
use crate::quadrature;

/// Zero-padding factor of the time samples before the transform.
pub const PADDING: usize = 4;

/// Ratio cap for `‖e^{−in²t−γn²|t|}‖² · γ n^{2+4s}`, frozen from a calibration
/// run over `n ∈ {4,…,64}`, `γ ∈ {0.01,…,0.5}` at `s = 0.49` (observed max 1.79,
/// at `n = 64, γ = 0.5`).
pub const MODE_BOUND_CAP: f64 = 2.0;

/// Ratio cap for the low-frequency difference `‖χ e^{−in²t}(1−e^{−γn²|t|})‖ / γ^s`,
/// frozen from the same calibration grid (observed max 2.67, at `n = 4, γ = 0.02`).
pub const LOW_FREQUENCY_CAP: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub gamma: f64,
    #[serde(rename = "N_k")]
    pub mode_cutoff: usize,
}

impl KernelSpec {
    pub fn new(gamma: f64, mode_cutoff: usize) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("kernel gamma must be >= 0, got {gamma}")));
        }
        Ok(Self { gamma, mode_cutoff })
    }
}

/// Smooth cutoff `χ` supported in `[−L, L]`, equal to one on `[−P, P]`, and
/// the uniform sample grid used to transform windowed kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeWindow {
    pub half_width: f64,
    pub sample_count: usize,
    pub plateau: f64,
}

impl Default for TimeWindow {
    fn default() -> Self {
        Self {
            half_width: 2.0 * PI,
            sample_count: 1 << 14,
            plateau: PI,
        }
    }
}

fn smooth_step_atom(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

impl TimeWindow {
    pub fn validate(&self) -> Result<()> {
        if !self.sample_count.is_power_of_two() || self.sample_count < 16 {
            return Err(invalid(format!(
                "sample count must be a power of two >= 16, got {}",
                self.sample_count
            )));
        }
        if self.plateau < PI * (1.0 - 1e-12) {
            return Err(invalid(format!(
                "window plateau {} does not cover [-π, π]",
                self.plateau
            )));
        }
        if !(self.half_width > self.plateau && self.half_width.is_finite()) {
            return Err(invalid(format!(
                "window half width {} must exceed the plateau {}",
                self.half_width, self.plateau
            )));
        }
        Ok(())
    }

    /// `χ(t)`: one on the plateau, zero outside `[−L, L]`, C^∞ in between.
    pub fn chi(&self, t: f64) -> f64 {
        let a = t.abs();
        if a <= self.plateau {
            return 1.0;
        }
        if a >= self.half_width {
            return 0.0;
        }
        let tau = (a - self.plateau) / (self.half_width - self.plateau);
        let up = smooth_step_atom(1.0 - tau);
        up / (up + smooth_step_atom(tau))
    }

    pub fn dt(&self) -> f64 {
        2.0 * self.half_width / self.sample_count as f64
    }

    /// Largest resolved frequency `π/Δt`.
    pub fn nyquist(&self) -> f64 {
        PI / self.dt()
    }

    /// Same window with the sample count raised (if needed) so that the
    /// frequency grid covers `|η| ≤ N_k² + 256`.
    pub fn resolving(&self, mode_cutoff: usize) -> Self {
        let needed_eta = (mode_cutoff * mode_cutoff) as f64 + 256.0;
        let needed = (2.0 * self.half_width * needed_eta / PI).ceil() as usize;
        Self {
            sample_count: self.sample_count.max(needed.next_power_of_two()),
            ..*self
        }
    }

    /// Sample times `t_j = −L + jΔt`, `j = 0..M`.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.sample_count)
            .map(|j| -self.half_width + j as f64 * dt)
            .collect()
    }
}

/// Quadrature metadata of a discrete time norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormMetadata {
    pub half_width: f64,
    pub plateau: f64,
    pub sample_count: usize,
    pub padding: usize,
    pub eta_step: f64,
    pub eta_max: f64,
}

/// A Sobolev norm `‖F‖_{H^b(ℝ)}` with the quadrature that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevTimeNorm {
    pub exponent: f64,
    pub value: f64,
    pub metadata: NormMetadata,
}

/// JSON record of one kernel-norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelNormRecord {
    pub gamma: f64,
    #[serde(rename = "N_k")]
    pub mode_cutoff: usize,
    pub s: f64,
    pub norm: f64,
    pub metadata: NormMetadata,
}

/// `Σ_{|n|≤N_k} e^{−in²t}`.
pub fn s_delta_partial(t: f64, mode_cutoff: usize) -> Complex64 {
    kernel_value(t, 0.0, mode_cutoff)
}

/// `Σ_{|n|≤N_k} e^{−in²t−γn²|t|}`.
pub fn s_delta_gamma_partial(t: f64, spec: &KernelSpec) -> Complex64 {
    kernel_value(t, spec.gamma, spec.mode_cutoff)
}

fn kernel_value(t: f64, gamma: f64, mode_cutoff: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for n in (1..=mode_cutoff).rev() {
        let k2 = (n * n) as f64;
        sum += Complex64::from_polar((-gamma * k2 * t.abs()).exp(), -k2 * t);
    }
    Complex64::new(1.0, 0.0) + 2.0 * sum
}

/// Kernel samples on a dense grid by the recurrence
/// `e^{−z(n+1)²} = e^{−zn²} · e^{−z(2n+1)}` with `z = γ|t| + it`.
fn kernel_samples(times: &[f64], gamma: f64, mode_cutoff: usize) -> Vec<Complex64> {
    times
        .par_iter()
        .map(|&t| {
            let z = Complex64::new(gamma * t.abs(), t);
            let step2 = (-2.0 * z).exp();
            let mut odd = (-z).exp();
            let mut term = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for _ in 1..=mode_cutoff {
                term *= odd;
                odd *= step2;
                sum += term;
            }
            Complex64::new(1.0, 0.0) + 2.0 * sum
        })
        .collect()
}

/// Discrete `H^{−s}(ℝ)` norm of the windowed samples `χ(t_j)F(t_j)`.
fn discrete_norm(values: &[Complex64], window: &TimeWindow, s: f64) -> SobolevTimeNorm {
    let m = window.sample_count;
    let len = m * PADDING;
    let dt = window.dt();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (j, (b, v)) in buf.iter_mut().zip(values).enumerate() {
        *b = v * window.chi(-window.half_width + j as f64 * dt);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let eta_step = 2.0 * PI / (len as f64 * dt);
    let mut total = 0.0;
    for (k, f) in buf.iter().enumerate() {
        let signed = if k < len / 2 {
            k as f64
        } else {
            k as f64 - len as f64
        };
        let eta = signed * eta_step;
        total += (1.0 + eta * eta).powf(-s) * f.norm_sqr();
    }
    let value = (total * dt * dt * eta_step / (2.0 * PI)).sqrt();
    SobolevTimeNorm {
        exponent: -s,
        value,
        metadata: NormMetadata {
            half_width: window.half_width,
            plateau: window.plateau,
            sample_count: m,
            padding: PADDING,
            eta_step,
            eta_max: window.nyquist(),
        },
    }
}

fn check_exponent(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(invalid(format!(
            "time exponent s must lie in (0, 1], got {s}"
        )));
    }
    Ok(())
}

/// `‖χ · Σ_{|n|≤N_k} e^{−in²t−γn²|t|}‖_{H^{−s}(ℝ)}`.
///
/// The product is sampled at `M` points on `[−L, L]`, zero padded by
/// [`PADDING`], transformed with `F̂(η_k) = Δt Σ_j F(t_j) e^{−it_jη_k}`, and
/// `(1/2π) Σ_k Δη (1+η_k²)^{−s} |F̂(η_k)|²` is summed over the transform's own
/// frequency grid. `M` is raised to [`TimeWindow::resolving`] when the
/// requested one would alias the top kernel frequency `N_k²`.
pub fn windowed_kernel_sobolev_norm(
    spec: &KernelSpec,
    s: f64,
    window: &TimeWindow,
) -> Result<SobolevTimeNorm> {
    window.validate()?;
    check_exponent(s)?;
    let w = window.resolving(spec.mode_cutoff);
    let samples = kernel_samples(&w.times(), spec.gamma, spec.mode_cutoff);
    Ok(discrete_norm(&samples, &w, s))
}

/// `‖χ (S^δ_{N_k} − S^δ_{γ,N_k})‖_{H^{−s}(ℝ)}` by the same discrete rule.
pub fn kernel_difference_norm(
    gamma: f64,
    mode_cutoff: usize,
    s: f64,
    window: &TimeWindow,
) -> Result<f64> {
    window.validate()?;
    check_exponent(s)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("kernel gamma must be >= 0, got {gamma}")));
    }
    let w = window.resolving(mode_cutoff);
    let times = w.times();
    let free = kernel_samples(&times, 0.0, mode_cutoff);
    let damped = kernel_samples(&times, gamma, mode_cutoff);
    let diff: Vec<Complex64> = free.iter().zip(&damped).map(|(a, b)| a - b).collect();
    Ok(discrete_norm(&diff, &w, s).value)
}

/// `𝓛_{γ,n}(ξ) = n²γ / ((ξ+n²)² + (γn²)²)`.
pub fn lorentzian(xi: f64, gamma: f64, n: i64) -> Result<f64> {
    check_lorentzian(gamma, n)?;
    let k2 = (n * n) as f64;
    let shift = xi + k2;
    Ok(k2 * gamma / (shift * shift + (gamma * k2).powi(2)))
}

/// `‖𝓛_{γ,n}‖²_{L²(ℝ)} = π / (2γn²)`.
pub fn lorentzian_l2_sq(gamma: f64, n: i64) -> Result<f64> {
    check_lorentzian(gamma, n)?;
    Ok(PI / (2.0 * gamma * (n * n) as f64))
}

fn check_lorentzian(gamma: f64, n: i64) -> Result<()> {
    if n == 0 {
        return Err(invalid("the zero mode carries no Lorentzian"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("Lorentzian needs gamma > 0, got {gamma}")));
    }
    Ok(())
}

/// Adaptive quadrature of `∫ 𝓛² dξ` over `|ξ + n²| ≤ R`.
pub fn lorentzian_l2_sq_numeric(gamma: f64, n: i64, radius: f64) -> Result<f64> {
    check_lorentzian(gamma, n)?;
    let k2 = (n * n) as f64;
    let width = gamma * k2;
    // break points graded around the peak
    let mut breaks = vec![0.0];
    let mut b = width;
    while b < radius {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(radius);
    let half = quadrature::adaptive_with_breaks(
        |x| {
            let v = width / (x * x + width * width);
            v * v
        },
        &breaks,
        1e-300,
        1e-13,
        20_000,
    );
    Ok(2.0 * half.value)
}

/// Measured norms for one mode against the low- and high-frequency bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeBoundReport {
    pub n: i64,
    pub gamma: f64,
    pub s: f64,
    /// `‖χ e^{−in²t}(1 − e^{−γn²|t|})‖_{H^{−s}}`.
    pub low_frequency_norm: f64,
    /// `low_frequency_norm / γ^s`.
    pub low_frequency_ratio: f64,
    /// `‖e^{−in²t−γn²|t|}‖²_{H^{−s}}`.
    pub mode_norm_sq: f64,
    /// `mode_norm_sq · γ n^{2+4s}`.
    pub mode_ratio: f64,
}

impl ModeBoundReport {
    pub fn within_caps(&self) -> bool {
        self.low_frequency_ratio.is_finite()
            && self.mode_ratio.is_finite()
            && self.low_frequency_ratio <= LOW_FREQUENCY_CAP
            && self.mode_ratio <= MODE_BOUND_CAP
    }
}

/// Exact `‖e^{−in²t−γn²|t|}‖²_{H^{−s}(ℝ)}`: the transform is `2𝓛_{γ,n}`, so
/// this is `(1/2π) ∫ (1+η²)^{−s} 4𝓛² dη`, integrated adaptively.
pub fn mode_norm_sq(n: i64, gamma: f64, s: f64) -> Result<f64> {
    check_lorentzian(gamma, n)?;
    let k2 = (n * n) as f64;
    let width = gamma * k2;
    let f = |eta: f64| {
        let l = k2 * gamma / ((eta + k2).powi(2) + width * width);
        (1.0 + eta * eta).powf(-s) * 4.0 * l * l
    };
    // Substitute η = −n² + w·tan θ so the Lorentzian peak becomes flat.
    let g = |theta: f64| {
        let eta = -k2 + width * theta.tan();
        let jac = width / theta.cos().powi(2);
        f(eta) * jac
    };
    let lim = 0.5 * PI;
    let r =
        quadrature::adaptive_with_breaks(g, &[-lim, -1.0, 0.0, 1.0, lim], 1e-300, 1e-12, 20_000);
    Ok(r.value / (2.0 * PI))
}

pub fn verify_mode_bounds(
    n: i64,
    gamma: f64,
    s: f64,
    window: &TimeWindow,
) -> Result<ModeBoundReport> {
    if n == 0 {
        return Err(invalid("mode bounds need n != 0"));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(invalid(format!(
            "mode bounds need gamma in [0, 1), got {gamma}"
        )));
    }
    window.validate()?;
    check_exponent(s)?;
    let k = n.unsigned_abs() as usize;
    let w = window.resolving(k);
    let k2 = (k * k) as f64;
    let samples: Vec<Complex64> = w
        .times()
        .iter()
        .map(|&t| Complex64::cis(-k2 * t) * -(-gamma * k2 * t.abs()).exp_m1())
        .collect();
    let low = discrete_norm(&samples, &w, s).value;
    let (mode_sq, mode_ratio) = if gamma > 0.0 {
        let v = mode_norm_sq(n, gamma, s)?;
        (v, v * gamma * (k as f64).powf(2.0 + 4.0 * s))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(ModeBoundReport {
        n,
        gamma,
        s,
        low_frequency_norm: low,
        low_frequency_ratio: if gamma > 0.0 {
            low / gamma.powf(s)
        } else {
            0.0
        },
        mode_norm_sq: mode_sq,
        mode_ratio,
    })
}

/// CSV rows `gamma,N_k,s,norm,sample_count,eta_step` for a sweep.
pub fn records_to_csv(records: &[KernelNormRecord]) -> String {
    let mut out = String::from("gamma,N_k,s,norm,sample_count,eta_step\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            Float(r.gamma),
            r.mode_cutoff,
            Float(r.s),
            Float(r.norm),
            r.metadata.sample_count,
            Float(r.metadata.eta_step)
        ));
    }
    out
}
