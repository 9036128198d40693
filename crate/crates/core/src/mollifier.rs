//! The rescaled bump `V^ε(x) = ε⁻¹ V(x/ε)` approximating the Dirac delta.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::grid::Collocation;
use crate::quadrature;

/// Unnormalized base profile `e^{-1/(1-y²)}` on `(-1, 1)`.
pub fn bump(y: f64) -> f64 {
    let d = 1.0 - y * y;
    if d <= 0.0 {
        0.0
    } else {
        (-1.0 / d).exp()
    }
}

fn bump_mass() -> f64 {
    quadrature::adaptive(bump, -1.0, 1.0, 1e-16, 1e-15, 2000).value
}

#[derive(Debug, Clone)]
pub struct Mollifier {
    epsilon: f64,
    coeffs: SpectralField,
    normalization_residual: f64,
    profile_scale: f64,
}

impl Mollifier {
    /// Fourier coefficients of `V^ε` on `|n| ≤ N`, computed by composite
    /// Gauss–Legendre quadrature and rescaled so that `c₀ = 1/(2π)` exactly.
    pub fn new(epsilon: f64, mode_cutoff: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(invalid(format!(
                "mollifier width must lie in (0, 1], got {epsilon}"
            )));
        }
        if mode_cutoff < 8 {
            return Err(invalid("mollifier needs at least 8 modes"));
        }
        let mass = bump_mass();
        // Resolve ~4 panels per oscillation of cos(nεy) on (-1, 1).
        let panels = ((mode_cutoff as f64 * epsilon * 2.0).ceil() as usize).max(16);
        let raw: Vec<f64> = (0..=mode_cutoff)
            .map(|n| {
                let k = n as f64 * epsilon;
                quadrature::composite_gauss_legendre(
                    |y| bump(y) * (k * y).cos(),
                    -1.0,
                    1.0,
                    panels,
                    16,
                ) / (2.0 * PI * mass)
            })
            .collect();
        let normalization_residual = (2.0 * PI * raw[0] - 1.0).abs();
        let rescale = 1.0 / (2.0 * PI * raw[0]);
        let mut coeffs = SpectralField::zeros(mode_cutoff);
        for (n, &c) in raw.iter().enumerate() {
            let v = Complex64::new(c * rescale, 0.0);
            *coeffs.coeff_mut(n as i64) = v;
            *coeffs.coeff_mut(-(n as i64)) = v;
        }
        *coeffs.coeff_mut(0) = Complex64::new(1.0 / (2.0 * PI), 0.0);
        Ok(Self {
            epsilon,
            coeffs,
            normalization_residual,
            profile_scale: rescale / (mass * epsilon),
        })
    }

    /// The zero potential on `|n| ≤ N`; turns every solver into the free flow.
    pub fn zero(mode_cutoff: usize) -> Self {
        Self {
            epsilon: 1.0,
            coeffs: SpectralField::zeros(mode_cutoff),
            normalization_residual: 0.0,
            profile_scale: 0.0,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mode_cutoff(&self) -> usize {
        self.coeffs.mode_cutoff()
    }

    /// Coefficients of `V^ε` centred at the origin.
    pub fn coeffs(&self) -> &SpectralField {
        &self.coeffs
    }

    /// `|2π c₀ − 1|` before the final rescale.
    pub fn normalization_residual(&self) -> f64 {
        self.normalization_residual
    }

    /// Coefficients of `V^ε(· − x0)`.
    pub fn centered_at(&self, x0: f64) -> SpectralField {
        self.coeffs.translate(-x0)
    }

    /// Exact (untruncated) profile value `V^ε(x)` for `x ∈ (-π, π]`.
    pub fn profile(&self, x: f64) -> f64 {
        self.profile_scale * bump(x / self.epsilon)
    }

    /// Exact profile `V^ε(x_j − x0)` at the grid nodes (nonnegative).
    pub fn sampled_profile(&self, grid: &Collocation, x0: f64) -> Vec<f64> {
        (0..grid.points())
            .map(|j| {
                let d = (grid.node(j) - x0 + PI).rem_euclid(2.0 * PI) - PI;
                self.profile(d)
            })
            .collect()
    }

    /// Values of the truncated series of `V^ε(· − x0)` on a collocation grid.
    pub fn grid_values(&self, grid: &mut Collocation, x0: f64) -> Vec<f64> {
        let mut values = Vec::new();
        grid.to_grid(&self.centered_at(x0), &mut values);
        values.into_iter().map(|v| v.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mode_is_normalized() {
        for eps in [1.0, 0.5, 0.25, 0.05] {
            let m = Mollifier::new(eps, 64).unwrap();
            assert_eq!(m.coeffs().coeff(0).re, 1.0 / (2.0 * PI));
            assert!(
                m.normalization_residual() < 1e-12,
                "{}",
                m.normalization_residual()
            );
        }
    }

    #[test]
    fn coefficients_real_and_even() {
        let m = Mollifier::new(0.3, 40).unwrap();
        for n in 0..=40i64 {
            let (a, b) = (m.coeffs().coeff(n), m.coeffs().coeff(-n));
            assert!((a - b).norm() < 1e-12);
            assert!(a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn coefficients_match_exact_profile_transform() {
        let m = Mollifier::new(0.25, 32).unwrap();
        for n in [1i64, 5, 17, 32] {
            let oracle = quadrature::adaptive(
                |x| m.profile(x) * (n as f64 * x).cos(),
                -0.25,
                0.25,
                1e-15,
                1e-13,
                5000,
            )
            .value
                / (2.0 * PI);
            assert!((oracle - m.coeffs().coeff(n).re).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn grid_values_nonnegative_and_unit_mass() {
        let m = Mollifier::new(0.25, 64).unwrap();
        let mut grid = Collocation::new(129);
        let exact = m.sampled_profile(&grid, 0.3);
        assert!(exact.iter().all(|&x| x >= 0.0));
        let series = m.grid_values(&mut grid, 0.0);
        // the truncated series keeps unit mass exactly but rings below zero
        let total: f64 = series.iter().sum::<f64>() * 2.0 * PI / 129.0;
        assert!((total - 1.0).abs() < 1e-12);
        let peak = series.iter().cloned().fold(f64::MIN, f64::max);
        let floor = series.iter().cloned().fold(f64::MAX, f64::min);
        assert!(floor > -0.01 * peak, "{floor} vs {peak}");
        let fine = Mollifier::new(1.0, 256).unwrap();
        let floor = fine
            .grid_values(&mut Collocation::new(513), 0.0)
            .into_iter()
            .fold(f64::MAX, f64::min);
        assert!(floor > -1e-7);
    }

    #[test]
    fn rejects_wrapping_support() {
        assert!(Mollifier::new(1.5, 16).is_err());
        assert!(Mollifier::new(0.0, 16).is_err());
        assert!(Mollifier::new(0.5, 4).is_err());
    }

    #[test]
    fn approaches_delta_in_negative_sobolev_norm() {
        let n = 128usize;
        // ‖δ‖_{H^{-0.6}} restricted to |n| ≤ N, direct coefficient sum.
        let delta: f64 = (2.0
            * PI
            * (-(n as i64)..=n as i64)
                .map(|k| (1.0 + (k * k) as f64).powf(-0.6) / (4.0 * PI * PI))
                .sum::<f64>())
        .sqrt();
        let mut prev = f64::INFINITY;
        for eps in [0.4, 0.2, 0.1, 0.05, 0.025] {
            let m = Mollifier::new(eps, n).unwrap();
            let gap = (m.coeffs().hs_norm(-0.6) - delta).abs();
            assert!(gap < prev, "eps = {eps}: {gap} !< {prev}");
            prev = gap;
        }
        assert!(prev / delta < 0.05);
    }
}
