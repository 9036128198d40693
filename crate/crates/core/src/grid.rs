//! Collocation grids `x_j = 2πj/M` and the FFT maps between grid values and
//! Fourier coefficients.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::SpectralField;

pub struct Collocation {
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Collocation {
    /// Panics if `points == 0`.
    pub fn new(points: usize) -> Self {
        assert!(points > 0, "collocation grid needs at least one point");
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(points);
        let inverse = planner.plan_fft_inverse(points);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            points,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn node(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / self.points as f64
    }

    /// Grid values `u(x_j)`. Modes beyond the grid's Nyquist range alias.
    pub fn to_grid(&mut self, field: &SpectralField, out: &mut Vec<Complex64>) {
        out.clear();
        out.resize(self.points, Complex64::new(0.0, 0.0));
        let m = self.points as i64;
        for (n, c) in field.modes() {
            out[n.rem_euclid(m) as usize] += c;
        }
        self.inverse.process_with_scratch(out, &mut self.scratch);
    }

    /// Discrete coefficients of grid values, truncated to `|n| ≤ mode_cutoff`.
    /// The input buffer is overwritten.
    pub fn from_grid(&mut self, values: &mut [Complex64], mode_cutoff: usize) -> SpectralField {
        assert_eq!(values.len(), self.points);
        self.forward.process_with_scratch(values, &mut self.scratch);
        let scale = 1.0 / self.points as f64;
        let m = self.points as i64;
        let mut field = SpectralField::zeros(mode_cutoff);
        let cutoff = mode_cutoff as i64;
        for n in -cutoff..=cutoff {
            *field.coeff_mut(n) = values[n.rem_euclid(m) as usize] * scale;
        }
        field
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_hs_field;

    #[test]
    fn grid_round_trip_on_native_grid() {
        let f = random_hs_field(1.0, 16, 8).unwrap();
        let mut grid = Collocation::new(33);
        let mut values = Vec::new();
        grid.to_grid(&f, &mut values);
        for j in [0, 5, 32] {
            assert!((values[j] - f.eval_at(grid.node(j))).norm() < 1e-13);
        }
        let back = grid.from_grid(&mut values, 16);
        assert!(back.max_coeff_distance(&f) < 1e-15);
    }

    #[test]
    fn padded_grid_round_trip() {
        let f = random_hs_field(0.6, 10, 2).unwrap();
        let mut grid = Collocation::new(64);
        let mut values = Vec::new();
        grid.to_grid(&f, &mut values);
        let back = grid.from_grid(&mut values, 10);
        assert!(back.max_coeff_distance(&f) < 1e-15);
    }
}
