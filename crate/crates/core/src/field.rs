//! Periodic fields stored as Fourier coefficients on modes `-N..=N`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A trigonometric polynomial `u(x) = Σ_{|n|≤N} c_n e^{inx}` on ℝ/2πℤ.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    mode_cutoff: usize,
    coeffs: Vec<Complex64>,
}

/// Conserved (or dissipated) functionals of a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    pub mass: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub energy: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldJson {
    #[serde(rename = "N")]
    n: usize,
    coeffs: Vec<[f64; 2]>,
}

impl SpectralField {
    pub fn zeros(mode_cutoff: usize) -> Self {
        Self {
            mode_cutoff,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * mode_cutoff + 1],
        }
    }

    /// Builds a field from coefficients ordered `n = -N..=N`.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(invalid(format!(
                "coefficient array must have odd length 2N+1, got {}",
                coeffs.len()
            )));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(invalid("field coefficients must be finite"));
        }
        Ok(Self {
            mode_cutoff: coeffs.len() / 2,
            coeffs,
        })
    }

    /// `amplitude · e^{ikx}`. Panics if `|k| > N`.
    pub fn plane_wave(mode_cutoff: usize, k: i64, amplitude: Complex64) -> Self {
        let mut f = Self::zeros(mode_cutoff);
        *f.coeff_mut(k) = amplitude;
        f
    }

    pub fn constant(mode_cutoff: usize, value: Complex64) -> Self {
        Self::plane_wave(mode_cutoff, 0, value)
    }

    #[inline]
    pub fn mode_cutoff(&self) -> usize {
        self.mode_cutoff
    }

    /// Coefficients ordered `n = -N..=N`.
    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Iterator over `(n, c_n)`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let cutoff = self.mode_cutoff as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - cutoff, c))
    }

    /// `c_n`, or zero when `|n| > N`.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.mode_cutoff {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.mode_cutoff as i64) as usize]
        }
    }

    pub fn coeff_mut(&mut self, n: i64) -> &mut Complex64 {
        assert!(
            n.unsigned_abs() as usize <= self.mode_cutoff,
            "mode {n} outside cutoff {}",
            self.mode_cutoff
        );
        &mut self.coeffs[(n + self.mode_cutoff as i64) as usize]
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Zero-extends or truncates to a new cutoff.
    pub fn with_cutoff(&self, mode_cutoff: usize) -> Self {
        let mut out = Self::zeros(mode_cutoff);
        let shared = mode_cutoff.min(self.mode_cutoff) as i64;
        for n in -shared..=shared {
            *out.coeff_mut(n) = self.coeff(n);
        }
        out
    }

    /// `Σ c_n e^{inx}`.
    pub fn eval_at(&self, x: f64) -> Complex64 {
        self.modes()
            .map(|(n, c)| c * Complex64::cis(n as f64 * x))
            .sum()
    }

    /// `‖u‖²_{L²} = 2π Σ |c_n|²`.
    pub fn mass(&self) -> f64 {
        2.0 * PI * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `sqrt(2π Σ (1+n²)^s |c_n|²)`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        let sum: f64 = self
            .modes()
            .map(|(n, c)| (1.0 + (n * n) as f64).powf(s) * c.norm_sqr())
            .sum();
        (2.0 * PI * sum).sqrt()
    }

    /// `2π Σ n² |c_n|² = ‖∂_x u‖²_{L²}`.
    pub fn kinetic(&self) -> f64 {
        2.0 * PI
            * self
                .modes()
                .map(|(n, c)| (n * n) as f64 * c.norm_sqr())
                .sum::<f64>()
    }

    /// Mass, kinetic and point potential `|u(0)|^{2p+2}/(p+1)`.
    pub fn energy(&self, p: f64) -> Functionals {
        self.energy_at(p, 0.0)
    }

    /// As [`energy`](Self::energy) with the point interaction located at `x0`.
    pub fn energy_at(&self, p: f64, x0: f64) -> Functionals {
        let kinetic = self.kinetic();
        let potential = self.eval_at(x0).norm().powf(2.0 * p + 2.0) / (p + 1.0);
        Functionals {
            mass: self.mass(),
            kinetic,
            potential,
            energy: kinetic + potential,
        }
    }

    /// `Σ |c_n|`, the Wiener algebra norm.
    pub fn wiener_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Free Schrödinger flow `c_n ↦ e^{-in²t} c_n`.
    pub fn free_evolve(&self, t: f64) -> Self {
        self.map_modes(|n, c| c * Complex64::cis(-((n * n) as f64) * t))
    }

    /// Ginzburg–Landau flow `c_n ↦ e^{-in²t - γn²|t|} c_n`.
    pub fn cgl_evolve(&self, t: f64, gamma: f64) -> Self {
        let abs_t = t.abs();
        self.map_modes(|n, c| {
            let k2 = (n * n) as f64;
            c * Complex64::from_polar((-gamma * k2 * abs_t).exp(), -k2 * t)
        })
    }

    /// Translation `u(x) ↦ u(x + shift)`, i.e. `c_n ↦ c_n e^{in·shift}`.
    pub fn translate(&self, shift: f64) -> Self {
        if shift == 0.0 {
            return self.clone();
        }
        self.map_modes(|n, c| c * Complex64::cis(n as f64 * shift))
    }

    /// Coefficients of `conj(u(x))`: `c_n ↦ conj(c_{-n})`.
    pub fn conj_reflect(&self) -> Self {
        let cutoff = self.mode_cutoff as i64;
        let coeffs = (-cutoff..=cutoff).map(|n| self.coeff(-n).conj()).collect();
        Self {
            mode_cutoff: self.mode_cutoff,
            coeffs,
        }
    }

    pub fn map_modes(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let coeffs = self.modes().map(|(n, c)| f(n, c)).collect();
        Self {
            mode_cutoff: self.mode_cutoff,
            coeffs,
        }
    }

    /// Coefficient-wise sup distance; fields of different cutoff are compared
    /// over the larger mode range.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let cutoff = self.mode_cutoff.max(other.mode_cutoff) as i64;
        (-cutoff..=cutoff)
            .map(|n| (self.coeff(n) - other.coeff(n)).norm())
            .fold(0.0, f64::max)
    }

    /// `self - other` on the larger cutoff.
    pub fn difference(&self, other: &Self) -> Self {
        let cutoff = self.mode_cutoff.max(other.mode_cutoff);
        let mut out = Self::zeros(cutoff);
        let c = cutoff as i64;
        for n in -c..=c {
            *out.coeff_mut(n) = self.coeff(n) - other.coeff(n);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        if !self.is_finite() {
            return Err(Error::Serialization(
                "cannot serialize a field with non-finite coefficients".into(),
            ));
        }
        let doc = FieldJson {
            n: self.mode_cutoff,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        };
        serde_json::to_string(&doc).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FieldJson =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if doc.coeffs.len() != 2 * doc.n + 1 {
            return Err(Error::Serialization(format!(
                "expected {} coefficients for N = {}, found {}",
                2 * doc.n + 1,
                doc.n,
                doc.coeffs.len()
            )));
        }
        Self::from_coeffs(
            doc.coeffs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

/// Seeded random field with `c_n = (1+n²)^{-(s+0.51)} g_n`, `g_n` standard
/// complex Gaussian (`E|g_n|² = 1`).
///
/// Draws are taken in the order `n = 0, 1, -1, 2, -2, …`, so the low modes
/// of a given seed do not depend on `N`.
pub fn random_hs_field(s: f64, mode_cutoff: usize, seed: u64) -> Result<SpectralField> {
    if mode_cutoff < 1 {
        return Err(invalid("random_hs_field requires N >= 1"));
    }
    if !s.is_finite() {
        return Err(invalid("Sobolev exponent must be finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid sigma");
    let mut field = SpectralField::zeros(mode_cutoff);
    let mut draw = |n: i64, field: &mut SpectralField| {
        let g = Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        let decay = (1.0 + (n * n) as f64).powf(-(s + 0.51));
        *field.coeff_mut(n) = g * decay;
    };
    draw(0, &mut field);
    for k in 1..=mode_cutoff as i64 {
        draw(k, &mut field);
        draw(-k, &mut field);
    }
    Ok(field)
}
