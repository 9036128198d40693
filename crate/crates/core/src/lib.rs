//! Spectral simulation and verification toolkit for the periodic nonlinear
//! Schrödinger equation whose nonlinearity is concentrated at a single point
//! of the torus ℝ/2πℤ.
//!
//! Fourier convention used throughout: a field is `u(x) = Σ c_n e^{inx}`,
//! so `‖u‖²_{L²} = 2π Σ |c_n|²` and the Dirac delta has `c_n = 1/(2π)`.
//! Every norm returned by this crate carries that 2π factor.
// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charge;
pub mod field;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod limits;
pub mod mollifier;
pub mod quadrature;
pub mod solvers;
pub mod validators;

mod error;

pub use charge::{
    free_trace, mass_identity_residual, reconstruct_field, solve_charge, wiener_norm,
    ChargeTrajectory, MassIdentity, ModeAccumulators, VolterraConfig,
};
pub use error::{Error, Result};
pub use field::{Functionals, SpectralField};
pub use kernels::{KernelSpec, SobolevTimeNorm, TimeWindow};
pub use mollifier::Mollifier;
pub use solvers::{Nonlinearity, SolverConfig, Trajectory};

pub use num_complex::Complex64;

/// Coupling constant of the point interaction in the `c_n` convention: the
/// delta has every Fourier coefficient equal to `1/(2π)`.
pub const KAPPA: f64 = 1.0 / (2.0 * std::f64::consts::PI);
