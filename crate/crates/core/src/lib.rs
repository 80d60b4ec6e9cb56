//! Equilibrium measures for anisotropic log-gases in the plane.
//!
//! Interaction kernels have the form `W(x) = -L log|x| + κ(x/|x|)` with a trigonometric
//! anisotropy `κ`. Under quadratic confinement the minimiser of the continuum energy is the
//! uniform law on an ellipse, or a semicircle law on a line when the angular profile `Ψ̂`
//! of `κ` touches zero in the right way. The crate provides the solver for that shape,
//! potential evaluators that check the Euler-Lagrange conditions, a finite particle
//! simulation, and Fourier-side convexity checks.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anisotropy;
pub mod cli;
pub mod ellipse;
pub mod error;
pub mod particles;
pub mod potential;
pub mod quadrature;
pub mod verify;

pub use anisotropy::{
    classify_psi, make_preset, series_from_samples, AnisotropySeries, KernelSpec, Preset,
    PsiClassification, PsiLabel,
};
pub use ellipse::{
    gamma_beta_derivative, gamma_objective, solve, solve_detailed, system_residual,
    EllipseShape, MinimizerPrediction, SolveOptions, SolveReport,
};
pub use error::{Error, Result};
