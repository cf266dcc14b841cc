//! Pseudospectral toolkit for radially symmetric standing waves of a mixed
//! local-nonlocal Klein-Gordon-Maxwell system
//!
//!   −Δu + α(−Δ)ˢu + [V(x) − (ω − φ)²]u = |u|^{p−2}u,
//!   −Δφ = (ω − φ)u²,                                     x ∈ ℝ³,
//!
//! discretized on a truncated ball with a Dirichlet sine basis in the radial
//! variable, so that −Δ + α(−Δ)ˢ acts as the Fourier multiplier
//! σₙ = kₙ² + α kₙ^{2s}.
//!
//! The crate is organized along the constructive steps of the existence
//! theory:
//!
//! - [`params`]: admissibility region of (s, α, p, ω, V) — the frequency gap
//!   Ω, the threshold weight α₀(s, t), coercivity constants from Young
//!   interpolation of kₙ^{2s}, and the fractional-Laplacian normalization
//!   constant C(s).
//! - [`grid`] / [`operator`]: the radial sine-spectral discretization and the
//!   operator symbol, quadrature, and norms built on it.
//! - [`electrostatic`]: the reduction φ = φ_u by a preconditioned
//!   conjugate-gradient solve of (−Δ + u²)φ = ωu².
//! - [`functional`]: the reduced action J(u), its gradient in the
//!   preconditioner inner product, and the mountain-pass geometry
//!   (sphere infimum, decaying rays).
//! - [`mountain_pass`]: the two-phase saddle search — path deformation
//!   followed by a ray-transverse polish — returning a solution bundle with
//!   PDE residuals.
//! - [`spectrum`]: eigenpairs of −Δ + α(−Δ)ˢ + V, the Gårding shift γ, the
//!   splitting index k₀, and the coercivity constant c₀ used when V is a
//!   coercive well.

// Domain guards are written `!(x > 0.0)` rather than `x <= 0.0` so that NaN
// fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod electrostatic;
pub mod error;
pub mod expr;
pub mod functional;
pub mod grid;
pub mod mountain_pass;
pub mod operator;
pub mod params;
pub mod report;
pub mod spectrum;
pub mod verify;

pub use electrostatic::{phi_identity_residual, solve_phi, solve_phi_warm, PhiSolution};
pub use error::{Error, Result};
pub use expr::PotentialExpr;
pub use functional::{
    energy_j, full_f, gradient_j, sobolev_constant_estimate, EnergyBreakdown, Functional, Gradient,
};
pub use grid::{RadialField, RadialGrid, Repr};
pub use mountain_pass::{
    find_descent_endpoint, mountain_pass_solve, pde_residuals, PathState, SolveResult,
    SolverOptions,
};
pub use operator::{
    apply_nonlinearity, apply_operator, bilinear_b_alpha, grad_norm_sq, h1_norm_sq,
    l2_norm_sq_modes, l2_norm_sq_values, lq_norm, w_norm_sq, OperatorSymbol,
};
pub use params::{
    alpha0, check_admissible, feasible_epsilon, normalization_constant, omega_gap,
    AdmissibilityReport, CoercivityConstants, EpsilonCase, ModelParams, PotentialSpec,
    SampledPotential,
};
pub use report::{
    admissible_report, csv_table, field_csv, solve_report, spectrum_report, threshold_csv,
    verify_report, JsonValue,
};
pub use spectrum::{
    bilinear_b_alpha_v, compute_gamma, eigen_decomposition, rayleigh_min_check, SpectrumResult,
};
pub use verify::{run_verification, CheckResult};
