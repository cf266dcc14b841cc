//! The electrostatic reduction u ↦ φ_u.
//!
//! For fixed u the field equation is linear: (−Δ + u²)φ = ωu², the weak form
//! of ∫⟨∇φ,∇ψ⟩ = ∫(ω−φ)ψu². The operator is symmetric positive definite in
//! the weighted L² quadrature inner product (the Laplacian part is mode-
//! diagonal by Parseval, the u² part is a nonnegative pointwise multiplier),
//! so preconditioned conjugate gradients with the exact inverse Laplacian
//! kₙ⁻² as preconditioner converges in a handful of iterations: the
//! preconditioned operator is the identity plus a compact perturbation.
//!
//! The solution satisfies 0 ≤ φ ≤ ω (maximum principle) and the energy
//! identity ∫|∇φ|² = ∫(ω−φ)φu², both of which are enforced as tests.

use crate::error::{Error, Result};
use crate::grid::RadialField;
use crate::operator::grad_norm_sq;

/// Iteration cap for the conjugate-gradient loop; the preconditioned system
/// is well conditioned, so hitting this signals a genuinely broken input.
const MAX_CG_ITERS: usize = 2000;

/// Result of the linear electrostatic solve.
#[derive(Debug, Clone)]
pub struct PhiSolution {
    /// The electrostatic potential φ_u.
    pub phi: RadialField,
    /// Conjugate-gradient iterations consumed.
    pub iterations: usize,
    /// Achieved relative algebraic residual ‖b − Aφ‖ / ‖b‖ (weighted L²).
    pub residual: f64,
}

/// Solve (−Δ + u²)φ = ωu² to relative residual `tol`.
pub fn solve_phi(u: &RadialField, omega: f64, tol: f64) -> Result<PhiSolution> {
    solve_phi_warm(u, omega, tol, None)
}

/// Same as [`solve_phi`] but optionally starting from a previous solution,
/// which cuts the iteration count roughly in half along a solver trajectory.
pub fn solve_phi_warm(
    u: &RadialField,
    omega: f64,
    tol: f64,
    warm: Option<&RadialField>,
) -> Result<PhiSolution> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::Domain(format!(
            "electrostatic tolerance {tol} not in (0, 1e-4]"
        )));
    }
    if !omega.is_finite() {
        return Err(Error::Domain(format!("omega={omega} not finite")));
    }
    let grid = u.grid().clone();
    let uv = u.values_vec();
    if uv.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("u contains non-finite values".into()));
    }
    let u2: Vec<f64> = uv.iter().map(|x| x * x).collect();
    let b: Vec<f64> = u2.iter().map(|x| omega * x).collect();

    let wdot = |a: &[f64], c: &[f64]| -> f64 {
        grid.weights
            .iter()
            .zip(a)
            .zip(c)
            .map(|((w, x), y)| w * x * y)
            .sum()
    };
    let bnorm = wdot(&b, &b).sqrt();
    if bnorm == 0.0 {
        return Ok(PhiSolution {
            phi: RadialField::zeros(&grid),
            iterations: 0,
            residual: 0.0,
        });
    }

    // A x = −Δx + u²x, evaluated values → modes → values for the Laplacian.
    let apply = |x: &[f64]| -> Vec<f64> {
        let modes = grid.values_to_modes(x);
        let lap: Vec<f64> = grid
            .frequencies
            .iter()
            .zip(&modes)
            .map(|(k, c)| k * k * c)
            .collect();
        let mut out = grid.modes_to_values(&lap);
        for (o, (q, xv)) in out.iter_mut().zip(u2.iter().zip(x)) {
            *o += q * xv;
        }
        out
    };
    // Preconditioner: exact inverse Laplacian, mode-wise kₙ⁻².
    let precond = |r: &[f64]| -> Vec<f64> {
        let modes = grid.values_to_modes(r);
        let inv: Vec<f64> = grid
            .frequencies
            .iter()
            .zip(&modes)
            .map(|(k, c)| c / (k * k))
            .collect();
        grid.modes_to_values(&inv)
    };

    let mut x = match warm {
        Some(w) if w.grid().same_as(&grid) => w.values_vec(),
        _ => vec![0.0; grid.n],
    };
    let mut r: Vec<f64> = apply(&x)
        .iter()
        .zip(&b)
        .map(|(ax, bb)| bb - ax)
        .collect();
    let mut history = Vec::new();
    let mut res = wdot(&r, &r).sqrt() / bnorm;
    history.push(res);
    if res <= tol {
        let mut phi = RadialField::from_values(&grid, x)?;
        phi.ensure_modes();
        return Ok(PhiSolution {
            phi,
            iterations: 0,
            residual: res,
        });
    }
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = wdot(&r, &z);
    for it in 1..=MAX_CG_ITERS {
        let ap = apply(&p);
        let pap = wdot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::PhiSolve {
                residual_history: history,
            });
        }
        let alpha = rz / pap;
        for ((xj, pj), (rj, apj)) in x.iter_mut().zip(&p).zip(r.iter_mut().zip(&ap)) {
            *xj += alpha * pj;
            *rj -= alpha * apj;
        }
        res = wdot(&r, &r).sqrt() / bnorm;
        history.push(res);
        if res <= tol {
            let mut phi = RadialField::from_values(&grid, x)?;
            phi.ensure_modes();
            return Ok(PhiSolution {
                phi,
                iterations: it,
                residual: res,
            });
        }
        z = precond(&r);
        let rz_new = wdot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pj, zj) in p.iter_mut().zip(&z) {
            *pj = zj + beta * *pj;
        }
    }
    Err(Error::PhiSolve {
        residual_history: history,
    })
}

/// Relative defect of the energy identity ∫|∇φ_u|² = ∫(ω−φ_u)φ_u u².
pub fn phi_identity_residual(u: &RadialField, phi: &RadialField, omega: f64) -> f64 {
    let lhs = grad_norm_sq(phi);
    let uv = u.values_vec();
    let pv = phi.values_vec();
    let rhs: f64 = u
        .grid()
        .weights
        .iter()
        .zip(&pv)
        .zip(&uv)
        .map(|((w, f), x)| w * (omega - f) * f * x * x)
        .sum();
    (lhs - rhs).abs() / lhs.abs().max(f64::EPSILON)
}
