//! The mixed differential operator −Δ + α(−Δ)ˢ as a Fourier multiplier,
//! its bilinear form, and the norms used throughout the solver.
//!
//! On the sine basis φₙ(r) = sin(kₙr)/r the operator acts diagonally with
//! symbol σₙ = kₙ² + α·kₙ^{2s}, so applying it, evaluating the quadratic form
//! 𝓑_α(u,v) = ∫⟨∇u,∇v⟩ + α∫(−Δ)^{s/2}u·(−Δ)^{s/2}v, and building shifted
//! inner products all reduce to weighted sums over mode coefficients.
//! Each unit-coefficient mode has L² norm² equal to ν = 2πR, which shows up
//! as the `mode_norm_sq` factor in every Parseval-type identity below.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{require_same_grid, RadialField, RadialGrid};
use crate::params::{ModelParams, SampledPotential};

/// Mode-wise multiplier σₙ = kₙ² + α·kₙ^{2s}, with an optional uniform shift.
#[derive(Debug, Clone)]
pub struct OperatorSymbol {
    grid: Arc<RadialGrid>,
    /// σₙ per mode, n = 1..N (index 0 ↔ n = 1).
    pub sigma: Vec<f64>,
    /// Uniform shift τ added to every σₙ (0 when unshifted).
    pub shift: f64,
}

impl OperatorSymbol {
    /// Build the symbol for the operator −Δ + α(−Δ)ˢ on `grid`.
    pub fn new(grid: &Arc<RadialGrid>, s: f64, alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&s) || s <= 0.0 {
            return Err(Error::Domain(format!("fractional order s={s} not in (0,1)")));
        }
        if !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha={alpha} not finite")));
        }
        let sigma = grid
            .frequencies
            .iter()
            .map(|&k| k * k + alpha * k.powf(2.0 * s))
            .collect();
        Ok(OperatorSymbol {
            grid: Arc::clone(grid),
            sigma,
            shift: 0.0,
        })
    }

    /// Same symbol with the uniform shift τ (for σₙ + τ).
    pub fn with_shift(mut self, tau: f64) -> Self {
        self.shift = tau;
        self
    }

    /// The grid this symbol was built on.
    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// Multiplier for mode index `n` (0-based), including the shift.
    pub fn multiplier(&self, n: usize) -> f64 {
        self.sigma[n] + self.shift
    }

    /// Smallest γ ≥ 0 with σₙ + γ ≥ ½(1 + kₙ²) for every mode.
    ///
    /// This is the potential-free symmetrization shift: adding it makes the
    /// symbol dominate half the H¹ symbol, so σₙ + 1 + γ ≥ ½(1 + kₙ²) + 1 > 0
    /// and the shifted form is positive definite no matter how negative α is.
    pub fn gamma_sym(&self) -> f64 {
        let mut gamma: f64 = 0.0;
        for (sig, &k) in self.sigma.iter().zip(&self.grid.frequencies) {
            gamma = gamma.max(0.5 * (1.0 + k * k) - sig);
        }
        gamma.max(0.0)
    }

    /// The preconditioning shift τ_P = max(1, 1 + γ) used for the gradient
    /// inner product ⟨u,v⟩_P = ν Σ (σₙ + τ_P) cₙ(u) cₙ(v).
    pub fn tau_p(&self) -> f64 {
        (1.0 + self.gamma_sym()).max(1.0)
    }
}

/// Apply the operator: multiply each mode coefficient by σₙ (+ shift).
pub fn apply_operator(field: &RadialField, symbol: &OperatorSymbol) -> Result<RadialField> {
    if !field.grid().same_as(symbol.grid()) {
        return Err(Error::GridMismatch(
            "field and symbol live on different grids".into(),
        ));
    }
    let modes = field.modes_vec();
    let out: Vec<f64> = modes
        .iter()
        .enumerate()
        .map(|(n, c)| symbol.multiplier(n) * c)
        .collect();
    RadialField::from_modes(field.grid(), out)
}

/// 𝓑_α(u,v) = ν Σ σₙ cₙ(u) cₙ(v); symmetric by construction.
pub fn bilinear_b_alpha(u: &RadialField, v: &RadialField, params: &ModelParams) -> Result<f64> {
    require_same_grid(u, v)?;
    let symbol = OperatorSymbol::new(u.grid(), params.s, params.alpha)?;
    Ok(bilinear_from_symbol(&symbol, &u.modes_vec(), &v.modes_vec()))
}

/// 𝓑 evaluated from a prebuilt symbol and raw mode vectors (solver hot path).
/// Ignores the symbol's shift: this is the unshifted form.
pub fn bilinear_from_symbol(symbol: &OperatorSymbol, cu: &[f64], cv: &[f64]) -> f64 {
    let nu = symbol.grid().mode_norm_sq();
    let mut acc = 0.0;
    for ((sig, a), b) in symbol.sigma.iter().zip(cu).zip(cv) {
        // sig * (a*b), not (sig*a)*b: keeps the form bitwise symmetric in
        // (u, v), since a*b and b*a round identically.
        acc += sig * (a * b);
    }
    nu * acc
}

/// Shifted inner product ⟨u,v⟩_P = ν Σ (σₙ + shift) cₙ(u) cₙ(v).
pub fn shifted_dot(symbol: &OperatorSymbol, cu: &[f64], cv: &[f64]) -> f64 {
    let nu = symbol.grid().mode_norm_sq();
    let mut acc = 0.0;
    for ((sig, a), b) in symbol.sigma.iter().zip(cu).zip(cv) {
        acc += (sig + symbol.shift) * (a * b);
    }
    nu * acc
}

/// L² norm squared from mode coefficients (Parseval): ν Σ cₙ².
pub fn l2_norm_sq_modes(u: &RadialField) -> f64 {
    let nu = u.grid().mode_norm_sq();
    nu * u.modes_vec().iter().map(|c| c * c).sum::<f64>()
}

/// L² norm squared by quadrature over node values: Σ wⱼ u(rⱼ)².
pub fn l2_norm_sq_values(u: &RadialField) -> f64 {
    let vals = u.values_vec();
    u.grid()
        .weights
        .iter()
        .zip(&vals)
        .map(|(w, v)| w * v * v)
        .sum()
}

/// Lᑫ norm ‖u‖_q = (Σ wⱼ |u(rⱼ)|^q)^{1/q} for q ∈ [2, 6].
pub fn lq_norm(u: &RadialField, q: f64) -> Result<f64> {
    if !(2.0..=6.0).contains(&q) {
        return Err(Error::Domain(format!("L^q exponent q={q} not in [2,6]")));
    }
    let vals = u.values_vec();
    let sum: f64 = u
        .grid()
        .weights
        .iter()
        .zip(&vals)
        .map(|(w, v)| w * v.abs().powf(q))
        .sum();
    Ok(sum.powf(1.0 / q))
}

/// ‖∇u‖₂² = ν Σ kₙ² cₙ².
pub fn grad_norm_sq(u: &RadialField) -> f64 {
    let nu = u.grid().mode_norm_sq();
    let modes = u.modes_vec();
    nu * u
        .grid()
        .frequencies
        .iter()
        .zip(&modes)
        .map(|(k, c)| k * k * c * c)
        .sum::<f64>()
}

/// ‖u‖²_{H¹} = ‖u‖₂² + ‖∇u‖₂².
pub fn h1_norm_sq(u: &RadialField) -> f64 {
    l2_norm_sq_modes(u) + grad_norm_sq(u)
}

/// Weighted-space norm ‖u‖_W² = ‖u‖²_{H¹} + Σ wⱼ (V(rⱼ) − V₀) u(rⱼ)².
pub fn w_norm_sq(u: &RadialField, potential: &SampledPotential) -> f64 {
    let vals = u.values_vec();
    let weighted: f64 = u
        .grid()
        .weights
        .iter()
        .zip(&potential.values)
        .zip(&vals)
        .map(|((w, v), x)| w * (v - potential.v0) * x * x)
        .sum();
    h1_norm_sq(u) + weighted
}

/// Pointwise nonlinearity u ↦ f(u) by collocation at the nodes.
///
/// With `dealias` the evaluation detours through a grid with doubled node
/// count (2N+1 interior nodes, same radius): pad modes with zeros, evaluate f
/// on the fine nodes, transform back, truncate to N modes. This removes the
/// leading aliasing error of products; for non-integer powers it is still
/// approximate, and resolution refinement remains the accuracy control.
pub fn apply_nonlinearity(
    u: &RadialField,
    f: impl Fn(f64) -> f64,
    dealias: bool,
) -> Result<RadialField> {
    let grid = u.grid();
    if !dealias {
        let out: Vec<f64> = u.values_vec().into_iter().map(f).collect();
        return RadialField::from_values(grid, out);
    }
    let fine = RadialGrid::new(grid.radius, 2 * grid.n + 1)?;
    let mut padded = vec![0.0; fine.n];
    padded[..grid.n].copy_from_slice(&u.modes_vec());
    let fine_vals: Vec<f64> = fine
        .modes_to_values(&padded)
        .into_iter()
        .map(f)
        .collect();
    let fine_modes = fine.values_to_modes(&fine_vals);
    RadialField::from_modes(grid, fine_modes[..grid.n].to_vec())
}
