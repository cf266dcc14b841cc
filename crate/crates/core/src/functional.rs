//! The reduced energy J, its Fréchet derivative, and the unreduced
//! functional F used for cross-checks.
//!
//! J(u) = ½𝓑_α(u,u) + ½∫(V−ω²)u² + (ω/2)∫φ_u u² − (1/p)∫|u|ᵖ, where φ_u is
//! the electrostatic reduction of u. Critical points of J are weak solutions
//! of the coupled system. The derivative's dual action is
//!
//!   J′(u)[v] = 𝓑_α(u,v) + ∫(V−ω²)uv + 2ω∫φ_u uv − ∫φ_u²uv − ∫|u|^{p−2}uv,
//!
//! and the Riesz representative g is taken in the shifted inner product
//! ⟨u,v⟩_P = ν Σ (σₙ + τ_P) cₙ(u) cₙ(v), the discrete analogue of the
//! coercive shifted form: positive definite for every admissible α, and an
//! effective preconditioner because σₙ + τ_P ≍ 1 + kₙ².

use std::sync::Arc;

use crate::electrostatic::{solve_phi_warm, PhiSolution};
use crate::error::Result;
use crate::grid::{RadialField, RadialGrid};
use crate::operator::{bilinear_from_symbol, grad_norm_sq, shifted_dot, OperatorSymbol};
use crate::params::{ModelParams, SampledPotential};

/// Additive decomposition of J(u); `total` is the sum of the three parts in
/// declaration order, so it is reproducible to the last bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// ½𝓑_α(u,u) + ½∫(V−ω²)u².
    pub quadratic: f64,
    /// (ω/2)∫φ_u u².
    pub coupling: f64,
    /// −(1/p)∫|u|ᵖ.
    pub nonlinear: f64,
    /// quadratic + coupling + nonlinear.
    pub total: f64,
}

/// J′(u) as both a Riesz field and a dual-action evaluator.
#[derive(Debug, Clone)]
pub struct Gradient {
    /// g with ⟨g, v⟩_P = J′(u)[v] for every v.
    pub riesz: RadialField,
    /// dₙ = J′(u)[φₙ], the action on the n-th basis mode.
    pub dual_modes: Vec<f64>,
    /// ‖g‖_P = (Σ dₙ²/(ν(σₙ+τ_P)))^{1/2}.
    pub norm_p: f64,
}

impl Gradient {
    /// Evaluate the dual action J′(u)[v] = Σₙ dₙ cₙ(v).
    pub fn action(&self, v: &RadialField) -> f64 {
        self.dual_modes
            .iter()
            .zip(&v.modes_vec())
            .map(|(d, c)| d * c)
            .sum()
    }
}

/// J and J′ bound to one grid and one parameter set, with the operator
/// symbol, sampled potential, and preconditioning shift built once.
#[derive(Debug, Clone)]
pub struct Functional {
    grid: Arc<RadialGrid>,
    pub params: ModelParams,
    symbol: OperatorSymbol,
    shifted: OperatorSymbol,
    potential: SampledPotential,
    /// Relative tolerance for the internal electrostatic solves. The energy
    /// formula is first-order sensitive to the φ error, so this is kept at
    /// 10⁻¹² to make J evaluations noise-free at the 10⁻¹⁰ level.
    pub phi_tol: f64,
}

impl Functional {
    pub fn new(grid: &Arc<RadialGrid>, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let symbol = OperatorSymbol::new(grid, params.s, params.alpha)?;
        let tau = symbol.tau_p();
        let shifted = symbol.clone().with_shift(tau);
        let potential = params.potential.sample(&grid.nodes)?;
        Ok(Functional {
            grid: Arc::clone(grid),
            params: params.clone(),
            symbol,
            shifted,
            potential,
            phi_tol: 1e-12,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn symbol(&self) -> &OperatorSymbol {
        &self.symbol
    }

    pub fn potential(&self) -> &SampledPotential {
        &self.potential
    }

    /// The shift τ_P of the gradient inner product.
    pub fn tau_p(&self) -> f64 {
        self.shifted.shift
    }

    /// ⟨·,·⟩_P on raw mode vectors.
    pub fn p_dot(&self, cu: &[f64], cv: &[f64]) -> f64 {
        shifted_dot(&self.shifted, cu, cv)
    }

    /// ‖u‖_P.
    pub fn p_norm(&self, u: &RadialField) -> f64 {
        let c = u.modes_vec();
        self.p_dot(&c, &c).sqrt()
    }

    /// J(u) with its breakdown, solving for φ_u internally.
    pub fn energy(&self, u: &RadialField) -> Result<(EnergyBreakdown, PhiSolution)> {
        self.energy_warm(u, None)
    }

    /// J(u), warm-starting the electrostatic solve from `warm`.
    pub fn energy_warm(
        &self,
        u: &RadialField,
        warm: Option<&RadialField>,
    ) -> Result<(EnergyBreakdown, PhiSolution)> {
        let phi = solve_phi_warm(u, self.params.omega, self.phi_tol, warm)?;
        Ok((self.energy_with_phi(u, &phi.phi), phi))
    }

    /// The breakdown given an already-computed φ_u.
    pub fn energy_with_phi(&self, u: &RadialField, phi: &RadialField) -> EnergyBreakdown {
        let cu = u.modes_vec();
        let b = bilinear_from_symbol(&self.symbol, &cu, &cu);
        let uv = u.values_vec();
        let pv = phi.values_vec();
        let om = self.params.omega;
        let p = self.params.p;
        let mut vterm = 0.0;
        let mut coup = 0.0;
        let mut nl = 0.0;
        for (j, &w) in self.grid.weights.iter().enumerate() {
            let uu = uv[j] * uv[j];
            vterm += w * (self.potential.values[j] - om * om) * uu;
            coup += w * pv[j] * uu;
            nl += w * uv[j].abs().powf(p);
        }
        let quadratic = 0.5 * b + 0.5 * vterm;
        let coupling = 0.5 * om * coup;
        let nonlinear = -nl / p;
        EnergyBreakdown {
            quadratic,
            coupling,
            nonlinear,
            total: quadratic + coupling + nonlinear,
        }
    }

    /// The unreduced functional
    /// F(u,φ) = ½𝓑_α(u,u) + ½∫Vu² − ½∫(ω−φ)²u² − (1/p)∫|u|ᵖ − ½∫|∇φ|².
    pub fn full_f(&self, u: &RadialField, phi: &RadialField) -> f64 {
        let cu = u.modes_vec();
        let b = bilinear_from_symbol(&self.symbol, &cu, &cu);
        let uv = u.values_vec();
        let pv = phi.values_vec();
        let om = self.params.omega;
        let p = self.params.p;
        let mut vterm = 0.0;
        let mut gauge = 0.0;
        let mut nl = 0.0;
        for (j, &w) in self.grid.weights.iter().enumerate() {
            let uu = uv[j] * uv[j];
            vterm += w * self.potential.values[j] * uu;
            let g = om - pv[j];
            gauge += w * g * g * uu;
            nl += w * uv[j].abs().powf(p);
        }
        0.5 * b + 0.5 * vterm - 0.5 * gauge - nl / p - 0.5 * grad_norm_sq(phi)
    }

    /// J′(u), solving for φ_u internally.
    pub fn gradient(&self, u: &RadialField) -> Result<(Gradient, PhiSolution)> {
        self.gradient_warm(u, None)
    }

    /// J′(u) with a warm-started electrostatic solve.
    pub fn gradient_warm(
        &self,
        u: &RadialField,
        warm: Option<&RadialField>,
    ) -> Result<(Gradient, PhiSolution)> {
        let phi = solve_phi_warm(u, self.params.omega, self.phi_tol, warm)?;
        Ok((self.gradient_with_phi(u, &phi.phi), phi))
    }

    /// J′(u) given an already-computed φ_u.
    pub fn gradient_with_phi(&self, u: &RadialField, phi: &RadialField) -> Gradient {
        let nu = self.grid.mode_norm_sq();
        let cu = u.modes_vec();
        let uv = u.values_vec();
        let pv = phi.values_vec();
        let om = self.params.omega;
        let p = self.params.p;
        // q = (V−ω²)u + 2ωφu − φ²u − |u|^{p−2}u at the nodes
        let q: Vec<f64> = (0..self.grid.n)
            .map(|j| {
                let x = uv[j];
                let f = pv[j];
                (self.potential.values[j] - om * om) * x + 2.0 * om * f * x
                    - f * f * x
                    - x.abs().powf(p - 2.0) * x
            })
            .collect();
        let cq = self.grid.values_to_modes(&q);
        let mut dual = vec![0.0; self.grid.n];
        let mut gmodes = vec![0.0; self.grid.n];
        let mut norm_sq = 0.0;
        for n in 0..self.grid.n {
            let d = nu * (self.symbol.sigma[n] * cu[n] + cq[n]);
            dual[n] = d;
            let denom = nu * (self.symbol.sigma[n] + self.shifted.shift);
            gmodes[n] = d / denom;
            norm_sq += d * d / denom;
        }
        let riesz = RadialField::from_modes(&self.grid, gmodes)
            .expect("gradient modes match the grid by construction");
        Gradient {
            riesz,
            dual_modes: dual,
            norm_p: norm_sq.sqrt(),
        }
    }
}

/// J(u) under `params` (convenience wrapper building a [`Functional`]).
pub fn energy_j(u: &RadialField, params: &ModelParams) -> Result<EnergyBreakdown> {
    let f = Functional::new(u.grid(), params)?;
    Ok(f.energy(u)?.0)
}

/// F(u, φ) under `params`.
pub fn full_f(u: &RadialField, phi: &RadialField, params: &ModelParams) -> Result<f64> {
    crate::grid::require_same_grid(u, phi)?;
    let f = Functional::new(u.grid(), params)?;
    Ok(f.full_f(u, phi))
}

/// J′(u) under `params`: the Riesz field plus the dual action evaluator.
pub fn gradient_j(u: &RadialField, params: &ModelParams) -> Result<Gradient> {
    let f = Functional::new(u.grid(), params)?;
    Ok(f.gradient(u)?.0)
}

/// Discrete Sobolev constant: the largest observed ‖u‖_p/‖u‖_{H¹} over a
/// deterministic family of Gaussian bumps and seeded random fields. Used to
/// place the radius in the mountain-pass geometry inequality.
pub fn sobolev_constant_estimate(grid: &Arc<RadialGrid>, p: f64, samples: usize) -> Result<f64> {
    use crate::operator::{h1_norm_sq, lq_norm};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    let mut best = 0.0f64;
    let mut consider = |u: &RadialField| -> Result<()> {
        let h1 = h1_norm_sq(u).sqrt();
        if h1 > 0.0 {
            best = best.max(lq_norm(u, p)? / h1);
        }
        Ok(())
    };
    for width in [0.5, 1.0, 2.0, 4.0] {
        let u = RadialField::sample(grid, |r| (-(r / width).powi(2)).exp());
        consider(&u)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_816);
    for _ in 0..samples {
        let modes: Vec<f64> = (0..grid.n)
            .map(|n| rng.random_range(-1.0..1.0) * (-((n as f64) / 16.0)).exp())
            .collect();
        let u = RadialField::from_modes(grid, modes)?;
        consider(&u)?;
    }
    Ok(best)
}
