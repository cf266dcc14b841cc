//! Numerical mountain pass: locate the first positive critical value of J.
//!
//! The driver realizes the classical path-deformation scheme. A descent
//! endpoint e with J(e) ≤ −1 is found by doubling along the seed ray, a
//! linear path 0 → e is sampled at M+1 points, and the path is deformed by
//! preconditioned descent on its energy maximizer (endpoints fixed) with
//! periodic arclength redistribution. The deformation drives the path onto
//! the pass but the discrete maximizer's gradient plateaus once the argmax
//! starts hopping between neighbouring path points, so after a bounded
//! number of path iterations the maximizer is polished in place: J is
//! re-maximized along the ray through the origin (a golden-section search on
//! the scale factor — the local model of the path direction at the peak),
//! and a preconditioned descent step transverse to that ray is taken with
//! Armijo backtracking on the re-peaked energy. The termination criterion is
//! the same throughout: the maximizer's preconditioned gradient norm ≤ tol.
//! The maximizer energy is non-increasing across both phases.
//!
//! For coercive potentials whose spectrum starts below ω² the geometry only
//! holds on the orthogonal complement of the first k₀−1 eigenfields, so
//! seed, path, and every descent direction are projected onto that subspace.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functional::{EnergyBreakdown, Functional};
use crate::grid::{require_same_grid, RadialField, RadialGrid};
use crate::operator::{lq_norm, OperatorSymbol};
use crate::params::{check_admissible, ModelParams};
use crate::spectrum::eigen_decomposition;

/// Knobs for [`mountain_pass_solve`]. `Default` matches the documented
/// production configuration.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Path resolution: M+1 points including both endpoints.
    pub path_points: usize,
    /// Convergence tolerance on the preconditioned gradient norm.
    pub tol: f64,
    /// Total iteration budget (path deformation + polish).
    pub max_iters: usize,
    /// Iterations spent on the path-deformation phase before polishing.
    pub path_iters: usize,
    /// Seed bump amplitude a in a·exp(−(r/w)²).
    pub seed_amplitude: f64,
    /// Seed bump width w.
    pub seed_width: f64,
    /// Relative tolerance of the internal electrostatic solves.
    pub phi_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            path_points: 40,
            tol: 1e-6,
            max_iters: 2000,
            path_iters: 60,
            seed_amplitude: 1.0,
            seed_width: 1.0,
            phi_tol: 1e-12,
        }
    }
}

/// Snapshot of the deformation path.
#[derive(Debug, Clone)]
pub struct PathState {
    /// The M+1 path points from 0 to the endpoint.
    pub points: Vec<RadialField>,
    /// J at each point (recomputed after every deformation step).
    pub energies: Vec<f64>,
    /// Index of the interior energy maximizer (smallest index on ties).
    pub argmax: usize,
}

/// Outcome of a mountain-pass run.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Critical-point candidate.
    pub u: RadialField,
    /// Its electrostatic potential φ_u.
    pub phi: RadialField,
    /// Energy breakdown at u.
    pub energy: EnergyBreakdown,
    /// Preconditioned gradient norm at u.
    pub grad_norm: f64,
    /// Weak-form residual of the u-equation (sup over basis modes).
    pub residual_u: f64,
    /// Weak-form residual of the φ-equation.
    pub residual_phi: f64,
    /// Deformation + polish iterations consumed.
    pub iterations: usize,
    /// True iff grad_norm ≤ tol and J(u) > 0.
    pub converged: bool,
    /// Parameter echo.
    pub params: ModelParams,
    /// Final deformation path.
    pub path: PathState,
}

/// L²-orthogonal projector onto the complement of finitely many fields.
struct Projector {
    /// L²-orthonormal basis mode vectors of the deflated subspace.
    basis: Vec<Vec<f64>>,
    nu: f64,
}

impl Projector {
    fn apply(&self, modes: &mut [f64]) {
        for e in &self.basis {
            let dot: f64 = self.nu * e.iter().zip(modes.iter()).map(|(a, b)| a * b).sum::<f64>();
            for (m, a) in modes.iter_mut().zip(e) {
                *m -= dot * a;
            }
        }
    }

    fn project_field(&self, field: &RadialField) -> RadialField {
        let mut modes = field.modes_vec();
        self.apply(&mut modes);
        RadialField::from_modes(field.grid(), modes)
            .expect("projector preserves the field's grid")
    }
}

/// Find t*·seed with J(t*·seed) ≤ −1 by doubling t from 1.
pub fn find_descent_endpoint(seed: &RadialField, params: &ModelParams) -> Result<RadialField> {
    let func = Functional::new(seed.grid(), params)?;
    endpoint_by_doubling(&func, seed, None)
}

fn endpoint_by_doubling(
    func: &Functional,
    seed: &RadialField,
    projector: Option<&Projector>,
) -> Result<RadialField> {
    let norm = func.p_norm(seed);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Domain("endpoint search needs a nonzero seed".into()));
    }
    let base = match projector {
        Some(p) => {
            let projected = p.project_field(seed);
            if func.p_norm(&projected) <= 1e-14 * norm {
                return Err(Error::Domain(
                    "seed vanishes after spectral projection; choose another seed".into(),
                ));
            }
            projected
        }
        None => seed.clone(),
    };
    let mut t = 1.0f64;
    let cap = (1u64 << 30) as f64;
    loop {
        let mut cand = base.clone();
        cand.scale(t);
        let (e, _) = func.energy(&cand)?;
        if e.total <= -1.0 {
            return Ok(cand);
        }
        t *= 2.0;
        if t > cap {
            return Err(Error::Geometry { t_reached: t });
        }
    }
}

/// Weak-form residuals of the two coupled equations, sup over basis modes.
///
/// residual_u tests 𝓑_α(u,φₙ) + ∫[V−(ω−φ)²]uφₙ − ∫|u|^{p−2}uφₙ against 0,
/// normalized by ‖φₙ‖_P and (1+‖u‖_P); residual_phi tests the φ-equation
/// ∫⟨∇φ,∇φₙ⟩ − ∫(ω−φ)φₙu² normalized by ‖φₙ‖_{𝒟^{1,2}} = √ν·kₙ and the
/// field magnitudes. Both vanish identically at (0, 0).
pub fn pde_residuals(
    u: &RadialField,
    phi: &RadialField,
    params: &ModelParams,
) -> Result<(f64, f64)> {
    require_same_grid(u, phi)?;
    let grid = u.grid();
    let func = Functional::new(grid, params)?;
    let symbol = func.symbol();
    let tau = func.tau_p();
    let nu = grid.mode_norm_sq();
    let uv = u.values_vec();
    let pv = phi.values_vec();
    let cu = u.modes_vec();
    let cphi = phi.modes_vec();
    let om = params.omega;
    let p = params.p;
    let vpot = &func.potential().values;

    // u-equation
    let q: Vec<f64> = (0..grid.n)
        .map(|j| {
            let g = om - pv[j];
            (vpot[j] - g * g) * uv[j] - uv[j].abs().powf(p - 2.0) * uv[j]
        })
        .collect();
    let cq = grid.values_to_modes(&q);
    let u_norm = func.p_norm(u);
    let mut res_u = 0.0f64;
    for n in 0..grid.n {
        let d = nu * (symbol.sigma[n] * cu[n] + cq[n]);
        let mode_norm = (nu * (symbol.sigma[n] + tau)).sqrt();
        res_u = res_u.max(d.abs() / mode_norm / (1.0 + u_norm));
    }

    // φ-equation
    let src: Vec<f64> = (0..grid.n)
        .map(|j| (pv[j] - om) * uv[j] * uv[j])
        .collect();
    let csrc = grid.values_to_modes(&src);
    let grad_phi = crate::operator::grad_norm_sq(phi).sqrt();
    let u4 = lq_norm(u, 4.0)?;
    let scale_phi = 1.0 + grad_phi + om * u4 * u4;
    let mut res_phi = 0.0f64;
    for (n, &k) in grid.frequencies.iter().enumerate() {
        let e = nu * (k * k * cphi[n] + csrc[n]);
        res_phi = res_phi.max(e.abs() / (nu.sqrt() * k) / scale_phi);
    }
    Ok((res_u, res_phi))
}

/// Maximize J(c·u) over c > 0 by golden-section search with bracket
/// expansion; returns (c*, J(c*·u), φ at the peak).
fn ray_peak(
    func: &Functional,
    u: &RadialField,
    warm: Option<&RadialField>,
    lo0: f64,
    hi0: f64,
) -> Result<(f64, f64, RadialField)> {
    let mut warm_phi: Option<RadialField> = warm.cloned();
    let eval = |c: f64, warm_phi: &mut Option<RadialField>| -> Result<f64> {
        let mut cand = u.clone();
        cand.scale(c);
        let (e, phi) = func.energy_warm(&cand, warm_phi.as_ref())?;
        *warm_phi = Some(phi.phi);
        Ok(e.total)
    };
    let mut lo = lo0;
    let mut hi = hi0;
    let j_mid = eval(1.0, &mut warm_phi)?;
    let mut j_hi = eval(hi, &mut warm_phi)?;
    while j_hi > j_mid && hi < 1e6 {
        hi *= 2.0;
        j_hi = eval(hi, &mut warm_phi)?;
    }
    let mut j_lo = eval(lo, &mut warm_phi)?;
    while j_lo > j_mid && lo > 1e-6 {
        lo *= 0.5;
        j_lo = eval(lo, &mut warm_phi)?;
    }
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = eval(x1, &mut warm_phi)?;
    let mut f2 = eval(x2, &mut warm_phi)?;
    for _ in 0..60 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = eval(x1, &mut warm_phi)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = eval(x2, &mut warm_phi)?;
        }
        if (b - a).abs() < 1e-9 * (1.0 + a.abs()) {
            break;
        }
    }
    let c = 0.5 * (a + b);
    let mut cand = u.clone();
    cand.scale(c);
    let (e, phi) = func.energy_warm(&cand, warm_phi.as_ref())?;
    Ok((c, e.total, phi.phi))
}

/// Redistribute path points to equal P-norm chord length by piecewise-linear
/// interpolation; endpoints are preserved exactly.
fn redistribute(func: &Functional, points: &[RadialField]) -> Result<Vec<RadialField>> {
    let m = points.len() - 1;
    let mode_vecs: Vec<Vec<f64>> = points.iter().map(|p| p.modes_vec()).collect();
    let mut cumulative = vec![0.0; m + 1];
    for i in 1..=m {
        let diff: Vec<f64> = mode_vecs[i]
            .iter()
            .zip(&mode_vecs[i - 1])
            .map(|(a, b)| a - b)
            .collect();
        cumulative[i] = cumulative[i - 1] + func.p_dot(&diff, &diff).sqrt();
    }
    let total = cumulative[m];
    if total <= 0.0 {
        return Ok(points.to_vec());
    }
    let grid = points[0].grid();
    let mut out = Vec::with_capacity(m + 1);
    out.push(points[0].clone());
    let mut seg = 1usize;
    for k in 1..m {
        let target = total * (k as f64) / (m as f64);
        while seg < m && cumulative[seg] < target {
            seg += 1;
        }
        let span = cumulative[seg] - cumulative[seg - 1];
        let theta = if span > 0.0 {
            (target - cumulative[seg - 1]) / span
        } else {
            0.0
        };
        let modes: Vec<f64> = mode_vecs[seg - 1]
            .iter()
            .zip(&mode_vecs[seg])
            .map(|(a, b)| a + theta * (b - a))
            .collect();
        out.push(RadialField::from_modes(grid, modes)?);
    }
    out.push(points[m].clone());
    Ok(out)
}

/// Interior argmax of the energies (indices 1..M−1), smallest index on ties.
fn interior_argmax(energies: &[f64]) -> usize {
    let m = energies.len() - 1;
    let mut best = 1usize;
    for i in 1..m {
        if energies[i] > energies[best] {
            best = i;
        }
    }
    best
}

/// Run the mountain-pass solver on `grid` under `params`.
pub fn mountain_pass_solve(
    grid: &Arc<RadialGrid>,
    params: &ModelParams,
    options: &SolverOptions,
) -> Result<SolveResult> {
    if options.path_points < 4 {
        return Err(Error::Domain("path needs at least 4 points".into()));
    }
    if !(options.tol > 0.0) || options.max_iters == 0 {
        return Err(Error::Domain("tol must be positive, max_iters nonzero".into()));
    }
    // Admissibility gate for constant potentials; coercive potentials are
    // admissible for every α but may need spectral deflation.
    let projector = if params.potential.is_constant() {
        let report = check_admissible(params)?;
        if !report.admissible {
            return Err(Error::NotAdmissible(format!(
                "parameters violate {:?}",
                report.violated_conditions
            )));
        }
        None
    } else {
        let k_request = (grid.n / 4).clamp(1, 32);
        let spectrum = eigen_decomposition(grid, params, k_request)?;
        if spectrum.k0 > 1 {
            let nu = grid.mode_norm_sq();
            let basis: Vec<Vec<f64>> = spectrum.eigenfields[..spectrum.k0 - 1]
                .iter()
                .map(|e| e.modes_vec())
                .collect();
            Some(Projector { basis, nu })
        } else {
            None
        }
    };

    let mut func = Functional::new(grid, params)?;
    func.phi_tol = options.phi_tol;

    let amp = options.seed_amplitude;
    let width = options.seed_width;
    if !(amp.is_finite() && width.is_finite() && amp != 0.0 && width > 0.0) {
        return Err(Error::Domain(format!(
            "seed amplitude {amp} / width {width} invalid"
        )));
    }
    let seed = RadialField::sample(grid, |r| amp * (-(r / width) * (r / width)).exp());
    let endpoint = endpoint_by_doubling(&func, &seed, projector.as_ref())?;

    // Linear initial path 0 → endpoint.
    let m = options.path_points;
    let endpoint_modes = endpoint.modes_vec();
    let mut points: Vec<RadialField> = (0..=m)
        .map(|i| {
            let f = (i as f64) / (m as f64);
            let modes: Vec<f64> = endpoint_modes.iter().map(|c| f * c).collect();
            RadialField::from_modes(grid, modes)
        })
        .collect::<Result<_>>()?;
    let mut phis: Vec<Option<RadialField>> = vec![None; m + 1];
    let mut energies = vec![0.0; m + 1];
    for i in 0..=m {
        let (e, phi) = func.energy_warm(&points[i], if i > 0 { phis[i - 1].as_ref() } else { None })?;
        energies[i] = e.total;
        phis[i] = Some(phi.phi);
    }

    let project_direction = |d: &mut Vec<f64>| {
        if let Some(p) = &projector {
            p.apply(d);
        }
    };

    let mut iterations = 0usize;
    let mut converged = false;

    // Phase 1: path deformation — descent on the maximizer, endpoints fixed.
    let path_budget = options.path_iters.min(options.max_iters);
    let mut i_star;
    while iterations < path_budget {
        iterations += 1;
        i_star = interior_argmax(&energies);
        let u = points[i_star].clone();
        let (grad, phi) = func.gradient_warm(&u, phis[i_star].as_ref())?;
        phis[i_star] = Some(phi.phi);
        if grad.norm_p <= options.tol {
            converged = true;
            break;
        }
        // Tangent along the path at the maximizer, in the P-metric.
        let prev = points[i_star - 1].modes_vec();
        let next = points[i_star + 1].modes_vec();
        let mut tangent: Vec<f64> = next.iter().zip(&prev).map(|(a, b)| a - b).collect();
        project_direction(&mut tangent);
        let tnorm = func.p_dot(&tangent, &tangent).sqrt();
        let gmodes_full = grad.riesz.modes_vec();
        let mut gmodes = gmodes_full.clone();
        project_direction(&mut gmodes);
        let mut dir = gmodes.clone();
        if tnorm > 0.0 {
            let coeff = func.p_dot(&gmodes, &tangent) / (tnorm * tnorm);
            for (d, t) in dir.iter_mut().zip(&tangent) {
                *d -= coeff * t;
            }
        }
        let mut dd = func.p_dot(&dir, &gmodes);
        if dd <= 0.0 {
            dir = gmodes.clone();
            dd = func.p_dot(&dir, &dir);
        }
        let j0 = energies[i_star];
        let noise = 1e-13 * (1.0 + j0.abs());
        let mut step = 1.0f64;
        while step > 1e-14 {
            let trial_modes: Vec<f64> = u
                .modes_vec()
                .iter()
                .zip(&dir)
                .map(|(c, d)| c - step * d)
                .collect();
            let trial = RadialField::from_modes(grid, trial_modes)?;
            let (e, phi) = func.energy_warm(&trial, phis[i_star].as_ref())?;
            let jt = e.total;
            let wanted = 1e-4 * step * dd;
            if jt <= j0 - wanted || (wanted < noise && jt <= j0 + noise) {
                points[i_star] = trial;
                energies[i_star] = jt;
                phis[i_star] = Some(phi.phi);
                break;
            }
            step *= 0.5;
        }
        if iterations.is_multiple_of(10) && iterations < path_budget {
            points = redistribute(&func, &points)?;
            for i in 1..m {
                let (e, phi) = func.energy_warm(&points[i], phis[i].as_ref())?;
                energies[i] = e.total;
                phis[i] = Some(phi.phi);
            }
        }
    }

    // Phase 2: polish the maximizer (ray re-peak + transverse descent).
    i_star = interior_argmax(&energies);
    let mut u = points[i_star].clone();
    let mut phi_u = phis[i_star].clone();
    let mut grad_norm = f64::INFINITY;
    if !converged {
        let (c, mut j, mut phi) = ray_peak(&func, &u, phi_u.as_ref(), 0.25, 4.0)?;
        u.scale(c);
        while iterations < options.max_iters {
            iterations += 1;
            let (grad, psol) = func.gradient_warm(&u, Some(&phi))?;
            phi = psol.phi;
            grad_norm = grad.norm_p;
            if grad_norm <= options.tol {
                converged = true;
                break;
            }
            let cu = u.modes_vec();
            let uu = func.p_dot(&cu, &cu);
            let mut gmodes = grad.riesz.modes_vec();
            project_direction(&mut gmodes);
            let mut dir = gmodes.clone();
            if uu > 0.0 {
                let coeff = func.p_dot(&gmodes, &cu) / uu;
                for (d, c) in dir.iter_mut().zip(&cu) {
                    *d -= coeff * c;
                }
            }
            let mut dd = func.p_dot(&dir, &gmodes);
            if dd <= 0.0 {
                dir = gmodes.clone();
                dd = func.p_dot(&dir, &dir);
            }
            let noise = 1e-13 * (1.0 + j.abs());
            let mut step = 1.0f64;
            let mut accepted = false;
            while step > 1e-14 {
                let trial_modes: Vec<f64> =
                    cu.iter().zip(&dir).map(|(c, d)| c - step * d).collect();
                let trial = RadialField::from_modes(grid, trial_modes)?;
                let (c_pk, j_t, phi_t) = ray_peak(&func, &trial, Some(&phi), 0.7, 1.5)?;
                let wanted = 1e-4 * step * dd;
                if j_t <= j - wanted || (wanted < noise && j_t <= j + noise) {
                    let mut accepted_u = trial;
                    accepted_u.scale(c_pk);
                    u = accepted_u;
                    j = j_t;
                    phi = phi_t;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        phi_u = Some(phi);
    } else {
        let (grad, psol) = func.gradient_warm(&u, phi_u.as_ref())?;
        grad_norm = grad.norm_p;
        phi_u = Some(psol.phi);
    }

    let phi_final = match phi_u {
        Some(p) => p,
        None => crate::electrostatic::solve_phi(&u, params.omega, options.phi_tol)?.phi,
    };
    let energy = func.energy_with_phi(&u, &phi_final);
    let (residual_u, residual_phi) = pde_residuals(&u, &phi_final, params)?;
    let converged = converged && grad_norm <= options.tol && energy.total > 0.0;
    Ok(SolveResult {
        u,
        phi: phi_final,
        energy,
        grad_norm,
        residual_u,
        residual_phi,
        iterations,
        converged,
        params: params.clone(),
        path: PathState {
            points,
            energies: energies.clone(),
            argmax: i_star,
        },
    })
}

/// Convenience accessor used by reports: symbol shift of the P-inner product.
pub fn preconditioner_shift(grid: &Arc<RadialGrid>, params: &ModelParams) -> Result<f64> {
    Ok(OperatorSymbol::new(grid, params.s, params.alpha)?.tau_p())
}
