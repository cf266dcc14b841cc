//! Spectral decomposition of 𝓛_{α,V} = −Δ + α(−Δ)ˢ + V on the radial grid:
//! eigenpairs, the Gårding shift γ, the splitting index k₀, and the
//! coercivity constant c₀ consumed by the coercive-potential solver.
//!
//! In the sine-mode basis the quadratic form is
//!   𝓑_{α,V}(u,v) = ν Σ σₙ cₙ(u) cₙ(v) + Σⱼ wⱼ V(rⱼ) u(rⱼ) v(rⱼ),
//! and because the quadrature pairing of two fields equals ν times the
//! Euclidean dot of their mode vectors (discrete Parseval), the generalized
//! eigenproblem reduces to an ordinary symmetric one for the matrix
//!   Ãₙₘ = σₙ δₙₘ + (2/(N+1)) Σⱼ V(rⱼ) Sⱼₙ Sⱼₘ,   Sⱼₙ = sin(πjn/(N+1)).
//! Small problems are solved densely; above [`DENSE_LIMIT`] a Lanczos
//! iteration with full reorthogonalization extracts the low end of the
//! spectrum, applying Ã matrix-free through two sine transforms per step.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{require_same_grid, RadialField, RadialGrid};
use crate::operator::{bilinear_b_alpha, OperatorSymbol};
use crate::params::ModelParams;

/// Largest mode count solved with a dense symmetric eigensolver.
pub const DENSE_LIMIT: usize = 512;

/// Eigenpairs and the derived decomposition constants.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// λ₁ ≤ … ≤ λ_K.
    pub lambdas: Vec<f64>,
    /// L²-orthonormal eigenfields e₁..e_K.
    pub eigenfields: Vec<RadialField>,
    /// Gårding shift γ ≥ 0 with 𝓑 + γ‖·‖₂² ≥ ½‖·‖_W².
    pub gamma: f64,
    /// Least k (1-based) with λ_k > ω².
    pub k0: usize,
    /// c₀ = 1 − (ω²+γ)/(λ_{k₀}+γ); the provable coercivity on P_{k₀} is
    /// 𝓑(u,u) − ω²‖u‖₂² ≥ (c₀/2)‖u‖_W² (the ½ is the Gårding β).
    pub c0: f64,
}

/// 𝓑_{α,V}(u,v) = 𝓑_α(u,v) + Σⱼ wⱼ V(rⱼ) u(rⱼ) v(rⱼ).
pub fn bilinear_b_alpha_v(u: &RadialField, v: &RadialField, params: &ModelParams) -> Result<f64> {
    require_same_grid(u, v)?;
    let b = bilinear_b_alpha(u, v, params)?;
    let sampled = params.potential.sample(&u.grid().nodes)?;
    let uv = u.values_vec();
    let vv = v.values_vec();
    let pot: f64 = u
        .grid()
        .weights
        .iter()
        .zip(&sampled.values)
        .zip(uv.iter().zip(&vv))
        .map(|((w, vp), (x, y))| w * vp * x * y)
        .sum();
    Ok(b + pot)
}

/// Smallest grid-verified γ ≥ 0 with σₙ + V₀ + γ ≥ ½(1 + kₙ²) for every
/// mode. Adding the nonnegative (V−V₀) part, this yields the Gårding bound
/// 𝓑_{α,V}(u,u) + γ‖u‖₂² ≥ ½‖u‖_W².
pub fn compute_gamma(grid: &Arc<RadialGrid>, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let symbol = OperatorSymbol::new(grid, params.s, params.alpha)?;
    let v0 = params.potential.sample(&grid.nodes)?.v0;
    let mut gamma: f64 = 0.0;
    for (sig, &k) in symbol.sigma.iter().zip(&grid.frequencies) {
        gamma = gamma.max(0.5 * (1.0 + k * k) - sig - v0);
    }
    Ok(gamma.max(0.0))
}

/// Apply Ã to a mode vector: σ⊙x plus the potential term through two sine
/// transforms.
fn apply_operator_matrix(
    grid: &RadialGrid,
    sigma: &[f64],
    potential: &[f64],
    x: &[f64],
) -> Vec<f64> {
    let nodes = grid.sine_sum(x);
    let weighted: Vec<f64> = nodes.iter().zip(potential).map(|(a, v)| a * v).collect();
    let back = grid.sine_sum(&weighted);
    let scale = 2.0 / ((grid.n + 1) as f64);
    sigma
        .iter()
        .zip(x)
        .zip(&back)
        .map(|((s, xv), b)| s * xv + scale * b)
        .collect()
}

fn assemble_dense(grid: &RadialGrid, sigma: &[f64], potential: &[f64]) -> DMatrix<f64> {
    let n = grid.n;
    let mut mat = DMatrix::zeros(n, n);
    let mut unit = vec![0.0; n];
    for m in 0..n {
        unit[m] = 1.0;
        let col = apply_operator_matrix(grid, sigma, potential, &unit);
        unit[m] = 0.0;
        for i in 0..n {
            mat[(i, m)] = col[i];
        }
    }
    // Symmetrize away transform roundoff so the eigensolver sees an exactly
    // symmetric matrix.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (mat[(i, j)] + mat[(j, i)]);
            mat[(i, j)] = avg;
            mat[(j, i)] = avg;
        }
    }
    mat
}

/// Lanczos with full reorthogonalization; returns the K smallest Ritz pairs.
fn lanczos_lowest(
    grid: &RadialGrid,
    sigma: &[f64],
    potential: &[f64],
    k: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = grid.n;
    let budget = n.min(1400);
    // Deterministic start rich in low modes (the low eigenfields are smooth).
    let mut q: Vec<f64> = (0..n).map(|i| (-(i as f64) / 8.0).exp() + 1e-3).collect();
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = vec![q.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut prev: Option<Vec<f64>> = None;

    let ritz = |alphas: &[f64], betas: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
        let m = alphas.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alphas[i];
            if i + 1 < m {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = nalgebra::SymmetricEigen::new(t);
        (eig.eigenvalues, eig.eigenvectors)
    };

    let mut converged_at = None;
    for j in 0..budget {
        let mut w = apply_operator_matrix(grid, sigma, potential, &basis[j]);
        let alpha: f64 = w.iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        for (wv, qv) in w.iter_mut().zip(&basis[j]) {
            *wv -= alpha * qv;
        }
        if let Some(p) = &prev {
            let beta_prev = betas[j - 1];
            for (wv, pv) in w.iter_mut().zip(p) {
                *wv -= beta_prev * pv;
            }
        }
        // Full reorthogonalization, twice for floating-point hygiene.
        for _ in 0..2 {
            for qv in &basis {
                let dot: f64 = w.iter().zip(qv).map(|(a, b)| a * b).sum();
                for (wv, bv) in w.iter_mut().zip(qv) {
                    *wv -= dot * bv;
                }
            }
        }
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        // Convergence check on the lowest-K Ritz residuals |β·s_last|.
        let m = alphas.len();
        if m >= k.max(8) && (m.is_multiple_of(40) || beta < 1e-12 || j + 1 == budget) {
            let (vals, vecs) = ritz(&alphas, &betas);
            let mut idx: Vec<usize> = (0..m).collect();
            idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
            let ok = idx.iter().take(k).all(|&i| {
                let bound = beta * vecs[(m - 1, i)].abs();
                bound <= 1e-10 * (1.0 + vals[i].abs())
            });
            if ok || beta < 1e-12 {
                converged_at = Some(m);
                break;
            }
        }
        if j + 1 < budget {
            betas.push(beta);
            if beta < 1e-12 {
                // Invariant subspace hit exactly; should have broken above.
                break;
            }
            let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
            prev = Some(basis[j].clone());
            basis.push(next);
        }
    }
    let m = converged_at.unwrap_or(alphas.len());
    let (vals, vecs) = ritz(&alphas[..m], &betas[..m.saturating_sub(1)]);
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
    if idx.len() < k {
        return Err(Error::Eigen(format!(
            "Lanczos produced only {} Ritz pairs, need {k}",
            idx.len()
        )));
    }
    let mut lambdas = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for &i in idx.iter().take(k) {
        lambdas.push(vals[i]);
        let mut x = vec![0.0; n];
        for (j, qv) in basis.iter().take(m).enumerate() {
            let c = vecs[(j, i)];
            for (xv, bv) in x.iter_mut().zip(qv) {
                *xv += c * bv;
            }
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        vectors.push(x);
    }
    Ok((lambdas, vectors))
}

/// Solve for the K lowest eigenpairs of 𝓛_{α,V} in the L² quadrature inner
/// product; also computes γ, k₀, and c₀.
pub fn eigen_decomposition(
    grid: &Arc<RadialGrid>,
    params: &ModelParams,
    k: usize,
) -> Result<SpectrumResult> {
    params.validate()?;
    if k == 0 || 4 * k > grid.n {
        return Err(Error::Domain(format!(
            "eigenpair count K={k} outside 1..=N/4 (N={})",
            grid.n
        )));
    }
    let symbol = OperatorSymbol::new(grid, params.s, params.alpha)?;
    let sampled = params.potential.sample(&grid.nodes)?;
    let nu = grid.mode_norm_sq();

    let (lambdas, mode_vectors): (Vec<f64>, Vec<Vec<f64>>) = if params.potential.is_constant() {
        // Diagonal case: eigenfields are the sine modes, λ = σₙ + m², sorted.
        let msq = sampled.v0;
        let mut idx: Vec<usize> = (0..grid.n).collect();
        idx.sort_by(|&a, &b| {
            (symbol.sigma[a] + msq)
                .partial_cmp(&(symbol.sigma[b] + msq))
                .unwrap()
        });
        let mut l = Vec::with_capacity(k);
        let mut v = Vec::with_capacity(k);
        for &n in idx.iter().take(k) {
            l.push(symbol.sigma[n] + msq);
            let mut unit = vec![0.0; grid.n];
            unit[n] = 1.0;
            v.push(unit);
        }
        (l, v)
    } else if grid.n <= DENSE_LIMIT {
        let mat = assemble_dense(grid, &symbol.sigma, &sampled.values);
        let eig = nalgebra::SymmetricEigen::new(mat);
        let mut idx: Vec<usize> = (0..grid.n).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let mut l = Vec::with_capacity(k);
        let mut v = Vec::with_capacity(k);
        for &i in idx.iter().take(k) {
            l.push(eig.eigenvalues[i]);
            v.push(eig.eigenvectors.column(i).iter().copied().collect());
        }
        (l, v)
    } else {
        lanczos_lowest(grid, &symbol.sigma, &sampled.values, k)?
    };

    // Mode vectors are Euclidean-orthonormal; L² normalization divides by √ν.
    let eigenfields: Vec<RadialField> = mode_vectors
        .into_iter()
        .map(|mut v| {
            let s = 1.0 / nu.sqrt();
            v.iter_mut().for_each(|x| *x *= s);
            RadialField::from_modes(grid, v)
        })
        .collect::<Result<_>>()?;

    let gamma = compute_gamma(grid, params)?;
    let omega_sq = params.omega * params.omega;
    let k0 = match lambdas.iter().position(|&l| l > omega_sq) {
        Some(i) => i + 1,
        None => {
            return Err(Error::Eigen(format!(
                "no eigenvalue among the first {k} exceeds omega^2 = {omega_sq}; increase K"
            )))
        }
    };
    let c0 = 1.0 - (omega_sq + gamma) / (lambdas[k0 - 1] + gamma);
    Ok(SpectrumResult {
        lambdas,
        eigenfields,
        gamma,
        k0,
        c0,
    })
}

/// Minimize the Rayleigh quotient 𝓑(u,u)/‖u‖₂² over the L²-orthogonal
/// complement of e₁..e_{k−1} by preconditioned projected iteration; returns
/// |min − λ_k| / (|λ_k| + 1).
pub fn rayleigh_min_check(
    grid: &Arc<RadialGrid>,
    params: &ModelParams,
    result: &SpectrumResult,
    k: usize,
) -> Result<f64> {
    if k == 0 || k > result.lambdas.len() {
        return Err(Error::Domain(format!(
            "index k={k} outside the computed spectrum (K={})",
            result.lambdas.len()
        )));
    }
    let symbol = OperatorSymbol::new(grid, params.s, params.alpha)?;
    let sampled = params.potential.sample(&grid.nodes)?;
    let tau = symbol.tau_p() + sampled.v0.abs() + 1.0;
    let deflate_basis: Vec<Vec<f64>> = result.eigenfields[..k - 1]
        .iter()
        .map(|e| {
            let m = e.modes_vec();
            let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
            m.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    let deflate = |x: &mut Vec<f64>| {
        for e in &deflate_basis {
            let dot: f64 = x.iter().zip(e).map(|(a, b)| a * b).sum();
            for (xv, ev) in x.iter_mut().zip(e) {
                *xv -= dot * ev;
            }
        }
    };
    let apply = |x: &[f64]| apply_operator_matrix(grid, &symbol.sigma, &sampled.values, x);
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    let mut x: Vec<f64> = (0..grid.n).map(|i| (-(i as f64) / 6.0).exp() + 1e-3).collect();
    deflate(&mut x);
    let norm = dot(&x, &x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    let mut ax = apply(&x);
    let mut theta = dot(&x, &ax);
    for _ in 0..400 {
        // Preconditioned residual, deflated back into the complement.
        let mut z: Vec<f64> = ax
            .iter()
            .zip(&x)
            .enumerate()
            .map(|(n, (a, xv))| (a - theta * xv) / (symbol.sigma[n] + tau))
            .collect();
        deflate(&mut z);
        let zz = dot(&z, &z);
        if zz <= 0.0 {
            break;
        }
        // Rayleigh–Ritz in span{x, z}.
        let az = apply(&z);
        let axx = theta;
        let axz = dot(&x, &az);
        let azz = dot(&z, &az);
        let bxz = dot(&x, &z);
        let bzz = zz;
        // Generalized 2x2: (A - λB)c = 0 with A=[[axx,axz],[axz,azz]],
        // B=[[1,bxz],[bxz,bzz]] — smallest root of the quadratic
        // det(A−λB) = 0.
        let a2 = bzz - bxz * bxz;
        let a1 = -(axx * bzz + azz - 2.0 * axz * bxz);
        let a0 = axx * azz - axz * axz;
        let disc = (a1 * a1 - 4.0 * a2 * a0).max(0.0).sqrt();
        let lam = if a2.abs() > 1e-300 {
            ((-a1 - disc) / (2.0 * a2)).min((-a1 + disc) / (2.0 * a2))
        } else {
            theta
        };
        // Eigvec coefficient: (axx − λ)·cx + (axz − λ bxz)·cz = 0.
        let c_x = axz - lam * bxz;
        let c_z = -(axx - lam);
        let (c_x, c_z) = if c_x.abs() + c_z.abs() < 1e-300 {
            (1.0, 0.0)
        } else {
            (c_x, c_z)
        };
        let mut xin: Vec<f64> = x
            .iter()
            .zip(&z)
            .map(|(a, b)| c_x * a + c_z * b)
            .collect();
        deflate(&mut xin);
        let n2 = dot(&xin, &xin).sqrt();
        if n2 <= 0.0 {
            break;
        }
        xin.iter_mut().for_each(|v| *v /= n2);
        x = xin;
        ax = apply(&x);
        let theta_new = dot(&x, &ax);
        let delta = (theta - theta_new).abs();
        theta = theta_new;
        if delta <= 1e-14 * (1.0 + theta.abs()) {
            break;
        }
    }
    let lam_k = result.lambdas[k - 1];
    Ok((theta - lam_k).abs() / (lam_k.abs() + 1.0))
}
