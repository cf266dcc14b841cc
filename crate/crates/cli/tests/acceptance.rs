//! Acceptance suite: one test per release criterion, each printing a single
//! `PASS`/`FAIL` line with the measured values and its time budget.
//!
//! Everything here checks the toolkit against *independent* references:
//! brute-force scans, closed forms, classical special cases, a hand-rolled
//! dense eigensolver, and byte-level comparison of repeated runs. Nothing is
//! compared against the implementation's own internals.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kgm_core::{
    alpha0, bilinear_b_alpha_v, eigen_decomposition, feasible_epsilon, find_descent_endpoint,
    h1_norm_sq, l2_norm_sq_modes, mountain_pass_solve, normalization_constant,
    phi_identity_residual, rayleigh_min_check, sobolev_constant_estimate, solve_phi,
    w_norm_sq, EpsilonCase, Functional, ModelParams, PotentialSpec, RadialField, RadialGrid,
    SolverOptions,
};

/// Print the one-line verdict and fail the test if the criterion missed.
fn conclude(name: &str, pass: bool, detail: String) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

fn within_budget(start: Instant, budget_s: f64) -> (bool, f64) {
    let dt = start.elapsed().as_secs_f64();
    (dt <= budget_s, dt)
}

fn reference_params(alpha: f64) -> ModelParams {
    ModelParams::constant(0.5, alpha, 4.0, 0.3, 1.0).unwrap()
}

fn oscillator_params() -> ModelParams {
    ModelParams::new(0.5, 0.0, 4.0, 1.0, PotentialSpec::coercive("r^2").unwrap()).unwrap()
}

fn decayed_field(grid: &Arc<RadialGrid>, rng: &mut impl Rng) -> RadialField {
    let modes: Vec<f64> = (0..grid.n)
        .map(|n| rng.random_range(-1.0..1.0) * (-(n as f64) / 20.0).exp())
        .collect();
    RadialField::from_modes(grid, modes).unwrap()
}

fn kgm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kgm"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kgm-acc-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

// --- 1. admissibility threshold vs brute-force minimization ---------------

/// The closed-form threshold must match a direct three-stage scan of
/// inf_{k>0} (k² + t)/k^{2s} on 200 random parameter pairs to 1e-5 relative.
#[test]
fn criterion_1_threshold_matches_brute_force() {
    const NAME: &str = "criterion-1-threshold-brute-force";
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);

    // Zooming scan, independent of the closed-form minimizer: a log-spaced
    // sweep over eight decades, then two linear refinements around the
    // incumbent. Final step is ~1e-9 relative, far below the tolerance.
    fn brute_force(s: f64, t: f64) -> f64 {
        let f = |k: f64| (k * k + t) / k.powf(2.0 * s);
        let m = 4000usize;
        let (lo, hi) = (1e-4f64, 1e4f64);
        let mut best_k = lo;
        let mut best = f64::INFINITY;
        for i in 0..=m {
            let k = lo * (hi / lo).powf(i as f64 / m as f64);
            let v = f(k);
            if v < best {
                best = v;
                best_k = k;
            }
        }
        let mut window = best_k * ((hi / lo).powf(1.0 / m as f64) - 1.0);
        for _ in 0..2 {
            let (a, b) = (best_k - window, best_k + window);
            for i in 0..=m {
                let k = a + (b - a) * i as f64 / m as f64;
                if k <= 0.0 {
                    continue;
                }
                let v = f(k);
                if v < best {
                    best = v;
                    best_k = k;
                }
            }
            window = 2.0 * window / m as f64;
        }
        best
    }

    let mut worst = 0.0f64;
    for _ in 0..200 {
        let s = rng.random_range(0.02..0.98);
        let t = rng.random_range(0.05..50.0);
        let exact = alpha0(s, t).unwrap();
        let scanned = brute_force(s, t);
        worst = worst.max((exact - scanned).abs() / exact);
    }

    let (in_time, dt) = within_budget(start, 5.0);
    conclude(
        NAME,
        worst <= 1e-5 && in_time,
        format!("worst relative error {worst:.3e} over 200 pairs (tol 1e-5); {dt:.2}s of 5s"),
    );
}

// --- 2. threshold table: endpoint limits and curvature pattern ------------

/// The `threshold-table` subcommand over 10^4 points must reproduce the
/// endpoint limits α₀ → Ω (s→0⁺) and α₀ → 1 (s→1⁻) within 1%, and the
/// curvature of s ↦ α₀(s, Ω) must change sign exactly twice for Ω ∈ {0.1, 10}
/// and never for Ω = 1.
#[test]
fn criterion_2_threshold_table_shape() {
    const NAME: &str = "criterion-2-threshold-table";
    let start = Instant::now();
    let dir = tmpdir("thr");

    let out = kgm()
        .arg("threshold-table")
        .arg("--out")
        .arg(&dir)
        .output()
        .expect("spawn kgm");
    if out.status.code() != Some(0) {
        conclude(NAME, false, format!("exit {:?}", out.status.code()));
        return;
    }
    let csv = std::fs::read_to_string(dir.join("threshold.csv")).unwrap();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in csv.lines().skip(1) {
        rows.push(line.split(',').map(|x| x.parse().unwrap()).collect());
    }
    let gaps = [0.1, 1.0, 10.0];
    let mut detail = String::new();
    let mut pass = rows.len() == 10_000;

    // Sign changes of the second difference, skipping near-zero entries.
    fn curvature_flips(column: &[f64]) -> usize {
        let d2: Vec<f64> = column
            .windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .collect();
        let floor = 1e-12 * d2.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut flips = 0;
        let mut last = 0.0f64;
        for &d in &d2 {
            if d.abs() <= floor {
                continue;
            }
            if last != 0.0 && d.signum() != last {
                flips += 1;
            }
            last = d.signum();
        }
        flips
    }

    for (g, &gap) in gaps.iter().enumerate() {
        let column: Vec<f64> = rows.iter().map(|r| r[g + 1]).collect();
        let lim0 = (column[0] - gap).abs() / gap;
        let lim1 = (column[column.len() - 1] - 1.0).abs();
        let flips = curvature_flips(&column);
        let want_flips = if (gap - 1.0).abs() < 1e-12 { 0 } else { 2 };
        pass &= lim0 <= 1e-2 && lim1 <= 1e-2 && flips == want_flips;
        detail.push_str(&format!(
            "gap {gap}: limits {lim0:.2e}/{lim1:.2e}, {flips} curvature flips (want {want_flips}); "
        ));
    }

    let (in_time, dt) = within_budget(start, 5.0);
    conclude(NAME, pass && in_time, format!("{detail}{dt:.2}s of 5s"));
}

// --- 3. kernel normalization vs the Gamma-function closed form ------------

/// C(1/2) must equal 1/π², and C(s) must match
/// 4^s Γ(3/2+s) s(1−s) / (π^{3/2} Γ(2−s)) at four other orders, all to 1e-6.
#[test]
fn criterion_3_normalization_closed_form() {
    const NAME: &str = "criterion-3-normalization";
    let start = Instant::now();
    use statrs::function::gamma::gamma;

    let closed_form = |s: f64| -> f64 {
        4.0f64.powf(s) * gamma(1.5 + s) * s * (1.0 - s)
            / (std::f64::consts::PI.powf(1.5) * gamma(2.0 - s))
    };

    let half = normalization_constant(0.5).unwrap();
    let exact_half = 1.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let mut worst = (half - exact_half).abs() / exact_half;
    let mut detail = format!("C(1/2) error {worst:.2e}; ");

    for &s in &[0.1, 0.25, 0.75, 0.9] {
        let got = normalization_constant(s).unwrap();
        let want = closed_form(s);
        let err = (got - want).abs() / want;
        detail.push_str(&format!("C({s}) error {err:.2e}; "));
        worst = worst.max(err);
    }

    let (in_time, dt) = within_budget(start, 10.0);
    conclude(
        NAME,
        worst <= 1e-6 && in_time,
        format!("{detail}(tol 1e-6); {dt:.2}s of 10s"),
    );
}

// --- 4. electrostatic solves: bounds, energy identity, Newtonian limit ----

/// Fifty random sources on the production grid: 0 ≤ φ ≤ ω must hold on the
/// support (within 10× the solve tolerance), the gradient-coupling identity
/// must close to 1e-8, and a small compact source must match the classical
/// uniform-ball potential.
#[test]
fn criterion_4_electrostatic_potentials() {
    const NAME: &str = "criterion-4-electrostatic";
    let start = Instant::now();
    let grid = RadialGrid::new(20.0, 511).unwrap();
    let omega = 0.3;
    let tol = 1e-10;
    let mut rng = ChaCha8Rng::seed_from_u64(404);

    let mut worst_bound = 0.0f64;
    let mut worst_identity = 0.0f64;
    for _ in 0..50 {
        let amp = rng.random_range(0.2..2.0);
        let width = rng.random_range(2.0..5.0);
        let kappa = rng.random_range(0.3..1.5);
        let u = RadialField::sample(&grid, |r| {
            amp * (-(r / width) * (r / width)).exp() * (1.0 + 0.4 * (kappa * r).cos())
        });
        let sol = solve_phi(&u, omega, tol).unwrap();
        let phi = sol.phi.values();
        for (p, uval) in phi.iter().zip(u.values()) {
            if uval.abs() > 1e-8 {
                worst_bound = worst_bound.max(-p / omega).max((p - omega) / omega);
            }
        }
        worst_identity = worst_identity.max(phi_identity_residual(&u, &sol.phi, omega));
    }

    // Newtonian limit: a weak source supported in r < a behaves like the
    // uniform ball a²/2 − r²/6 (inside), a³/3r (outside), with the Dirichlet
    // shift −a³/3R; compare shapes normalized at the origin.
    let a = 3.0;
    let radius = grid.radius;
    let small = RadialField::sample(&grid, |r| {
        1e-3 * (0.5 * (1.0 - ((r - a) / 0.25).tanh())).sqrt()
    });
    let newton = |r: f64| -> f64 {
        let inner = if r <= a {
            0.5 * a * a - r * r / 6.0
        } else {
            a * a * a / (3.0 * r)
        };
        inner - a * a * a / (3.0 * radius)
    };
    let sol = solve_phi(&small, 1.0, tol).unwrap();
    let phi0 = sol.phi.eval_origin();
    let mut newton_err = 0.0f64;
    for (j, &r) in grid.nodes.iter().enumerate() {
        if r <= 0.75 * radius {
            newton_err = newton_err.max((sol.phi.values()[j] / phi0 - newton(r) / newton(0.0)).abs());
        }
    }

    let pass = worst_bound <= 10.0 * tol && worst_identity <= 1e-8 && newton_err <= 2e-2;
    let (in_time, dt) = within_budget(start, 60.0);
    conclude(
        NAME,
        pass && in_time,
        format!(
            "bounds violation {worst_bound:.2e} (tol {:.0e}), identity defect {worst_identity:.2e} \
             (tol 1e-8), Newtonian deviation {newton_err:.2e} (tol 2e-2); {dt:.2}s of 60s",
            10.0 * tol
        ),
    );
}

// --- 5. gradient consistency: second-order finite differences -------------

/// Central differences of J along 20 random directions must converge to the
/// assembled gradient action at second order: halving h must shrink the error
/// by 3.5–4.5, i.e. measured order ≥ 1.9.
#[test]
fn criterion_5_gradient_finite_differences() {
    const NAME: &str = "criterion-5-gradient-fd";
    let start = Instant::now();
    let grid = RadialGrid::new(20.0, 511).unwrap();
    let params = reference_params(-0.3);
    let func = Functional::new(&grid, &params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(505);

    let mut ratios = Vec::with_capacity(20);
    for _ in 0..20 {
        let mut u = decayed_field(&grid, &mut rng);
        let mut v = decayed_field(&grid, &mut rng);
        u.scale(30.0 / func.p_norm(&u));
        v.scale(30.0 / func.p_norm(&v));
        let (grad, _) = func.gradient(&u).unwrap();
        let exact = grad.action(&v);

        let fd = |h: f64| -> f64 {
            let mut up = u.clone();
            let mut um = u.clone();
            up.axpy(h, &v).unwrap();
            um.axpy(-h, &v).unwrap();
            let jp = func.energy(&up).unwrap().0.total;
            let jm = func.energy(&um).unwrap().0.total;
            (jp - jm) / (2.0 * h)
        };
        let e1 = (fd(4e-3) - exact).abs();
        let e2 = (fd(2e-3) - exact).abs();
        ratios.push(e1 / e2.max(1e-300));
    }

    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().cloned().fold(0.0f64, f64::max);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let order = mean.log2();
    let pass = min >= 3.5 && max <= 4.5 && order >= 1.9;

    let (in_time, dt) = within_budget(start, 60.0);
    conclude(
        NAME,
        pass && in_time,
        format!(
            "error ratios in [{min:.3}, {max:.3}] (want [3.5, 4.5]), mean order {order:.3} \
             (want >= 1.9) over 20 directions; {dt:.2}s of 60s"
        ),
    );
}

// --- 6. mountain-pass geometry: positive sphere, negative ray ends --------

/// J must stay positive on the certified small sphere (100 random directions)
/// and every descent-endpoint search must end at J ≤ −1 with J still negative
/// half a step beyond.
#[test]
fn criterion_6_mountain_pass_geometry() {
    const NAME: &str = "criterion-6-geometry";
    let start = Instant::now();
    let grid = RadialGrid::new(20.0, 511).unwrap();
    let params = reference_params(-0.3);
    let func = Functional::new(&grid, &params).unwrap();

    let consts = feasible_epsilon(&params, EpsilonCase::Geometry).unwrap();
    let cmin = consts.c1.min(consts.c2);
    let cp = sobolev_constant_estimate(&grid, params.p, 16).unwrap();
    let radius_bound =
        (params.p * cmin / (2.0 * cp.powf(params.p))).powf(1.0 / (params.p - 2.0));
    let rho = 0.5 * radius_bound;

    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut min_j = f64::INFINITY;
    for _ in 0..100 {
        let mut u = decayed_field(&grid, &mut rng);
        let h1 = h1_norm_sq(&u).sqrt();
        u.scale(rho / h1);
        min_j = min_j.min(func.energy(&u).unwrap().0.total);
    }

    let mut worst_end = f64::NEG_INFINITY;
    let mut worst_past = f64::NEG_INFINITY;
    for _ in 0..10 {
        let amp = rng.random_range(0.5..2.0);
        let width = rng.random_range(1.0..4.0);
        let seed = RadialField::sample(&grid, |r| amp * (-(r / width) * (r / width)).exp());
        let endpoint = find_descent_endpoint(&seed, &params).unwrap();
        let j_end = func.energy(&endpoint).unwrap().0.total;
        let mut past = endpoint.clone();
        past.scale(1.5);
        let j_past = func.energy(&past).unwrap().0.total;
        worst_end = worst_end.max(j_end);
        worst_past = worst_past.max(j_past);
    }

    let pass = min_j > 0.0 && worst_end <= -1.0 && worst_past < 0.0;
    let (in_time, dt) = within_budget(start, 120.0);
    conclude(
        NAME,
        pass && in_time,
        format!(
            "sphere minimum {min_j:.3e} at radius {rho:.3e} over 100 directions (want > 0), \
             worst endpoint J {worst_end:.3} (want <= -1), worst J past endpoint {worst_past:.3} \
             (want < 0); {dt:.2}s of 120s"
        ),
    );
}

// --- 7. end-to-end standing waves with grid/domain doubling ---------------

fn end_to_end(name: &str, alpha: f64) {
    let start = Instant::now();
    let params = reference_params(alpha);
    let options = SolverOptions::default();

    let solve = |radius: f64, n: usize| {
        let grid = RadialGrid::new(radius, n).unwrap();
        mountain_pass_solve(&grid, &params, &options).unwrap()
    };
    let base = solve(20.0, 511);
    let doubled = solve(40.0, 1023);
    let shift = (doubled.energy.total - base.energy.total).abs() / base.energy.total;

    let pass = base.converged
        && base.grad_norm <= 1e-6
        && base.residual_u <= 1e-5
        && base.residual_phi <= 1e-5
        && base.energy.total > 0.0
        && shift <= 1e-2;
    let (in_time, dt) = within_budget(start, 600.0);
    conclude(
        name,
        pass && in_time,
        format!(
            "converged={} in {} iters, |grad| {:.2e} (tol 1e-6), residuals {:.2e}/{:.2e} \
             (tol 1e-5), J {:.8} > 0, doubling shift {:.3e} (tol 1e-2); {dt:.1}s of 600s",
            base.converged,
            base.iterations,
            base.grad_norm,
            base.residual_u,
            base.residual_phi,
            base.energy.total,
            shift
        ),
    );
}

/// Purely local operator: the reference parameter set with α = 0.
#[test]
fn criterion_7a_end_to_end_local() {
    end_to_end("criterion-7a-end-to-end-local", 0.0);
}

/// Mixed operator with an attractive nonlocal part, α = −0.3.
#[test]
fn criterion_7b_end_to_end_mixed() {
    end_to_end("criterion-7b-end-to-end-mixed", -0.3);
}

// --- 8. linearized spectrum: oscillator ladder and coercivity velocity ----

/// The quantum-oscillator potential must reproduce its odd eigenvalue ladder
/// {3,7,11,15,19}; at N=32 the solver must agree with a hand-rolled Jacobi
/// eigensolver to 1e-10; deflated Rayleigh minimization must recover each
/// eigenvalue; and the computed c₀ must certify coercivity on 100 random
/// fields.
#[test]
fn criterion_8_spectrum() {
    const NAME: &str = "criterion-8-spectrum";
    let start = Instant::now();
    let params = oscillator_params();

    // (a) eigenvalue ladder at production resolution.
    let grid = RadialGrid::new(12.0, 255).unwrap();
    let res = eigen_decomposition(&grid, &params, 5).unwrap();
    let ladder = [3.0, 7.0, 11.0, 15.0, 19.0];
    let mut ladder_err = 0.0f64;
    for (got, want) in res.lambdas.iter().zip(&ladder) {
        ladder_err = ladder_err.max((got - want).abs() / want);
    }

    // (b) dense oracle at N=32: assemble the bilinear form in the orthonormal
    // mode basis and diagonalize it with cyclic Jacobi rotations.
    let small_grid = RadialGrid::new(12.0, 32).unwrap();
    let small = eigen_decomposition(&small_grid, &params, 5).unwrap();
    let n = small_grid.n;
    let nu = small_grid.mode_norm_sq();
    let basis: Vec<RadialField> = (0..n)
        .map(|i| {
            let mut modes = vec![0.0; n];
            modes[i] = 1.0;
            RadialField::from_modes(&small_grid, modes).unwrap()
        })
        .collect();
    let mut mat = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i..n {
            let b = bilinear_b_alpha_v(&basis[i], &basis[j], &params).unwrap() / nu;
            mat[i][j] = b;
            mat[j][i] = b;
        }
    }
    let oracle = jacobi_eigenvalues(mat);
    let mut oracle_err = 0.0f64;
    for (got, want) in small.lambdas.iter().zip(&oracle) {
        oracle_err = oracle_err.max((got - want).abs() / (1.0 + want.abs()));
    }

    // (c) deflated Rayleigh minimization re-derives each eigenvalue.
    let mut rayleigh_err = 0.0f64;
    for k in 1..=5 {
        rayleigh_err = rayleigh_err.max(rayleigh_min_check(&grid, &params, &res, k).unwrap());
    }

    // (d) the certified c₀ bounds the quadratic form on random fields in the
    // complement of the first k₀−1 eigenfields.
    let sampled = params.potential.sample(&grid.nodes).unwrap();
    let omega_sq = params.omega * params.omega;
    let nu = grid.mode_norm_sq();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut coercivity_ok = true;
    for _ in 0..100 {
        let mut modes: Vec<f64> = (0..grid.n)
            .map(|m| rng.random_range(-1.0..1.0) * (-(m as f64) / 24.0).exp())
            .collect();
        for e in &res.eigenfields[..res.k0 - 1] {
            let em = e.modes_vec();
            let dot: f64 = nu * modes.iter().zip(&em).map(|(a, b)| a * b).sum::<f64>();
            for (m, ev) in modes.iter_mut().zip(&em) {
                *m -= dot * ev;
            }
        }
        let u = RadialField::from_modes(&grid, modes).unwrap();
        let b = bilinear_b_alpha_v(&u, &u, &params).unwrap();
        let l2 = l2_norm_sq_modes(&u);
        let w2 = w_norm_sq(&u, &sampled);
        coercivity_ok &= b - omega_sq * l2 >= 0.5 * res.c0 * w2 - 1e-10 * (1.0 + w2);
    }

    let pass = ladder_err <= 1e-3 && oracle_err <= 1e-10 && rayleigh_err <= 1e-6 && coercivity_ok;
    let (in_time, dt) = within_budget(start, 120.0);
    conclude(
        NAME,
        pass && in_time,
        format!(
            "ladder error {ladder_err:.2e} (tol 1e-3), Jacobi-oracle disagreement {oracle_err:.2e} \
             (tol 1e-10), Rayleigh error {rayleigh_err:.2e} (tol 1e-6), c0={:.4} certified on \
             100 fields: {coercivity_ok}; {dt:.2}s of 120s",
            res.c0
        ),
    );
}

/// Cyclic Jacobi diagonalization of a symmetric matrix; test-local oracle.
#[allow(clippy::needless_range_loop)] // rotation kernel reads naturally indexed
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let fro: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= 1e-15 * fro {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

// --- 9. byte-level determinism of reports ----------------------------------

/// Two consecutive `solve` runs and two consecutive `verify` runs must emit
/// byte-identical stdout and byte-identical output files.
#[test]
fn criterion_9_deterministic_reports() {
    const NAME: &str = "criterion-9-determinism";
    let start = Instant::now();
    let base = tmpdir("det");
    let cfg = base.join("run.conf");
    std::fs::write(
        &cfg,
        "s = 0.5\nalpha = -0.3\np = 4.0\nomega = 0.3\n\
         potential.kind = constant\npotential.m = 1.0\ngrid.radius = 16.0\ngrid.n = 255\n",
    )
    .unwrap();

    let run = |sub: &str, out: &Path| -> (i32, Vec<u8>) {
        let o = kgm()
            .arg(sub)
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .output()
            .expect("spawn kgm");
        (o.status.code().unwrap_or(-1), o.stdout)
    };

    let mut pass = true;
    let mut detail = String::new();
    for (sub, files) in [
        ("solve", &["report.json", "u.csv", "phi.csv"][..]),
        ("verify", &["verify.json"][..]),
    ] {
        let d1 = base.join(format!("{sub}-1"));
        let d2 = base.join(format!("{sub}-2"));
        let (code1, stdout1) = run(sub, &d1);
        let (code2, stdout2) = run(sub, &d2);
        let codes_ok = code1 == 0 && code2 == 0;
        let stdout_ok = stdout1 == stdout2;
        let mut files_ok = true;
        for f in files {
            files_ok &= std::fs::read(d1.join(f)).unwrap() == std::fs::read(d2.join(f)).unwrap();
        }
        pass &= codes_ok && stdout_ok && files_ok;
        detail.push_str(&format!(
            "{sub}: exits {code1}/{code2}, stdout identical {stdout_ok}, files identical {files_ok}; "
        ));
    }

    let (in_time, dt) = within_budget(start, 120.0);
    conclude(NAME, pass && in_time, format!("{detail}{dt:.2}s of 120s"));
}
