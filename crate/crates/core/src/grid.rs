//! Radial collocation grid on the truncated ball and the field type living
//! on it.
//!
//! Radial functions on ℝ³ are truncated to the ball of radius R with a
//! Dirichlet condition at r = R and expanded in the sine basis
//!
//! ```text
//! φ_n(r) = sin(k_n r)/r,   k_n = nπ/R,   n = 1..N,
//! ```
//!
//! the radial Dirichlet eigenfunctions of −Δ. Node values and mode
//! coefficients are exchanged through the auxiliary function w(r) = r·u(r)
//! and the self-inverse DST-I pair
//!
//! ```text
//! c_n = 2/(N+1) Σ_j w_j sin(πnj/(N+1)),     w_j = Σ_n c_n sin(πnj/(N+1)),
//! ```
//!
//! at the equispaced nodes r_j = jR/(N+1). The transform is realized through
//! an odd-extended complex FFT of length 2(N+1), so a round trip costs
//! O(N log N) and reproduces the input to roundoff.
//!
//! Every unit mode has squared L²(ℝ³) norm ν = 2πR, and the quadrature rule
//! w_j = 4π r_j² · R/(N+1) integrates products of two basis functions
//! exactly (discrete sine orthogonality), which makes the quadrature and
//! Parseval L² norms agree to machine precision.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Immutable radial grid: geometry, frequencies, quadrature weights, and the
/// FFT plan backing the sine transforms. Construct once and share via `Arc`.
pub struct RadialGrid {
    /// Ball radius R.
    pub radius: f64,
    /// Number of interior nodes / retained modes.
    pub n: usize,
    /// Node spacing Δr = R/(N+1).
    pub dr: f64,
    /// Interior nodes r_j = jΔr, j = 1..N.
    pub nodes: Vec<f64>,
    /// Mode frequencies k_n = nπ/R, n = 1..N.
    pub frequencies: Vec<f64>,
    /// Quadrature weights w_j = 4π r_j² Δr.
    pub weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for RadialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGrid")
            .field("radius", &self.radius)
            .field("n", &self.n)
            .finish()
    }
}

impl RadialGrid {
    pub fn new(radius: f64, n: usize) -> Result<Arc<Self>> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!(
                "grid radius must be positive and finite, got {radius}"
            )));
        }
        if n < 8 {
            return Err(Error::Domain(format!("grid needs at least 8 modes, got {n}")));
        }
        let dr = radius / (n + 1) as f64;
        let nodes: Vec<f64> = (1..=n).map(|j| j as f64 * dr).collect();
        let frequencies: Vec<f64> = (1..=n)
            .map(|m| m as f64 * std::f64::consts::PI / radius)
            .collect();
        let weights: Vec<f64> = nodes
            .iter()
            .map(|&r| 4.0 * std::f64::consts::PI * r * r * dr)
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        Ok(Arc::new(RadialGrid {
            radius,
            n,
            dr,
            nodes,
            frequencies,
            weights,
            fft,
        }))
    }

    /// Squared L² norm of every unit mode: ν = 2πR.
    pub fn mode_norm_sq(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.radius
    }

    /// Plain sine sum S[x]_n = Σ_{j=1}^N x_j sin(πnj/(N+1)), its own inverse
    /// up to the factor (N+1)/2. Computed through the odd extension
    /// (0, x_1..x_N, 0, −x_N..−x_1) whose FFT has S[x] as −Im/2.
    pub fn sine_sum(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let len = 2 * (self.n + 1);
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        for (j, &v) in x.iter().enumerate() {
            buf[j + 1].re = v;
            buf[len - 1 - j].re = -v;
        }
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        self.fft.process_with_scratch(&mut buf, &mut scratch);
        (1..=self.n).map(|m| -0.5 * buf[m].im).collect()
    }

    /// Node values → mode coefficients.
    pub fn values_to_modes(&self, values: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = values
            .iter()
            .zip(&self.nodes)
            .map(|(&u, &r)| r * u)
            .collect();
        let mut c = self.sine_sum(&w);
        let scale = 2.0 / (self.n + 1) as f64;
        for v in &mut c {
            *v *= scale;
        }
        c
    }

    /// Mode coefficients → node values.
    pub fn modes_to_values(&self, modes: &[f64]) -> Vec<f64> {
        let w = self.sine_sum(modes);
        w.iter().zip(&self.nodes).map(|(&v, &r)| v / r).collect()
    }

    /// Two grids are interchangeable when geometry and resolution agree.
    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.n == other.n && self.radius == other.radius
    }
}

fn check_same_grid(a: &RadialGrid, b: &RadialGrid) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "R = {}, N = {} vs R = {}, N = {}",
            a.radius, a.n, b.radius, b.n
        )))
    }
}

/// Which representation of a field is current.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repr {
    Values,
    Modes,
    Both,
}

/// A radial field in dual representation: node values u(r_j) and sine-mode
/// coefficients c_n, with a flag tracking which side is current. Transforms
/// are explicit; accessors panic on a stale representation (programmer
/// error), mirroring the usual spectral-code idiom of syncing before use.
#[derive(Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    modes: Vec<f64>,
    repr: Repr,
}

impl fmt::Debug for RadialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialField")
            .field("grid", &self.grid)
            .field("repr", &self.repr)
            .finish()
    }
}

impl RadialField {
    /// Zero field.
    pub fn zeros(grid: &Arc<RadialGrid>) -> Self {
        RadialField {
            grid: grid.clone(),
            values: vec![0.0; grid.n],
            modes: vec![0.0; grid.n],
            repr: Repr::Both,
        }
    }

    /// Field from node values.
    pub fn from_values(grid: &Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "{} values for an N = {} grid",
                values.len(),
                grid.n
            )));
        }
        Ok(RadialField {
            grid: grid.clone(),
            modes: vec![0.0; grid.n],
            values,
            repr: Repr::Values,
        })
    }

    /// Field from mode coefficients.
    pub fn from_modes(grid: &Arc<RadialGrid>, modes: Vec<f64>) -> Result<Self> {
        if modes.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "{} modes for an N = {} grid",
                modes.len(),
                grid.n
            )));
        }
        Ok(RadialField {
            grid: grid.clone(),
            values: vec![0.0; grid.n],
            modes,
            repr: Repr::Modes,
        })
    }

    /// Sample a radial profile at the nodes.
    pub fn sample(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes.iter().map(|&r| f(r)).collect();
        RadialField {
            grid: grid.clone(),
            values,
            modes: vec![0.0; grid.n],
            repr: Repr::Values,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn repr(&self) -> Repr {
        self.repr
    }

    /// Make node values current (no-op if they already are).
    pub fn ensure_values(&mut self) {
        if self.repr == Repr::Modes {
            self.values = self.grid.modes_to_values(&self.modes);
            self.repr = Repr::Both;
        }
    }

    /// Make mode coefficients current (no-op if they already are).
    pub fn ensure_modes(&mut self) {
        if self.repr == Repr::Values {
            self.modes = self.grid.values_to_modes(&self.values);
            self.repr = Repr::Both;
        }
    }

    /// Current node values; panics if only modes are current.
    pub fn values(&self) -> &[f64] {
        assert!(
            self.repr != Repr::Modes,
            "field values are stale; call ensure_values() first"
        );
        &self.values
    }

    /// Current mode coefficients; panics if only values are current.
    pub fn modes(&self) -> &[f64] {
        assert!(
            self.repr != Repr::Values,
            "field modes are stale; call ensure_modes() first"
        );
        &self.modes
    }

    /// Node values, transforming a modes-only field on the fly.
    pub fn values_vec(&self) -> Vec<f64> {
        match self.repr {
            Repr::Modes => self.grid.modes_to_values(&self.modes),
            _ => self.values.clone(),
        }
    }

    /// Mode coefficients, transforming a values-only field on the fly.
    pub fn modes_vec(&self) -> Vec<f64> {
        match self.repr {
            Repr::Values => self.grid.values_to_modes(&self.values),
            _ => self.modes.clone(),
        }
    }

    /// Evaluate at the origin: u(0) = Σ c_n k_n (each mode sin(k r)/r → k).
    pub fn eval_origin(&self) -> f64 {
        let modes = self.modes_vec();
        modes
            .iter()
            .zip(&self.grid.frequencies)
            .map(|(&c, &k)| c * k)
            .sum()
    }

    /// Evaluate at an arbitrary radius 0 < r ≤ R from the modes.
    pub fn eval(&self, r: f64) -> f64 {
        if r == 0.0 {
            return self.eval_origin();
        }
        let modes = self.modes_vec();
        modes
            .iter()
            .zip(&self.grid.frequencies)
            .map(|(&c, &k)| c * (k * r).sin() / r)
            .sum()
    }

    /// In-place a·x + y on whichever representation both fields share.
    pub fn axpy(&mut self, a: f64, other: &RadialField) -> Result<()> {
        check_same_grid(&self.grid, &other.grid)?;
        // Work in modes: linear operations commute with the transform.
        self.ensure_modes();
        let om = other.modes_vec();
        for (x, y) in self.modes.iter_mut().zip(&om) {
            *x += a * y;
        }
        self.repr = Repr::Modes;
        Ok(())
    }

    /// In-place scale.
    pub fn scale(&mut self, a: f64) {
        match self.repr {
            Repr::Values => {
                for v in &mut self.values {
                    *v *= a;
                }
            }
            Repr::Modes => {
                for v in &mut self.modes {
                    *v *= a;
                }
            }
            Repr::Both => {
                for v in &mut self.values {
                    *v *= a;
                }
                for v in &mut self.modes {
                    *v *= a;
                }
            }
        }
    }

    /// Linear combination a·x + b·y as a new field (mode space).
    pub fn lin_comb(a: f64, x: &RadialField, b: f64, y: &RadialField) -> Result<RadialField> {
        check_same_grid(&x.grid, &y.grid)?;
        let xm = x.modes_vec();
        let ym = y.modes_vec();
        let modes = xm
            .iter()
            .zip(&ym)
            .map(|(&u, &v)| a * u + b * v)
            .collect();
        RadialField::from_modes(&x.grid, modes)
    }
}

/// Verify two fields share a grid (public helper for operator entry points).
pub fn require_same_grid(a: &RadialField, b: &RadialField) -> Result<()> {
    check_same_grid(a.grid(), b.grid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn naive_sine_sum(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (1..=n)
            .map(|m| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        v * (std::f64::consts::PI * (m * (j + 1)) as f64 / (n + 1) as f64).sin()
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn fft_sine_sum_matches_naive() {
        let grid = RadialGrid::new(10.0, 33).unwrap();
        let x: Vec<f64> = (0..33).map(|j| ((j * j + 1) as f64).sin()).collect();
        let fast = grid.sine_sum(&x);
        let slow = naive_sine_sum(&x);
        for (a, b) in fast.iter().zip(&slow) {
            assert_relative_eq!(a, b, epsilon = 1e-10, max_relative = 1e-10);
        }
    }

    #[test]
    fn first_mode_transforms_to_unit_coefficient() {
        let grid = RadialGrid::new(20.0, 127).unwrap();
        let k1 = grid.frequencies[0];
        let u = RadialField::sample(&grid, |r| (k1 * r).sin() / r);
        let modes = u.modes_vec();
        assert_relative_eq!(modes[0], 1.0, epsilon = 1e-12);
        for &c in &modes[1..] {
            assert!(c.abs() < 1e-12, "higher mode leaked: {c}");
        }
    }

    #[test]
    fn quadrature_weights_sum_to_ball_volume_with_exact_deficit() {
        let grid = RadialGrid::new(20.0, 255).unwrap();
        let total: f64 = grid.weights.iter().sum();
        let volume = 4.0 / 3.0 * std::f64::consts::PI * 20.0f64.powi(3);
        let n = 255.0f64;
        // The rule misses exactly (3N+2)/(2(N+1)²) of the volume (the r = R
        // endpoint carries no node).
        let deficit = (3.0 * n + 2.0) / (2.0 * (n + 1.0) * (n + 1.0));
        assert_relative_eq!(total / volume, 1.0 - deficit, epsilon = 1e-12);
        assert!((total - volume).abs() / volume < 0.006);
    }

    #[test]
    fn gaussian_modes_decay_below_1e10_well_before_half() {
        let grid = RadialGrid::new(20.0, 511).unwrap();
        let u = RadialField::sample(&grid, |r| (-r * r).exp());
        let modes = u.modes_vec();
        let c1 = modes[0].abs();
        let tail = modes[255..]
            .iter()
            .fold(0.0f64, |acc, &c| acc.max(c.abs()));
        assert!(tail / c1 < 1e-10, "tail/c1 = {:e}", tail / c1);
    }

    #[test]
    fn origin_evaluation_matches_profile() {
        let grid = RadialGrid::new(16.0, 255).unwrap();
        let u = RadialField::sample(&grid, |r| (-r * r).exp());
        assert_relative_eq!(u.eval_origin(), 1.0, epsilon = 1e-8);
        assert_relative_eq!(u.eval(1.5), (-2.25f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn grid_rejects_degenerate_arguments() {
        assert!(RadialGrid::new(0.0, 64).is_err());
        assert!(RadialGrid::new(-1.0, 64).is_err());
        assert!(RadialGrid::new(10.0, 4).is_err());
    }

    #[test]
    fn mismatched_grids_are_refused() {
        let g1 = RadialGrid::new(10.0, 32).unwrap();
        let g2 = RadialGrid::new(10.0, 64).unwrap();
        let a = RadialField::zeros(&g1);
        let b = RadialField::zeros(&g2);
        assert!(require_same_grid(&a, &b).is_err());
    }

    proptest! {
        /// values → modes → values is the identity to 1e-12 relative.
        #[test]
        fn transform_round_trip(seed in 0u64..1000, n_choice in 0usize..4) {
            use rand::{Rng, SeedableRng};
            let n = [16, 33, 64, 127][n_choice];
            let grid = RadialGrid::new(12.0, n).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let modes = grid.values_to_modes(&values);
            let back = grid.modes_to_values(&modes);
            let scale = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            for (a, b) in values.iter().zip(&back) {
                prop_assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
            }
        }
    }
}
