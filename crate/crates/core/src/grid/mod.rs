//! Log-polar annular grids, nodal fields, and the discrete calculus on them.
//!
//! Nodes sit at `r_i = r_inner * exp(i * h_s)` and `theta_j = 2*pi*j / n_theta`.
//! All derivative stencils act in the computational coordinates `(s, theta)`
//! with `s = ln r`, which turns the Laplacian into `r^-2 (f_ss + f_thth)`.

mod calculus;
mod interp;
mod io;
mod quadrature;

use std::f64::consts::PI;
use std::sync::Arc;

use thiserror::Error;

pub use calculus::{
    curl, d_s, d_theta, divergence, gradient, laplacian, vector_gradient, velocity_from_stream, GradientTensor,
};
pub use interp::{interpolate_scalar, interpolate_vector};
pub use io::{read_field, write_field, FieldFile, FieldIoError};
pub(crate) use quadrature::interp_profile;
pub use quadrature::{
    annulus_integral, circle_average, circle_average_vector, circle_integrand_profile, dirichlet_integral,
};

pub const MIN_NODES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("radial node count {0} is below the minimum of {MIN_NODES}")]
    TooFewRadial(usize),
    #[error("angular node count {0} must be even and at least {MIN_NODES}")]
    BadAngular(usize),
    #[error("outer radius {0} must exceed 1")]
    BadOuterRadius(f64),
    #[error("radius {r} outside [{lo}, {hi}]")]
    RadiusOutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("inverted or degenerate radial bounds [{0}, {1}]")]
    InvertedBounds(f64, f64),
    #[error("field has {got} values, grid expects {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("field contains a non-finite value at node {0}")]
    NonFinite(usize),
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Annular log-polar mesh over `r_inner <= r <= r_outer`.
///
/// Grids built by [`PolarGrid::new`] always have `r_inner = 1` (the obstacle).
/// [`PolarGrid::scaled`] produces the same topology with all radii divided by a
/// length scale, which is how the unit-disc blow-down is represented.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    n_r: usize,
    n_theta: usize,
    radii: Vec<f64>,
    h_s: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl PolarGrid {
    pub fn new(n_r: usize, n_theta: usize, r_outer: f64) -> Result<Self, GridError> {
        if n_r < MIN_NODES {
            return Err(GridError::TooFewRadial(n_r));
        }
        if n_theta < MIN_NODES || !n_theta.is_multiple_of(2) {
            return Err(GridError::BadAngular(n_theta));
        }
        if !(r_outer > 1.0) || !r_outer.is_finite() {
            return Err(GridError::BadOuterRadius(r_outer));
        }
        let h_s = r_outer.ln() / (n_r - 1) as f64;
        let mut radii: Vec<f64> = (0..n_r).map(|i| (i as f64 * h_s).exp()).collect();
        radii[0] = 1.0;
        radii[n_r - 1] = r_outer;
        let (cos, sin) = angular_tables(n_theta);
        Ok(Self {
            n_r,
            n_theta,
            radii,
            h_s,
            cos,
            sin,
        })
    }

    /// Same node topology with every radius divided by `length`.
    pub fn scaled(&self, length: f64) -> Self {
        Self {
            radii: self.radii.iter().map(|r| r / length).collect(),
            ..self.clone()
        }
    }

    /// Grid with `(2 n_r - 1, 2 n_theta)` nodes containing every node of `self`.
    pub fn refined(&self) -> Self {
        let mut g = Self::new(2 * self.n_r - 1, 2 * self.n_theta, self.r_outer() / self.r_inner())
            .expect("refinement of a valid grid is valid");
        if self.r_inner() != 1.0 {
            g = g.scaled(1.0 / self.r_inner());
        }
        g
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    pub fn r_inner(&self) -> f64 {
        self.radii[0]
    }

    pub fn r_outer(&self) -> f64 {
        self.radii[self.n_r - 1]
    }

    /// Uniform spacing in `s = ln r`.
    pub fn h_s(&self) -> f64 {
        self.h_s
    }

    pub fn h_theta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn cos(&self, j: usize) -> f64 {
        self.cos[j]
    }

    pub fn sin(&self, j: usize) -> f64 {
        self.sin[j]
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    #[inline]
    pub fn jp(&self, j: usize) -> usize {
        if j + 1 == self.n_theta {
            0
        } else {
            j + 1
        }
    }

    #[inline]
    pub fn jm(&self, j: usize) -> usize {
        if j == 0 {
            self.n_theta - 1
        } else {
            j - 1
        }
    }

    /// Cartesian coordinates of node `(i, j)`.
    pub fn xy(&self, i: usize, j: usize) -> (f64, f64) {
        let r = self.radii[i];
        (r * self.cos[j], r * self.sin[j])
    }

    /// Index of the node `j'` mirrored across the x-axis (`theta -> -theta`).
    pub fn mirror(&self, j: usize) -> usize {
        (self.n_theta - j) % self.n_theta
    }

    pub(crate) fn check_radius(&self, r: f64) -> Result<(), GridError> {
        let (lo, hi) = (self.r_inner(), self.r_outer());
        // relative slack so that radii reconstructed from logs still land inside
        let eps = 1e-12 * hi;
        if !(r >= lo - eps && r <= hi + eps) {
            return Err(GridError::RadiusOutOfRange { r, lo, hi });
        }
        Ok(())
    }

    /// Locate `r` as `(i, t)` with `ln r = (1 - t) s_i + t s_{i+1}`.
    pub(crate) fn locate(&self, r: f64) -> Result<(usize, f64), GridError> {
        self.check_radius(r)?;
        let s = (r / self.r_inner()).ln().max(0.0);
        let x = (s / self.h_s).min((self.n_r - 1) as f64);
        let mut i = x.floor() as usize;
        if i >= self.n_r - 1 {
            i = self.n_r - 2;
        }
        Ok((i, (x - i as f64).clamp(0.0, 1.0)))
    }

    /// Index of the grid radius nearest to `r` in log distance.
    pub fn nearest_radius_index(&self, r: f64) -> Result<usize, GridError> {
        let (i, t) = self.locate(r)?;
        Ok(if t > 0.5 { i + 1 } else { i })
    }
}

fn angular_tables(n_theta: usize) -> (Vec<f64>, Vec<f64>) {
    // exact mirror symmetry about theta = 0
    let mut cos = vec![0.0; n_theta];
    let mut sin = vec![0.0; n_theta];
    for j in 0..=n_theta / 2 {
        let th = 2.0 * PI * j as f64 / n_theta as f64;
        cos[j] = th.cos();
        sin[j] = th.sin();
        if j > 0 && j < n_theta / 2 {
            cos[n_theta - j] = cos[j];
            sin[n_theta - j] = -sin[j];
        }
    }
    sin[n_theta / 2] = 0.0;
    (cos, sin)
}

/// Build a log-polar grid with `n_r` radial and `n_theta` angular nodes out to `r_outer`.
pub fn build_grid(n_r: usize, n_theta: usize, r_outer: f64) -> Result<PolarGrid, GridError> {
    PolarGrid::new(n_r, n_theta, r_outer)
}

/// Scalar nodal values in radial-major layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<PolarGrid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<PolarGrid>, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                got: values.len(),
                expected: grid.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite(k));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<PolarGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Sample `f(x, y)` at every node.
    pub fn from_fn(grid: Arc<PolarGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_r() {
            for j in 0..grid.n_theta() {
                let (x, y) = grid.xy(i, j);
                values.push(f(x, y));
            }
        }
        Self { grid, values }
    }

    /// Sample `f(r, theta)` at every node.
    pub fn from_polar(grid: Arc<PolarGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_r() {
            for j in 0..grid.n_theta() {
                values.push(f(grid.radius(i), grid.theta(j)));
            }
        }
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: Arc<PolarGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Same values viewed on another grid of identical shape.
    pub fn with_grid(&self, grid: Arc<PolarGrid>) -> Result<Self, GridError> {
        if grid.n_r() != self.grid.n_r() || grid.n_theta() != self.grid.n_theta() {
            return Err(GridError::GridMismatch);
        }
        Ok(Self::from_raw(grid, self.values.clone()))
    }
}

/// Vector field stored as Cartesian components at polar nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Arc<PolarGrid>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: Arc<PolarGrid>, x: Vec<f64>, y: Vec<f64>) -> Result<Self, GridError> {
        for comp in [&x, &y] {
            if comp.len() != grid.len() {
                return Err(GridError::LengthMismatch {
                    got: comp.len(),
                    expected: grid.len(),
                });
            }
            if let Some(k) = comp.iter().position(|v| !v.is_finite()) {
                return Err(GridError::NonFinite(k));
            }
        }
        Ok(Self { grid, x, y })
    }

    pub fn zeros(grid: Arc<PolarGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            x: vec![0.0; n],
            y: vec![0.0; n],
        }
    }

    pub fn constant(grid: Arc<PolarGrid>, c: [f64; 2]) -> Self {
        let n = grid.len();
        Self {
            grid,
            x: vec![c[0]; n],
            y: vec![c[1]; n],
        }
    }

    /// Sample `f(x, y) -> [w1, w2]` at every node.
    pub fn from_fn(grid: Arc<PolarGrid>, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let n = grid.len();
        let (mut x, mut y) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..grid.n_r() {
            for j in 0..grid.n_theta() {
                let (px, py) = grid.xy(i, j);
                let w = f(px, py);
                x.push(w[0]);
                y.push(w[1]);
            }
        }
        Self { grid, x, y }
    }

    pub(crate) fn from_raw(grid: Arc<PolarGrid>, x: Vec<f64>, y: Vec<f64>) -> Self {
        debug_assert_eq!(x.len(), grid.len());
        debug_assert_eq!(y.len(), grid.len());
        Self { grid, x, y }
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.grid
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn components_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.x, &mut self.y)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        let k = self.grid.index(i, j);
        [self.x[k], self.y[k]]
    }

    /// Component along `e_r` at every node.
    pub fn radial(&self) -> ScalarField {
        let g = &self.grid;
        let mut out = Vec::with_capacity(g.len());
        for i in 0..g.n_r() {
            for j in 0..g.n_theta() {
                let k = g.index(i, j);
                out.push(g.cos(j) * self.x[k] + g.sin(j) * self.y[k]);
            }
        }
        ScalarField::from_raw(g.clone(), out)
    }

    /// Component along `e_theta` at every node.
    pub fn azimuthal(&self) -> ScalarField {
        let g = &self.grid;
        let mut out = Vec::with_capacity(g.len());
        for i in 0..g.n_r() {
            for j in 0..g.n_theta() {
                let k = g.index(i, j);
                out.push(-g.sin(j) * self.x[k] + g.cos(j) * self.y[k]);
            }
        }
        ScalarField::from_raw(g.clone(), out)
    }

    pub fn magnitude_sq(&self) -> ScalarField {
        ScalarField::from_raw(
            self.grid.clone(),
            self.x.iter().zip(&self.y).map(|(a, b)| a * a + b * b).collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.x.iter().zip(&self.y).fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_raw(
            self.grid.clone(),
            self.x.iter().map(|v| v * c).collect(),
            self.y.iter().map(|v| v * c).collect(),
        )
    }

    pub fn with_grid(&self, grid: Arc<PolarGrid>) -> Result<Self, GridError> {
        if grid.n_r() != self.grid.n_r() || grid.n_theta() != self.grid.n_theta() {
            return Err(GridError::GridMismatch);
        }
        Ok(Self::from_raw(grid, self.x.clone(), self.y.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(build_grid(9, 8, 1.0), Err(GridError::BadOuterRadius(1.0)));
        assert_eq!(build_grid(9, 8, 0.5), Err(GridError::BadOuterRadius(0.5)));
        assert_eq!(build_grid(9, 9, 4.0), Err(GridError::BadAngular(9)));
        assert_eq!(build_grid(9, 6, 4.0), Err(GridError::BadAngular(6)));
        assert_eq!(build_grid(7, 8, 4.0), Err(GridError::TooFewRadial(7)));
    }

    #[test]
    fn radii_are_log_uniform() {
        let e = std::f64::consts::E;
        let g = build_grid(9, 16, e).unwrap();
        for i in 0..9 {
            let expect = (i as f64 / 8.0).exp();
            assert!((g.radius(i) - expect).abs() < 1e-14);
        }
        let q = (1.0f64 / 8.0).exp();
        for w in g.radii().windows(2) {
            assert!((w[1] / w[0] - q).abs() < 1e-12);
        }
    }

    #[test]
    fn large_grid_endpoints_and_midpoint() {
        let g = build_grid(129, 128, 40.0).unwrap();
        assert_eq!(g.radius(0), 1.0);
        assert_eq!(g.radius(128), 40.0);
        // independent evaluation: sqrt(40)
        assert!((g.radius(64) - 40f64.sqrt()).abs() < 1e-13);
        assert!((g.radius(64) - 6.324_555_320_336_759).abs() < 1e-13);
    }

    #[test]
    fn refinement_nests_coarse_nodes() {
        let g = build_grid(17, 16, 30.0).unwrap();
        let f = g.refined();
        assert_eq!((f.n_r(), f.n_theta()), (33, 32));
        for i in 0..g.n_r() {
            assert!((f.radius(2 * i) / g.radius(i) - 1.0).abs() < 1e-13);
        }
        for j in 0..g.n_theta() {
            assert!((f.theta(2 * j) - g.theta(j)).abs() < 1e-15);
        }
    }

    #[test]
    fn scaled_grid_keeps_topology() {
        let g = build_grid(17, 16, 30.0).unwrap();
        let s = g.scaled(30.0);
        assert_eq!(s.r_outer(), 1.0);
        assert!((s.r_inner() - 1.0 / 30.0).abs() < 1e-16);
        assert_eq!(s.h_s(), g.h_s());
        let r = s.refined();
        assert!((r.r_inner() - s.r_inner()).abs() < 1e-15);
        assert!((r.r_outer() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn locate_and_mirror() {
        let g = build_grid(9, 8, std::f64::consts::E).unwrap();
        let (i, t) = g.locate((0.3f64 / 8.0 + 2.0 / 8.0).exp()).unwrap();
        assert_eq!(i, 2);
        assert!((t - 0.3).abs() < 1e-10);
        assert!(g.locate(0.9).is_err());
        assert_eq!(g.mirror(0), 0);
        assert_eq!(g.mirror(1), 7);
        assert_eq!(g.mirror(4), 4);
    }

    #[test]
    fn fields_reject_bad_values() {
        let g = Arc::new(build_grid(8, 8, 2.0).unwrap());
        assert!(ScalarField::new(g.clone(), vec![0.0; 63]).is_err());
        let mut v = vec![0.0; 64];
        v[5] = f64::NAN;
        assert_eq!(ScalarField::new(g.clone(), v), Err(GridError::NonFinite(5)));
        assert!(VectorField::new(g, vec![0.0; 64], vec![0.0; 63]).is_err());
    }
}
