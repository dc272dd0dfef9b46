use std::sync::Arc;

use super::{BoundaryData, SolveConfig};
use crate::grid::{PolarGrid, ScalarField};

/// Manufactured solution `psi* = lambda f(r) sin(theta)` with
/// `f(r) = (r - 1)^2 (R - r)^2 / (R - 1)^4`, which vanishes to second order on
/// both circles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution {
    pub lambda: f64,
    pub r_outer: f64,
}

/// Coefficients of `c[0] + c[1] r + ... + c[4] r^4`.
type Poly = [f64; 5];

fn eval(c: &Poly, r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * r + a)
}

fn deriv(c: &Poly) -> Poly {
    [c[1], 2.0 * c[2], 3.0 * c[3], 4.0 * c[4], 0.0]
}

impl ManufacturedSolution {
    pub fn new(lambda: f64, r_outer: f64) -> Self {
        Self { lambda, r_outer }
    }

    fn profile(&self) -> Poly {
        // (r - 1)^2 (R - r)^2 = ((r - 1)(R - r))^2 with (r - 1)(R - r) = -r^2 + (R + 1) r - R
        let big = self.r_outer;
        let q = [-big, big + 1.0, -1.0];
        let scale = self.lambda / (big - 1.0).powi(4);
        let mut c = [0.0; 5];
        for (a, qa) in q.iter().enumerate() {
            for (b, qb) in q.iter().enumerate() {
                c[a + b] += qa * qb * scale;
            }
        }
        c
    }

    /// `f, f', f'', f''', f''''` at `r`.
    fn radial(&self, r: f64) -> [f64; 5] {
        let mut c = self.profile();
        let mut out = [0.0; 5];
        for o in &mut out {
            *o = eval(&c, r);
            c = deriv(&c);
        }
        out
    }

    /// `omega* = g(r) sin(theta)`, `g = f'' + f'/r - f/r^2`; returns `(g, g', g'')`.
    fn vorticity_profile(&self, r: f64) -> (f64, f64, f64) {
        let [f, f1, f2, f3, f4] = self.radial(r);
        let g = f2 + f1 / r - f / (r * r);
        let g1 = f3 + f2 / r - 2.0 * f1 / (r * r) + 2.0 * f / r.powi(3);
        let g2 = f4 + f3 / r - 3.0 * f2 / (r * r) + 6.0 * f1 / r.powi(3) - 6.0 * f / r.powi(4);
        (g, g1, g2)
    }

    pub fn psi(&self, grid: Arc<PolarGrid>) -> ScalarField {
        ScalarField::from_polar(grid, |r, t| self.radial(r)[0] * t.sin())
    }

    pub fn omega(&self, grid: Arc<PolarGrid>) -> ScalarField {
        ScalarField::from_polar(grid, |r, t| self.vorticity_profile(r).0 * t.sin())
    }

    /// `S = Delta omega* - w* . grad omega*`.
    pub fn source(&self, grid: Arc<PolarGrid>) -> ScalarField {
        ScalarField::from_polar(grid, |r, t| {
            let [f, f1, ..] = self.radial(r);
            let (g, g1, g2) = self.vorticity_profile(r);
            let lap = (g2 + g1 / r - g / (r * r)) * t.sin();
            let adv = (f * g1 - f1 * g) / r * t.sin() * t.cos();
            lap - adv
        })
    }

    /// Solver configuration for this manufactured problem on `grid`.
    pub fn config(&self, grid: &Arc<PolarGrid>) -> SolveConfig {
        let mut cfg = SolveConfig::new(self.lambda);
        cfg.mms_source = Some(self.source(grid.clone()));
        cfg.boundary = Some(BoundaryData::no_slip(grid));
        cfg
    }
}
