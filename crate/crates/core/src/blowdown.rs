//! Rescaling of a solved flow onto the unit disc and the Euler-limit checks
//! on the rescaled fields.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{
    annulus_integral, d_s, dirichlet_integral, write_field, FieldFile, FieldIoError, GridError, ScalarField,
    VectorField,
};
use crate::solver::{FlowState, PressureField};

pub const DEFAULT_DELTA0: f64 = 0.05;
pub const VELOCITY_FILE: &str = "velocity_rescaled.field";
pub const PRESSURE_FILE: &str = "pressure_rescaled.field";

#[derive(Debug, Error)]
pub enum BlowDownError {
    #[error("blow-down needs lambda > 0")]
    ZeroLambda,
    #[error("delta0 = {0} must lie in (0, 1/2)")]
    BadDelta(f64),
    #[error("no grid circle inside (1/2, {0})")]
    NoCandidate(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Io(#[from] FieldIoError),
}

/// Velocity and pressure on `1/R <= |z| <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rescaled {
    pub v: VectorField,
    pub p: ScalarField,
}

/// `v(z) = w(R z) / lambda`, `p~(z) = p(R z) / lambda^2`.
pub fn rescale_to_unit_disc(state: &FlowState, p: &PressureField) -> Result<Rescaled, BlowDownError> {
    rescale_fields(&state.velocity(), &p.p, state.lambda)
}

pub fn rescale_fields(w: &VectorField, p: &ScalarField, lambda: f64) -> Result<Rescaled, BlowDownError> {
    if lambda <= 0.0 {
        return Err(BlowDownError::ZeroLambda);
    }
    if w.grid() != p.grid() {
        return Err(BlowDownError::GridMismatch);
    }
    let g = Arc::new(w.grid().scaled(w.grid().r_outer()));
    let v = w.scale(1.0 / lambda).with_grid(g.clone())?;
    let p = p.map(|x| x / (lambda * lambda)).with_grid(g)?;
    Ok(Rescaled { v, p })
}

fn check_delta(delta0: f64) -> Result<(), BlowDownError> {
    if !(delta0 > 0.0 && delta0 < 0.5) {
        return Err(BlowDownError::BadDelta(delta0));
    }
    Ok(())
}

/// `max - min` of `p` over nodes with `r_lo <= r <= r_hi`; 0 if none.
pub fn pressure_oscillation(p: &ScalarField, r_lo: f64, r_hi: f64) -> f64 {
    let g = p.grid();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &r) in g.radii().iter().enumerate() {
        if r < r_lo || r > r_hi {
            continue;
        }
        for j in 0..g.n_theta() {
            let v = p.at(i, j);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    pub epsilon_sq: f64,
    pub pressure_osc: f64,
    pub osc_ratio: f64,
    /// `epsilon_sq = 0`; the ratio is reported as 0
    pub flagged_zero: bool,
}

/// Pressure oscillation on `1/2 <= |z| <= 1 - delta0` against the Dirichlet
/// integral of `v` over the whole rescaled annulus.
pub fn euler_oscillation_ratio(v: &VectorField, p: &ScalarField, delta0: f64) -> Result<Oscillation, BlowDownError> {
    check_delta(delta0)?;
    let g = v.grid();
    let epsilon_sq = dirichlet_integral(v, g.r_inner(), g.r_outer())?;
    let pressure_osc = pressure_oscillation(p, 0.5, 1.0 - delta0);
    let flagged_zero = epsilon_sq == 0.0;
    Ok(Oscillation {
        epsilon_sq,
        pressure_osc,
        osc_ratio: if flagged_zero { 0.0 } else { pressure_osc / epsilon_sq },
        flagged_zero,
    })
}

/// `max_j (|v - e1| + |p - pbar|)` on grid circle `i`.
pub fn circle_defect(v: &VectorField, p: &ScalarField, i: usize) -> f64 {
    let g = v.grid();
    let nt = g.n_theta();
    let mean = (0..nt).map(|j| p.at(i, j)).sum::<f64>() / nt as f64;
    (0..nt)
        .map(|j| {
            let [a, b] = v.at(i, j);
            (a - 1.0).hypot(b) + (p.at(i, j) - mean).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodCircle {
    pub radius: f64,
    pub defect: f64,
    /// share of candidate circles whose defect is within twice the minimum
    pub near_min_fraction: f64,
    pub candidates: usize,
}

/// Grid circle in `(1/2, 1 - delta0)` with the smallest defect; ties go to the
/// smallest radius.
pub fn find_good_radius(v: &VectorField, p: &ScalarField, delta0: f64) -> Result<GoodCircle, BlowDownError> {
    check_delta(delta0)?;
    if v.grid() != p.grid() {
        return Err(BlowDownError::GridMismatch);
    }
    let g = v.grid();
    let hi = 1.0 - delta0;
    let cand: Vec<(f64, f64)> = g
        .radii()
        .iter()
        .enumerate()
        .filter(|(_, &r)| r > 0.5 && r < hi)
        .map(|(i, &r)| (r, circle_defect(v, p, i)))
        .collect();
    let &(radius, defect) = cand
        .iter()
        .fold(None, |best: Option<&(f64, f64)>, c| match best {
            Some(b) if b.1 <= c.1 => Some(b),
            _ => Some(c),
        })
        .ok_or(BlowDownError::NoCandidate(hi))?;
    let near = cand.iter().filter(|c| c.1 <= 2.0 * defect).count();
    Ok(GoodCircle {
        radius,
        defect,
        near_min_fraction: near as f64 / cand.len() as f64,
        candidates: cand.len(),
    })
}

/// `int |v - e1|^2 / (1 - r)^2` over `1/2 <= r <= r_{N-2}` divided by
/// `int |d_r v|^2` over `1/2 <= r <= 1`; 0 when both vanish.
pub fn hardy_boundary_ratio(v: &VectorField) -> Result<f64, BlowDownError> {
    let g = v.grid();
    let n = g.n_r();
    let nt = g.n_theta();
    let top = g.radius(n - 2);
    let lhs_dens: Vec<f64> = (0..g.len())
        .map(|k| {
            let i = k / nt;
            if i == n - 1 {
                return 0.0;
            }
            let d = 1.0 - g.radius(i);
            ((v.x()[k] - 1.0).powi(2) + v.y()[k].powi(2)) / (d * d)
        })
        .collect();
    let dx = d_s(&ScalarField::new(g.clone(), v.x().to_vec())?);
    let dy = d_s(&ScalarField::new(g.clone(), v.y().to_vec())?);
    let rhs_dens: Vec<f64> = (0..g.len())
        .map(|k| {
            let r = g.radius(k / nt);
            (dx.values()[k].powi(2) + dy.values()[k].powi(2)) / (r * r)
        })
        .collect();
    let lhs = annulus_integral(&ScalarField::new(g.clone(), lhs_dens)?, 0.5, top)?;
    let rhs = annulus_integral(&ScalarField::new(g.clone(), rhs_dens)?, 0.5, g.r_outer())?;
    Ok(if rhs == 0.0 && lhs == 0.0 { 0.0 } else { lhs / rhs })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowDownReport {
    pub lambda: f64,
    pub r_outer: f64,
    pub delta0: f64,
    pub epsilon_sq: f64,
    pub pressure_osc: f64,
    pub osc_ratio: f64,
    pub osc_flagged_zero: bool,
    pub good_radius: f64,
    pub good_circle_defect: f64,
    /// `good_circle_defect / epsilon_sq`, 0 when `epsilon_sq = 0`
    pub defect_ratio: f64,
    pub near_min_fraction: f64,
    pub hardy_ratio: f64,
}

pub fn blow_down(
    state: &FlowState,
    p: &PressureField,
    delta0: f64,
) -> Result<(BlowDownReport, Rescaled), BlowDownError> {
    let sc = rescale_to_unit_disc(state, p)?;
    let osc = euler_oscillation_ratio(&sc.v, &sc.p, delta0)?;
    let good = find_good_radius(&sc.v, &sc.p, delta0)?;
    let hardy = hardy_boundary_ratio(&sc.v)?;
    let report = BlowDownReport {
        lambda: state.lambda,
        r_outer: state.grid().r_outer(),
        delta0,
        epsilon_sq: osc.epsilon_sq,
        pressure_osc: osc.pressure_osc,
        osc_ratio: osc.osc_ratio,
        osc_flagged_zero: osc.flagged_zero,
        good_radius: good.radius,
        good_circle_defect: good.defect,
        defect_ratio: if osc.flagged_zero {
            0.0
        } else {
            good.defect / osc.epsilon_sq
        },
        near_min_fraction: good.near_min_fraction,
        hardy_ratio: hardy,
    };
    log::debug!(
        "blow-down lambda={} R={}: eps^2={:e} osc ratio={:e} defect ratio={:e}",
        report.lambda,
        report.r_outer,
        report.epsilon_sq,
        report.osc_ratio,
        report.defect_ratio
    );
    Ok((report, sc))
}

/// Write the rescaled velocity and pressure into `dir`.
pub fn export_rescaled(dir: &Path, sc: &Rescaled) -> Result<(), BlowDownError> {
    std::fs::create_dir_all(dir).map_err(|source| FieldIoError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    write_field(&dir.join(VELOCITY_FILE), &FieldFile::Vector(sc.v.clone()))?;
    write_field(&dir.join(PRESSURE_FILE), &FieldFile::Scalar(sc.p.clone()))?;
    Ok(())
}
