//! Stationary Navier-Stokes past the unit disc in stream-function/vorticity
//! form, solved by damped Newton with a Picard warm-up.

mod assembly;
mod io;
mod kinematics;
mod linear;
mod mms;
mod pressure;

use std::sync::Arc;

use log::{debug, info};
use thiserror::Error;

use crate::grid::{
    interpolate_scalar, velocity_from_stream, GradientTensor, GridError, PolarGrid, ScalarField, VectorField,
};
use crate::reference::potential_flow_guess;
use assembly::System;

pub use io::{load_state, save_state, StateMeta};
pub use mms::ManufacturedSolution;
pub use pressure::{momentum_residual, recover_pressure, PressureField, GAUGE};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("linear solve failed: {0}")]
    Linear(String),
    #[error("Newton did not converge in {iters} iterations (best residual {})", .best.residual_norm)]
    NonConvergence { iters: usize, best: Box<FlowState> },
    #[error("line search diverged at iteration {iter} (residual {residual:e})")]
    DivergingLineSearch {
        iter: usize,
        residual: f64,
        best: Box<FlowState>,
    },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

/// Dirichlet data on one boundary circle, per angular node.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleTrace {
    pub psi: Vec<f64>,
    pub dpsi_ds: Vec<f64>,
    pub velocity: Vec<[f64; 2]>,
}

impl CircleTrace {
    pub fn zeros(n_theta: usize) -> Self {
        Self {
            psi: vec![0.0; n_theta],
            dpsi_ds: vec![0.0; n_theta],
            velocity: vec![[0.0; 2]; n_theta],
        }
    }

    fn len_ok(&self, n: usize) -> bool {
        self.psi.len() == n && self.dpsi_ds.len() == n && self.velocity.len() == n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub inner: CircleTrace,
    pub outer: CircleTrace,
}

impl BoundaryData {
    /// No slip on the obstacle, `w = (lambda, 0)` on the outer circle.
    pub fn uniform_stream(grid: &PolarGrid, lambda: f64) -> Self {
        let n = grid.n_theta();
        let r = grid.r_outer();
        let s: Vec<f64> = (0..n).map(|j| lambda * r * grid.sin(j)).collect();
        Self {
            inner: CircleTrace::zeros(n),
            outer: CircleTrace {
                psi: s.clone(),
                dpsi_ds: s,
                velocity: vec![[lambda, 0.0]; n],
            },
        }
    }

    /// No slip on both circles.
    pub fn no_slip(grid: &PolarGrid) -> Self {
        Self {
            inner: CircleTrace::zeros(grid.n_theta()),
            outer: CircleTrace::zeros(grid.n_theta()),
        }
    }

    /// Traces of an arbitrary stream function given with its `s`-derivative.
    pub fn from_stream(
        grid: &PolarGrid,
        psi: impl Fn(f64, f64) -> f64,
        dpsi_ds: impl Fn(f64, f64) -> f64,
        velocity: impl Fn(f64, f64) -> [f64; 2],
    ) -> Self {
        let trace = |r: f64| {
            let n = grid.n_theta();
            CircleTrace {
                psi: (0..n).map(|j| psi(r, grid.theta(j))).collect(),
                dpsi_ds: (0..n).map(|j| dpsi_ds(r, grid.theta(j))).collect(),
                velocity: (0..n).map(|j| velocity(r, grid.theta(j))).collect(),
            }
        };
        Self {
            inner: trace(grid.r_inner()),
            outer: trace(grid.r_outer()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub lambda: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub damping: f64,
    pub picard_warmup: usize,
    pub mms_source: Option<ScalarField>,
    /// Replaces the uniform-stream boundary data when set.
    pub boundary: Option<BoundaryData>,
}

impl SolveConfig {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            newton_tol: 1e-10,
            max_newton: 50,
            damping: 1.0,
            picard_warmup: 3,
            mms_source: None,
            boundary: None,
        }
    }

    pub fn validate(&self, grid: &PolarGrid) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidConfig(m.into()));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be finite and >= 0");
        }
        if !(self.newton_tol > 0.0) {
            return bad("newton_tol must be > 0");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad("damping must lie in (0, 1]");
        }
        if let Some(s) = &self.mms_source {
            if **s.grid() != *grid {
                return bad("mms_source lives on a different grid");
            }
        }
        if let Some(b) = &self.boundary {
            if !b.inner.len_ok(grid.n_theta()) || !b.outer.len_ok(grid.n_theta()) {
                return bad("boundary traces must have n_theta entries");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub psi: ScalarField,
    pub omega: ScalarField,
    pub lambda: f64,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub boundary: BoundaryData,
    /// Max-norm residual after each accepted step, starting with the guess.
    pub residual_history: Vec<f64>,
}

impl FlowState {
    /// Wrap given fields as an (unsolved) state; `residual_norm` is NaN.
    pub fn from_fields(
        psi: ScalarField,
        omega: ScalarField,
        lambda: f64,
        boundary: BoundaryData,
    ) -> Result<Self, SolverError> {
        if psi.grid() != omega.grid() {
            return Err(GridError::GridMismatch.into());
        }
        let n = psi.grid().n_theta();
        if !boundary.inner.len_ok(n) || !boundary.outer.len_ok(n) {
            return Err(SolverError::InvalidConfig(
                "boundary traces must have n_theta entries".into(),
            ));
        }
        Ok(Self {
            psi,
            omega,
            lambda,
            residual_norm: f64::NAN,
            newton_iters: 0,
            boundary,
            residual_history: Vec::new(),
        })
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        self.psi.grid()
    }

    /// `velocity_from_stream(psi)` with the two boundary circles replaced by
    /// the imposed boundary velocity.
    pub fn velocity(&self) -> VectorField {
        let g = self.grid().clone();
        let mut w = velocity_from_stream(&self.psi);
        let (nr, nt) = (g.n_r(), g.n_theta());
        let (wx, wy) = w.components_mut();
        for (i, trace) in [(0, &self.boundary.inner), (nr - 1, &self.boundary.outer)] {
            for j in 0..nt {
                let k = g.index(i, j);
                wx[k] = trace.velocity[j][0];
                wy[k] = trace.velocity[j][1];
            }
        }
        w
    }

    /// Cartesian velocity gradient from compact differences of `psi`, using
    /// the boundary data and boundary vorticity on the two circles.
    pub fn velocity_gradient(&self) -> GradientTensor {
        kinematics::stream_gradient(self)
    }

    fn pack(&self) -> Vec<f64> {
        let mut u = vec![0.0; 2 * self.psi.values().len()];
        for (k, (p, o)) in self.psi.values().iter().zip(self.omega.values()).enumerate() {
            u[2 * k] = *p;
            u[2 * k + 1] = *o;
        }
        u
    }

    fn unpack(grid: &Arc<PolarGrid>, u: &[f64], lambda: f64, boundary: &BoundaryData) -> Self {
        let psi = u.iter().step_by(2).copied().collect();
        let omega = u.iter().skip(1).step_by(2).copied().collect();
        Self {
            psi: ScalarField::from_raw(grid.clone(), psi),
            omega: ScalarField::from_raw(grid.clone(), omega),
            lambda,
            residual_norm: f64::NAN,
            newton_iters: 0,
            boundary: boundary.clone(),
            residual_history: Vec::new(),
        }
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn initial_vector(grid: &Arc<PolarGrid>, cfg: &SolveConfig, guess: Option<&FlowState>) -> Vec<f64> {
    let lambda = cfg.lambda;
    match guess {
        Some(s) if s.grid() == grid => s.pack(),
        Some(s) => {
            let psi = interpolate_scalar(&s.psi, grid.clone(), |_, y| lambda * y);
            let omega = interpolate_scalar(&s.omega, grid.clone(), |_, _| 0.0);
            let mut u = vec![0.0; 2 * grid.len()];
            for k in 0..grid.len() {
                u[2 * k] = psi.values()[k];
                u[2 * k + 1] = omega.values()[k];
            }
            u
        }
        None if cfg.boundary.is_some() => vec![0.0; 2 * grid.len()],
        None => potential_flow_guess(grid.clone(), lambda).pack(),
    }
}

/// Solve the truncated problem on `grid`.
///
/// Converged when the max-norm residual is at most
/// `newton_tol * max(lambda, |F(guess)|)`.
pub fn solve_stationary(
    grid: Arc<PolarGrid>,
    cfg: &SolveConfig,
    guess: Option<&FlowState>,
) -> Result<FlowState, SolverError> {
    cfg.validate(&grid)?;
    let lambda = cfg.lambda;
    let boundary = cfg
        .boundary
        .clone()
        .unwrap_or_else(|| BoundaryData::uniform_stream(&grid, lambda));
    let source = cfg.mms_source.as_ref().map(|s| s.values());
    let mut sys = System::new(grid.clone(), &boundary, source);

    let mut u = initial_vector(&grid, cfg, guess);
    let mut f = sys.residual(&u);
    let mut norm = max_norm(&f);
    let target = cfg.newton_tol * lambda.max(norm);
    let mut history = vec![norm];
    let finish = |u: &[f64], norm: f64, iters: usize, history: Vec<f64>| {
        let mut s = FlowState::unpack(&grid, u, lambda, &boundary);
        s.residual_norm = norm;
        s.newton_iters = iters;
        s.residual_history = history;
        s
    };
    debug!(
        "n_r={} n_theta={} lambda={lambda}: |F0|={norm:e}, target {target:e}",
        grid.n_r(),
        grid.n_theta()
    );
    if norm <= target {
        return Ok(finish(&u, norm, 0, history));
    }

    let mut damping = cfg.damping;
    for iter in 1..=cfg.max_newton {
        let mut picard = iter <= cfg.picard_warmup;
        let accepted = loop {
            let vals = sys.jacobian_values(&u, picard);
            let pattern = sys.pattern()?;
            let factor = pattern.factor(&vals)?;
            let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
            let (du, rel) = factor.solve(&rhs);
            if rel > 1e-10 {
                return Err(SolverError::Linear(format!("relative residual {rel:e}")));
            }
            let mut alpha = damping;
            let mut found = None;
            for _ in 0..30 {
                let trial: Vec<f64> = u.iter().zip(&du).map(|(a, d)| a + alpha * d).collect();
                let ft = sys.residual(&trial);
                let nt = max_norm(&ft);
                if nt <= (1.0 - 1e-4 * alpha) * norm || nt <= target {
                    found = Some((trial, ft, nt, alpha));
                    break;
                }
                alpha *= 0.5;
            }
            match found {
                Some(x) => break Some(x),
                None if picard => picard = false,
                None => break None,
            }
        };
        let Some((trial, ft, nt, alpha)) = accepted else {
            let best = finish(&u, norm, iter - 1, history);
            return Err(SolverError::DivergingLineSearch {
                iter,
                residual: norm,
                best: Box::new(best),
            });
        };
        damping = if alpha == damping {
            (2.0 * damping).min(1.0)
        } else {
            alpha
        };
        u = trial;
        f = ft;
        norm = nt;
        history.push(norm);
        debug!(
            "iter {iter} ({}) alpha={alpha} |F|={norm:e}",
            if picard { "picard" } else { "newton" }
        );
        if norm <= target {
            info!(
                "converged: n_r={} n_theta={} R={} lambda={lambda} in {iter} iterations, |F|={norm:e}",
                grid.n_r(),
                grid.n_theta(),
                grid.r_outer()
            );
            return Ok(finish(&u, norm, iter, history));
        }
    }
    let best = finish(&u, norm, cfg.max_newton, history);
    Err(SolverError::NonConvergence {
        iters: cfg.max_newton,
        best: Box::new(best),
    })
}
