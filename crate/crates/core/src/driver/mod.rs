//! Invading-domain sequences, lambda sweeps and report assembly.

mod report;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::thread;

use log::{info, warn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blowdown::{blow_down, BlowDownReport, DEFAULT_DELTA0};
use crate::diagnostics::{
    diagnose, BernoulliAnalysis, DiagnosticsConfig, DiagnosticsReport, FarField, Profiles, Slack,
};
use crate::grid::{build_grid, dirichlet_integral, interpolate_vector, GridError, PolarGrid};
use crate::solver::{recover_pressure, solve_stationary, FlowState, SolveConfig};

pub use report::{check_report, emit_reports, read_report, state_dir_name, CheckOutcome, ReportError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("radii schedule must be non-empty and strictly increasing")]
    Radii,
    #[error("outer radius {r} must exceed the largest contour radius {probe}")]
    RadiusBelowProbe { r: f64, probe: f64 },
    #[error("lambda {0} outside [0, 0.5]")]
    Lambda(f64),
    #[error("no lambda values")]
    NoLambdas,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// `n_r = round(per_octave * log2 R) + 1` radial nodes and a fixed angular count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPolicy {
    pub per_octave: f64,
    pub n_theta: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            per_octave: 64.0,
            n_theta: 128,
        }
    }
}

impl GridPolicy {
    pub fn n_r(&self, r_outer: f64) -> usize {
        (self.per_octave * r_outer.log2()).round() as usize + 1
    }

    pub fn grid(&self, r_outer: f64) -> Result<PolarGrid, GridError> {
        build_grid(self.n_r(r_outer), self.n_theta, r_outer)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub lambdas: Vec<f64>,
    pub radii: Vec<f64>,
    pub grid: GridPolicy,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub diagnostics: DiagnosticsConfig,
    pub delta0: f64,
    /// velocities of consecutive domains are compared on `r <= leray_radius`
    pub leray_radius: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![0.1],
            radii: vec![10.0, 20.0, 40.0, 80.0],
            grid: GridPolicy::default(),
            newton_tol: 1e-10,
            max_newton: 50,
            diagnostics: DiagnosticsConfig::default(),
            delta0: DEFAULT_DELTA0,
            leray_radius: 10.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.lambdas.is_empty() {
            return Err(ConfigError::NoLambdas);
        }
        for &l in &self.lambdas {
            if !(0.0..=0.5).contains(&l) {
                return Err(ConfigError::Lambda(l));
            }
        }
        if self.radii.is_empty() || self.radii.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ConfigError::Radii);
        }
        let probe = self.diagnostics.contours.iter().copied().fold(1.0, f64::max);
        for &r in &self.radii {
            if !(r > probe) {
                return Err(ConfigError::RadiusBelowProbe { r, probe });
            }
            self.grid.grid(r)?;
        }
        Ok(())
    }

    fn solve_config(&self, lambda: f64) -> SolveConfig {
        let mut c = SolveConfig::new(lambda);
        c.newton_tol = self.newton_tol;
        c.max_newton = self.max_newton;
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEnergy {
    /// `D(r >= R/4)`
    pub quarter: f64,
    /// `D(r >= R/2)`
    pub half: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub r: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub converged: bool,
    pub error: Option<String>,
    pub newton_iters: usize,
    pub residual_norm: f64,
    pub d_total: f64,
    /// `D |ln lambda| / lambda^2`
    pub d_normalized: f64,
    pub force: BTreeMap<String, [f64; 2]>,
    pub force_raw: BTreeMap<String, [f64; 2]>,
    pub slacks: BTreeMap<String, Slack>,
    pub skipped: Vec<String>,
    pub blowdown: Option<BlowDownReport>,
    pub lambda0: f64,
    pub far_field: Option<FarField>,
    pub bernoulli: Option<BernoulliAnalysis>,
    pub tail: TailEnergy,
    /// sup of `|w_R - w_{R_prev}|` on `r <= leray_radius`
    pub leray_diff: Option<f64>,
    pub pressure_defect: f64,
    pub d_annulus: Vec<[f64; 3]>,
    pub profiles: Option<Profiles>,
}

impl SweepRow {
    fn failed(lambda: f64, r: f64, g: Option<&PolarGrid>, msg: String) -> Self {
        Self {
            lambda,
            r,
            n_r: g.map_or(0, |g| g.n_r()),
            n_theta: g.map_or(0, |g| g.n_theta()),
            converged: false,
            error: Some(msg),
            newton_iters: 0,
            residual_norm: 0.0,
            d_total: 0.0,
            d_normalized: 0.0,
            force: BTreeMap::new(),
            force_raw: BTreeMap::new(),
            slacks: BTreeMap::new(),
            skipped: Vec::new(),
            blowdown: None,
            lambda0: 0.0,
            far_field: None,
            bernoulli: None,
            tail: TailEnergy {
                quarter: 0.0,
                half: 0.0,
            },
            leray_diff: None,
            pressure_defect: 0.0,
            d_annulus: Vec::new(),
            profiles: None,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.converged && self.slacks.values().all(Slack::evaluate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub unix_time: u64,
    pub elapsed_s: f64,
}

impl Metadata {
    fn now(elapsed_s: f64) -> Self {
        let unix_time = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            unix_time,
            elapsed_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: ExperimentConfig,
    pub rows: Vec<SweepRow>,
    pub metadata: Metadata,
}

/// Rows for one lambda plus the solved states, in radius order.
#[derive(Debug, Clone)]
pub struct InvadingRun {
    pub rows: Vec<SweepRow>,
    pub states: Vec<FlowState>,
}

impl InvadingRun {
    pub fn largest(&self) -> Option<&FlowState> {
        self.states.last()
    }
}

fn normalized_energy(d: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else {
        d * lambda.ln().abs() / (lambda * lambda)
    }
}

fn leray_difference(a: &FlowState, b: &FlowState, reference: &Arc<PolarGrid>) -> f64 {
    let fill = |_: f64, _: f64| [f64::NAN, f64::NAN];
    let wa = interpolate_vector(&a.velocity(), reference.clone(), fill);
    let wb = interpolate_vector(&b.velocity(), reference.clone(), fill);
    wa.x()
        .iter()
        .zip(wa.y())
        .zip(wb.x().iter().zip(wb.y()))
        .map(|((ax, ay), (bx, by))| (ax - bx).hypot(ay - by))
        .fold(0.0, f64::max)
}

fn row_from_state(cfg: &ExperimentConfig, state: &FlowState, leray_diff: Option<f64>) -> Result<SweepRow, String> {
    let g = state.grid();
    let lambda = state.lambda;
    let r = g.r_outer();
    let p = recover_pressure(state).map_err(|e| e.to_string())?;
    if p.defect_flagged {
        warn!(
            "lambda={lambda} R={r}: pressure compatibility defect {:e}",
            p.compatibility_defect
        );
    }
    let d: DiagnosticsReport = diagnose(state, &p, &cfg.diagnostics).map_err(|e| e.to_string())?;
    let blowdown = if lambda > 0.0 {
        Some(blow_down(state, &p, cfg.delta0).map_err(|e| e.to_string())?.0)
    } else {
        None
    };
    let w = state.velocity();
    let outer_half = dirichlet_integral(&w, r / 2.0, r).map_err(|e| e.to_string())?;
    let mid = dirichlet_integral(&w, r / 4.0, r / 2.0).map_err(|e| e.to_string())?;
    Ok(SweepRow {
        lambda,
        r,
        n_r: g.n_r(),
        n_theta: g.n_theta(),
        converged: true,
        error: None,
        newton_iters: state.newton_iters,
        residual_norm: state.residual_norm,
        d_total: d.d_total,
        d_normalized: normalized_energy(d.d_total, lambda),
        force: d.force,
        force_raw: d.force_raw,
        slacks: d.slacks,
        skipped: d.skipped,
        blowdown,
        lambda0: d.far_field.lambda0,
        far_field: Some(d.far_field),
        bernoulli: Some(d.bernoulli),
        tail: TailEnergy {
            quarter: mid + outer_half,
            half: outer_half,
        },
        leray_diff,
        pressure_defect: p.compatibility_defect,
        d_annulus: d.d_annulus,
        profiles: Some(d.profiles),
    })
}

/// Solve the truncated problems for every radius of the schedule in turn,
/// each warm-started from the previous one, and diagnose each solution.
///
/// A failure ends the sequence for this `lambda` with a failure row.
pub fn run_invading_sequence(cfg: &ExperimentConfig, lambda: f64) -> Result<InvadingRun, ConfigError> {
    cfg.validate()?;
    if !(0.0..=0.5).contains(&lambda) {
        return Err(ConfigError::Lambda(lambda));
    }
    let reference = Arc::new(cfg.grid.grid(cfg.leray_radius.min(cfg.radii[0]))?);
    let solve_cfg = cfg.solve_config(lambda);
    let mut run = InvadingRun {
        rows: Vec::new(),
        states: Vec::new(),
    };
    for &r in &cfg.radii {
        let g = Arc::new(cfg.grid.grid(r)?);
        let t = std::time::Instant::now();
        let state = match solve_stationary(g.clone(), &solve_cfg, run.states.last()) {
            Ok(s) => s,
            Err(e) => {
                warn!("lambda={lambda} R={r}: {e}");
                run.rows.push(SweepRow::failed(lambda, r, Some(&g), e.to_string()));
                break;
            }
        };
        info!(
            "lambda={lambda} R={r} ({}x{}): {} iterations, |F|={:e}, {:.2?}",
            g.n_r(),
            g.n_theta(),
            state.newton_iters,
            state.residual_norm,
            t.elapsed()
        );
        let diff = run.states.last().map(|prev| leray_difference(prev, &state, &reference));
        match row_from_state(cfg, &state, diff) {
            Ok(row) => run.rows.push(row),
            Err(msg) => {
                warn!("lambda={lambda} R={r}: {msg}");
                run.rows.push(SweepRow::failed(lambda, r, Some(&g), msg));
                break;
            }
        }
        run.states.push(state);
    }
    Ok(run)
}

/// Run every lambda concurrently; rows are merged in `(lambda, R)` order.
pub fn run_lambda_sweep(cfg: &ExperimentConfig) -> Result<(SweepReport, Vec<InvadingRun>), ConfigError> {
    cfg.validate()?;
    let t = std::time::Instant::now();
    let mut lambdas = cfg.lambdas.clone();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    let runs: Vec<InvadingRun> = thread::scope(|s| {
        let handles: Vec<_> = lambdas
            .iter()
            .map(|&l| s.spawn(move || run_invading_sequence(cfg, l)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let rows = runs.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    let report = SweepReport {
        config: cfg.clone(),
        rows,
        metadata: Metadata::now(t.elapsed().as_secs_f64()),
    };
    Ok((report, runs))
}
