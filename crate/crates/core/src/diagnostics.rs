//! Energies, forces, circle averages and the a-priori inequalities evaluated
//! as signed slacks on solved flows.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{
    annulus_integral, circle_average, circle_average_vector, dirichlet_integral, gradient, vector_gradient,
    GradientTensor, GridError, PolarGrid, ScalarField, VectorField,
};
use crate::solver::{FlowState, PressureField};

pub const ENERGY_TOL: f64 = 0.02;
pub const FORCE_SPREAD_TOL: f64 = 0.01;
pub const GW_PRESSURE_TOL: f64 = 1e-8;
pub const GW_VELOCITY_TOL: f64 = 1e-8;
pub const ANGLE_TOL: f64 = 1e-6;
pub const MAX_PRINCIPLE_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("radii ({0}, {1}) must satisfy 1 < r1 <= r2 < r_outer")]
    BadRadii(f64, f64),
    #[error("contour radius {0} outside [1, r_outer)")]
    BadContour(f64),
    #[error("precondition failed: |mean velocity| = {speed:e} < sigma = {sigma:e} at r = {radius}")]
    PreconditionFailed { radius: f64, speed: f64, sigma: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlackKind {
    /// passes when `value >= -tolerance`
    LowerBound,
    /// passes when `|value| <= tolerance`
    Magnitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub kind: SlackKind,
}

impl Slack {
    pub fn lower_bound(value: f64, tolerance: f64) -> Self {
        Self::new(value, tolerance, SlackKind::LowerBound)
    }

    pub fn magnitude(value: f64, tolerance: f64) -> Self {
        Self::new(value, tolerance, SlackKind::Magnitude)
    }

    fn new(value: f64, tolerance: f64, kind: SlackKind) -> Self {
        let mut s = Self {
            value,
            tolerance,
            pass: false,
            kind,
        };
        s.pass = s.evaluate();
        s
    }

    /// Recompute the verdict from `value` and `tolerance`.
    pub fn evaluate(&self) -> bool {
        match self.kind {
            SlackKind::LowerBound => self.value >= -self.tolerance,
            SlackKind::Magnitude => self.value.abs() <= self.tolerance,
        }
    }
}

fn check_pair(g: &PolarGrid, r1: f64, r2: f64) -> Result<(), DiagnosticsError> {
    if !(r1 > g.r_inner() && r1 <= r2 && r2 < g.r_outer()) {
        return Err(DiagnosticsError::BadRadii(r1, r2));
    }
    Ok(())
}

fn same_grid(a: &PolarGrid, b: &PolarGrid) -> Result<(), DiagnosticsError> {
    if a != b {
        return Err(DiagnosticsError::GridMismatch);
    }
    Ok(())
}

/// `int |grad w|^2` over `[r1, r2]`, zero for an empty annulus.
fn energy_between(w: &VectorField, r1: f64, r2: f64) -> Result<f64, GridError> {
    if r1 == r2 {
        Ok(0.0)
    } else {
        dirichlet_integral(w, r1, r2)
    }
}

/// Per-circle contour force, flux-corrected and raw.
fn ring_forces(w: &VectorField, grad: &GradientTensor, p: &ScalarField) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let g = w.grid();
    let ht = g.h_theta();
    let mut corrected = Vec::with_capacity(g.n_r());
    let mut raw = Vec::with_capacity(g.n_r());
    for i in 0..g.n_r() {
        let r = g.radius(i);
        let (mut fc, mut fr) = ([0.0; 2], [0.0; 2]);
        for j in 0..g.n_theta() {
            let k = g.index(i, j);
            let m = grad.at(k);
            let e = [g.cos(j), g.sin(j)];
            let wk = [w.x()[k], w.y()[k]];
            let wn = wk[0] * e[0] + wk[1] * e[1];
            for a in 0..2 {
                let stress = (m[a][0] + m[0][a]) * e[0] + (m[a][1] + m[1][a]) * e[1] - p.values()[k] * e[a];
                fr[a] += stress;
                fc[a] += stress - wn * wk[a];
            }
        }
        let dl = r * ht;
        corrected.push([fc[0] * dl, fc[1] * dl]);
        raw.push([fr[0] * dl, fr[1] * dl]);
    }
    (corrected, raw)
}

fn interp_pair(g: &PolarGrid, per_ring: &[[f64; 2]], r: f64) -> Result<[f64; 2], GridError> {
    let xs: Vec<f64> = per_ring.iter().map(|f| f[0]).collect();
    let ys: Vec<f64> = per_ring.iter().map(|f| f[1]).collect();
    Ok([
        crate::grid::interp_profile(g, &xs, r)?,
        crate::grid::interp_profile(g, &ys, r)?,
    ])
}

/// Contour forces `(corrected, raw)` on `|z| = r_contour`.
///
/// `corrected = int [(G + G^T - p I) e_r - (w . e_r) w] r dtheta`; `raw` omits
/// the momentum-flux term. On `r = 1` the two agree.
pub fn contour_force(
    state: &FlowState,
    p: &PressureField,
    r_contour: f64,
) -> Result<([f64; 2], [f64; 2]), DiagnosticsError> {
    let g = state.grid();
    same_grid(g, p.p.grid())?;
    if !(r_contour >= g.r_inner() && r_contour < g.r_outer()) {
        return Err(DiagnosticsError::BadContour(r_contour));
    }
    let (c, r) = ring_forces(&state.velocity(), &state.velocity_gradient(), &p.p);
    Ok((interp_pair(g, &c, r_contour)?, interp_pair(g, &r, r_contour)?))
}

/// Flux-corrected force on `|z| = r_contour`.
pub fn force_on_obstacle(state: &FlowState, p: &PressureField, r_contour: f64) -> Result<[f64; 2], DiagnosticsError> {
    Ok(contour_force(state, p, r_contour)?.0)
}

/// `int |grad w|^2` over the whole annulus.
pub fn total_dirichlet(state: &FlowState) -> Result<f64, GridError> {
    let g = state.grid();
    dirichlet_integral(&state.velocity(), g.r_inner(), g.r_outer())
}

/// `(D - F(1) . w_inf) / D`, defined as 0 when `D = 0`.
pub fn energy_identity_slack(state: &FlowState, p: &PressureField) -> Result<f64, DiagnosticsError> {
    let d = total_dirichlet(state)?;
    if d == 0.0 {
        return Ok(0.0);
    }
    let f = force_on_obstacle(state, p, state.grid().r_inner())?;
    Ok((d - f[0] * state.lambda) / d)
}

/// `(4 pi)^-1 int |grad w|^2 - |pbar(r2) - pbar(r1)|` from raw fields.
pub fn pressure_difference_slack(w: &VectorField, p: &ScalarField, r1: f64, r2: f64) -> Result<f64, DiagnosticsError> {
    same_grid(w.grid(), p.grid())?;
    check_pair(w.grid(), r1, r2)?;
    let rhs = energy_between(w, r1, r2)? / (4.0 * PI);
    let lhs = (circle_average(p, r2)? - circle_average(p, r1)?).abs();
    Ok(rhs - lhs)
}

pub fn gw_pressure_slack(state: &FlowState, p: &PressureField, r1: f64, r2: f64) -> Result<f64, DiagnosticsError> {
    pressure_difference_slack(&state.velocity(), &p.p, r1, r2)
}

/// Mean-velocity bound in both log-factor forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocitySlack {
    /// log factor `ln(rho2 / rho1)`
    pub sharp: f64,
    /// log factor `ln(r_outer / r_inner)` of the whole ring
    pub printed: f64,
}

pub fn velocity_difference_slack(w: &VectorField, r1: f64, r2: f64) -> Result<VelocitySlack, DiagnosticsError> {
    let g = w.grid();
    check_pair(g, r1, r2)?;
    let a = circle_average_vector(w, r1)?;
    let b = circle_average_vector(w, r2)?;
    let lhs = (b[0] - a[0]).hypot(b[1] - a[1]);
    let root = (energy_between(w, r1, r2)? / (2.0 * PI)).sqrt();
    Ok(VelocitySlack {
        sharp: root * (r2 / r1).ln().sqrt() - lhs,
        printed: root * (g.r_outer() / g.r_inner()).ln().sqrt() - lhs,
    })
}

pub fn gw_velocity_slack(state: &FlowState, r1: f64, r2: f64) -> Result<VelocitySlack, DiagnosticsError> {
    velocity_difference_slack(&state.velocity(), r1, r2)
}

/// Radii sampled between `r1` and `r2`: both endpoints and every grid circle
/// strictly inside.
fn radius_sample(g: &PolarGrid, r1: f64, r2: f64) -> Vec<f64> {
    let mut out = vec![r1];
    out.extend(g.radii().iter().copied().filter(|&r| r > r1 && r < r2));
    if r2 > r1 {
        out.push(r2);
    }
    out
}

/// Continuous branch of `atan2` along a sequence of vectors.
fn unwrap_angles(v: &[[f64; 2]]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for a in v {
        let mut phi = a[1].atan2(a[0]);
        if let Some(&prev) = out.last() {
            phi += 2.0 * PI * ((prev - phi) / (2.0 * PI)).round();
        }
        out.push(phi);
    }
    out
}

pub fn direction_variation_slack(
    w: &VectorField,
    omega: &ScalarField,
    r1: f64,
    r2: f64,
    sigma: f64,
) -> Result<f64, DiagnosticsError> {
    let g = w.grid();
    same_grid(g, omega.grid())?;
    check_pair(g, r1, r2)?;
    let radii = radius_sample(g, r1, r2);
    let mut means = Vec::with_capacity(radii.len());
    for &r in &radii {
        let m = circle_average_vector(w, r)?;
        let speed = m[0].hypot(m[1]);
        if !(sigma > 0.0 && speed >= sigma) {
            return Err(DiagnosticsError::PreconditionFailed {
                radius: r,
                speed,
                sigma,
            });
        }
        means.push(m);
    }
    let phi = unwrap_angles(&means);
    let lhs = (phi[phi.len() - 1] - phi[0]).abs();
    if r1 == r2 {
        return Ok(-lhs);
    }
    let go = gradient(omega);
    let grad = vector_gradient(w);
    let dens: Vec<f64> = (0..g.len())
        .map(|k| {
            let r = g.radius(k / g.n_theta());
            go.x()[k].hypot(go.y()[k]) / r + grad.frobenius_sq(k)
        })
        .collect();
    let dens = ScalarField::new(g.clone(), dens)?;
    let rhs = annulus_integral(&dens, r1, r2)? / (4.0 * PI * sigma * sigma);
    Ok(rhs - lhs)
}

pub fn angle_variation_slack(state: &FlowState, r1: f64, r2: f64, sigma: f64) -> Result<f64, DiagnosticsError> {
    direction_variation_slack(&state.velocity(), &state.omega, r1, r2, sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliAnalysis {
    /// grid radii the requested circles were snapped to
    pub r1: f64,
    pub r2: f64,
    pub interior_max: f64,
    pub boundary_max: f64,
    /// `min_{S_r2} Phi - max_{S_r1} Phi - (lambda / 3)(lambda - lambda0)`
    pub gap: f64,
}

/// `Phi = p + |w|^2 / 2` nodewise.
pub fn bernoulli_pressure(w: &VectorField, p: &ScalarField) -> Result<ScalarField, DiagnosticsError> {
    same_grid(w.grid(), p.grid())?;
    let v = p
        .values()
        .iter()
        .zip(w.x().iter().zip(w.y()))
        .map(|(p, (a, b))| p + 0.5 * (a * a + b * b))
        .collect();
    Ok(ScalarField::new(w.grid().clone(), v)?)
}

fn ring_extrema(phi: &ScalarField, i: usize) -> (f64, f64) {
    let g = phi.grid();
    let row = &phi.values()[g.index(i, 0)..g.index(i, 0) + g.n_theta()];
    row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

pub fn bernoulli_from_fields(
    w: &VectorField,
    p: &ScalarField,
    r1: f64,
    r2: f64,
    lambda: f64,
    lambda0: f64,
) -> Result<BernoulliAnalysis, DiagnosticsError> {
    let g = w.grid();
    if !(r1 < r2) {
        return Err(DiagnosticsError::BadRadii(r1, r2));
    }
    check_pair(g, r1, r2)?;
    let phi = bernoulli_pressure(w, p)?;
    let i1 = g.nearest_radius_index(r1)?;
    let i2 = g.nearest_radius_index(r2)?;
    let (lo1, hi1) = ring_extrema(&phi, i1);
    let (lo2, hi2) = ring_extrema(&phi, i2);
    let interior_max = (i1 + 1..i2)
        .map(|i| ring_extrema(&phi, i).1)
        .fold(f64::NEG_INFINITY, f64::max);
    let boundary_max = hi1.max(hi2);
    let _ = lo1;
    Ok(BernoulliAnalysis {
        r1: g.radius(i1),
        r2: g.radius(i2),
        // adjacent circles leave no interior; report the boundary value
        interior_max: if i2 > i1 + 1 { interior_max } else { boundary_max },
        boundary_max,
        gap: lo2 - hi1 - lambda / 3.0 * (lambda - lambda0),
    })
}

pub fn bernoulli_analysis(
    state: &FlowState,
    p: &PressureField,
    r1: f64,
    r2: f64,
) -> Result<BernoulliAnalysis, DiagnosticsError> {
    let w = state.velocity();
    let far = far_field(&w)?;
    bernoulli_from_fields(&w, &p.p, r1, r2, state.lambda, far.lambda0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarField {
    pub probe_radius: f64,
    pub velocity: [f64; 2],
    pub lambda0: f64,
    pub phi0: f64,
}

/// Mean velocity on the probe circle `r = sqrt(r_outer)`.
pub fn far_field(w: &VectorField) -> Result<FarField, GridError> {
    let probe_radius = w.grid().r_outer().sqrt();
    let v = circle_average_vector(w, probe_radius)?;
    Ok(FarField {
        probe_radius,
        velocity: v,
        lambda0: v[0].hypot(v[1]),
        phi0: v[1].atan2(v[0]),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    /// contour radii for the force; values outside `[1, r_outer)` are skipped
    pub contours: Vec<f64>,
    /// circle pairs are all `rho1 < rho2` drawn from this list inside `(1, r_outer)`
    pub pair_radii: Vec<f64>,
    /// speed floor for the direction bound, as a fraction of `lambda`
    pub sigma_fraction: f64,
    /// outer margin: the gap annulus is `(sqrt(R), (1 - delta0) R)`
    pub delta0: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            contours: vec![1.0, 2.0, 4.0, 8.0],
            pair_radii: vec![2.0, 4.0, 8.0, 16.0],
            sigma_fraction: 0.2,
            delta0: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profiles {
    /// `[r, pbar(r)]`
    pub mean_pressure: Vec<[f64; 2]>,
    /// `[r, wbar_1(r), wbar_2(r)]`
    pub mean_velocity: Vec<[f64; 3]>,
    /// `[r, phi(r)]` where `|wbar| >= sigma`, unwrapped
    pub direction: Vec<[f64; 2]>,
    /// `[r, min Phi, max Phi]` per circle
    pub bernoulli_extrema: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub lambda: f64,
    pub r_outer: f64,
    pub d_total: f64,
    /// `[r1, r2, D(r1, r2)]` for consecutive pair radii
    pub d_annulus: Vec<[f64; 3]>,
    /// contour radius -> flux-corrected force
    pub force: BTreeMap<String, [f64; 2]>,
    pub force_raw: BTreeMap<String, [f64; 2]>,
    pub far_field: FarField,
    pub bernoulli: BernoulliAnalysis,
    pub profiles: Profiles,
    pub slacks: BTreeMap<String, Slack>,
    /// checks not evaluated because a precondition failed
    pub skipped: Vec<String>,
}

pub fn radius_key(r: f64) -> String {
    format!("{r}")
}

/// Run every diagnostic on a solved state.
pub fn diagnose(
    state: &FlowState,
    p: &PressureField,
    cfg: &DiagnosticsConfig,
) -> Result<DiagnosticsReport, DiagnosticsError> {
    let g = state.grid();
    same_grid(g, p.p.grid())?;
    let lambda = state.lambda;
    let w = state.velocity();
    let grad = state.velocity_gradient();
    let d_total = dirichlet_integral(&w, g.r_inner(), g.r_outer())?;

    let (ring_c, ring_r) = ring_forces(&w, &grad, &p.p);
    let mut force = BTreeMap::new();
    let mut force_raw = BTreeMap::new();
    for &r in cfg.contours.iter().filter(|&&r| r >= g.r_inner() && r < g.r_outer()) {
        force.insert(radius_key(r), interp_pair(g, &ring_c, r)?);
        force_raw.insert(radius_key(r), interp_pair(g, &ring_r, r)?);
    }

    let mut slacks = BTreeMap::new();
    let mut skipped = Vec::new();

    let f1 = interp_pair(g, &ring_c, g.r_inner())?;
    let energy = if d_total == 0.0 {
        0.0
    } else {
        (d_total - f1[0] * lambda) / d_total
    };
    slacks.insert("energy_identity".to_string(), Slack::magnitude(energy, ENERGY_TOL));

    let off: Vec<[f64; 2]> = cfg
        .contours
        .iter()
        .filter(|&&r| r > g.r_inner() && r < g.r_outer())
        .map(|&r| interp_pair(g, &ring_c, r))
        .collect::<Result<_, _>>()?;
    if let Some(first) = off.first() {
        let norm = first[0].hypot(first[1]);
        let spread = off
            .iter()
            .map(|f| (f[0] - first[0]).hypot(f[1] - first[1]))
            .fold(0.0, f64::max);
        let rel = if norm > 0.0 { spread / norm } else { spread };
        slacks.insert(
            "force_contour_spread".to_string(),
            Slack::magnitude(rel, FORCE_SPREAD_TOL),
        );
    }

    let far = far_field(&w)?;
    let sigma = cfg.sigma_fraction * lambda;
    let mut radii: Vec<f64> = cfg
        .pair_radii
        .iter()
        .copied()
        .filter(|&r| r > g.r_inner() && r < g.r_outer())
        .collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut d_annulus = Vec::new();
    for win in radii.windows(2) {
        d_annulus.push([win[0], win[1], dirichlet_integral(&w, win[0], win[1])?]);
    }
    for (a, &r1) in radii.iter().enumerate() {
        for &r2 in &radii[a + 1..] {
            let tag = format!("{}_{}", radius_key(r1), radius_key(r2));
            let sp = pressure_difference_slack(&w, &p.p, r1, r2)?;
            slacks.insert(
                format!("gw_pressure_{tag}"),
                Slack::lower_bound(sp, GW_PRESSURE_TOL * lambda * lambda),
            );
            let sv = velocity_difference_slack(&w, r1, r2)?;
            let tol_v = GW_VELOCITY_TOL * lambda;
            slacks.insert(format!("gw_velocity_sharp_{tag}"), Slack::lower_bound(sv.sharp, tol_v));
            slacks.insert(
                format!("gw_velocity_printed_{tag}"),
                Slack::lower_bound(sv.printed, tol_v),
            );
            match direction_variation_slack(&w, &state.omega, r1, r2, sigma) {
                Ok(v) => {
                    slacks.insert(format!("angle_{tag}"), Slack::lower_bound(v, ANGLE_TOL));
                }
                Err(e @ DiagnosticsError::PreconditionFailed { .. }) => skipped.push(format!("angle_{tag}: {e}")),
                Err(e) => return Err(e),
            }
            let b = bernoulli_from_fields(&w, &p.p, r1, r2, lambda, far.lambda0)?;
            slacks.insert(
                format!("max_principle_{tag}"),
                Slack::lower_bound(b.boundary_max - b.interior_max, MAX_PRINCIPLE_TOL * lambda * lambda),
            );
        }
    }

    let gap_r1 = far.probe_radius;
    let gap_r2 = (1.0 - cfg.delta0) * g.r_outer();
    let bernoulli = bernoulli_from_fields(&w, &p.p, gap_r1, gap_r2, lambda, far.lambda0)?;
    slacks.insert(
        "max_principle_gap_annulus".to_string(),
        Slack::lower_bound(
            bernoulli.boundary_max - bernoulli.interior_max,
            MAX_PRINCIPLE_TOL * lambda * lambda,
        ),
    );

    let phi = bernoulli_pressure(&w, &p.p)?;
    let mut profiles = Profiles {
        mean_pressure: Vec::with_capacity(g.n_r()),
        mean_velocity: Vec::with_capacity(g.n_r()),
        direction: Vec::new(),
        bernoulli_extrema: Vec::with_capacity(g.n_r()),
    };
    let mut dir_vecs = Vec::new();
    let mut dir_r = Vec::new();
    for (i, &r) in g.radii().iter().enumerate() {
        profiles.mean_pressure.push([r, circle_average(&p.p, r)?]);
        let m = circle_average_vector(&w, r)?;
        profiles.mean_velocity.push([r, m[0], m[1]]);
        if sigma > 0.0 && m[0].hypot(m[1]) >= sigma {
            dir_vecs.push(m);
            dir_r.push(r);
        }
        let (lo, hi) = ring_extrema(&phi, i);
        profiles.bernoulli_extrema.push([r, lo, hi]);
    }
    profiles.direction = dir_r
        .into_iter()
        .zip(unwrap_angles(&dir_vecs))
        .map(|(r, a)| [r, a])
        .collect();

    Ok(DiagnosticsReport {
        lambda,
        r_outer: g.r_outer(),
        d_total,
        d_annulus,
        force,
        force_raw,
        far_field: far,
        bernoulli,
        profiles,
        slacks,
        skipped,
    })
}

impl DiagnosticsReport {
    pub fn all_pass(&self) -> bool {
        self.slacks.values().all(|s| s.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat table `quantity,radius,value`; radius is empty for scalars.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,radius,value\n");
        let mut row = |q: &str, r: Option<f64>, v: f64| {
            let r = r.map(|r| format!("{r:e}")).unwrap_or_default();
            let _ = writeln!(out, "{q},{r},{v:e}");
        };
        row("lambda", None, self.lambda);
        row("r_outer", None, self.r_outer);
        row("d_total", None, self.d_total);
        for [a, b, d] in &self.d_annulus {
            row(&format!("d_annulus_to_{b:e}"), Some(*a), *d);
        }
        for (k, f) in &self.force {
            let r: f64 = k.parse().unwrap_or(f64::NAN);
            row("force_x", Some(r), f[0]);
            row("force_y", Some(r), f[1]);
        }
        row("lambda0", Some(self.far_field.probe_radius), self.far_field.lambda0);
        row("phi0", Some(self.far_field.probe_radius), self.far_field.phi0);
        for [r, v] in &self.profiles.mean_pressure {
            row("mean_pressure", Some(*r), *v);
        }
        for [r, x, y] in &self.profiles.mean_velocity {
            row("mean_velocity_x", Some(*r), *x);
            row("mean_velocity_y", Some(*r), *y);
        }
        for [r, a] in &self.profiles.direction {
            row("direction", Some(*r), *a);
        }
        for [r, lo, hi] in &self.profiles.bernoulli_extrema {
            row("bernoulli_min", Some(*r), *lo);
            row("bernoulli_max", Some(*r), *hi);
        }
        for (k, s) in &self.slacks {
            row(&format!("slack_{k}"), None, s.value);
        }
        out
    }
}
