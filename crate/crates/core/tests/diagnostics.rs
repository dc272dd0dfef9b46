use std::sync::{Arc, OnceLock};

use leray_core::blowdown::{blow_down, euler_oscillation_ratio, find_good_radius, rescale_to_unit_disc};
use leray_core::diagnostics::{
    angle_variation_slack, bernoulli_analysis, contour_force, diagnose, energy_identity_slack, force_on_obstacle,
    gw_pressure_slack, gw_velocity_slack, total_dirichlet, DiagnosticsConfig, DiagnosticsError, DiagnosticsReport,
};
use leray_core::grid::{build_grid, circle_average, dirichlet_integral, PolarGrid};
use leray_core::solver::{recover_pressure, solve_stationary, FlowState, PressureField, SolveConfig};

const LAMBDA: f64 = 0.1;

fn solved() -> &'static (FlowState, PressureField) {
    static CELL: OnceLock<(FlowState, PressureField)> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = Arc::new(build_grid(105, 64, 20.0).unwrap());
        let s = solve_stationary(g, &SolveConfig::new(LAMBDA), None).unwrap();
        let p = recover_pressure(&s).unwrap();
        (s, p)
    })
}

fn still() -> (FlowState, PressureField) {
    let g: Arc<PolarGrid> = Arc::new(build_grid(33, 32, 10.0).unwrap());
    let s = solve_stationary(g, &SolveConfig::new(0.0), None).unwrap();
    let p = recover_pressure(&s).unwrap();
    (s, p)
}

#[test]
fn still_fluid_has_no_force_and_trivial_identity() {
    let (s, p) = still();
    for r in [1.0, 2.0, 8.0] {
        assert_eq!(force_on_obstacle(&s, &p, r).unwrap(), [0.0, 0.0]);
    }
    assert_eq!(energy_identity_slack(&s, &p).unwrap(), 0.0);
    let b = bernoulli_analysis(&s, &p, 2.0, 8.0).unwrap();
    assert_eq!((b.interior_max, b.boundary_max, b.gap), (0.0, 0.0, 0.0));
}

#[test]
fn contour_outside_domain_is_an_error() {
    let (s, p) = solved();
    for r in [0.5, 20.0, 25.0] {
        assert!(matches!(
            force_on_obstacle(s, p, r),
            Err(DiagnosticsError::BadContour(_))
        ));
    }
}

#[test]
fn obstacle_contour_has_no_flux_term() {
    let (s, p) = solved();
    let (c, raw) = contour_force(s, p, 1.0).unwrap();
    assert_eq!(c, raw);
    let (c, raw) = contour_force(s, p, 8.0).unwrap();
    assert!((c[0] - raw[0]).abs() > 1e-4 * c[0].abs());
}

#[test]
fn symmetric_flow_has_no_lift_and_no_turning() {
    let (s, p) = solved();
    let rep = diagnose(s, p, &DiagnosticsConfig::default()).unwrap();
    for f in rep.force.values() {
        assert!(f[1].abs() <= 1e-9 * LAMBDA, "{f:?}");
    }
    assert!(!rep.profiles.direction.is_empty());
    for [_, phi] in &rep.profiles.direction {
        assert!(phi.abs() <= 1e-9);
    }
}

#[test]
fn total_energy_is_the_dirichlet_integral() {
    let (s, p) = solved();
    let rep = diagnose(s, p, &DiagnosticsConfig::default()).unwrap();
    let direct = dirichlet_integral(&s.velocity(), 1.0, 20.0).unwrap();
    assert_eq!(rep.d_total, direct);
    assert_eq!(total_dirichlet(s).unwrap(), direct);
    assert!(rep.d_total > 0.0);
}

#[test]
fn energy_identity_and_force_spread_hold() {
    let (s, p) = solved();
    assert!(energy_identity_slack(s, p).unwrap().abs() < 0.02);
    let f: Vec<[f64; 2]> = [2.0, 4.0, 8.0]
        .iter()
        .map(|&r| force_on_obstacle(s, p, r).unwrap())
        .collect();
    for x in &f {
        assert!((x[0] - f[0][0]).abs() <= 0.01 * f[0][0]);
    }
}

#[test]
fn coincident_circles_give_the_bare_bound() {
    let (s, p) = solved();
    assert_eq!(gw_pressure_slack(s, p, 4.0, 4.0).unwrap(), 0.0);
    let v = gw_velocity_slack(s, 4.0, 4.0).unwrap();
    assert_eq!(v.sharp, 0.0);
    assert!(v.printed == 0.0);
    assert_eq!(angle_variation_slack(s, 4.0, 4.0, LAMBDA / 5.0).unwrap(), 0.0);
}

#[test]
fn pressure_bound_matches_its_parts() {
    let (s, p) = solved();
    let (r1, r2) = (2.0, 8.0);
    let lhs = (circle_average(&p.p, r2).unwrap() - circle_average(&p.p, r1).unwrap()).abs();
    let rhs = dirichlet_integral(&s.velocity(), r1, r2).unwrap() / (4.0 * std::f64::consts::PI);
    assert_eq!(gw_pressure_slack(s, p, r1, r2).unwrap(), rhs - lhs);
}

#[test]
fn maximum_principle_on_probe_annuli() {
    let (s, p) = solved();
    for (a, b) in [(2.0, 4.0), (2.0, 16.0), (4.0, 8.0)] {
        let r = bernoulli_analysis(s, p, a, b).unwrap();
        assert!(r.interior_max <= r.boundary_max + 1e-6 * LAMBDA * LAMBDA);
    }
}

#[test]
fn report_json_round_trip_is_bit_exact() {
    let (s, p) = solved();
    let rep = diagnose(s, p, &DiagnosticsConfig::default()).unwrap();
    let text = rep.to_json();
    let back: DiagnosticsReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rep);
    assert_eq!(back.to_json(), text);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["lambda", "r_outer", "d_total", "force", "profiles", "slacks"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["slacks"]["energy_identity"]["tolerance"].is_number());
    assert!(v["force"]["2"].is_array());
}

#[test]
fn report_csv_lists_every_profile_sample() {
    let (s, p) = solved();
    let rep = diagnose(s, p, &DiagnosticsConfig::default()).unwrap();
    let csv = rep.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("quantity,radius,value"));
    let n_r = s.grid().n_r();
    assert_eq!(csv.lines().filter(|l| l.starts_with("mean_pressure,")).count(), n_r);
    assert_eq!(
        csv.lines().filter(|l| l.starts_with("slack_")).count(),
        rep.slacks.len()
    );
    assert!(lines.all(|l| l.split(',').count() == 3));
}

#[test]
fn blow_down_scale_identity() {
    let (s, p) = solved();
    let sc = rescale_to_unit_disc(s, p).unwrap();
    let eps = euler_oscillation_ratio(&sc.v, &sc.p, 0.05).unwrap().epsilon_sq;
    let d = total_dirichlet(s).unwrap();
    assert!((eps * LAMBDA * LAMBDA - d).abs() <= 1e-10 * d);
}

#[test]
fn good_radius_is_the_argmin() {
    let (s, p) = solved();
    let sc = rescale_to_unit_disc(s, p).unwrap();
    let gc = find_good_radius(&sc.v, &sc.p, 0.05).unwrap();
    let g = sc.v.grid();
    for (i, &r) in g.radii().iter().enumerate() {
        if r > 0.5 && r < 0.95 {
            assert!(gc.defect <= leray_core::blowdown::circle_defect(&sc.v, &sc.p, i));
        }
    }
    assert!(gc.radius > 0.5 && gc.radius < 0.95);
    let (rep, _) = blow_down(s, p, 0.05).unwrap();
    assert_eq!(rep.good_radius, gc.radius);
    assert!(rep.osc_ratio.is_finite() && rep.osc_ratio > 0.0);
    assert!(rep.hardy_ratio > 0.0 && rep.hardy_ratio < 4.0);
}
