use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{InvadingRun, SweepReport, SweepRow};
use crate::solver::save_state;

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const ENERGY_SVG: &str = "energy.svg";
pub const OSC_SVG: &str = "osc_ratio.svg";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {msg}")]
    State { path: PathBuf, msg: String },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Directory name used for a saved state, e.g. `state_l0.1_r40`.
pub fn state_dir_name(lambda: f64, r: f64) -> String {
    format!("state_l{lambda}_r{r}")
}

fn csv(report: &SweepReport) -> String {
    let mut out = String::from(
        "lambda,r,n_r,n_theta,converged,newton_iters,d_total,d_normalized,force_x,force_y,lambda0,\
         energy_slack,bernoulli_gap,osc_ratio,defect_ratio,hardy_ratio,good_radius,tail_quarter,tail_half,\
         leray_diff,all_pass\n",
    );
    let opt = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
    for row in &report.rows {
        let f1 = row.force.get("1").copied();
        let bd = row.blowdown.as_ref();
        let _ = writeln!(
            out,
            "{:e},{:e},{},{},{},{},{:e},{:e},{},{},{:e},{},{},{},{},{},{},{:e},{:e},{},{}",
            row.lambda,
            row.r,
            row.n_r,
            row.n_theta,
            row.converged,
            row.newton_iters,
            row.d_total,
            row.d_normalized,
            opt(f1.map(|f| f[0])),
            opt(f1.map(|f| f[1])),
            row.lambda0,
            opt(row.slacks.get("energy_identity").map(|s| s.value)),
            opt(row.bernoulli.map(|b| b.gap)),
            opt(bd.map(|b| b.osc_ratio)),
            opt(bd.map(|b| b.defect_ratio)),
            opt(bd.map(|b| b.hardy_ratio)),
            opt(bd.map(|b| b.good_radius)),
            row.tail.quarter,
            row.tail.half,
            opt(row.leray_diff),
            row.all_pass(),
        );
    }
    out
}

/// Line chart of `(x, y)` series, one polyline per label, log-scaled x.
fn svg_chart(title: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 60.0;
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.1.iter().copied())
        .filter(|(x, y)| *x > 0.0 && y.is_finite())
        .collect();
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\">{title}</text>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">lambda (log scale)</text>\n\
         <text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">{y_label}</text>\n\
         <rect x=\"{M}\" y=\"{M}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        W / 2.0,
        W / 2.0,
        H - 15.0,
        H / 2.0,
        H / 2.0,
        W - 2.0 * M,
        H - 2.0 * M,
    );
    if pts.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let lx = |x: f64| x.ln();
    let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
        (a.min(lx(p.0)), b.max(lx(p.0)))
    });
    let (y0, y1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let px = |x: f64| M + (lx(x) - x0) / span(x0, x1) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y0) / span(y0, y1) * (H - 2.0 * M);
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y1:.3e}</text>",
        M - 4.0,
        M + 4.0
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y0:.3e}</text>",
        M - 4.0,
        H - M
    );
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    for (n, (label, s)) in series.iter().enumerate() {
        let c = colors[n % colors.len()];
        let path: Vec<String> = s
            .iter()
            .filter(|(x, y)| *x > 0.0 && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{c}\" stroke-width=\"2\" points=\"{}\"/>",
            path.join(" ")
        );
        for p in &path {
            let (a, b) = p.split_once(',').unwrap_or(("0", "0"));
            let _ = writeln!(out, "<circle cx=\"{a}\" cy=\"{b}\" r=\"3\" fill=\"{c}\"/>");
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" fill=\"{c}\">{label}</text>",
            W - M + 5.0,
            M + 15.0 * (n as f64 + 1.0)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn by_radius(rows: &[SweepRow], value: impl Fn(&SweepRow) -> Option<f64>) -> Vec<(String, Vec<(f64, f64)>)> {
    let mut radii: Vec<f64> = rows.iter().map(|r| r.r).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    radii
        .into_iter()
        .map(|r| {
            let pts = rows
                .iter()
                .filter(|row| row.r == r && row.converged)
                .filter_map(|row| value(row).map(|v| (row.lambda, v)))
                .collect();
            (format!("R={r}"), pts)
        })
        .collect()
}

/// Write `report.json`, `report.csv`, two SVG charts and the largest-radius
/// state of every run into `dir`.
pub fn emit_reports(report: &SweepReport, runs: &[InvadingRun], dir: &Path) -> Result<(), ReportError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let json_path = dir.join(REPORT_JSON);
    let text = serde_json::to_string_pretty(report).map_err(|source| ReportError::Json {
        path: json_path.clone(),
        source,
    })?;
    fs::write(&json_path, text + "\n").map_err(io(&json_path))?;
    let csv_path = dir.join(REPORT_CSV);
    fs::write(&csv_path, csv(report)).map_err(io(&csv_path))?;
    let energy = svg_chart(
        "normalized Dirichlet energy",
        "D |ln lambda| / lambda^2",
        &by_radius(&report.rows, |r| Some(r.d_normalized)),
    );
    let energy_path = dir.join(ENERGY_SVG);
    fs::write(&energy_path, energy).map_err(io(&energy_path))?;
    let osc = svg_chart(
        "rescaled pressure oscillation",
        "osc / eps^2",
        &by_radius(&report.rows, |r| r.blowdown.as_ref().map(|b| b.osc_ratio)),
    );
    let osc_path = dir.join(OSC_SVG);
    fs::write(&osc_path, osc).map_err(io(&osc_path))?;
    for run in runs {
        if let Some(s) = run.largest() {
            let path = dir.join(state_dir_name(s.lambda, s.grid().r_outer()));
            save_state(&path, s).map_err(|e| ReportError::State {
                path: path.clone(),
                msg: e.to_string(),
            })?;
        }
    }
    Ok(())
}

pub fn read_report(path: &Path) -> Result<SweepReport, ReportError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|source| ReportError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub evaluated: usize,
    /// `lambda=..,R=..: name` for every failing slack or failed row
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-evaluate every stored slack from its value and tolerance.
pub fn check_report(report: &SweepReport) -> CheckOutcome {
    let mut out = CheckOutcome {
        evaluated: 0,
        failures: Vec::new(),
    };
    for row in &report.rows {
        let tag = format!("lambda={},R={}", row.lambda, row.r);
        if !row.converged {
            out.failures
                .push(format!("{tag}: {}", row.error.as_deref().unwrap_or("not converged")));
        }
        for (name, s) in &row.slacks {
            out.evaluated += 1;
            if !s.evaluate() {
                out.failures
                    .push(format!("{tag}: {name} = {:e} (tolerance {:e})", s.value, s.tolerance));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Slack;
    use crate::driver::{ExperimentConfig, Metadata, SweepRow};

    fn empty() -> SweepReport {
        SweepReport {
            config: ExperimentConfig::default(),
            rows: Vec::new(),
            metadata: Metadata {
                version: "0".into(),
                unix_time: 0,
                elapsed_s: 0.0,
            },
        }
    }

    #[test]
    fn empty_report_is_valid_json() {
        let dir = tempfile::tempdir().unwrap();
        emit_reports(&empty(), &[], dir.path()).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(REPORT_JSON)).unwrap()).unwrap();
        assert_eq!(v["rows"], serde_json::json!([]));
        assert!(v["metadata"].is_object() && v["config"].is_object());
        let csv = fs::read_to_string(dir.path().join(REPORT_CSV)).unwrap();
        assert_eq!(csv.lines().count(), 1);
        assert!(fs::read_to_string(dir.path().join(ENERGY_SVG))
            .unwrap()
            .starts_with("<svg"));
    }

    #[test]
    fn check_flags_failing_slacks_and_rows() {
        let mut rep = empty();
        let mut row = SweepRow::failed(0.1, 10.0, None, "boom".into());
        rep.rows.push(row.clone());
        row.converged = true;
        row.error = None;
        row.slacks.insert("a".into(), Slack::lower_bound(1.0, 0.0));
        let mut bad = Slack::lower_bound(1.0, 0.0);
        bad.value = -1.0;
        row.slacks.insert("b".into(), bad);
        rep.rows.push(row);
        let out = check_report(&rep);
        assert_eq!(out.evaluated, 2);
        assert_eq!(out.failures.len(), 2);
        assert!(out.failures[0].contains("boom"));
        assert!(out.failures[1].contains(": b ="));
    }

    #[test]
    fn missing_report_names_path() {
        let err = read_report(Path::new("/nonexistent/report.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/report.json"));
    }

    #[test]
    fn state_dir_names() {
        assert_eq!(state_dir_name(0.1, 40.0), "state_l0.1_r40");
        assert_eq!(state_dir_name(0.025, 80.0), "state_l0.025_r80");
    }
}
