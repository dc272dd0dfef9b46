use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BoundaryData, FlowState, SolverError};
use crate::grid::{read_field, write_field, FieldFile, GridError};

pub const PSI_FILE: &str = "psi.field";
pub const OMEGA_FILE: &str = "omega.field";
pub const META_FILE: &str = "state.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_outer: f64,
}

/// JSON sidecar stored next to the two field files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateMeta {
    pub lambda: f64,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub grid: GridMeta,
}

fn io_err(path: &Path, msg: impl ToString) -> SolverError {
    SolverError::Io {
        path: path.display().to_string(),
        msg: msg.to_string(),
    }
}

/// Write `psi.field`, `omega.field` and `state.json` into `dir` (created if
/// missing).
pub fn save_state(dir: &Path, state: &FlowState) -> Result<(), SolverError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let g = state.grid();
    let meta = StateMeta {
        lambda: state.lambda,
        residual_norm: state.residual_norm,
        newton_iters: state.newton_iters,
        grid: GridMeta {
            n_r: g.n_r(),
            n_theta: g.n_theta(),
            r_outer: g.r_outer(),
        },
    };
    let psi_path = dir.join(PSI_FILE);
    write_field(&psi_path, &FieldFile::Scalar(state.psi.clone())).map_err(|e| io_err(&psi_path, e))?;
    let om_path = dir.join(OMEGA_FILE);
    write_field(&om_path, &FieldFile::Scalar(state.omega.clone())).map_err(|e| io_err(&om_path, e))?;
    let meta_path = dir.join(META_FILE);
    let text = serde_json::to_string_pretty(&meta).map_err(|e| io_err(&meta_path, e))?;
    fs::write(&meta_path, text + "\n").map_err(|e| io_err(&meta_path, e))
}

/// Read a state written by [`save_state`]. Boundary data is reconstructed as
/// the uniform stream of the stored `lambda`.
pub fn load_state(dir: &Path) -> Result<FlowState, SolverError> {
    let meta_path = dir.join(META_FILE);
    let text = fs::read_to_string(&meta_path).map_err(|e| io_err(&meta_path, e))?;
    let meta: StateMeta = serde_json::from_str(&text).map_err(|e| io_err(&meta_path, e))?;
    let scalar = |name: &str| {
        let path = dir.join(name);
        read_field(&path)
            .map_err(|e| io_err(&path, e))?
            .into_scalar()
            .ok_or_else(|| io_err(&path, "expected a scalar field"))
    };
    let psi = scalar(PSI_FILE)?;
    let omega = scalar(OMEGA_FILE)?;
    let g = psi.grid().clone();
    if g.n_r() != meta.grid.n_r || g.n_theta() != meta.grid.n_theta || g.r_outer() != meta.grid.r_outer {
        return Err(io_err(&meta_path, "sidecar grid does not match field files"));
    }
    let omega = omega.with_grid(g.clone()).map_err(|_| GridError::GridMismatch)?;
    let boundary = BoundaryData::uniform_stream(&g, meta.lambda);
    let mut s = FlowState::from_fields(psi, omega, meta.lambda, boundary)?;
    s.residual_norm = meta.residual_norm;
    s.newton_iters = meta.newton_iters;
    Ok(s)
}
