//! Closed-form low-Reynolds reference values.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{PolarGrid, ScalarField};
use crate::solver::{BoundaryData, FlowState};

#[derive(Debug, Error, PartialEq)]
pub enum ReferenceError {
    #[error("far-field speed {0} outside (0, 1)")]
    SpeedOutOfRange(f64),
    #[error("direction vector must be finite and nonzero")]
    BadDirection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceForce {
    pub lambda0: f64,
    /// `4 pi lambda0 / |ln lambda0|`
    pub leading: f64,
    pub direction: [f64; 2],
}

impl ReferenceForce {
    pub fn vector(&self) -> [f64; 2] {
        [self.leading * self.direction[0], self.leading * self.direction[1]]
    }
}

/// Leading-order low-Reynolds force on the unit disc in a stream of speed
/// `lambda0` along `e0` (normalized internally).
pub fn leading_order_force(lambda0: f64, e0: [f64; 2]) -> Result<ReferenceForce, ReferenceError> {
    if !(lambda0 > 0.0 && lambda0 < 1.0) {
        return Err(ReferenceError::SpeedOutOfRange(lambda0));
    }
    let norm = e0[0].hypot(e0[1]);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(ReferenceError::BadDirection);
    }
    Ok(ReferenceForce {
        lambda0,
        leading: 4.0 * PI * lambda0 / lambda0.ln().abs(),
        direction: [e0[0] / norm, e0[1] / norm],
    })
}

/// Irrotational flow past the unit disc, `psi = lambda sin(theta) (r - 1/r)`,
/// `omega = 0`, as an unsolved [`FlowState`].
pub fn potential_flow_guess(grid: Arc<PolarGrid>, lambda: f64) -> FlowState {
    let psi = ScalarField::from_polar(grid.clone(), |r, t| lambda * t.sin() * (r - 1.0 / r));
    let omega = ScalarField::zeros(grid.clone());
    let boundary = BoundaryData::uniform_stream(&grid, lambda);
    FlowState::from_fields(psi, omega, lambda, boundary).expect("fields share one grid")
}
