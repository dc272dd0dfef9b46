use std::sync::Arc;

use super::linear::SparsePattern;
use super::{FlowState, SolverError};
use crate::grid::{d_theta, gradient, PolarGrid, ScalarField};

pub const GAUGE: &str = "outer-circle mean zero";

#[derive(Debug, Clone, PartialEq)]
pub struct PressureField {
    pub p: ScalarField,
    pub normalization: &'static str,
    /// Mean amount removed from the right-hand side to make the Neumann
    /// problem solvable (in `(s, theta)` units).
    pub compatibility_defect: f64,
    /// `|defect| > 1e-6 lambda^2`
    pub defect_flagged: bool,
}

/// Solve the pressure Poisson problem `Delta p = div V`,
/// `V = Delta w - (w . grad) w`, with Neumann data `d_n p = V . n` on both
/// circles, in the gauge [`GAUGE`].
///
/// For solenoidal `w`, `div V = -sum_ij d_i w_j d_j w_i`. The right-hand side is
/// assembled in flux form from `q = r V` in `(s, theta)` components,
/// `q_r = omega_t - r (G w) . e_r` and `q_t = -omega_s - r (G w) . e_th`, so that
/// boundary rows are half-cell balances and the discrete compatibility
/// condition holds up to rounding.
pub fn recover_pressure(state: &FlowState) -> Result<PressureField, SolverError> {
    let g: &Arc<PolarGrid> = state.grid();
    let (nr, nt) = (g.n_r(), g.n_theta());
    let (hs, ht) = (g.h_s(), g.h_theta());
    let (ihs2, iht2) = (1.0 / (hs * hs), 1.0 / (ht * ht));
    let w = state.velocity();
    let grad = state.velocity_gradient();
    let om = state.omega.values();
    let om_t = d_theta(&state.omega);

    let n = g.len();
    let mut q_r = vec![0.0; n];
    let mut q_t = vec![0.0; n];
    for i in 0..nr {
        let r = g.radius(i);
        for j in 0..nt {
            let k = g.index(i, j);
            let gm = grad.at(k);
            let (w1, w2) = (w.x()[k], w.y()[k]);
            let a1 = gm[0][0] * w1 + gm[0][1] * w2;
            let a2 = gm[1][0] * w1 + gm[1][1] * w2;
            let (c, sn) = (g.cos(j), g.sin(j));
            let om_s = if i == 0 {
                (om[k + nt] - om[k]) / hs
            } else if i == nr - 1 {
                (om[k] - om[k - nt]) / hs
            } else {
                (om[k + nt] - om[k - nt]) / (2.0 * hs)
            };
            q_r[k] = om_t.values()[k] - r * (a1 * c + a2 * sn);
            q_t[k] = -om_s - r * (-a1 * sn + a2 * c);
        }
    }

    let mut rhs = vec![0.0; n];
    for i in 0..nr {
        for j in 0..nt {
            let k = g.index(i, j);
            let div_t = (q_t[g.index(i, g.jp(j))] - q_t[g.index(i, g.jm(j))]) / (2.0 * ht);
            rhs[k] = div_t
                + if i == 0 {
                    (q_r[k + nt] - q_r[k]) / hs + 2.0 * q_r[k] / hs
                } else if i == nr - 1 {
                    (q_r[k] - q_r[k - nt]) / hs - 2.0 * q_r[k] / hs
                } else {
                    (q_r[k + nt] - q_r[k - nt]) / (2.0 * hs)
                };
        }
    }

    // trapezoid weights in s annihilate the range of the ghost-node operator
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..nr {
        let wt = if i == 0 || i == nr - 1 { 0.5 } else { 1.0 };
        let row = &rhs[g.index(i, 0)..g.index(i, 0) + nt];
        num += wt * row.iter().sum::<f64>();
        den += wt * nt as f64;
    }
    let defect = num / den;
    for v in &mut rhs {
        *v -= defect;
    }

    let pin = g.index(nr - 1, 0);
    let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    let mut put = |r: usize, c: usize, v: f64| {
        rows.push(r);
        cols.push(c);
        vals.push(v);
    };
    for i in 0..nr {
        for j in 0..nt {
            let k = g.index(i, j);
            if k == pin {
                put(k, k, 1.0);
                continue;
            }
            put(k, k, -2.0 * (ihs2 + iht2));
            put(k, g.index(i, g.jp(j)), iht2);
            put(k, g.index(i, g.jm(j)), iht2);
            if i == 0 {
                put(k, k + nt, 2.0 * ihs2);
            } else if i == nr - 1 {
                put(k, k - nt, 2.0 * ihs2);
            } else {
                put(k, k + nt, ihs2);
                put(k, k - nt, ihs2);
            }
        }
    }
    rhs[pin] = 0.0;
    let pattern = SparsePattern::new(n, rows, cols)?;
    let factor = pattern.factor(&vals)?;
    let (mut p, rel) = factor.solve(&rhs);
    if rel > 1e-10 {
        return Err(SolverError::Linear(format!("pressure relative residual {rel:e}")));
    }
    let outer = g.index(nr - 1, 0);
    let mean = p[outer..outer + nt].iter().sum::<f64>() / nt as f64;
    for v in &mut p {
        *v -= mean;
    }
    let lambda = state.lambda;
    Ok(PressureField {
        p: ScalarField::new(g.clone(), p)?,
        normalization: GAUGE,
        compatibility_defect: defect,
        defect_flagged: defect.abs() > 1e-6 * lambda * lambda,
    })
}

/// `|-Delta w + (w . grad) w + grad p|` at interior nodes, zero on the two
/// boundary circles. The viscous term uses `Delta w = (d2 omega, -d1 omega)`.
pub fn momentum_residual(state: &FlowState, p: &PressureField) -> Result<ScalarField, SolverError> {
    let g = state.grid();
    if p.p.grid() != g {
        return Err(crate::grid::GridError::GridMismatch.into());
    }
    let w = state.velocity();
    let grad = state.velocity_gradient();
    let go = gradient(&state.omega);
    let gp = gradient(&p.p);
    let mut out = vec![0.0; g.len()];
    for i in 1..g.n_r() - 1 {
        for j in 0..g.n_theta() {
            let k = g.index(i, j);
            let gm = grad.at(k);
            let (w1, w2) = (w.x()[k], w.y()[k]);
            let a1 = gm[0][0] * w1 + gm[0][1] * w2;
            let a2 = gm[1][0] * w1 + gm[1][1] * w2;
            let r1 = -go.y()[k] + a1 + gp.x()[k];
            let r2 = go.x()[k] + a2 + gp.y()[k];
            out[k] = r1.hypot(r2);
        }
    }
    Ok(ScalarField::new(g.clone(), out)?)
}
