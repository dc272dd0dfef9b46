use super::FlowState;
use crate::grid::GradientTensor;

/// Cartesian velocity gradient assembled from compact `(s, theta)` differences
/// of `psi`:
///
/// ```text
/// d_r w       = r^-2 [ (psi_st - psi_t) e_r - (psi_ss - psi_s) e_th ]
/// r^-1 d_th w = r^-2 [ (psi_tt + psi_s) e_r + (psi_t - psi_st) e_th ]
/// G = d_r w (x) e_r + r^-1 d_th w (x) e_th
/// ```
///
/// The trace of `G` vanishes identically and `G_12 - G_21` is the compact
/// Laplacian of `psi`. On the boundary circles `psi_s` comes from the imposed
/// data and `psi_ss = r^2 omega - psi_tt`.
pub(crate) fn stream_gradient(state: &FlowState) -> GradientTensor {
    let g = state.grid();
    let (nr, nt) = (g.n_r(), g.n_theta());
    let (hs, ht) = (g.h_s(), g.h_theta());
    let psi = state.psi.values();
    let om = state.omega.values();
    let n = g.len();
    let mut out = GradientTensor {
        d1w1: vec![0.0; n],
        d2w1: vec![0.0; n],
        d1w2: vec![0.0; n],
        d2w2: vec![0.0; n],
    };
    // psi_s on row i (boundary rows from the data)
    let ps_at = |i: usize, j: usize| -> f64 {
        if i == 0 {
            state.boundary.inner.dpsi_ds[j]
        } else if i == nr - 1 {
            state.boundary.outer.dpsi_ds[j]
        } else {
            (psi[g.index(i + 1, j)] - psi[g.index(i - 1, j)]) / (2.0 * hs)
        }
    };
    for i in 0..nr {
        let r = g.radius(i);
        let ir2 = 1.0 / (r * r);
        for j in 0..nt {
            let k = g.index(i, j);
            let (jp, jm) = (g.jp(j), g.jm(j));
            let (kp, km) = (g.index(i, jp), g.index(i, jm));
            let pt = (psi[kp] - psi[km]) / (2.0 * ht);
            let ptt = (psi[kp] - 2.0 * psi[k] + psi[km]) / (ht * ht);
            let ps = ps_at(i, j);
            let pst = (ps_at(i, jp) - ps_at(i, jm)) / (2.0 * ht);
            let pss = if i == 0 || i == nr - 1 {
                r * r * om[k] - ptt
            } else {
                (psi[k + nt] - 2.0 * psi[k] + psi[k - nt]) / (hs * hs)
            };
            // polar components of a = d_r w and b = r^-1 d_th w
            let (a_r, a_t) = (ir2 * (pst - pt), -ir2 * (pss - ps));
            let (b_r, b_t) = (ir2 * (ptt + ps), ir2 * (pt - pst));
            let (c, s) = (g.cos(j), g.sin(j));
            // e_r = (c, s), e_th = (-s, c)
            let a = [a_r * c - a_t * s, a_r * s + a_t * c];
            let b = [b_r * c - b_t * s, b_r * s + b_t * c];
            // G_ab = a_a (e_r)_b + b_a (e_th)_b
            out.d1w1[k] = a[0] * c - b[0] * s;
            out.d2w1[k] = a[0] * s + b[0] * c;
            out.d1w2[k] = a[1] * c - b[1] * s;
            out.d2w2[k] = a[1] * s + b[1] * c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, ScalarField};
    use crate::solver::BoundaryData;
    use std::sync::Arc;

    #[test]
    fn solenoidal_and_curl_is_compact_laplacian() {
        let g = Arc::new(build_grid(33, 32, 5.0).unwrap());
        let f = |r: f64, t: f64| (0.3 * r).sin() * (2.0 * t).cos() + r.ln() * t.sin();
        let psi = ScalarField::from_polar(g.clone(), f);
        let lap = crate::grid::laplacian(&psi);
        let bd = BoundaryData::from_stream(&g, f, |_, _| 0.0, |_, _| [0.0, 0.0]);
        let s = FlowState::from_fields(psi, lap.clone(), 1.0, bd).unwrap();
        let gr = stream_gradient(&s);
        for i in 1..g.n_r() - 1 {
            for j in 0..g.n_theta() {
                let k = g.index(i, j);
                assert!((gr.d1w1[k] + gr.d2w2[k]).abs() < 1e-12);
                assert!((gr.d2w1[k] - gr.d1w2[k] - lap.values()[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rigid_rotation_gradient() {
        // w = (-y, x): G = [[0, -1], [1, 0]]
        let mut errs = Vec::new();
        for (n_r, n_t) in [(33, 32), (65, 64)] {
            let g = Arc::new(build_grid(n_r, n_t, 3.0).unwrap());
            let psi = ScalarField::from_polar(g.clone(), |r, _| -r * r / 2.0);
            let om = ScalarField::from_fn(g.clone(), |_, _| -2.0);
            let bd = BoundaryData::from_stream(
                &g,
                |r, _| -r * r / 2.0,
                |r, _| -r * r,
                |r, t| [-r * t.sin(), r * t.cos()],
            );
            let s = FlowState::from_fields(psi, om, 1.0, bd).unwrap();
            let gr = stream_gradient(&s);
            let mut e = 0.0f64;
            for k in 0..g.len() {
                e = e.max(gr.d1w1[k].abs()).max(gr.d2w2[k].abs());
                e = e.max((gr.d2w1[k] + 1.0).abs()).max((gr.d1w2[k] - 1.0).abs());
            }
            errs.push(e);
        }
        assert!(errs[1] < 1e-2, "{errs:?}");
        assert!((errs[0] / errs[1]).log2() > 1.8, "{errs:?}");
    }
}
