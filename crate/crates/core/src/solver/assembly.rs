//! Discrete residual and Jacobian of the coupled `(psi, omega)` system in
//! `(s, theta)` coordinates, `s = ln r`:
//!
//! ```text
//! r^-2 (psi_ss + psi_tt) - omega                                  = 0
//! r^-2 (omega_ss + omega_tt - psi_t omega_s + psi_s omega_t) - S  = 0
//! ```
//!
//! Boundary circles carry `psi = trace` and the one-sided closure for
//! `omega`. Unknowns are interleaved: `u[2k] = psi_k`, `u[2k + 1] = omega_k`.

use std::sync::Arc;

use super::linear::SparsePattern;
use super::{BoundaryData, SolverError};
use crate::grid::PolarGrid;

#[inline]
pub(crate) fn uidx(k: usize, c: usize) -> usize {
    2 * k + c
}

pub(crate) struct System<'a> {
    pub grid: Arc<PolarGrid>,
    pub boundary: &'a BoundaryData,
    pub source: Option<&'a [f64]>,
    pattern: Option<SparsePattern>,
}

impl<'a> System<'a> {
    pub fn new(grid: Arc<PolarGrid>, boundary: &'a BoundaryData, source: Option<&'a [f64]>) -> Self {
        Self {
            grid,
            boundary,
            source,
            pattern: None,
        }
    }

    pub fn size(&self) -> usize {
        2 * self.grid.len()
    }

    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let g = &*self.grid;
        let (nr, nt) = (g.n_r(), g.n_theta());
        let (hs, ht) = (g.h_s(), g.h_theta());
        let (ihs2, iht2) = (1.0 / (hs * hs), 1.0 / (ht * ht));
        let psi = |k: usize| u[uidx(k, 0)];
        let om = |k: usize| u[uidx(k, 1)];
        let mut f = vec![0.0; self.size()];
        for i in 0..nr {
            let ir2 = g.radius(i).powi(-2);
            for j in 0..nt {
                let k = g.index(i, j);
                let (kp, km) = (g.index(i, g.jp(j)), g.index(i, g.jm(j)));
                let psi_tt = (psi(kp) - 2.0 * psi(k) + psi(km)) * iht2;
                if i == 0 || i == nr - 1 {
                    let trace = if i == 0 {
                        &self.boundary.inner
                    } else {
                        &self.boundary.outer
                    };
                    f[uidx(k, 0)] = psi(k) - trace.psi[j];
                    let psi_ss = if i == 0 {
                        (8.0 * psi(k + nt) - psi(k + 2 * nt) - 7.0 * psi(k) - 6.0 * hs * trace.dpsi_ds[j]) * 0.5 * ihs2
                    } else {
                        (8.0 * psi(k - nt) - psi(k - 2 * nt) - 7.0 * psi(k) + 6.0 * hs * trace.dpsi_ds[j]) * 0.5 * ihs2
                    };
                    f[uidx(k, 1)] = om(k) - ir2 * (psi_ss + psi_tt);
                    continue;
                }
                let (kn, ks) = (k + nt, k - nt);
                let psi_ss = (psi(kn) - 2.0 * psi(k) + psi(ks)) * ihs2;
                f[uidx(k, 0)] = ir2 * (psi_ss + psi_tt) - om(k);

                let om_ss = (om(kn) - 2.0 * om(k) + om(ks)) * ihs2;
                let om_tt = (om(kp) - 2.0 * om(k) + om(km)) * iht2;
                let dps = (psi(kn) - psi(ks)) / (2.0 * hs);
                let dpt = (psi(kp) - psi(km)) / (2.0 * ht);
                let dos = (om(kn) - om(ks)) / (2.0 * hs);
                let dot = (om(kp) - om(km)) / (2.0 * ht);
                let src = self.source.map_or(0.0, |s| s[k]);
                f[uidx(k, 1)] = ir2 * (om_ss + om_tt - (dpt * dos - dps * dot)) - src;
            }
        }
        f
    }

    /// Emit Jacobian entries in a fixed order. With `picard` the dependence of
    /// the advection term on `psi` is dropped; those entries are still emitted
    /// (as zeros) so that the pattern is shared.
    fn emit(&self, u: &[f64], picard: bool, mut put: impl FnMut(usize, usize, f64)) {
        let g = &*self.grid;
        let (nr, nt) = (g.n_r(), g.n_theta());
        let (hs, ht) = (g.h_s(), g.h_theta());
        let (ihs2, iht2) = (1.0 / (hs * hs), 1.0 / (ht * ht));
        let psi = |k: usize| u[uidx(k, 0)];
        let om = |k: usize| u[uidx(k, 1)];
        for i in 0..nr {
            let ir2 = g.radius(i).powi(-2);
            for j in 0..nt {
                let k = g.index(i, j);
                let (kp, km) = (g.index(i, g.jp(j)), g.index(i, g.jm(j)));
                let (rp, rw) = (uidx(k, 0), uidx(k, 1));
                if i == 0 || i == nr - 1 {
                    put(rp, uidx(k, 0), 1.0);
                    let (k1, k2) = if i == 0 {
                        (k + nt, k + 2 * nt)
                    } else {
                        (k - nt, k - 2 * nt)
                    };
                    put(rw, uidx(k, 1), 1.0);
                    put(rw, uidx(k, 0), ir2 * (3.5 * ihs2 + 2.0 * iht2));
                    put(rw, uidx(k1, 0), -ir2 * 4.0 * ihs2);
                    put(rw, uidx(k2, 0), ir2 * 0.5 * ihs2);
                    put(rw, uidx(kp, 0), -ir2 * iht2);
                    put(rw, uidx(km, 0), -ir2 * iht2);
                    continue;
                }
                let (kn, ks) = (k + nt, k - nt);
                let (a_s, a_t) = (ir2 * ihs2, ir2 * iht2);

                put(rp, uidx(k, 0), -2.0 * (a_s + a_t));
                put(rp, uidx(kn, 0), a_s);
                put(rp, uidx(ks, 0), a_s);
                put(rp, uidx(kp, 0), a_t);
                put(rp, uidx(km, 0), a_t);
                put(rp, uidx(k, 1), -1.0);

                let dps = (psi(kn) - psi(ks)) / (2.0 * hs);
                let dpt = (psi(kp) - psi(km)) / (2.0 * ht);
                let (cs, ct) = (ir2 / (2.0 * hs), ir2 / (2.0 * ht));
                put(rw, uidx(k, 1), -2.0 * (a_s + a_t));
                put(rw, uidx(kn, 1), a_s - cs * dpt);
                put(rw, uidx(ks, 1), a_s + cs * dpt);
                put(rw, uidx(kp, 1), a_t + ct * dps);
                put(rw, uidx(km, 1), a_t - ct * dps);

                let (dos, dot) = if picard {
                    (0.0, 0.0)
                } else {
                    ((om(kn) - om(ks)) / (2.0 * hs), (om(kp) - om(km)) / (2.0 * ht))
                };
                put(rw, uidx(kp, 0), -ct * dos);
                put(rw, uidx(km, 0), ct * dos);
                put(rw, uidx(kn, 0), cs * dot);
                put(rw, uidx(ks, 0), -cs * dot);
            }
        }
    }

    pub fn pattern(&mut self) -> Result<&SparsePattern, SolverError> {
        if self.pattern.is_none() {
            let n = self.size();
            let zeros = vec![0.0; n];
            let (mut rows, mut cols) = (Vec::new(), Vec::new());
            self.emit(&zeros, false, |r, c, _| {
                rows.push(r);
                cols.push(c);
            });
            self.pattern = Some(SparsePattern::new(n, rows, cols)?);
        }
        Ok(self.pattern.as_ref().expect("pattern built above"))
    }

    pub fn jacobian_values(&self, u: &[f64], picard: bool) -> Vec<f64> {
        let mut vals = Vec::with_capacity(self.pattern.as_ref().map_or(0, |p| p.nnz_entries()));
        self.emit(u, picard, |_, _, v| vals.push(v));
        vals
    }

    /// Jacobian applied to `v` without forming the matrix (test support).
    #[cfg(test)]
    pub fn jacobian_apply(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size()];
        self.emit(u, false, |r, c, val| out[r] += val * v[c]);
        out
    }
}
