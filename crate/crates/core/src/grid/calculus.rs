use super::{PolarGrid, ScalarField, VectorField};

/// `d/ds` with `s = ln r`: centered in the interior, one-sided second order on
/// the two boundary circles.
pub fn d_s(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let v = f.values();
    let (nr, nt) = (g.n_r(), g.n_theta());
    let inv = 1.0 / (2.0 * g.h_s());
    let mut out = vec![0.0; g.len()];
    for i in 0..nr {
        for j in 0..nt {
            let at = |ii: usize| v[ii * nt + j];
            out[i * nt + j] = if i == 0 {
                (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv
            } else if i == nr - 1 {
                (3.0 * at(nr - 1) - 4.0 * at(nr - 2) + at(nr - 3)) * inv
            } else {
                (at(i + 1) - at(i - 1)) * inv
            };
        }
    }
    ScalarField::from_raw(g.clone(), out)
}

/// Periodic centered `d/dtheta`.
pub fn d_theta(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let v = f.values();
    let inv = 1.0 / (2.0 * g.h_theta());
    let mut out = vec![0.0; g.len()];
    for i in 0..g.n_r() {
        for j in 0..g.n_theta() {
            out[g.index(i, j)] = (v[g.index(i, g.jp(j))] - v[g.index(i, g.jm(j))]) * inv;
        }
    }
    ScalarField::from_raw(g.clone(), out)
}

/// Cartesian gradient by the chain rule from `(s, theta)` derivatives.
pub fn gradient(f: &ScalarField) -> VectorField {
    let g = f.grid();
    let fs = d_s(f);
    let ft = d_theta(f);
    let mut gx = vec![0.0; g.len()];
    let mut gy = vec![0.0; g.len()];
    for i in 0..g.n_r() {
        let inv_r = 1.0 / g.radius(i);
        for j in 0..g.n_theta() {
            let k = g.index(i, j);
            let (c, s) = (g.cos(j), g.sin(j));
            gx[k] = inv_r * (c * fs.values()[k] - s * ft.values()[k]);
            gy[k] = inv_r * (s * fs.values()[k] + c * ft.values()[k]);
        }
    }
    VectorField::from_raw(g.clone(), gx, gy)
}

/// Nodal Cartesian velocity gradient `G[a][b] = d w_a / d x_b`.
#[derive(Debug, Clone)]
pub struct GradientTensor {
    pub d1w1: Vec<f64>,
    pub d2w1: Vec<f64>,
    pub d1w2: Vec<f64>,
    pub d2w2: Vec<f64>,
}

impl GradientTensor {
    #[inline]
    pub fn at(&self, k: usize) -> [[f64; 2]; 2] {
        [[self.d1w1[k], self.d2w1[k]], [self.d1w2[k], self.d2w2[k]]]
    }

    /// `|grad w|^2` (Frobenius) at node `k`.
    #[inline]
    pub fn frobenius_sq(&self, k: usize) -> f64 {
        self.d1w1[k].powi(2) + self.d2w1[k].powi(2) + self.d1w2[k].powi(2) + self.d2w2[k].powi(2)
    }
}

pub fn vector_gradient(w: &VectorField) -> GradientTensor {
    let g = w.grid();
    let gx = gradient(&ScalarField::from_raw(g.clone(), w.x().to_vec()));
    let gy = gradient(&ScalarField::from_raw(g.clone(), w.y().to_vec()));
    GradientTensor {
        d1w1: gx.x().to_vec(),
        d2w1: gx.y().to_vec(),
        d1w2: gy.x().to_vec(),
        d2w2: gy.y().to_vec(),
    }
}

/// Compact five-point Laplacian `r^-2 (f_ss + f_thth)`; second-order one-sided
/// `f_ss` on the boundary circles.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let v = f.values();
    let (nr, nt) = (g.n_r(), g.n_theta());
    let (hs2, ht2) = (g.h_s().powi(2), g.h_theta().powi(2));
    let mut out = vec![0.0; g.len()];
    for i in 0..nr {
        let r2 = g.radius(i).powi(2);
        for j in 0..nt {
            let at = |ii: usize| v[ii * nt + j];
            let fss = if i == 0 {
                (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / hs2
            } else if i == nr - 1 {
                (2.0 * at(nr - 1) - 5.0 * at(nr - 2) + 4.0 * at(nr - 3) - at(nr - 4)) / hs2
            } else {
                (at(i + 1) - 2.0 * at(i) + at(i - 1)) / hs2
            };
            let ftt = (v[g.index(i, g.jp(j))] - 2.0 * at(i) + v[g.index(i, g.jm(j))]) / ht2;
            out[i * nt + j] = (fss + ftt) / r2;
        }
    }
    ScalarField::from_raw(g.clone(), out)
}

fn scaled_polar(w: &VectorField) -> (ScalarField, ScalarField) {
    let g = w.grid();
    let mut rwr = w.radial();
    let mut rwt = w.azimuthal();
    for i in 0..g.n_r() {
        let r = g.radius(i);
        for j in 0..g.n_theta() {
            let k = g.index(i, j);
            rwr.values_mut()[k] *= r;
            rwt.values_mut()[k] *= r;
        }
    }
    (rwr, rwt)
}

/// Vorticity `d2 w1 - d1 w2` from the chain-rule Cartesian gradient.
///
/// Sign convention: rigid rotation `(-y, x)` has vorticity `-2`.
pub fn curl(w: &VectorField) -> ScalarField {
    let grad = vector_gradient(w);
    let out = grad.d2w1.iter().zip(&grad.d1w2).map(|(a, b)| a - b).collect();
    ScalarField::from_raw(w.grid().clone(), out)
}

/// Divergence in flux form `r^-2 [D_s(r w_r) + D_th(r w_th)]`, the stencil
/// compatible with [`velocity_from_stream`].
pub fn divergence(w: &VectorField) -> ScalarField {
    let g = w.grid();
    let (rwr, rwt) = scaled_polar(w);
    let a = d_s(&rwr);
    let b = d_theta(&rwt);
    let mut out = vec![0.0; g.len()];
    for i in 0..g.n_r() {
        let inv_r2 = g.radius(i).powi(-2);
        for j in 0..g.n_theta() {
            let k = g.index(i, j);
            out[k] = inv_r2 * (a.values()[k] + b.values()[k]);
        }
    }
    ScalarField::from_raw(g.clone(), out)
}

/// `w = (d2 psi, -d1 psi)`, i.e. `w_r = psi_th / r`, `w_th = -psi_s / r`.
pub fn velocity_from_stream(psi: &ScalarField) -> VectorField {
    let g = psi.grid();
    let ps = d_s(psi);
    let pt = d_theta(psi);
    velocity_from_derivatives(g, ps.values(), pt.values())
}

pub(crate) fn velocity_from_derivatives(g: &std::sync::Arc<PolarGrid>, psi_s: &[f64], psi_t: &[f64]) -> VectorField {
    let mut wx = vec![0.0; g.len()];
    let mut wy = vec![0.0; g.len()];
    for i in 0..g.n_r() {
        let inv_r = 1.0 / g.radius(i);
        for j in 0..g.n_theta() {
            let k = g.index(i, j);
            let wr = inv_r * psi_t[k];
            let wt = -inv_r * psi_s[k];
            let (c, s) = (g.cos(j), g.sin(j));
            wx[k] = c * wr - s * wt;
            wy[k] = s * wr + c * wt;
        }
    }
    VectorField::from_raw(g.clone(), wx, wy)
}
