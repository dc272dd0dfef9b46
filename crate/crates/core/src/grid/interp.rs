use std::sync::Arc;

use super::{PolarGrid, ScalarField, VectorField};

struct Stencil {
    k00: usize,
    k01: usize,
    k10: usize,
    k11: usize,
    tr: f64,
    tt: f64,
}

/// Bilinear weights in `(ln r, theta)`; `None` when the point lies beyond the
/// source grid's outer circle.
fn stencil(src: &PolarGrid, r: f64, theta: f64) -> Option<Stencil> {
    if r > src.r_outer() * (1.0 + 1e-12) {
        return None;
    }
    let r = r.clamp(src.r_inner(), src.r_outer());
    let (i, tr) = src.locate(r).ok()?;
    let x = theta / src.h_theta();
    let j0 = x.floor();
    let tt = x - j0;
    let n = src.n_theta() as i64;
    let j = (j0 as i64).rem_euclid(n) as usize;
    let jn = src.jp(j);
    Some(Stencil {
        k00: src.index(i, j),
        k01: src.index(i, jn),
        k10: src.index(i + 1, j),
        k11: src.index(i + 1, jn),
        tr,
        tt,
    })
}

#[inline]
fn blend(v: &[f64], s: &Stencil) -> f64 {
    let a = v[s.k00] + s.tt * (v[s.k01] - v[s.k00]);
    if s.tr == 0.0 {
        return a;
    }
    let b = v[s.k10] + s.tt * (v[s.k11] - v[s.k10]);
    a + s.tr * (b - a)
}

/// Bilinear interpolation of `f` onto `dst`. Nodes outside the source annulus
/// take `fill(x, y)`.
pub fn interpolate_scalar(f: &ScalarField, dst: Arc<PolarGrid>, fill: impl Fn(f64, f64) -> f64) -> ScalarField {
    let src = f.grid();
    if **src == *dst {
        return ScalarField::from_raw(dst, f.values().to_vec());
    }
    let mut out = Vec::with_capacity(dst.len());
    for i in 0..dst.n_r() {
        for j in 0..dst.n_theta() {
            let v = match stencil(src, dst.radius(i), dst.theta(j)) {
                Some(s) => blend(f.values(), &s),
                None => {
                    let (x, y) = dst.xy(i, j);
                    fill(x, y)
                }
            };
            out.push(v);
        }
    }
    ScalarField::from_raw(dst, out)
}

pub fn interpolate_vector(w: &VectorField, dst: Arc<PolarGrid>, fill: impl Fn(f64, f64) -> [f64; 2]) -> VectorField {
    let src = w.grid();
    if **src == *dst {
        return VectorField::from_raw(dst, w.x().to_vec(), w.y().to_vec());
    }
    let (mut ox, mut oy) = (Vec::with_capacity(dst.len()), Vec::with_capacity(dst.len()));
    for i in 0..dst.n_r() {
        for j in 0..dst.n_theta() {
            let v = match stencil(src, dst.radius(i), dst.theta(j)) {
                Some(s) => [blend(w.x(), &s), blend(w.y(), &s)],
                None => {
                    let (x, y) = dst.xy(i, j);
                    fill(x, y)
                }
            };
            ox.push(v[0]);
            oy.push(v[1]);
        }
    }
    VectorField::from_raw(dst, ox, oy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    fn g(n_r: usize, n_t: usize, r: f64) -> Arc<PolarGrid> {
        Arc::new(build_grid(n_r, n_t, r).unwrap())
    }

    #[test]
    fn identity_interpolation_is_exact() {
        let a = g(17, 16, 5.0);
        let f = ScalarField::from_fn(a.clone(), |x, y| x.sin() + y * y);
        let b = interpolate_scalar(&f, g(17, 16, 5.0), |_, _| f64::NAN);
        assert_eq!(f.values(), b.values());
    }

    #[test]
    fn log_linear_profiles_are_reproduced() {
        let a = g(9, 8, 5.0);
        let f = ScalarField::from_polar(a, |r, _| 2.0 - 3.0 * r.ln());
        let fine = g(37, 64, 5.0);
        let out = interpolate_scalar(&f, fine.clone(), |_, _| 0.0);
        for i in 0..fine.n_r() {
            for j in 0..fine.n_theta() {
                let expect = 2.0 - 3.0 * fine.radius(i).ln();
                assert!((out.at(i, j) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn far_field_fill_beyond_source() {
        let a = g(9, 8, 5.0);
        let w = VectorField::constant(a, [0.0, 0.0]);
        let big = g(17, 8, 25.0);
        let out = interpolate_vector(&w, big.clone(), |_, _| [0.1, 0.0]);
        for i in 0..big.n_r() {
            let expect = if big.radius(i) > 5.0 + 1e-9 { 0.1 } else { 0.0 };
            assert_eq!(out.at(i, 3)[0], expect);
        }
    }

    #[test]
    fn interpolation_error_is_second_order() {
        let smooth = |x: f64, y: f64| (0.7 * x).sin() * (0.4 * y).cos() + 0.1 * x * y;
        let dst = g(301, 300, 6.0);
        let mut errs = Vec::new();
        for (n_r, n_t) in [(17, 16), (33, 32), (65, 64)] {
            let f = ScalarField::from_fn(g(n_r, n_t, 6.0), smooth);
            let out = interpolate_scalar(&f, dst.clone(), |_, _| 0.0);
            let mut e = 0.0f64;
            for i in 0..dst.n_r() {
                for j in 0..dst.n_theta() {
                    let (x, y) = dst.xy(i, j);
                    e = e.max((out.at(i, j) - smooth(x, y)).abs());
                }
            }
            errs.push(e);
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.0..5.0).contains(&ratio), "{errs:?}");
        }
    }
}
