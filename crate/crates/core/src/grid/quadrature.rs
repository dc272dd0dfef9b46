use super::calculus::vector_gradient;
use super::{GridError, PolarGrid, ScalarField, VectorField};

fn ring_mean(g: &PolarGrid, v: &[f64], i: usize) -> f64 {
    let row = &v[g.index(i, 0)..g.index(i, 0) + g.n_theta()];
    row.iter().sum::<f64>() / g.n_theta() as f64
}

/// Interpolate per-circle values `c` log-linearly to radius `r`.
pub(crate) fn interp_profile(g: &PolarGrid, c: &[f64], r: f64) -> Result<f64, GridError> {
    let (i, t) = g.locate(r)?;
    Ok(if t == 0.0 {
        c[i]
    } else if t == 1.0 {
        c[i + 1]
    } else {
        c[i] + t * (c[i + 1] - c[i])
    })
}

/// Mean of `f` over the circle `|z| = r`.
///
/// Trapezoidal in `theta` (spectrally accurate for periodic data); radii
/// between grid circles are handled by linear interpolation in `ln r`.
pub fn circle_average(f: &ScalarField, r: f64) -> Result<f64, GridError> {
    let g = f.grid();
    let means: Vec<f64> = (0..g.n_r()).map(|i| ring_mean(g, f.values(), i)).collect();
    interp_profile(g, &means, r)
}

pub fn circle_average_vector(w: &VectorField, r: f64) -> Result<[f64; 2], GridError> {
    let g = w.grid();
    let (i, t) = g.locate(r)?;
    let mx = |ii| ring_mean(g, w.x(), ii);
    let my = |ii| ring_mean(g, w.y(), ii);
    let lerp = |a: f64, b: f64| if t == 0.0 { a } else { a + t * (b - a) };
    Ok([lerp(mx(i), mx(i + 1)), lerp(my(i), my(i + 1))])
}

/// Per-circle line integrals `r_i^2 * sum_j f_ij * h_theta`, i.e. the
/// integrand of `ds` in `int f dA = int int f r^2 ds dtheta`.
pub fn circle_integrand_profile(f: &ScalarField) -> Vec<f64> {
    let g = f.grid();
    let h = g.h_theta();
    (0..g.n_r())
        .map(|i| {
            let row = &f.values()[g.index(i, 0)..g.index(i, 0) + g.n_theta()];
            g.radius(i).powi(2) * h * row.iter().sum::<f64>()
        })
        .collect()
}

/// Integral of the piecewise-linear (in `s`) interpolant of `c` over `[s_a, s_b]`.
pub(crate) fn integrate_profile(g: &PolarGrid, c: &[f64], r_min: f64, r_max: f64) -> Result<f64, GridError> {
    if !(r_min <= r_max) {
        return Err(GridError::InvertedBounds(r_min, r_max));
    }
    let (ia, ta) = g.locate(r_min)?;
    let (ib, tb) = g.locate(r_max)?;
    let h = g.h_s();
    let seg = |i: usize, t0: f64, t1: f64| h * ((t1 - t0) * c[i] + (c[i + 1] - c[i]) * (t1 * t1 - t0 * t0) / 2.0);
    if ia == ib {
        return Ok(seg(ia, ta, tb));
    }
    let mut total = seg(ia, ta, 1.0);
    for i in ia + 1..ib {
        total += seg(i, 0.0, 1.0);
    }
    total += seg(ib, 0.0, tb);
    Ok(total)
}

/// `int f dA` over `r_min <= |z| <= r_max`, with the log-polar area element.
pub fn annulus_integral(f: &ScalarField, r_min: f64, r_max: f64) -> Result<f64, GridError> {
    let c = circle_integrand_profile(f);
    integrate_profile(f.grid(), &c, r_min, r_max)
}

/// `int |grad w|^2` over the annulus `r_min <= |z| <= r_max` (full Frobenius
/// norm of the Cartesian velocity gradient).
pub fn dirichlet_integral(w: &VectorField, r_min: f64, r_max: f64) -> Result<f64, GridError> {
    if !(r_min < r_max) {
        return Err(GridError::InvertedBounds(r_min, r_max));
    }
    let g = w.grid();
    let grad = vector_gradient(w);
    let dens = ScalarField::from_raw(g.clone(), (0..g.len()).map(|k| grad.frobenius_sq(k)).collect());
    annulus_integral(&dens, r_min, r_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use std::f64::consts::PI;
    use std::sync::Arc;

    /// Composite Simpson rule, used as an independent quadrature oracle.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn averages_of_simple_functions() {
        let g = Arc::new(build_grid(17, 32, 4.0).unwrap());
        let c = ScalarField::from_fn(g.clone(), |_, _| 3.25);
        for r in [1.0, 1.7, 2.0, 4.0] {
            assert!((circle_average(&c, r).unwrap() - 3.25).abs() < 1e-14);
        }
        let x = ScalarField::from_fn(g.clone(), |x, _| x);
        assert!(circle_average(&x, 2.0).unwrap().abs() < 1e-14);
        // r = 2 is node 8 of this grid
        let x2 = ScalarField::from_fn(g.clone(), |x, _| x * x);
        let oracle = simpson(|t: f64| 4.0 * t.cos().powi(2), 0.0, 2.0 * PI, 2000) / (2.0 * PI);
        assert!((oracle - 2.0).abs() < 1e-10);
        assert!((circle_average(&x2, 2.0).unwrap() - oracle).abs() < 1e-10);
        assert!(circle_average(&x2, 4.5).is_err());
        assert!(circle_average(&x2, 0.99).is_err());
    }

    #[test]
    fn dirichlet_integral_of_constant_is_zero() {
        let g = Arc::new(build_grid(17, 32, 4.0).unwrap());
        let w = VectorField::constant(g, [0.1, 0.0]);
        assert!(dirichlet_integral(&w, 1.0, 4.0).unwrap().abs() < 1e-24);
    }

    #[test]
    fn dirichlet_integral_of_rigid_rotation() {
        // oracle: |grad w|^2 = 2 on 1 <= r <= 2, integrated in polar form
        let oracle = 2.0 * PI * simpson(|r| 2.0 * r, 1.0, 2.0, 200);
        assert!((oracle / (6.0 * PI) - 1.0).abs() < 1e-8);
        let mut errs = Vec::new();
        for (n_r, n_t) in [(33, 32), (65, 64), (129, 128)] {
            let g = Arc::new(build_grid(n_r, n_t, 2.0).unwrap());
            let w = VectorField::from_fn(g, |x, y| [-y, x]);
            let d = dirichlet_integral(&w, 1.0, 2.0).unwrap();
            errs.push((d - oracle).abs() / oracle);
        }
        assert!(errs[2] < 1e-3, "{errs:?}");
        let order = (errs[1] / errs[2]).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn dirichlet_integral_is_additive_and_rejects_inverted_bounds() {
        let g = Arc::new(build_grid(33, 32, 9.0).unwrap());
        let w = VectorField::from_fn(g, |x, y| [x.sin() * y, (0.3 * x * y).cos()]);
        let whole = dirichlet_integral(&w, 1.3, 7.7).unwrap();
        let a = dirichlet_integral(&w, 1.3, 2.9).unwrap();
        let b = dirichlet_integral(&w, 2.9, 7.7).unwrap();
        assert!(whole >= 0.0);
        assert!(((a + b) - whole).abs() < 1e-12 * whole);
        assert!(dirichlet_integral(&w, 3.0, 2.0).is_err());
        assert!(dirichlet_integral(&w, 2.0, 2.0).is_err());
    }

    #[test]
    fn annulus_integral_of_one_is_area() {
        // r^2 is exp(2s); trapezoid-in-s error is O(h^2)
        let g = Arc::new(build_grid(257, 16, 3.0).unwrap());
        let one = ScalarField::from_fn(g, |_, _| 1.0);
        let a = annulus_integral(&one, 1.0, 3.0).unwrap();
        assert!((a / (8.0 * PI) - 1.0).abs() < 1e-4);
    }
}
