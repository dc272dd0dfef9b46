use faer::prelude::*;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{Argsort, Pair, SparseColMat, SymbolicSparseColMat};

use super::SolverError;

/// Fixed sparsity pattern with a cached symbolic LU. Values are supplied in
/// the same order as the `(row, col)` pairs the pattern was built from;
/// duplicate pairs are summed.
pub(crate) struct SparsePattern {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    symbolic: SymbolicSparseColMat<usize>,
    argsort: Argsort<usize>,
    lu: SymbolicLu<usize>,
}

pub(crate) struct Factor<'a> {
    pattern: &'a SparsePattern,
    values: &'a [f64],
    lu: Lu<usize, f64>,
}

const REFINE_STEPS: usize = 3;
const TARGET_REL_RESIDUAL: f64 = 1e-12;

impl SparsePattern {
    pub fn new(n: usize, rows: Vec<usize>, cols: Vec<usize>) -> Result<Self, SolverError> {
        let pairs: Vec<Pair<usize, usize>> = rows.iter().zip(&cols).map(|(&row, &col)| Pair { row, col }).collect();
        let (symbolic, argsort) = SymbolicSparseColMat::try_new_from_indices(n, n, &pairs)
            .map_err(|e| SolverError::Linear(format!("pattern: {e:?}")))?;
        let lu =
            SymbolicLu::try_new(symbolic.as_ref()).map_err(|e| SolverError::Linear(format!("symbolic LU: {e:?}")))?;
        Ok(Self {
            n,
            rows,
            cols,
            symbolic,
            argsort,
            lu,
        })
    }

    pub fn nnz_entries(&self) -> usize {
        self.rows.len()
    }

    pub fn factor<'a>(&'a self, values: &'a [f64]) -> Result<Factor<'a>, SolverError> {
        debug_assert_eq!(values.len(), self.rows.len());
        let mat = SparseColMat::new_from_argsort(self.symbolic.clone(), &self.argsort, values)
            .map_err(|e| SolverError::Linear(format!("assembly: {e:?}")))?;
        let lu = Lu::try_new_with_symbolic(self.lu.clone(), mat.as_ref())
            .map_err(|e| SolverError::Linear(format!("numeric LU: {e:?}")))?;
        Ok(Factor {
            pattern: self,
            values,
            lu,
        })
    }

    fn apply(&self, values: &[f64], x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for ((&r, &c), &v) in self.rows.iter().zip(&self.cols).zip(values) {
            out[r] += v * x[c];
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

impl Factor<'_> {
    /// Solve `A x = b` with up to a few steps of iterative refinement.
    /// Returns `x` and the achieved relative residual `|Ax - b| / |b|`.
    pub fn solve(&self, b: &[f64]) -> (Vec<f64>, f64) {
        let n = self.pattern.n;
        let scale = max_abs(b);
        if scale == 0.0 {
            return (vec![0.0; n], 0.0);
        }
        let raw = |rhs: &[f64]| {
            let col = Col::<f64>::from_fn(n, |k| rhs[k]);
            let sol = self.lu.solve(&col);
            (0..n).map(|k| sol[k]).collect::<Vec<f64>>()
        };
        let mut x = raw(b);
        let mut ax = vec![0.0; n];
        let mut rel = f64::INFINITY;
        for step in 0..=REFINE_STEPS {
            self.pattern.apply(self.values, &x, &mut ax);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            let new_rel = max_abs(&r) / scale;
            if !(new_rel < rel) {
                break;
            }
            rel = new_rel;
            if rel <= TARGET_REL_RESIDUAL || step == REFINE_STEPS {
                break;
            }
            let dx = raw(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
        }
        (x, rel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_periodic_system() {
        // tridiagonal with periodic wrap, diagonally dominant
        let n = 12;
        let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..n {
            for (c, v) in [(i, 4.0), ((i + 1) % n, -1.0), ((i + n - 1) % n, -1.5)] {
                rows.push(i);
                cols.push(c);
                vals.push(v);
            }
        }
        // a duplicate entry is summed
        rows.push(0);
        cols.push(0);
        vals.push(0.5);
        let pat = SparsePattern::new(n, rows, cols).unwrap();
        let f = pat.factor(&vals).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let (x, rel) = f.solve(&b);
        assert!(rel <= 1e-12);
        let mut ax = vec![0.0; n];
        pat.apply(&vals, &x, &mut ax);
        assert!((ax[0] - b[0]).abs() < 1e-12);
        assert!((4.5 * x[0] - x[1] - 1.5 * x[n - 1] - b[0]).abs() < 1e-12);
    }
}
