//! "polar-field v1" text format.
//!
//! ```text
//! polar-field v1
//! <n_r> <n_theta> <r_outer> <scalar|vector> [r_inner]
//! <value> | <w1> <w2>          one line per node, radial-major
//! ```
//!
//! The trailing `r_inner` token is only written for grids whose inner radius
//! is not 1 (rescaled blow-down fields).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use super::{GridError, PolarGrid, ScalarField, VectorField};

const MAGIC: &str = "polar-field v1";

#[derive(Debug, Error)]
pub enum FieldIoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldFile {
    Scalar(ScalarField),
    Vector(VectorField),
}

impl FieldFile {
    pub fn grid(&self) -> &Arc<PolarGrid> {
        match self {
            FieldFile::Scalar(f) => f.grid(),
            FieldFile::Vector(w) => w.grid(),
        }
    }

    pub fn into_scalar(self) -> Option<ScalarField> {
        match self {
            FieldFile::Scalar(f) => Some(f),
            FieldFile::Vector(_) => None,
        }
    }

    pub fn into_vector(self) -> Option<VectorField> {
        match self {
            FieldFile::Vector(w) => Some(w),
            FieldFile::Scalar(_) => None,
        }
    }

    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        let g = self.grid();
        let kind = match self {
            FieldFile::Scalar(_) => "scalar",
            FieldFile::Vector(_) => "vector",
        };
        writeln!(out, "{MAGIC}")?;
        write!(out, "{} {} {:.17e} {}", g.n_r(), g.n_theta(), g.r_outer(), kind)?;
        if g.r_inner() != 1.0 {
            write!(out, " {:.17e}", g.r_inner())?;
        }
        writeln!(out)?;
        match self {
            FieldFile::Scalar(f) => {
                for v in f.values() {
                    writeln!(out, "{v:.17e}")?;
                }
            }
            FieldFile::Vector(w) => {
                for (a, b) in w.x().iter().zip(w.y()) {
                    writeln!(out, "{a:.17e} {b:.17e}")?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from(input: impl BufRead) -> Result<Self, FieldIoError> {
        let mut lines = input.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String), FieldIoError> {
            match lines.next() {
                Some((n, Ok(l))) => Ok((n + 1, l)),
                Some((n, Err(e))) => Err(FieldIoError::Parse {
                    line: n + 1,
                    msg: e.to_string(),
                }),
                None => Err(FieldIoError::Parse {
                    line: 0,
                    msg: format!("unexpected end of file, expected {what}"),
                }),
            }
        };
        let perr = |line: usize, msg: String| FieldIoError::Parse { line, msg };

        let (n, magic) = next("header")?;
        if magic.trim() != MAGIC {
            return Err(perr(n, format!("expected '{MAGIC}', found '{magic}'")));
        }
        let (n, dims) = next("dimensions")?;
        let tok: Vec<&str> = dims.split_whitespace().collect();
        if tok.len() != 4 && tok.len() != 5 {
            return Err(perr(n, "expected 'n_r n_theta r_outer kind [r_inner]'".into()));
        }
        let n_r: usize = tok[0].parse().map_err(|e| perr(n, format!("n_r: {e}")))?;
        let n_theta: usize = tok[1].parse().map_err(|e| perr(n, format!("n_theta: {e}")))?;
        let r_outer: f64 = tok[2].parse().map_err(|e| perr(n, format!("r_outer: {e}")))?;
        let r_inner: f64 = match tok.get(4) {
            Some(t) => t.parse().map_err(|e| perr(n, format!("r_inner: {e}")))?,
            None => 1.0,
        };
        let vector = match tok[3] {
            "scalar" => false,
            "vector" => true,
            other => return Err(perr(n, format!("unknown kind '{other}'"))),
        };
        let mut grid = PolarGrid::new(n_r, n_theta, r_outer / r_inner)?;
        if r_inner != 1.0 {
            grid = grid.scaled(1.0 / r_inner);
        }
        let grid = Arc::new(grid);
        let count = grid.len();
        let mut a = Vec::with_capacity(count);
        let mut b = Vec::with_capacity(if vector { count } else { 0 });
        for _ in 0..count {
            let (n, l) = next("node value")?;
            let mut it = l.split_whitespace();
            let val = |it: &mut std::str::SplitWhitespace| -> Result<f64, FieldIoError> {
                it.next()
                    .ok_or_else(|| perr(n, "missing value".into()))?
                    .parse::<f64>()
                    .map_err(|e| perr(n, e.to_string()))
            };
            a.push(val(&mut it)?);
            if vector {
                b.push(val(&mut it)?);
            }
            if it.next().is_some() {
                return Err(perr(n, "trailing tokens".into()));
            }
        }
        Ok(if vector {
            FieldFile::Vector(VectorField::new(grid, a, b)?)
        } else {
            FieldFile::Scalar(ScalarField::new(grid, a)?)
        })
    }
}

pub fn write_field(path: &Path, field: &FieldFile) -> Result<(), FieldIoError> {
    let io = |source| FieldIoError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    field.write_to(&mut out).map_err(io)?;
    out.flush().map_err(io)
}

pub fn read_field(path: &Path) -> Result<FieldFile, FieldIoError> {
    let file = File::open(path).map_err(|source| FieldIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    FieldFile::read_from(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let g = Arc::new(build_grid(8, 8, 2.0).unwrap());
        let f = FieldFile::Scalar(ScalarField::from_fn(g, |x, _| x));
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("polar-field v1"));
        assert_eq!(lines.next(), Some("8 8 2.00000000000000000e0 scalar"));
        assert_eq!(text.lines().count(), 2 + 64);
    }

    #[test]
    fn rejects_malformed_input() {
        let bad = "polar-field v2\n8 8 2 scalar\n";
        assert!(FieldFile::read_from(bad.as_bytes()).is_err());
        let short = "polar-field v1\n8 8 2 scalar\n1.0\n";
        assert!(FieldFile::read_from(short.as_bytes()).is_err());
        let kind = "polar-field v1\n8 8 2 tensor\n";
        assert!(FieldFile::read_from(kind.as_bytes()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip_is_bit_exact(
            seed in any::<u64>(),
            r_outer in 1.01f64..500.0,
            vector in any::<bool>(),
            rescale in any::<bool>(),
        ) {
            let mut g = build_grid(9, 10, r_outer).unwrap();
            if rescale {
                g = g.scaled(r_outer);
            }
            let g = Arc::new(g);
            let mut state = seed | 1;
            let mut rnd = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                f64::from_bits((state >> 2) | 0x3000_0000_0000_0000) * if state & 1 == 0 { 1.0 } else { -1.0 }
            };
            let field = if vector {
                let x: Vec<f64> = (0..g.len()).map(|_| rnd()).collect();
                let y: Vec<f64> = (0..g.len()).map(|_| rnd()).collect();
                FieldFile::Vector(VectorField::new(g, x, y).unwrap())
            } else {
                FieldFile::Scalar(ScalarField::new(g.clone(), (0..g.len()).map(|_| rnd()).collect()).unwrap())
            };
            let mut buf = Vec::new();
            field.write_to(&mut buf).unwrap();
            let back = FieldFile::read_from(buf.as_slice()).unwrap();
            prop_assert_eq!(back.grid().n_r(), field.grid().n_r());
            match (&field, &back) {
                (FieldFile::Scalar(a), FieldFile::Scalar(b)) => prop_assert_eq!(a.values(), b.values()),
                (FieldFile::Vector(a), FieldFile::Vector(b)) => {
                    prop_assert_eq!(a.x(), b.x());
                    prop_assert_eq!(a.y(), b.y());
                }
                _ => prop_assert!(false, "kind changed"),
            }
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            prop_assert!(rel(back.grid().r_inner(), field.grid().r_inner()) < 1e-15);
            prop_assert!(rel(back.grid().r_outer(), field.grid().r_outer()) < 1e-15);
        }
    }
}
