//! Stationary Navier-Stokes flow past the unit disc in truncated circular
//! domains: a stream-function/vorticity Newton solver on log-polar grids,
//! post-processing of energies, forces and circle averages, the unit-disc
//! blow-down, and a driver for invading-domain sequences.

// negated comparisons double as NaN rejection
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowdown;
pub mod diagnostics;
pub mod driver;
pub mod grid;
pub mod reference;
pub mod solver;
