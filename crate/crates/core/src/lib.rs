//! Muckenhoupt-type weight constants on dyadic grids, and numerical checks of
//! the quantitative inequalities that relate them.
//!
//! Weights are piecewise constant on the `2^L` (or `2^L x 2^L`) grid over the
//! unit cube. Every constant is a supremum over a [`CubeFamily`]; see
//! [`constants`] for the constants, [`verify`] for the inequality checks and
//! [`sobolev`] for the Poincaré-Sobolev side.

// Negated float comparisons are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod error;
pub mod families;
pub mod grid;
pub mod io;
pub mod maximal;
pub mod sobolev;
mod tables;
pub mod verify;

pub use constants::{ConstantsReport, JnExponent, Sup};
pub use error::{Error, Result};
pub use grid::{dual_weight, make_weight, Cube, CubeFamily, DoublingMode, GridFn, GridSpec, Weight};
pub use verify::{CheckId, CheckResult};
