//! Two-layer granular pile models on the unit interval and unit square.
//!
//! The crate implements the discrete standing/rolling-layer difference
//! scheme in 1-D and 2-D with an adaptive step controller enforcing the
//! discrete maximum principle, the critical-slope bound and nonnegativity,
//! plus explicit discretizations of the two competing PDE formulations for
//! geyser experiments, invariant checkers, a mesh-refinement study and CSV
//! persistence.

// Negated comparisons like `!(x >= 0.0)` are used throughout the checkers on
// purpose: unlike `x < 0.0`, they classify NaN as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod field;
mod grid;
mod kernel;
mod params;

pub mod diagnostics;
pub mod io;
pub mod reference;
pub mod scenario;
pub mod scheme1d;
pub mod scheme2d;

pub use error::{Error, Result};
pub use field::{
    bilinear_eval, directional_slopes, piecewise_linear_eval, slopes_at, DirectionalSlopes,
    LayerState, LayerState2D, SlopePair,
};
pub use grid::{Grid1D, Grid2D};
pub use params::PhysicalParams;
