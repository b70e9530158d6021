//! Support-function geometry and minimal-graph solvers over convex rings,
//! with numerical checks of the concavity of level-set curvature.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command
//! line live in the `mslab` crate.

#![no_std]
// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod concavity;
pub mod error;
pub mod interp;
pub mod jet;
pub mod linalg;
pub mod quadrature;
pub mod radial;
pub mod ring;
pub mod roots;
pub mod stencil;
pub mod support;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
