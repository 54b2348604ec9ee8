//! Geometry of transverse Riemann-Lorentz metrics with tangent radical.
//!
//! The crate works with smooth metrics that lose rank on the hypersurface
//! `x1 = 0` of an adapted coordinate chart, changing signature from
//! Riemannian to Lorentzian across it while the degenerate direction stays
//! tangent to the hypersurface. It computes the canonical structures living
//! on that hypersurface (main normal, main radical field, both fundamental
//! forms, the canonical screen distribution, a family of admissible
//! connections) and classifies the boundary behaviour of Levi-Civita
//! curvature quantities: finite limit, extension dependence, or divergence
//! with a fitted order.
//!
//! Start with [`metric::AdaptedMetric`] and the builtin model library, or see
//! the `examples/` directory, which walks through every major capability.

// tensor contractions and small dense kernels read better with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod connections;
pub mod dual;
pub mod error;
pub mod expr;
pub mod jet;
pub mod limits;
pub mod linalg;
pub mod metric;
pub mod probe;
pub mod report;
pub mod sigma;
pub mod verify;

pub use error::{Error, Result};
