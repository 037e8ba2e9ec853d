//! Uniform cubic B-spline evaluation in cumulative form on R³, SO(3), and
//! SE(3), with analytic first and second time derivatives.
//!
//! All three spline types share the same [`KnotGrid`] and the same cumulative
//! basis weights: a curve is a start value plus basis-weighted increments
//! between consecutive control points, which is what lets the construction
//! carry over from vector space to Lie-group-valued control points.

mod basis;
mod r3;
mod se3;
mod so3;

pub use basis::{cumulative_basis, CumulativeBasis, KnotGrid};
pub use r3::R3Spline;
pub use se3::{Se3Sample, Se3Spline};
pub use so3::{So3Sample, So3Spline};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SplineError {
    #[error("out of spline support: t={t} not in [{start}, {end})")]
    OutOfSupport { t: f64, start: f64, end: f64 },
    #[error("log branch boundary between control points {left} and {right}")]
    LogBranchBoundary { left: usize, right: usize },
    #[error("invalid knot grid: dt={dt}, count={count} (need dt > 0 and count >= 4)")]
    InvalidGrid { dt: f64, count: usize },
    #[error("control point count {points} does not match grid count {grid}")]
    ControlPointCount { points: usize, grid: usize },
}
