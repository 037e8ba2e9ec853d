//! Continuous-time structure from motion for rolling-shutter cameras and IMUs.
//!
//! The camera trajectory is a uniform cubic B-spline in cumulative form, either
//! split into independent position (R³) and orientation (SO(3)) splines, or a
//! single spline over rigid-body poses (SE(3)). Landmarks are parameterized by a
//! reference observation and an inverse depth, and are reprojected into
//! rolling-shutter frames with one of three strategies (static, Newton, lifting).
//! A robustified Levenberg–Marquardt solver estimates trajectory, structure, and
//! optional IMU biases from pixel tracks plus gyroscope and accelerometer
//! streams, with residual weights and knot spacing chosen by spline error
//! weighting. A simulator and an evaluation harness round out the toolbox.
//!
//! Entry points:
//! - [`lie`]: quaternion/SO(3)/SE(3) exponential and logarithm maps.
//! - [`splines`]: cumulative B-spline evaluation with analytic derivatives.
//! - [`trajectory`]: unified pose + IMU prediction interface over both spline spaces.
//! - [`rscam`]: rolling-shutter pinhole camera and landmark projection methods.
//! - [`sew`]: spline error weighting (knot spacing and IMU residual weights).
//! - [`estimator`]: batch problem construction and the Levenberg–Marquardt solver.
//! - [`sim`]: synthetic trajectory, IMU, and rolling-shutter observation generator.
//! - [`eval`]: trajectory alignment and the trapezoid area error metric.
//! - [`dataset`]: dataset and result file serialization.

pub mod dataset;
pub mod estimator;
pub mod eval;
pub mod lie;
pub mod rscam;
pub mod sew;
pub mod sim;
pub mod splines;
pub mod trajectory;

pub use lie::{Pose, Twist};
pub use trajectory::Trajectory;

/// Default gravity vector in the global frame (m/s²), pointing down along -z.
pub const DEFAULT_GRAVITY: [f64; 3] = [0.0, 0.0, -9.8065];

// The book chapters double as doc tests so their snippets stay in sync with
// the library (`cargo test --doc`).
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/lie.md")]
    mod lie {}
    #[doc = include_str!("../../../book/src/splines.md")]
    mod splines {}
    #[doc = include_str!("../../../book/src/trajectories.md")]
    mod trajectories {}
    #[doc = include_str!("../../../book/src/rolling-shutter.md")]
    mod rolling_shutter {}
    #[doc = include_str!("../../../book/src/sew.md")]
    mod sew {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
}
