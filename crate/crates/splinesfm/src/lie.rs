//! Quaternion, SO(3), and SE(3) primitives: exponential and logarithm maps,
//! the twist exponential, and numerically safe small-angle handling.
//!
//! Rotations are passed around as [`nalgebra::UnitQuaternion`]; rigid
//! transforms as [`Pose`]. Logarithms are restricted to the principal branch
//! (rotation angle < π). All functions here are pure.

use nalgebra::{Matrix3, Matrix4, Quaternion, UnitQuaternion, Vector3};
use thiserror::Error;

/// Below this rotation angle (rad) trigonometric ratios switch to their
/// second-order series, keeping the error under 1e-16.
pub const SMALL_ANGLE: f64 = 1e-8;

/// Rotation angles within this margin of π are rejected by the logarithms.
pub const LOG_BRANCH_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("log branch boundary: rotation angle {angle} rad is within {LOG_BRANCH_MARGIN} of pi")]
    LogBranchBoundary { angle: f64 },
}

/// Element of the SE(3) tangent space: a linear component and an axis-angle
/// rotation vector whose magnitude is the rotation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub linear: Vector3<f64>,
    pub angular: Vector3<f64>,
}

impl Twist {
    pub fn zero() -> Self {
        Twist {
            linear: Vector3::zeros(),
            angular: Vector3::zeros(),
        }
    }

    /// The 4×4 matrix form `[[ω]× v; 0 0]` used in spline derivative chains.
    pub fn hat(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(&self.angular));
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.linear);
        m
    }
}

/// Rigid-body transform, by convention from the body (camera) frame to the
/// global frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Pose {
            rotation,
            translation,
        }
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        self.rotation.to_rotation_matrix().into_inner()
    }

    pub fn inverse(&self) -> Pose {
        let rinv = self.rotation.inverse();
        Pose {
            rotation: rinv,
            translation: -(rinv * self.translation),
        }
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&self.rotation_matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Reads the rotation and translation blocks back out of a homogeneous
    /// matrix. The rotation block must be (numerically) orthonormal.
    pub fn from_homogeneous(m: &Matrix4<f64>) -> Pose {
        let r = m.fixed_view::<3, 3>(0, 0).into_owned();
        let q = UnitQuaternion::from_matrix(&r);
        Pose {
            rotation: q,
            translation: m.fixed_view::<3, 1>(0, 3).into_owned(),
        }
    }
}

/// Cross-product matrix, `skew(a) * b == a × b`.
pub fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Exponential map from axis-angle vectors to unit quaternions.
///
/// `|w|` is the rotation angle; the zero vector maps to the identity through
/// the series expansion.
pub fn quat_exp(w: &Vector3<f64>) -> UnitQuaternion<f64> {
    let angle = w.norm();
    let half = 0.5 * angle;
    let (re, imag_scale) = if angle < SMALL_ANGLE {
        (1.0 - 0.5 * half * half, 0.5 - angle * angle / 48.0)
    } else {
        (half.cos(), half.sin() / angle)
    };
    UnitQuaternion::from_quaternion(Quaternion::from_parts(re, w * imag_scale))
}

/// Principal-branch logarithm: axis-angle vector with angle in [0, π].
///
/// `q` and `-q` map to the same rotation vector.
pub fn quat_log(q: &UnitQuaternion<f64>) -> Vector3<f64> {
    let mut raw = *q.quaternion();
    if raw.w < 0.0 {
        raw = -raw;
    }
    let vec = raw.imag();
    let s = vec.norm();
    if s < SMALL_ANGLE {
        let c = raw.w;
        vec * (2.0 / c * (1.0 - s * s / (3.0 * c * c)))
    } else {
        vec * (2.0 * s.atan2(raw.w) / s)
    }
}

// sin(θ)/θ, (1-cos θ)/θ², (θ-sin θ)/θ³ with small-angle series.
fn trig_ratios(angle: f64) -> (f64, f64, f64) {
    if angle < SMALL_ANGLE {
        let a2 = angle * angle;
        (1.0 - a2 / 6.0, 0.5 - a2 / 24.0, 1.0 / 6.0 - a2 / 120.0)
    } else {
        let a2 = angle * angle;
        let s = angle.sin();
        let c = angle.cos();
        (s / angle, (1.0 - c) / a2, (angle - s) / (a2 * angle))
    }
}

/// Exponential of a twist scaled by `theta`.
///
/// The angular part is normalized internally with its magnitude folded into
/// the effective angle `|ω|·θ`, so the result equals the matrix exponential of
/// `hat(ξ)·θ`. When `‖ω‖ → 0` this degenerates to the pure translation `v·θ`.
pub fn se3_exp(xi: &Twist, theta: f64) -> Pose {
    let u = xi.angular * theta;
    let angle = u.norm();
    let (_, b, c) = trig_ratios(angle);
    let ux = skew(&u);
    let ux2 = ux * ux;
    let v_mat = Matrix3::identity() + ux * b + ux2 * c;
    Pose {
        rotation: quat_exp(&u),
        translation: v_mat * (xi.linear * theta),
    }
}

/// Logarithm of a rigid transform: the twist `ξ` with `se3_exp(ξ, 1)`
/// reproducing the input.
///
/// Rejects rotations closer than [`LOG_BRANCH_MARGIN`] to the π branch
/// boundary.
pub fn se3_log(pose: &Pose) -> Result<Twist, GeometryError> {
    let u = quat_log(&pose.rotation);
    let angle = u.norm();
    if angle >= std::f64::consts::PI - LOG_BRANCH_MARGIN {
        return Err(GeometryError::LogBranchBoundary { angle });
    }
    let ux = skew(&u);
    let ux2 = ux * ux;
    let c = if angle < SMALL_ANGLE {
        1.0 / 12.0 + angle * angle / 720.0
    } else {
        1.0 / (angle * angle) - 1.0 / (2.0 * angle * (0.5 * angle).tan())
    };
    let v_inv = Matrix3::identity() - ux * 0.5 + ux2 * c;
    Ok(Twist {
        linear: v_inv * pose.translation,
        angular: u,
    })
}
