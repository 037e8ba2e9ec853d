//! Pinhole camera with rolling shutter: projection and inverse projection
//! under inverse depth, row-time mapping, the reference-transfer function,
//! the row-time deviation, and the three projection strategies (static,
//! Newton, lifting).

use nalgebra::{Vector2, Vector3, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lie::skew;
use crate::trajectory::{Trajectory, TrajectoryError};

/// Minimum depth accepted by [`RsCamera::project`].
pub const MIN_DEPTH: f64 = 1e-9;

/// Row-time deviation tolerance (rows) for Newton projection.
pub const NEWTON_TOL_ROWS: f64 = 1e-2;

/// Iteration cap for Newton projection before falling back to bisection.
pub const NEWTON_MAX_ITER: usize = 10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProjectionError {
    #[error("behind camera: depth {depth} below {MIN_DEPTH}")]
    BehindCamera { depth: f64 },
    #[error("row-time deviation undefined for global shutter (readout = 0)")]
    GlobalShutterUndefined,
    #[error("projection time not found in readout window")]
    TimeNotFound,
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

/// Pinhole intrinsics with rolling-shutter timing. `readout = 0` degenerates
/// to a global shutter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsCamera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// Image columns.
    pub nu: u32,
    /// Image rows.
    pub nv: u32,
    /// Image readout time (s), `0 <= readout <= frame_period`.
    pub readout: f64,
    pub frame_period: f64,
}

impl RsCamera {
    pub fn validate(&self) -> Result<(), String> {
        if self.nv == 0 || self.nu == 0 {
            return Err("image dimensions must be positive".into());
        }
        if !(self.readout >= 0.0 && self.readout <= self.frame_period) {
            return Err(format!(
                "readout {} outside [0, frame_period = {}]",
                self.readout, self.frame_period
            ));
        }
        Ok(())
    }

    /// Projects a point in the camera frame to pixel coordinates.
    pub fn project(&self, x: &Vector3<f64>) -> Result<Vector2<f64>, ProjectionError> {
        if x.z <= MIN_DEPTH {
            return Err(ProjectionError::BehindCamera { depth: x.z });
        }
        Ok(Vector2::new(
            self.fx * x.x / x.z + self.cx,
            self.fy * x.y / x.z + self.cy,
        ))
    }

    /// Unit-depth ray through a pixel, stacked with the inverse depth:
    /// `[(u-cx)/fx, (v-cy)/fy, 1, rho]`.
    pub fn unproject(&self, y: &Vector2<f64>, rho: f64) -> Vector4<f64> {
        Vector4::new((y.x - self.cx) / self.fx, (y.y - self.cy) / self.fy, 1.0, rho)
    }

    /// Capture time of image row `v` in the frame starting at `t0`.
    pub fn row_time(&self, t0: f64, v: f64) -> f64 {
        t0 + self.readout * v / self.nv as f64
    }

    pub fn contains_pixel(&self, y: &Vector2<f64>) -> bool {
        y.x >= 0.0 && y.x <= self.nu as f64 && y.y >= 0.0 && y.y <= self.nv as f64
    }
}

/// Landmark as a reference observation plus inverse depth. `inv_depth = 0`
/// encodes a point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmark {
    pub ref_frame: usize,
    pub ref_obs: Vector2<f64>,
    /// Row time of the reference observation in its frame.
    pub ref_time: f64,
    pub inv_depth: f64,
}

/// One pixel measurement of a landmark in a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub landmark: usize,
    pub frame: usize,
    pub pixel: Vector2<f64>,
    /// Frame start time `t0` of `frame`.
    pub frame_t0: f64,
}

impl Observation {
    /// Capture time implied by the observed row.
    pub fn row_time(&self, camera: &RsCamera) -> f64 {
        camera.row_time(self.frame_t0, self.pixel.y)
    }
}

/// Transfers the landmark's reference observation to evaluation time `t`:
/// `psi(t) = project(T⁻¹(t) · T(t_ref) · [unproject(y_ref); rho])`.
pub fn transfer(
    camera: &RsCamera,
    traj: &Trajectory,
    landmark: &Landmark,
    t: f64,
) -> Result<Vector2<f64>, ProjectionError> {
    let ray = camera.unproject(&landmark.ref_obs, landmark.inv_depth);
    let pose_ref = traj.pose(landmark.ref_time)?;
    let world = pose_ref.rotation * ray.xyz() + pose_ref.translation * landmark.inv_depth;
    let pose = traj.pose(t)?;
    let cam_vec = pose.rotation.inverse() * (world - pose.translation * landmark.inv_depth);
    camera.project(&cam_vec)
}

/// Transfer with its analytic time derivative, used by Newton projection.
pub fn transfer_with_rate(
    camera: &RsCamera,
    traj: &Trajectory,
    landmark: &Landmark,
    t: f64,
) -> Result<(Vector2<f64>, Vector2<f64>), ProjectionError> {
    let ray = camera.unproject(&landmark.ref_obs, landmark.inv_depth);
    let pose_ref = traj.pose(landmark.ref_time)?;
    let world = pose_ref.rotation * ray.xyz() + pose_ref.translation * landmark.inv_depth;
    let kin = traj.kinematics(t)?;
    let x = kin.pose.rotation.inverse() * (world - kin.pose.translation * landmark.inv_depth);
    if x.z <= MIN_DEPTH {
        return Err(ProjectionError::BehindCamera { depth: x.z });
    }
    // d/dt [Rᵀ(w - ρp)] = -[ω]× x - ρ Rᵀ ṗ, with Ṙ = R[ω]×.
    let dx = -skew(&kin.angular_body) * x
        - kin.pose.rotation.inverse() * kin.linear * landmark.inv_depth;
    let z2 = x.z * x.z;
    let pixel = Vector2::new(
        camera.fx * x.x / x.z + camera.cx,
        camera.fy * x.y / x.z + camera.cy,
    );
    let rate = Vector2::new(
        camera.fx * (dx.x * x.z - x.x * dx.z) / z2,
        camera.fy * (dx.y * x.z - x.y * dx.z) / z2,
    );
    Ok((pixel, rate))
}

/// Row-time deviation in rows: `(t - t0)·Nv/r - psi_v(t)`.
pub fn epsilon(
    camera: &RsCamera,
    traj: &Trajectory,
    landmark: &Landmark,
    frame_t0: f64,
    t: f64,
) -> Result<f64, ProjectionError> {
    if camera.readout == 0.0 {
        return Err(ProjectionError::GlobalShutterUndefined);
    }
    let psi = transfer(camera, traj, landmark, t)?;
    Ok((t - frame_t0) * camera.nv as f64 / camera.readout - psi.y)
}

// Same deviation, but parameterized by the window-relative time tau = t - t0,
// so the row term tau·Nv/r stays exact even for vanishing readout times where
// absolute-time subtraction would lose precision.
fn epsilon_with_rate_tau(
    camera: &RsCamera,
    traj: &Trajectory,
    landmark: &Landmark,
    frame_t0: f64,
    tau: f64,
) -> Result<(f64, f64, Vector2<f64>), ProjectionError> {
    if camera.readout == 0.0 {
        return Err(ProjectionError::GlobalShutterUndefined);
    }
    let (psi, dpsi) = transfer_with_rate(camera, traj, landmark, frame_t0 + tau)?;
    let slope = camera.nv as f64 / camera.readout;
    Ok((tau * slope - psi.y, slope - dpsi.y, psi))
}

/// Static projection: evaluate the transfer at the observed row's time and
/// ignore the row-time constraint.
pub fn project_static(
    camera: &RsCamera,
    traj: &Trajectory,
    landmark: &Landmark,
    obs: &Observation,
) -> Result<Vector2<f64>, ProjectionError> {
    transfer(camera, traj, landmark, obs.row_time(camera))
}

/// Outcome of Newton projection: the transfer at the solved time.
#[derive(Debug, Clone, Copy)]
pub struct NewtonProjection {
    pub pixel: Vector2<f64>,
    pub time: f64,
    /// Row-time deviation at the returned time; `|epsilon| <= NEWTON_TOL_ROWS`.
    pub epsilon: f64,
    pub iterations: usize,
}

/// Newton projection: root-solve the row-time deviation, starting from the
/// observed row's time, with a bounded-bisection fallback on divergence.
///
/// `warm_start` replaces the observed-row initialization when given (the
/// solver passes the previous solution for the same observation).
pub fn project_newton(
    camera: &RsCamera,
    traj: &Trajectory,
    landmark: &Landmark,
    obs: &Observation,
    warm_start: Option<f64>,
) -> Result<NewtonProjection, ProjectionError> {
    let t0 = obs.frame_t0;
    let window = camera.readout;
    let mut tau = warm_start
        .map(|t| t - t0)
        .unwrap_or_else(|| window * obs.pixel.y / camera.nv as f64);
    let mut iterations = 0;
    let mut last_err: Option<ProjectionError> = None;
    for _ in 0..NEWTON_MAX_ITER {
        match epsilon_with_rate_tau(camera, traj, landmark, t0, tau) {
            Ok((eps, deps, pixel)) => {
                iterations += 1;
                if eps.abs() <= NEWTON_TOL_ROWS {
                    return Ok(NewtonProjection {
                        pixel,
                        time: t0 + tau,
                        epsilon: eps,
                        iterations,
                    });
                }
                if deps.abs() < 1e-12 {
                    break;
                }
                tau = (tau - eps / deps).clamp(-0.2 * window, 1.2 * window);
            }
            Err(e @ ProjectionError::GlobalShutterUndefined) => return Err(e),
            Err(e) => {
                last_err = Some(e);
                break;
            }
        }
    }
    // Bisection fallback over the readout window.
    let f = |tau: f64| {
        epsilon_with_rate_tau(camera, traj, landmark, t0, tau)
            .ok()
            .map(|(eps, _, _)| eps)
    };
    if let Some(root) = bracketed_roots(&f, 0.0, window, 16, 1e-3 * NEWTON_TOL_ROWS)
        .into_iter()
        .next()
    {
        if let Ok((eps, _, pixel)) = epsilon_with_rate_tau(camera, traj, landmark, t0, root) {
            if eps.abs() <= NEWTON_TOL_ROWS {
                return Ok(NewtonProjection {
                    pixel,
                    time: t0 + root,
                    epsilon: eps,
                    iterations: iterations.max(1),
                });
            }
        }
    }
    Err(last_err.unwrap_or(ProjectionError::TimeNotFound))
}

/// Residual pair for the lifting method: pixel residual at the lifted time
/// plus the row-time deviation as a soft constraint.
pub fn lifting_residuals(
    camera: &RsCamera,
    traj: &Trajectory,
    landmark: &Landmark,
    obs: &Observation,
    t_lift: f64,
) -> Result<(Vector2<f64>, f64), ProjectionError> {
    let psi = transfer(camera, traj, landmark, t_lift)?;
    let eps = if camera.readout == 0.0 {
        0.0
    } else {
        (t_lift - obs.frame_t0) * camera.nv as f64 / camera.readout - psi.y
    };
    Ok((obs.pixel - psi, eps))
}

/// Bounds of the lifted-time parameter: frame readout window extended by a
/// 20% margin on both sides.
pub fn lift_time_bounds(camera: &RsCamera, frame_t0: f64) -> (f64, f64) {
    let w = camera.readout;
    (frame_t0 - 0.2 * w, frame_t0 + 1.2 * w)
}

/// Brent's method on a bracketing interval. `f` may report failure (`None`),
/// which aborts the search. `fa` and `fb` must have opposite signs.
pub fn brent_root<F: FnMut(f64) -> Option<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    xtol: f64,
    ftol: f64,
) -> Option<f64> {
    if fa * fb > 0.0 {
        return None;
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..100 {
        if fb.abs() <= ftol || (b - a).abs() <= xtol {
            return Some(b);
        }
        let mut s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let outside = !((s >= lo.min(b) && s <= lo.max(b)) || (s <= lo.max(b) && s >= lo.min(b)));
        let use_bisect = outside
            || (mflag && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!mflag && (s - b).abs() >= (c - d).abs() / 2.0)
            || (mflag && (b - c).abs() < xtol)
            || (!mflag && (c - d).abs() < xtol);
        if use_bisect {
            s = (a + b) / 2.0;
        }
        mflag = use_bisect;
        let fs = f(s)?;
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Some(b)
}

/// Scans `[a, b]` in `n` subintervals and Brent-solves every sign change.
/// Evaluation failures (e.g. behind camera) skip the affected subinterval.
pub fn bracketed_roots<F: Fn(f64) -> Option<f64>>(
    f: &F,
    a: f64,
    b: f64,
    n: usize,
    ftol: f64,
) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (b - a) / n as f64;
    let mut prev_t = a;
    let mut prev_f = f(a);
    for i in 1..=n {
        let t = a + step * i as f64;
        let ft = f(t);
        if let (Some(f0), Some(f1)) = (prev_f, ft) {
            if f0 == 0.0 {
                roots.push(prev_t);
            } else if f0 * f1 < 0.0 {
                if let Some(root) = brent_root(|x| f(x), prev_t, t, f0, f1, 1e-15, ftol) {
                    roots.push(root);
                }
            }
        }
        prev_t = t;
        prev_f = ft;
    }
    if let Some(fb) = prev_f {
        if fb == 0.0 {
            roots.push(b);
        }
    }
    roots
}
