//! Unified continuous-pose interface over split (R³+SO(3)) and SE(3) splines,
//! body-frame IMU prediction models, and the gravity convention.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lie::Pose;
use crate::splines::{R3Spline, Se3Spline, So3Spline, SplineError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrajectoryKind {
    Split,
    Se3,
}

impl std::fmt::Display for TrajectoryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrajectoryKind::Split => write!(f, "split"),
            TrajectoryKind::Se3 => write!(f, "se3"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("split sub-splines must share the same support interval")]
    MismatchedSupport,
    #[error(transparent)]
    Spline(#[from] SplineError),
}

/// Pose and first-order body kinematics at one time.
#[derive(Debug, Clone, Copy)]
pub struct Kinematics {
    pub pose: Pose,
    /// Body-frame angular velocity (rad/s).
    pub angular_body: Vector3<f64>,
    /// Global-frame linear velocity (m/s).
    pub linear: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryRepr {
    Split { r3: R3Spline, so3: So3Spline },
    Se3(Se3Spline),
}

/// Continuous body-to-global pose with gravity, evaluable anywhere inside the
/// spline support.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    repr: TrajectoryRepr,
    pub gravity: Vector3<f64>,
}

impl Trajectory {
    pub fn split(r3: R3Spline, so3: So3Spline, gravity: Vector3<f64>) -> Result<Self, TrajectoryError> {
        if r3.grid() != so3.grid() {
            return Err(TrajectoryError::MismatchedSupport);
        }
        Ok(Trajectory {
            repr: TrajectoryRepr::Split { r3, so3 },
            gravity,
        })
    }

    pub fn se3(spline: Se3Spline, gravity: Vector3<f64>) -> Self {
        Trajectory {
            repr: TrajectoryRepr::Se3(spline),
            gravity,
        }
    }

    pub fn default_gravity() -> Vector3<f64> {
        Vector3::from(crate::DEFAULT_GRAVITY)
    }

    pub fn kind(&self) -> TrajectoryKind {
        match &self.repr {
            TrajectoryRepr::Split { .. } => TrajectoryKind::Split,
            TrajectoryRepr::Se3(_) => TrajectoryKind::Se3,
        }
    }

    pub fn repr(&self) -> &TrajectoryRepr {
        &self.repr
    }

    pub fn repr_mut(&mut self) -> &mut TrajectoryRepr {
        &mut self.repr
    }

    /// Half-open support interval common to all underlying splines.
    pub fn support(&self) -> (f64, f64) {
        let grid = match &self.repr {
            TrajectoryRepr::Split { r3, .. } => r3.grid(),
            TrajectoryRepr::Se3(s) => s.grid(),
        };
        (grid.support_start(), grid.support_end())
    }

    pub fn contains(&self, t: f64) -> bool {
        let (a, b) = self.support();
        t >= a && t < b
    }

    /// Body-to-global pose at `t`.
    pub fn pose(&self, t: f64) -> Result<Pose, TrajectoryError> {
        match &self.repr {
            TrajectoryRepr::Split { r3, so3 } => Ok(Pose::new(so3.orientation(t)?, r3.position(t)?)),
            TrajectoryRepr::Se3(s) => Ok(s.pose(t)?),
        }
    }

    /// Pose plus body angular velocity and global linear velocity.
    pub fn kinematics(&self, t: f64) -> Result<Kinematics, TrajectoryError> {
        match &self.repr {
            TrajectoryRepr::Split { r3, so3 } => {
                let rot = so3.eval(t)?;
                let (p, v, _) = r3.eval_all(t)?;
                Ok(Kinematics {
                    pose: Pose::new(rot.q, p),
                    angular_body: rot.body_angular_velocity(),
                    linear: v,
                })
            }
            TrajectoryRepr::Se3(s) => {
                let sample = s.eval(t)?;
                let r = sample.pose.rotation_matrix();
                let dr = sample.d1.fixed_view::<3, 3>(0, 0).into_owned();
                Ok(Kinematics {
                    pose: sample.pose,
                    angular_body: vee_average(&(r.transpose() * dr)),
                    linear: sample.d1.fixed_view::<3, 1>(0, 3).into_owned(),
                })
            }
        }
    }

    /// Ideal gyroscope output: body-frame angular velocity.
    pub fn predict_gyro(&self, t: f64) -> Result<Vector3<f64>, TrajectoryError> {
        Ok(self.kinematics(t)?.angular_body)
    }

    /// Ideal accelerometer output `Rᵀ(p̈ - g)`, with `p̈` taken from the
    /// representation's own second derivative.
    pub fn predict_accel(&self, t: f64) -> Result<Vector3<f64>, TrajectoryError> {
        match &self.repr {
            TrajectoryRepr::Split { r3, so3 } => {
                let q = so3.orientation(t)?;
                let acc = r3.acceleration(t)?;
                Ok(q.inverse() * (acc - self.gravity))
            }
            TrajectoryRepr::Se3(s) => {
                let sample = s.eval(t)?;
                let acc = sample.d2.fixed_view::<3, 1>(0, 3).into_owned();
                Ok(sample.pose.rotation.inverse() * (acc - self.gravity))
            }
        }
    }
}

// Extracts the rotation rate vector from a (numerically) skew-symmetric
// matrix by antisymmetric averaging.
fn vee_average(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::quat_exp;
    use crate::splines::KnotGrid;
    use nalgebra::UnitQuaternion;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, scale: f64) -> Vector3<f64> {
        Vector3::new(
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        )
    }

    fn grid() -> KnotGrid {
        KnotGrid::new(0.0, 0.25, 12).unwrap()
    }

    fn random_split(seed: u64, rot_step: f64) -> Trajectory {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = grid();
        let positions: Vec<_> = (0..g.count).map(|_| random_vec(&mut rng, 1.5)).collect();
        let mut quats = vec![quat_exp(&random_vec(&mut rng, 0.5))];
        for _ in 1..g.count {
            let prev = *quats.last().unwrap();
            quats.push(prev * quat_exp(&random_vec(&mut rng, rot_step)));
        }
        Trajectory::split(
            R3Spline::new(g, positions).unwrap(),
            So3Spline::new(g, quats).unwrap(),
            Trajectory::default_gravity(),
        )
        .unwrap()
    }

    fn random_se3(seed: u64, rot_step: f64) -> Trajectory {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = grid();
        let mut poses = vec![Pose::new(quat_exp(&random_vec(&mut rng, 0.5)), random_vec(&mut rng, 1.5))];
        for _ in 1..g.count {
            let prev = *poses.last().unwrap();
            poses.push(prev.compose(&Pose::new(
                quat_exp(&random_vec(&mut rng, rot_step)),
                random_vec(&mut rng, 0.4),
            )));
        }
        Trajectory::se3(Se3Spline::new(g, poses).unwrap(), Trajectory::default_gravity())
    }

    fn interior_times(traj: &Trajectory, n: usize, margin: f64) -> Vec<f64> {
        let (a, b) = traj.support();
        (0..n)
            .map(|i| a + margin + (i as f64 + 0.5) / n as f64 * (b - a - 2.0 * margin))
            .collect()
    }

    fn static_trajectory(kind: TrajectoryKind, pose: Pose) -> Trajectory {
        let g = grid();
        match kind {
            TrajectoryKind::Split => Trajectory::split(
                R3Spline::constant(g, pose.translation),
                So3Spline::constant(g, pose.rotation),
                Trajectory::default_gravity(),
            )
            .unwrap(),
            TrajectoryKind::Se3 => {
                Trajectory::se3(Se3Spline::constant(g, pose), Trajectory::default_gravity())
            }
        }
    }

    #[test]
    fn constant_trajectory_has_constant_pose() {
        let pose = Pose::new(quat_exp(&Vector3::new(0.2, -0.1, 0.4)), Vector3::new(1.0, 2.0, 3.0));
        for kind in [TrajectoryKind::Split, TrajectoryKind::Se3] {
            let traj = static_trajectory(kind, pose);
            for t in interior_times(&traj, 25, 0.0) {
                let got = traj.pose(t).unwrap();
                assert!((got.translation - pose.translation).norm() < 1e-13);
                assert!(got.rotation.angle_to(&pose.rotation) < 1e-13);

                let round = got.compose(&got.inverse());
                assert!(round.translation.norm() < 1e-12);
                assert!(round.rotation.angle() < 1e-12);
            }
        }
    }

    #[test]
    fn split_and_se3_agree_for_constant_orientation() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let g = grid();
        let q = quat_exp(&random_vec(&mut rng, 0.7));
        let positions: Vec<_> = (0..g.count).map(|_| random_vec(&mut rng, 2.0)).collect();
        let split = Trajectory::split(
            R3Spline::new(g, positions.clone()).unwrap(),
            So3Spline::constant(g, q),
            Trajectory::default_gravity(),
        )
        .unwrap();
        let se3 = Trajectory::se3(
            Se3Spline::new(g, positions.iter().map(|p| Pose::new(q, *p)).collect()).unwrap(),
            Trajectory::default_gravity(),
        );
        for t in interior_times(&split, 100, 0.0) {
            let a = split.pose(t).unwrap().translation;
            let b = se3.pose(t).unwrap().translation;
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn static_trajectory_imu_predictions() {
        let pose = Pose::identity();
        for kind in [TrajectoryKind::Split, TrajectoryKind::Se3] {
            let traj = static_trajectory(kind, pose);
            for t in interior_times(&traj, 10, 0.0) {
                assert_eq!(traj.predict_gyro(t).unwrap(), Vector3::zeros());
                let accel = traj.predict_accel(t).unwrap();
                assert!((accel - Vector3::new(0.0, 0.0, 9.8065)).norm() < 1e-12);
            }
        }

        // At rest with arbitrary orientation the specific force magnitude is |g|.
        let tilted = Pose::new(quat_exp(&Vector3::new(0.3, 0.5, -0.2)), Vector3::new(4.0, 5.0, 6.0));
        for kind in [TrajectoryKind::Split, TrajectoryKind::Se3] {
            let traj = static_trajectory(kind, tilted);
            let t = interior_times(&traj, 1, 0.0)[0];
            assert_eq!(traj.predict_gyro(t).unwrap(), Vector3::zeros());
            let accel = traj.predict_accel(t).unwrap();
            assert!((accel.norm() - 9.8065).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_rate_rotation_gyro_both_kinds() {
        let g = grid();
        let rate = 0.9;
        let quats: Vec<_> = (0..g.count)
            .map(|k| quat_exp(&Vector3::new(0.0, 0.0, rate * g.knot_time(k))))
            .collect();
        let split = Trajectory::split(
            R3Spline::constant(g, Vector3::new(1.0, 0.0, 0.0)),
            So3Spline::new(g, quats.clone()).unwrap(),
            Trajectory::default_gravity(),
        )
        .unwrap();
        let se3 = Trajectory::se3(
            Se3Spline::new(
                g,
                quats.iter().map(|q| Pose::new(*q, Vector3::new(1.0, 0.0, 0.0))).collect(),
            )
            .unwrap(),
            Trajectory::default_gravity(),
        );
        for traj in [&split, &se3] {
            for t in interior_times(traj, 50, 0.0) {
                let omega = traj.predict_gyro(t).unwrap();
                assert!(
                    (omega - Vector3::new(0.0, 0.0, rate)).norm() < 1e-6,
                    "kind={:?} omega={omega:?}",
                    traj.kind()
                );
            }
        }
    }

    #[test]
    fn gyro_matches_finite_difference_rotation_rate() {
        let h = 1e-6;
        for traj in [random_split(42, 0.6), random_se3(43, 0.6)] {
            for t in interior_times(&traj, 60, 0.01) {
                let omega = traj.predict_gyro(t).unwrap();
                let r = traj.pose(t).unwrap().rotation_matrix();
                let rp = traj.pose(t + h).unwrap().rotation_matrix();
                let rm = traj.pose(t - h).unwrap().rotation_matrix();
                let dr = (rp - rm) / (2.0 * h);
                let fd = vee_average(&(r.transpose() * dr));
                assert!(
                    (omega - fd).norm() < 1e-5,
                    "kind={:?} omega={omega:?} fd={fd:?}",
                    traj.kind()
                );
            }
        }
    }

    #[test]
    fn split_accel_matches_finite_difference() {
        let traj = random_split(44, 0.7);
        let h = 1e-4;
        for t in interior_times(&traj, 60, 0.01) {
            let accel = traj.predict_accel(t).unwrap();
            let p = |t| traj.pose(t).unwrap().translation;
            let pdd = (p(t + h) - p(t) * 2.0 + p(t - h)) / (h * h);
            let r = traj.pose(t).unwrap().rotation;
            let expected = r.inverse() * (pdd - traj.gravity);
            assert!((accel - expected).norm() < 1e-4, "accel={accel:?} expected={expected:?}");
        }
    }

    #[test]
    fn se3_accel_from_rotating_spline_is_not_kinematic() {
        let traj = random_se3(45, 0.8);
        let h = 1e-4;
        let mut worst = 0.0_f64;
        for t in interior_times(&traj, 60, 0.01) {
            let accel = traj.predict_accel(t).unwrap();
            let p = |t| traj.pose(t).unwrap().translation;
            let pdd = (p(t + h) - p(t) * 2.0 + p(t - h)) / (h * h);
            let r = traj.pose(t).unwrap().rotation;
            let expected = r.inverse() * (pdd - traj.gravity);
            worst = worst.max((accel - expected).norm());
        }
        assert!(worst > 10.0 * 1e-4, "worst deviation {worst}");
    }

    #[test]
    fn gyro_invariant_under_global_reorientation() {
        let base = random_split(46, 0.6);
        let fixed = quat_exp(&Vector3::new(0.4, -0.8, 1.1));
        let TrajectoryRepr::Split { r3, so3 } = base.repr().clone() else {
            unreachable!()
        };
        let rotated_quats: Vec<UnitQuaternion<f64>> =
            so3.points().iter().map(|q| fixed * *q).collect();
        let rotated = Trajectory::split(
            r3,
            So3Spline::new(*so3.grid(), rotated_quats).unwrap(),
            base.gravity,
        )
        .unwrap();
        for t in interior_times(&base, 40, 0.01) {
            let a = base.predict_gyro(t).unwrap();
            let b = rotated.predict_gyro(t).unwrap();
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn split_accel_invariant_under_global_translation() {
        let base = random_split(47, 0.6);
        let offset = Vector3::new(10.0, -20.0, 5.0);
        let TrajectoryRepr::Split { r3, so3 } = base.repr().clone() else {
            unreachable!()
        };
        let shifted_points: Vec<_> = r3.points().iter().map(|p| p + offset).collect();
        let shifted = Trajectory::split(
            R3Spline::new(*r3.grid(), shifted_points).unwrap(),
            so3,
            base.gravity,
        )
        .unwrap();
        for t in interior_times(&base, 40, 0.01) {
            let a = base.predict_accel(t).unwrap();
            let b = shifted.predict_accel(t).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }
}
