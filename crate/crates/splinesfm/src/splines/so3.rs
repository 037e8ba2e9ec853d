//! Orientation spline: blended SLERP over unit quaternion control points.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use crate::lie::{quat_exp, quat_log};

use super::basis::{cumulative_basis, KnotGrid};
use super::SplineError;

/// Orientation and its first two quaternion derivatives at one time.
#[derive(Debug, Clone, Copy)]
pub struct So3Sample {
    pub q: UnitQuaternion<f64>,
    pub dq: Quaternion<f64>,
    pub ddq: Quaternion<f64>,
}

impl So3Sample {
    /// Body-frame angular velocity, the vector part of `2 q* ⊗ dq`.
    pub fn body_angular_velocity(&self) -> Vector3<f64> {
        (self.q.conjugate().into_inner() * self.dq).imag() * 2.0
    }
}

/// Cumulative cubic spline over unit quaternion control points,
/// `q(t) = q_s ⊗ Π_j exp(log(q_{j-1}* q_j) · btilde_j(t))`.
///
/// Stored control points are kept in the sign-continuity normal form
/// (consecutive dot products ≥ 0) so the relative logarithms stay on the
/// principal branch.
#[derive(Debug, Clone, PartialEq)]
pub struct So3Spline {
    grid: KnotGrid,
    points: Vec<UnitQuaternion<f64>>,
    /// rel_logs[k] = log(points[k]⁻¹ ⊗ points[k+1])
    rel_logs: Vec<Vector3<f64>>,
}

impl So3Spline {
    pub fn new(grid: KnotGrid, points: Vec<UnitQuaternion<f64>>) -> Result<Self, SplineError> {
        if points.len() != grid.count {
            return Err(SplineError::ControlPointCount {
                points: points.len(),
                grid: grid.count,
            });
        }
        let mut points = points;
        for k in 1..points.len() {
            if points[k - 1].coords.dot(&points[k].coords) < 0.0 {
                points[k] = UnitQuaternion::new_unchecked(-points[k].into_inner());
            }
        }
        let rel_logs = Self::compute_rel_logs(&points)?;
        Ok(So3Spline {
            grid,
            points,
            rel_logs,
        })
    }

    pub fn constant(grid: KnotGrid, q: UnitQuaternion<f64>) -> Self {
        let count = grid.count;
        So3Spline {
            grid,
            points: vec![q; count],
            rel_logs: vec![Vector3::zeros(); count - 1],
        }
    }

    fn compute_rel_logs(points: &[UnitQuaternion<f64>]) -> Result<Vec<Vector3<f64>>, SplineError> {
        let mut rel_logs = Vec::with_capacity(points.len() - 1);
        for k in 0..points.len() - 1 {
            rel_logs.push(Self::rel_log(points, k)?);
        }
        Ok(rel_logs)
    }

    fn rel_log(points: &[UnitQuaternion<f64>], k: usize) -> Result<Vector3<f64>, SplineError> {
        let rel = points[k].inverse() * points[k + 1];
        let w = quat_log(&rel);
        if w.norm() >= std::f64::consts::PI - crate::lie::LOG_BRANCH_MARGIN {
            return Err(SplineError::LogBranchBoundary { left: k, right: k + 1 });
        }
        Ok(w)
    }

    pub fn grid(&self) -> &KnotGrid {
        &self.grid
    }

    pub fn points(&self) -> &[UnitQuaternion<f64>] {
        &self.points
    }

    pub fn control_point(&self, k: usize) -> UnitQuaternion<f64> {
        self.points[k]
    }

    /// Replaces a control point, restoring the sign normal form and the
    /// cached relative logarithms around `k`.
    pub fn set_control_point(
        &mut self,
        k: usize,
        q: UnitQuaternion<f64>,
    ) -> Result<(), SplineError> {
        let mut q = q;
        if k > 0 && self.points[k - 1].coords.dot(&q.coords) < 0.0 {
            q = UnitQuaternion::new_unchecked(-q.into_inner());
        }
        self.points[k] = q;
        // Flips are only ever needed when adjacent control points are near
        // 180° apart; cascade right until the normal form holds again.
        let mut j = k + 1;
        while j < self.points.len() && self.points[j - 1].coords.dot(&self.points[j].coords) < 0.0 {
            self.points[j] = UnitQuaternion::new_unchecked(-self.points[j].into_inner());
            j += 1;
        }
        let lo = k.saturating_sub(1);
        let hi = (j.max(k + 1)).min(self.points.len() - 1);
        for i in lo..hi {
            self.rel_logs[i] = Self::rel_log(&self.points, i)?;
        }
        Ok(())
    }

    /// Orientation with first and second quaternion derivatives, by the
    /// product rule over the three active exponential factors.
    pub fn eval(&self, t: f64) -> Result<So3Sample, SplineError> {
        let cb = cumulative_basis(&self.grid, t)?;
        let s = cb.segment;
        let mut value = self.points[s].into_inner();
        let mut d1 = Quaternion::new(0.0, 0.0, 0.0, 0.0);
        let mut d2 = Quaternion::new(0.0, 0.0, 0.0, 0.0);
        for j in 1..4 {
            let w = self.rel_logs[s + j - 1];
            let factor = quat_exp(&(w * cb.btilde[j])).into_inner();
            let half_w = Quaternion::from_imag(w * 0.5);
            let dfactor = half_w * factor * cb.dbtilde[j];
            let ddfactor =
                half_w * half_w * factor * (cb.dbtilde[j] * cb.dbtilde[j]) + half_w * factor * cb.ddbtilde[j];
            let new_value = value * factor;
            let new_d1 = d1 * factor + value * dfactor;
            let new_d2 = d2 * factor + d1 * dfactor * 2.0 + value * ddfactor;
            value = new_value;
            d1 = new_d1;
            d2 = new_d2;
        }
        Ok(So3Sample {
            q: UnitQuaternion::from_quaternion(value),
            dq: d1,
            ddq: d2,
        })
    }

    pub fn orientation(&self, t: f64) -> Result<UnitQuaternion<f64>, SplineError> {
        let cb = cumulative_basis(&self.grid, t)?;
        let s = cb.segment;
        let mut value = self.points[s].into_inner();
        for j in 1..4 {
            value *= quat_exp(&(self.rel_logs[s + j - 1] * cb.btilde[j])).into_inner();
        }
        Ok(UnitQuaternion::from_quaternion(value))
    }
}
