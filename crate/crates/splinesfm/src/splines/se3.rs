//! Rigid-body spline: blended screw motions over SE(3) control points.

use nalgebra::Matrix4;

use crate::lie::{se3_exp, se3_log, Pose, Twist};

use super::basis::{cumulative_basis, KnotGrid};
use super::SplineError;

/// Pose with first and second 4×4 derivative matrices at one time.
///
/// `d1` is the exact elementwise time derivative of `T(t)`. `d2` uses the
/// second-order basis weight per factor (`Ω·A·d²btilde/dt²`), so its
/// translation block matches the kinematic acceleration only when the
/// orientation control points are constant.
#[derive(Debug, Clone, Copy)]
pub struct Se3Sample {
    pub pose: Pose,
    pub d1: Matrix4<f64>,
    pub d2: Matrix4<f64>,
}

/// Cumulative cubic spline over pose control points,
/// `T(t) = T_s · Π_j exp(log(T_{j-1}⁻¹ T_j) · btilde_j(t))`.
///
/// Each blended increment is a screw motion, so translation and rotation are
/// coupled within every segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Se3Spline {
    grid: KnotGrid,
    points: Vec<Pose>,
    /// rel_twists[k] = log(points[k]⁻¹ ∘ points[k+1])
    rel_twists: Vec<Twist>,
}

impl Se3Spline {
    pub fn new(grid: KnotGrid, points: Vec<Pose>) -> Result<Self, SplineError> {
        if points.len() != grid.count {
            return Err(SplineError::ControlPointCount {
                points: points.len(),
                grid: grid.count,
            });
        }
        let rel_twists = Self::compute_rel_twists(&points)?;
        Ok(Se3Spline {
            grid,
            points,
            rel_twists,
        })
    }

    pub fn constant(grid: KnotGrid, pose: Pose) -> Self {
        let count = grid.count;
        Se3Spline {
            grid,
            points: vec![pose; count],
            rel_twists: vec![Twist::zero(); count - 1],
        }
    }

    fn compute_rel_twists(points: &[Pose]) -> Result<Vec<Twist>, SplineError> {
        let mut rel = Vec::with_capacity(points.len() - 1);
        for k in 0..points.len() - 1 {
            rel.push(Self::rel_twist(points, k)?);
        }
        Ok(rel)
    }

    fn rel_twist(points: &[Pose], k: usize) -> Result<Twist, SplineError> {
        se3_log(&points[k].inverse().compose(&points[k + 1]))
            .map_err(|_| SplineError::LogBranchBoundary { left: k, right: k + 1 })
    }

    pub fn grid(&self) -> &KnotGrid {
        &self.grid
    }

    pub fn points(&self) -> &[Pose] {
        &self.points
    }

    pub fn control_point(&self, k: usize) -> Pose {
        self.points[k]
    }

    /// Replaces a control point and refreshes the cached twists around `k`.
    pub fn set_control_point(&mut self, k: usize, pose: Pose) -> Result<(), SplineError> {
        self.points[k] = pose;
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(self.points.len() - 1);
        for i in lo..hi {
            self.rel_twists[i] = Self::rel_twist(&self.points, i)?;
        }
        Ok(())
    }

    /// Pose only; the cheap path used by projection code.
    pub fn pose(&self, t: f64) -> Result<Pose, SplineError> {
        let cb = cumulative_basis(&self.grid, t)?;
        let s = cb.segment;
        let mut pose = self.points[s];
        for j in 1..4 {
            pose = pose.compose(&se3_exp(&self.rel_twists[s + j - 1], cb.btilde[j]));
        }
        Ok(pose)
    }

    /// Pose with the 4×4 derivative matrices, by the product rule over the
    /// three active exponential factors.
    pub fn eval(&self, t: f64) -> Result<Se3Sample, SplineError> {
        let cb = cumulative_basis(&self.grid, t)?;
        let s = cb.segment;
        let mut value = self.points[s].to_homogeneous();
        let mut pose = self.points[s];
        let mut d1 = Matrix4::zeros();
        let mut d2 = Matrix4::zeros();
        for j in 1..4 {
            let xi = &self.rel_twists[s + j - 1];
            let factor_pose = se3_exp(xi, cb.btilde[j]);
            let factor = factor_pose.to_homogeneous();
            let omega_hat = xi.hat();
            let dfactor = omega_hat * factor * cb.dbtilde[j];
            let ddfactor = omega_hat * factor * cb.ddbtilde[j];
            let new_value = value * factor;
            let new_d1 = d1 * factor + value * dfactor;
            let new_d2 = d2 * factor + d1 * dfactor * 2.0 + value * ddfactor;
            value = new_value;
            d1 = new_d1;
            d2 = new_d2;
            pose = pose.compose(&factor_pose);
        }
        Ok(Se3Sample {
            pose,
            d1,
            d2,
        })
    }
}
