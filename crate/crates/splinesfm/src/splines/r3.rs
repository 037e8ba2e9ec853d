//! Vector-space spline: position, velocity, acceleration.

use nalgebra::Vector3;

use super::basis::{cumulative_basis, KnotGrid};
use super::SplineError;

/// Uniform cubic B-spline over R³ control points, evaluated in cumulative
/// form `p(t) = p_s + Σ_j (p_{s+j} - p_{s+j-1}) · btilde_j(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct R3Spline {
    grid: KnotGrid,
    points: Vec<Vector3<f64>>,
}

impl R3Spline {
    pub fn new(grid: KnotGrid, points: Vec<Vector3<f64>>) -> Result<Self, SplineError> {
        if points.len() != grid.count {
            return Err(SplineError::ControlPointCount {
                points: points.len(),
                grid: grid.count,
            });
        }
        Ok(R3Spline { grid, points })
    }

    /// All control points at a constant value; useful as a cold-start state.
    pub fn constant(grid: KnotGrid, value: Vector3<f64>) -> Self {
        let points = vec![value; grid.count];
        R3Spline { grid, points }
    }

    pub fn grid(&self) -> &KnotGrid {
        &self.grid
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn set_control_point(&mut self, k: usize, value: Vector3<f64>) {
        self.points[k] = value;
    }

    pub fn control_point(&self, k: usize) -> Vector3<f64> {
        self.points[k]
    }

    /// Position and its first two time derivatives.
    pub fn eval_all(&self, t: f64) -> Result<(Vector3<f64>, Vector3<f64>, Vector3<f64>), SplineError> {
        let cb = cumulative_basis(&self.grid, t)?;
        let s = cb.segment;
        let mut p = self.points[s];
        let mut v = Vector3::zeros();
        let mut a = Vector3::zeros();
        for j in 1..4 {
            let diff = self.points[s + j] - self.points[s + j - 1];
            p += diff * cb.btilde[j];
            v += diff * cb.dbtilde[j];
            a += diff * cb.ddbtilde[j];
        }
        Ok((p, v, a))
    }

    /// Derivative of the given order (0, 1, or 2).
    pub fn eval(&self, t: f64, order: usize) -> Result<Vector3<f64>, SplineError> {
        let (p, v, a) = self.eval_all(t)?;
        Ok(match order {
            0 => p,
            1 => v,
            2 => a,
            _ => panic!("spline derivative order must be 0, 1, or 2"),
        })
    }

    pub fn position(&self, t: f64) -> Result<Vector3<f64>, SplineError> {
        self.eval(t, 0)
    }

    pub fn velocity(&self, t: f64) -> Result<Vector3<f64>, SplineError> {
        self.eval(t, 1)
    }

    pub fn acceleration(&self, t: f64) -> Result<Vector3<f64>, SplineError> {
        self.eval(t, 2)
    }
}
