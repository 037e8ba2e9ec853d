//! Knot grid bookkeeping and the cumulative cubic basis.

use serde::{Deserialize, Serialize};

use super::SplineError;

/// Uniform knot layout: knot `k` sits at `t0 + k*dt`, one control point per
/// knot. A cubic segment needs four surrounding control points, so the valid
/// evaluation interval is `[t0 + dt, t0 + (count-2)*dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnotGrid {
    pub t0: f64,
    pub dt: f64,
    pub count: usize,
}

impl KnotGrid {
    pub fn new(t0: f64, dt: f64, count: usize) -> Result<Self, SplineError> {
        if !(dt > 0.0) || count < 4 {
            return Err(SplineError::InvalidGrid { dt, count });
        }
        Ok(KnotGrid { t0, dt, count })
    }

    /// Smallest grid whose support covers `[a, b]`, with two knots of padding
    /// before `a` and after `b`.
    pub fn covering(a: f64, b: f64, dt: f64) -> Result<Self, SplineError> {
        if !(dt > 0.0) || !(b >= a) {
            return Err(SplineError::InvalidGrid { dt, count: 0 });
        }
        let spans = ((b - a) / dt).ceil() as usize;
        KnotGrid::new(a - 2.0 * dt, dt, spans + 5)
    }

    pub fn support_start(&self) -> f64 {
        self.t0 + self.dt
    }

    /// Exclusive end of the valid interval.
    pub fn support_end(&self) -> f64 {
        self.t0 + (self.count as f64 - 2.0) * self.dt
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.support_start() && t < self.support_end()
    }

    pub fn knot_time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Segment index and normalized position for a valid `t`. Segment `s`
    /// uses control points `s..s+4`.
    pub(crate) fn locate(&self, t: f64) -> Result<(usize, f64), SplineError> {
        if !self.contains(t) {
            return Err(SplineError::OutOfSupport {
                t,
                start: self.support_start(),
                end: self.support_end(),
            });
        }
        let x = (t - self.t0) / self.dt - 1.0;
        let mut s = x.floor() as isize;
        let max_segment = self.count as isize - 4;
        s = s.clamp(0, max_segment);
        let u = (x - s as f64).clamp(0.0, 1.0);
        Ok((s as usize, u))
    }
}

/// Cumulative basis weights and their time derivatives at one evaluation
/// point. `btilde[0]` is identically 1; the remaining weights multiply the
/// increments between the four active control points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulativeBasis {
    pub btilde: [f64; 4],
    /// d(btilde)/dt, includes the 1/dt factor.
    pub dbtilde: [f64; 4],
    /// d²(btilde)/dt², includes the 1/dt² factor.
    pub ddbtilde: [f64; 4],
    pub segment: usize,
    pub u: f64,
}

// Cumulative sums of the uniform cubic B-spline basis polynomials
// (coefficients of 1, u, u², u³, all over 6):
//   btilde_0 = 1
//   btilde_1 = (5 + 3u - 3u² +  u³)/6
//   btilde_2 = (1 + 3u + 3u² - 2u³)/6
//   btilde_3 = (             u³)/6
pub fn cumulative_basis(grid: &KnotGrid, t: f64) -> Result<CumulativeBasis, SplineError> {
    let (segment, u) = grid.locate(t)?;
    let u2 = u * u;
    let u3 = u2 * u;
    let btilde = [
        1.0,
        (5.0 + 3.0 * u - 3.0 * u2 + u3) / 6.0,
        (1.0 + 3.0 * u + 3.0 * u2 - 2.0 * u3) / 6.0,
        u3 / 6.0,
    ];
    let inv_dt = 1.0 / grid.dt;
    let dbtilde = [
        0.0,
        (3.0 - 6.0 * u + 3.0 * u2) / 6.0 * inv_dt,
        (3.0 + 6.0 * u - 6.0 * u2) / 6.0 * inv_dt,
        3.0 * u2 / 6.0 * inv_dt,
    ];
    let inv_dt2 = inv_dt * inv_dt;
    let ddbtilde = [
        0.0,
        (u - 1.0) * inv_dt2,
        (1.0 - 2.0 * u) * inv_dt2,
        u * inv_dt2,
    ];
    Ok(CumulativeBasis {
        btilde,
        dbtilde,
        ddbtilde,
        segment,
        u,
    })
}
