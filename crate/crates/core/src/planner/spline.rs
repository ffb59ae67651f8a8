use crate::error::{Error, Result};
use crate::geometry::Vec2;

use super::SpaceTimePoint;

/// Natural cubic spline (zero second derivative at both ends).
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalCubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    /// Second derivatives at the knots.
    moments: Vec<f64>,
}

impl NaturalCubicSpline {
    pub fn new(knots: &[f64], values: &[f64]) -> Result<Self> {
        let n = knots.len();
        if n < 2 {
            return Err(Error::arg("a spline needs at least two knots"));
        }
        if values.len() != n {
            return Err(Error::arg("knot and value counts differ"));
        }
        if knots.iter().chain(values).any(|v| !v.is_finite()) {
            return Err(Error::arg("spline inputs must be finite"));
        }
        if let Some(w) = knots.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::arg(format!(
                "knot times must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        let mut moments = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for the interior moments, solved with the
            // Thomas algorithm.
            let m = n - 2;
            let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for k in 0..m {
                let i = k + 1;
                diag[k] = 2.0 * (h[i - 1] + h[i]);
                upper[k] = h[i];
                rhs[k] = 6.0
                    * ((values[i + 1] - values[i]) / h[i] - (values[i] - values[i - 1]) / h[i - 1]);
            }
            for k in 1..m {
                let lower = h[k];
                let w = lower / diag[k - 1];
                diag[k] -= w * upper[k - 1];
                rhs[k] -= w * rhs[k - 1];
            }
            moments[m] = rhs[m - 1] / diag[m - 1];
            for k in (0..m - 1).rev() {
                moments[k + 1] = (rhs[k] - upper[k] * moments[k + 2]) / diag[k];
            }
        }
        Ok(Self {
            knots: knots.to_vec(),
            values: values.to_vec(),
            moments,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    fn segment(&self, t: f64) -> usize {
        let last = self.knots.len() - 2;
        match self.knots.binary_search_by(|k| k.total_cmp(&t)) {
            Ok(i) => i.min(last),
            Err(i) => i.saturating_sub(1).min(last),
        }
    }

    /// Value at `t`; times outside the knot range are clamped to the ends.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.knots[0], *self.knots.last().unwrap());
        let i = self.segment(t);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - t) / h;
        let b = (t - self.knots[i]) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.moments[i] + (b * b * b - b) * self.moments[i + 1]) * h * h
                / 6.0
    }

    /// First derivative at `t` (clamped like [`eval`](Self::eval)).
    pub fn derivative(&self, t: f64) -> f64 {
        let t = t.clamp(self.knots[0], *self.knots.last().unwrap());
        let i = self.segment(t);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - t) / h;
        let b = (t - self.knots[i]) / h;
        (self.values[i + 1] - self.values[i]) / h
            + ((1.0 - 3.0 * a * a) * self.moments[i] + (3.0 * b * b - 1.0) * self.moments[i + 1]) * h
                / 6.0
    }
}

/// One natural spline per world axis, parameterized by time.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpline {
    x: NaturalCubicSpline,
    y: NaturalCubicSpline,
}

impl TrajectorySpline {
    pub fn new(points: &[SpaceTimePoint]) -> Result<Self> {
        let ts: Vec<f64> = points.iter().map(|p| p.time).collect();
        let xs: Vec<f64> = points.iter().map(|p| p.position.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.position.y).collect();
        Ok(Self {
            x: NaturalCubicSpline::new(&ts, &xs)?,
            y: NaturalCubicSpline::new(&ts, &ys)?,
        })
    }

    pub fn start_time(&self) -> f64 {
        self.x.knots[0]
    }

    pub fn end_time(&self) -> f64 {
        *self.x.knots.last().unwrap()
    }

    pub fn position(&self, t: f64) -> Vec2 {
        Vec2::new(self.x.eval(t), self.y.eval(t))
    }

    pub fn velocity(&self, t: f64) -> Vec2 {
        if t > self.end_time() {
            return Vec2::default();
        }
        Vec2::new(self.x.derivative(t), self.y.derivative(t))
    }
}

/// Interpolate a timed path with a natural cubic spline per axis and resample
/// it with `samples_per_segment` points per input interval, plus the final point.
pub fn smooth_path(points: &[SpaceTimePoint], samples_per_segment: usize) -> Result<Vec<SpaceTimePoint>> {
    if samples_per_segment == 0 {
        return Err(Error::arg("samples_per_segment must be at least 1"));
    }
    if points.len() < 2 {
        return Err(Error::arg("smoothing needs at least two points"));
    }
    let spline = TrajectorySpline::new(points)?;
    let mut out = Vec::with_capacity((points.len() - 1) * samples_per_segment + 1);
    for w in points.windows(2) {
        let (t0, t1) = (w[0].time, w[1].time);
        for m in 0..samples_per_segment {
            let t = if m == 0 {
                t0
            } else {
                t0 + (t1 - t0) * m as f64 / samples_per_segment as f64
            };
            let position = if m == 0 { w[0].position } else { spline.position(t) };
            out.push(SpaceTimePoint::new(t, position));
        }
    }
    out.push(*points.last().unwrap());
    Ok(out)
}
