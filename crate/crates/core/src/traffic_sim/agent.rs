use crate::ego_mask::VehicleShape;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::raster::Rgb;

/// A scripted road user driving a polyline at constant speed.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    shape: VehicleShape,
    route: Vec<Vec2>,
    /// Arc length at each waypoint.
    cumulative: Vec<f64>,
    speed: f64,
    color: Rgb,
    start_time: f64,
}

impl Agent {
    pub fn new(
        shape: VehicleShape,
        route: Vec<Vec2>,
        speed: f64,
        color: Rgb,
        start_time: f64,
    ) -> Result<Self> {
        if route.len() < 2 {
            return Err(Error::arg("an agent route needs at least two waypoints"));
        }
        if route.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::arg("route waypoints must be finite"));
        }
        if !(speed >= 0.0 && speed.is_finite()) {
            return Err(Error::arg(format!("agent speed must be >= 0, got {speed}")));
        }
        if !start_time.is_finite() {
            return Err(Error::arg("agent start_time must be finite"));
        }
        let mut cumulative = vec![0.0];
        for w in route.windows(2) {
            let d = w[0].distance(w[1]);
            if d <= 0.0 {
                return Err(Error::arg("consecutive route waypoints must differ"));
            }
            cumulative.push(cumulative.last().unwrap() + d);
        }
        Ok(Agent {
            shape,
            route,
            cumulative,
            speed,
            color,
            start_time,
        })
    }

    pub fn shape(&self) -> &VehicleShape {
        &self.shape
    }

    pub fn route(&self) -> &[Vec2] {
        &self.route
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn color(&self) -> Rgb {
        self.color
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn route_length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Time the agent reaches its last waypoint and leaves the scene.
    pub fn end_time(&self) -> f64 {
        if self.speed == 0.0 {
            f64::INFINITY
        } else {
            self.start_time + self.route_length() / self.speed
        }
    }

    pub fn is_active(&self, time: f64) -> bool {
        self.start_time <= time && time <= self.end_time()
    }

    /// Position and heading at `time` (seconds), or `None` while inactive.
    pub fn pose_at(&self, time: f64) -> Option<(Vec2, f64)> {
        if !self.is_active(time) {
            return None;
        }
        let s = ((time - self.start_time) * self.speed).min(self.route_length());
        let seg = self
            .cumulative
            .windows(2)
            .position(|w| s <= w[1])
            .unwrap_or(self.route.len() - 2);
        let (a, b) = (self.route[seg], self.route[seg + 1]);
        let len = self.cumulative[seg + 1] - self.cumulative[seg];
        let u = (s - self.cumulative[seg]) / len;
        let dir = b - a;
        Some((a + dir * u, dir.y.atan2(dir.x)))
    }
}
