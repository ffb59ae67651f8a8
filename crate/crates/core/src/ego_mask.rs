//! Vehicle footprints: pose -> rectangle vertices -> pixel mask.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridGeometry, Vec2};
use crate::raster::{fill_polygon, PixelMask};

/// Wrap an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    /// Radians counterclockwise from the first world axis, in `(-pi, pi]`.
    pub heading: f64,
    pub time: u32,
}

impl Pose {
    pub fn new(position: Vec2, heading: f64, time: u32) -> Self {
        Pose {
            position,
            heading: normalize_angle(heading),
            time,
        }
    }
}

/// Rectangular body, `length` along the heading and `width` across it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeSpec", into = "ShapeSpec")]
pub struct VehicleShape {
    length: f64,
    width: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeSpec {
    length: f64,
    width: f64,
}

impl TryFrom<ShapeSpec> for VehicleShape {
    type Error = Error;
    fn try_from(s: ShapeSpec) -> Result<Self> {
        VehicleShape::new(s.length, s.width)
    }
}

impl From<VehicleShape> for ShapeSpec {
    fn from(s: VehicleShape) -> Self {
        ShapeSpec {
            length: s.length,
            width: s.width,
        }
    }
}

impl VehicleShape {
    pub fn new(length: f64, width: f64) -> Result<Self> {
        if !(length > 0.0 && width > 0.0 && length.is_finite() && width.is_finite()) {
            return Err(Error::arg(format!(
                "vehicle dimensions must be positive, got {length} x {width}"
            )));
        }
        Ok(VehicleShape { length, width })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Grow the body by `padding` meters on every side.
    pub fn padded(&self, padding: f64) -> Result<Self> {
        VehicleShape::new(self.length + 2.0 * padding, self.width + 2.0 * padding)
    }

    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.length + self.width)
    }
}

/// Corners of the body in world space, counterclockwise starting front-left.
pub fn vehicle_vertices(pose: &Pose, shape: &VehicleShape) -> [Vec2; 4] {
    let (l, d) = (shape.length / 2.0, shape.width / 2.0);
    [
        Vec2::new(l, d),
        Vec2::new(-l, d),
        Vec2::new(-l, -d),
        Vec2::new(l, -d),
    ]
    .map(|v| v.rotated(pose.heading) + pose.position)
}

/// Pixels whose centers lie inside (or on the edge of) the vehicle body.
///
/// Vertices are converted to fractional pixel coordinates, not snapped to
/// pixel indices, before filling.
pub fn mask_for_pose(g: &GridGeometry, pose: &Pose, shape: &VehicleShape) -> PixelMask {
    let verts = vehicle_vertices(pose, shape).map(|v| g.to_pixel_coords(v));
    fill_polygon(g, &verts).expect("a rectangle has four finite vertices")
}

/// Signed shoelace area (positive for counterclockwise order).
pub fn signed_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|k| {
            let (a, b) = (poly[k], poly[(k + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
        / 2.0
}
