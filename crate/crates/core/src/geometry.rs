//! Pixel <-> world mapping shared by every other module.
//!
//! Pixel `(0, 0)` is the top-left of the raster. The column index runs along
//! the first world axis and the row index along the second, so
//! `px2sp(i, j) = origin + resolution * (j, i)`. Pixels are square.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or displacement in world coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Rotate counterclockwise by `angle` radians.
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(v: [f64; 2]) -> Self {
        Vec2::new(v[0], v[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// A grid cell / pixel index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl From<(usize, usize)> for Cell {
    fn from((row, col): (usize, usize)) -> Self {
        Cell { row, col }
    }
}

/// Bidirectional pixel/world map plus the frame period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometrySpec", into = "GeometrySpec")]
pub struct GridGeometry {
    height: usize,
    width: usize,
    origin: Vec2,
    resolution: f64,
    frame_period: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometrySpec {
    height: usize,
    width: usize,
    #[serde(default)]
    origin: Vec2,
    #[serde(default = "default_resolution")]
    resolution: f64,
    #[serde(default = "default_frame_period")]
    frame_period: f64,
}

fn default_resolution() -> f64 {
    1.0
}

fn default_frame_period() -> f64 {
    0.1
}

impl TryFrom<GeometrySpec> for GridGeometry {
    type Error = Error;
    fn try_from(s: GeometrySpec) -> Result<Self> {
        GridGeometry::new(s.height, s.width, s.origin, s.resolution, s.frame_period)
    }
}

impl From<GridGeometry> for GeometrySpec {
    fn from(g: GridGeometry) -> Self {
        GeometrySpec {
            height: g.height,
            width: g.width,
            origin: g.origin,
            resolution: g.resolution,
            frame_period: g.frame_period,
        }
    }
}

impl GridGeometry {
    pub fn new(
        height: usize,
        width: usize,
        origin: Vec2,
        resolution: f64,
        frame_period: f64,
    ) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::arg(format!(
                "grid dimensions must be positive, got {height}x{width}"
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::arg(format!("resolution must be > 0, got {resolution}")));
        }
        if !(frame_period > 0.0 && frame_period.is_finite()) {
            return Err(Error::arg(format!(
                "frame period must be > 0, got {frame_period}"
            )));
        }
        if !(origin.x.is_finite() && origin.y.is_finite()) {
            return Err(Error::arg("origin must be finite"));
        }
        Ok(Self {
            height,
            width,
            origin,
            resolution,
            frame_period,
        })
    }

    /// Unit-resolution grid anchored at the world origin with a 0.1 s frame period.
    pub fn unit(height: usize, width: usize) -> Self {
        Self::new(height, width, Vec2::default(), 1.0, 0.1).expect("valid unit grid")
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn frame_period(&self) -> f64 {
        self.frame_period
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Length of the grid diagonal in meters.
    pub fn diagonal(&self) -> f64 {
        (self.height as f64).hypot(self.width as f64) * self.resolution
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.row < self.height && cell.col < self.width
    }

    /// Row-major flat index of a cell.
    pub fn index(&self, cell: Cell) -> usize {
        cell.row * self.width + cell.col
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index / self.width, index % self.width)
    }

    /// World-space center of pixel `(row, col)`.
    pub fn px2sp(&self, row: usize, col: usize) -> Result<Vec2> {
        if row >= self.height || col >= self.width {
            return Err(Error::IndexOutOfRange {
                row,
                col,
                height: self.height,
                width: self.width,
            });
        }
        Ok(self.cell_center(Cell::new(row, col)))
    }

    /// Unchecked variant of [`px2sp`](Self::px2sp) for cells already known to be valid.
    pub fn cell_center(&self, cell: Cell) -> Vec2 {
        self.origin + Vec2::new(cell.col as f64, cell.row as f64) * self.resolution
    }

    /// Continuous pixel coordinates of a world point: `x` is the fractional
    /// column, `y` the fractional row. Pixel centers sit on integers.
    pub fn to_pixel_coords(&self, p: Vec2) -> Vec2 {
        (p - self.origin) * (1.0 / self.resolution)
    }

    pub fn from_pixel_coords(&self, q: Vec2) -> Vec2 {
        self.origin + q * self.resolution
    }

    /// Nearest pixel center to `p`, rounding half-up on each axis.
    pub fn sp2px(&self, p: Vec2) -> Result<Cell> {
        let q = self.to_pixel_coords(p);
        let row = (q.y + 0.5).floor();
        let col = (q.x + 0.5).floor();
        let in_rows = row >= 0.0 && row < self.height as f64;
        let in_cols = col >= 0.0 && col < self.width as f64;
        if in_rows && in_cols {
            return Ok(Cell::new(row as usize, col as usize));
        }
        let clamp = |v: f64, n: usize| {
            if v.is_nan() || v < 0.0 {
                0
            } else {
                (v as usize).min(n - 1)
            }
        };
        Err(Error::OutOfBounds {
            x: p.x,
            y: p.y,
            clamped: (clamp(row, self.height), clamp(col, self.width)),
        })
    }

    /// [`sp2px`](Self::sp2px) that clamps out-of-extent points to the border.
    pub fn sp2px_clamped(&self, p: Vec2) -> Cell {
        match self.sp2px(p) {
            Ok(c) => c,
            Err(Error::OutOfBounds { clamped, .. }) => clamped.into(),
            Err(_) => unreachable!("sp2px only fails with OutOfBounds"),
        }
    }

    /// Seconds corresponding to a frame index.
    pub fn frame_to_seconds(&self, frame: u32) -> f64 {
        frame as f64 * self.frame_period
    }

    /// Nearest frame index to a non-negative time in seconds.
    pub fn seconds_to_frame(&self, seconds: f64) -> u32 {
        let f = (seconds / self.frame_period + 0.5).floor();
        if f <= 0.0 {
            0
        } else if f >= u32::MAX as f64 {
            u32::MAX - 1
        } else {
            f as u32
        }
    }
}
