//! Grid planners: classical A*, the time-aware variants, and spline smoothing.
//!
//! All costs are travel times in seconds. A straight move costs
//! `resolution / speed`, a diagonal `sqrt(2)` times that, and waiting in place
//! (when enabled) costs one frame period. The heuristic is the Euclidean
//! distance to the goal divided by the speed.

mod astar;
mod spacetime;
mod spline;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Cell, GridGeometry, Vec2};

pub use astar::{classical_astar, CellPath};
pub use spacetime::{dynamic_astar, t2nod_astar, ObstacleTrajectory, TimedNode, TimedPath};
pub use spline::{smooth_path, NaturalCubicSpline, TrajectorySpline};
pub use tree::{NodeId, PlanNode, SearchTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Connectivity {
    Four,
    Eight,
}

impl TryFrom<u8> for Connectivity {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(Error::Config(format!("connectivity must be 4 or 8, got {other}"))),
        }
    }
}

impl From<Connectivity> for u8 {
    fn from(c: Connectivity) -> u8 {
        match c {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

const STRAIGHT: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
const ALL: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

impl Connectivity {
    pub(crate) fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &STRAIGHT,
            Connectivity::Eight => &ALL,
        }
    }
}

/// How the dynamic-obstacle search keys and samples its states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimingMode {
    /// States are (cell, frame) pairs; obstacles are sampled at the successor's time.
    #[default]
    SpaceTime,
    /// Bare-cell states with obstacles sampled at the expanded node's time and
    /// closed only while that node's successors are generated.
    BareCell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub connectivity: Connectivity,
    /// Uniform travel speed in m/s.
    pub speed: f64,
    /// Collision penalty `K`. `None` selects `1e6 *` the grid diagonal in meters;
    /// zero disables the collision term.
    pub collision_penalty: Option<f64>,
    pub max_expansions: usize,
    pub allow_wait: bool,
    pub timing: TimingMode,
    /// Heading used to place the ego footprint at the start node.
    pub initial_heading: f64,
    /// Frames after which the time component of a search state is merged.
    /// Beyond the prediction horizon the occupancy fields are constant in time.
    pub horizon_frames: u32,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            connectivity: Connectivity::Eight,
            speed: 10.0,
            collision_penalty: None,
            max_expansions: 500_000,
            allow_wait: false,
            timing: TimingMode::SpaceTime,
            initial_heading: 0.0,
            horizon_frames: 60,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::Config(format!("planner speed must be > 0, got {}", self.speed)));
        }
        if let Some(k) = self.collision_penalty {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::Config(format!("collision penalty must be >= 0, got {k}")));
            }
        }
        if self.max_expansions == 0 {
            return Err(Error::Config("max_expansions must be positive".into()));
        }
        Ok(())
    }

    pub fn penalty(&self, g: &GridGeometry) -> f64 {
        self.collision_penalty.unwrap_or(1e6 * g.diagonal())
    }

    /// Travel time between two cells (or one frame period when waiting).
    pub fn edge_time(&self, g: &GridGeometry, from: Cell, to: Cell) -> f64 {
        if from == to {
            return g.frame_period();
        }
        cell_distance(from, to) * g.resolution() / self.speed
    }

    pub fn heuristic(&self, g: &GridGeometry, cell: Cell, goal: Cell) -> f64 {
        cell_distance(cell, goal) * g.resolution() / self.speed
    }
}

pub(crate) fn cell_distance(a: Cell, b: Cell) -> f64 {
    let dr = a.row as f64 - b.row as f64;
    let dc = a.col as f64 - b.col as f64;
    dr.hypot(dc)
}

/// World-frame heading of a move between two cells.
pub(crate) fn move_heading(from: Cell, to: Cell) -> f64 {
    let dy = to.row as f64 - from.row as f64;
    let dx = to.col as f64 - from.col as f64;
    dy.atan2(dx)
}

pub(crate) fn step(g: &GridGeometry, cell: Cell, (dr, dc): (isize, isize)) -> Option<Cell> {
    let row = cell.row.checked_add_signed(dr)?;
    let col = cell.col.checked_add_signed(dc)?;
    let next = Cell::new(row, col);
    g.contains(next).then_some(next)
}

/// A `(time, position)` sample of a planned trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub time: f64,
    pub position: Vec2,
}

impl SpaceTimePoint {
    pub fn new(time: f64, position: Vec2) -> Self {
        Self { time, position }
    }
}

/// Outcome of a search: the path if one was found, plus bookkeeping.
#[derive(Debug, Clone)]
pub struct SearchOutcome<P> {
    pub path: Option<P>,
    pub expansions: usize,
    pub budget_exhausted: bool,
    /// Set when the best path found still collides, so it was withheld.
    pub collision_unavoidable: bool,
    pub tree: SearchTree,
}

impl<P> SearchOutcome<P> {
    pub fn found(&self) -> bool {
        self.path.is_some()
    }
}

pub(crate) fn check_endpoints(
    g: &GridGeometry,
    blocked: &crate::raster::PixelMask,
    start: Cell,
    goal: Cell,
) -> Result<()> {
    if blocked.dims() != (g.height(), g.width()) {
        return Err(Error::arg("obstacle mask does not match the grid"));
    }
    for (name, c) in [("start", start), ("goal", goal)] {
        if !g.contains(c) {
            return Err(Error::arg(format!("{name} cell {c:?} outside the grid")));
        }
        if blocked.get_cell(c) {
            return Err(Error::arg(format!("{name} cell {c:?} is blocked")));
        }
    }
    Ok(())
}

/// Tuple written to the open list. Ordered by `(f, h, row-major cell, frame)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OpenEntry {
    pub f: f64,
    pub h: f64,
    pub cell_index: usize,
    pub frame: u32,
    pub node: NodeId,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for OpenEntry {}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenEntry {
    /// Reversed so that `BinaryHeap` pops the smallest key first.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.h.total_cmp(&self.h))
            .then_with(|| other.cell_index.cmp(&self.cell_index))
            .then_with(|| other.frame.cmp(&self.frame))
            .then_with(|| other.node.cmp(&self.node))
    }
}
