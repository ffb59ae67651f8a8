//! Time-aware A*: searches over (cell, frame) states so the same cell may be
//! visited at different times.

use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::collision::check_indices;
use crate::ego_mask::{mask_for_pose, Pose, VehicleShape};
use crate::error::{Error, Result};
use crate::geometry::{Cell, GridGeometry, Vec2};
use crate::raster::PixelMask;
use crate::t2nod::TimeField;

use super::{
    check_endpoints, move_heading, step, NodeId, OpenEntry, PlanNode, PlannerConfig,
    SearchOutcome, SearchTree, SpaceTimePoint, TimingMode,
};

/// A known dynamic obstacle: maps a time in seconds to the cells it occupies.
#[derive(Clone)]
pub struct ObstacleTrajectory {
    sampler: Arc<dyn Fn(f64) -> Vec<Cell> + Send + Sync>,
}

impl fmt::Debug for ObstacleTrajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ObstacleTrajectory(..)")
    }
}

impl ObstacleTrajectory {
    pub fn from_fn(sampler: impl Fn(f64) -> Vec<Cell> + Send + Sync + 'static) -> Self {
        ObstacleTrajectory {
            sampler: Arc::new(sampler),
        }
    }

    /// Occupies `cell` during each closed time interval `[from, to]` (seconds).
    pub fn from_intervals(intervals: Vec<(f64, f64, Cell)>) -> Self {
        Self::from_fn(move |t| {
            intervals
                .iter()
                .filter(|(a, b, _)| *a <= t && t <= *b)
                .map(|(_, _, c)| *c)
                .collect()
        })
    }

    pub fn cells_at(&self, time: f64) -> Vec<Cell> {
        (self.sampler)(time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedNode {
    /// Seconds since the start of the plan.
    pub time: f64,
    pub frame: u32,
    pub cell: Cell,
    pub position: Vec2,
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedPath {
    pub nodes: Vec<TimedNode>,
}

impl TimedPath {
    pub fn cost(&self) -> f64 {
        self.nodes.last().map_or(0.0, |n| n.time)
    }

    pub fn cells(&self) -> Vec<Cell> {
        self.nodes.iter().map(|n| n.cell).collect()
    }

    pub fn points(&self) -> Vec<SpaceTimePoint> {
        self.nodes
            .iter()
            .map(|n| SpaceTimePoint::new(n.time, n.position))
            .collect()
    }

    /// `t_seconds,x_m,y_m,heading_rad` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_seconds,x_m,y_m,heading_rad\n");
        for n in &self.nodes {
            out.push_str(&format!(
                "{},{},{},{}\n",
                n.time, n.position.x, n.position.y, n.heading
            ));
        }
        out
    }

    pub(crate) fn from_tree(
        g: &GridGeometry,
        tree: &SearchTree,
        node: NodeId,
        root: NodeId,
    ) -> Result<Self> {
        let nodes = tree
            .chain(node, root)?
            .into_iter()
            .map(|id| {
                let n = tree.get(id);
                TimedNode {
                    time: n.g,
                    frame: n.frame,
                    cell: n.cell,
                    position: g.cell_center(n.cell),
                    heading: n.heading,
                }
            })
            .collect();
        Ok(TimedPath { nodes })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Free,
    Penalized,
    Blocked,
}

struct SpaceTimeResult {
    outcome: SearchOutcome<TimedPath>,
    penalized_on_path: usize,
}

/// Best-first search over (cell, frame) states. `evaluate` classifies a
/// candidate state from its cell, frame and arrival heading.
fn space_time_search(
    g: &GridGeometry,
    static_mask: &PixelMask,
    start: Cell,
    goal: Cell,
    cfg: &PlannerConfig,
    penalty: f64,
    mut evaluate: impl FnMut(Cell, u32, f64) -> Verdict,
) -> Result<SpaceTimeResult> {
    let cap = cfg.horizon_frames.saturating_add(1);
    let key = |cell: Cell, frame: u32| (g.index(cell), frame.min(cap));

    let mut tree = SearchTree::new(g, cfg);
    let mut penalized: Vec<bool> = Vec::new();
    // best (g + penalty) per state and the node that achieved it
    let mut best: HashMap<(usize, u32), (f64, NodeId)> = HashMap::new();
    let mut closed: HashMap<(usize, u32), ()> = HashMap::new();
    let mut open = BinaryHeap::new();

    let h0 = cfg.heuristic(g, start, goal);
    let root = tree.push(PlanNode {
        cell: start,
        frame: 0,
        g: 0.0,
        f: h0,
        heading: cfg.initial_heading,
        parent: None,
    });
    penalized.push(false);
    best.insert(key(start, 0), (0.0, root));
    open.push(OpenEntry {
        f: h0,
        h: h0,
        cell_index: g.index(start),
        frame: 0,
        node: root,
    });

    let mut moves: Vec<(isize, isize)> = cfg.connectivity.offsets().to_vec();
    if cfg.allow_wait {
        moves.push((0, 0));
    }

    let mut expansions = 0;
    let mut budget_exhausted = false;
    let mut found = None;
    while let Some(entry) = open.pop() {
        let (cell, frame, cost, heading) = {
            let n = tree.get(entry.node);
            (n.cell, n.frame, n.g, n.heading)
        };
        let k = key(cell, frame);
        if best.get(&k).map(|b| b.1) != Some(entry.node) || closed.contains_key(&k) {
            continue;
        }
        if expansions >= cfg.max_expansions {
            budget_exhausted = true;
            break;
        }
        closed.insert(k, ());
        expansions += 1;
        if cell == goal {
            found = Some(entry.node);
            break;
        }
        for &off in &moves {
            let Some(next) = step(g, cell, off) else { continue };
            if static_mask.get_cell(next) {
                continue;
            }
            let t = cost + cfg.edge_time(g, cell, next);
            let next_frame = g.seconds_to_frame(t);
            let next_heading = if next == cell { heading } else { move_heading(cell, next) };
            let verdict = evaluate(next, next_frame, next_heading);
            if verdict == Verdict::Blocked {
                continue;
            }
            let pen = if verdict == Verdict::Penalized { penalty } else { 0.0 };
            let nk = key(next, next_frame);
            let score = t + pen;
            if best.get(&nk).is_some_and(|b| b.0 <= score) {
                continue;
            }
            closed.remove(&nk);
            let h = cfg.heuristic(g, next, goal);
            let id = tree.push(PlanNode {
                cell: next,
                frame: next_frame,
                g: t,
                f: t + h + pen,
                heading: next_heading,
                parent: Some(entry.node),
            });
            penalized.push(verdict == Verdict::Penalized);
            best.insert(nk, (score, id));
            open.push(OpenEntry {
                f: t + h + pen,
                h,
                cell_index: g.index(next),
                frame: next_frame,
                node: id,
            });
        }
    }

    let (path, penalized_on_path) = match found {
        Some(node) => {
            let chain = tree.chain(node, root)?;
            let hits = chain.iter().filter(|id| penalized[id.index()]).count();
            (Some(TimedPath::from_tree(g, &tree, node, root)?), hits)
        }
        None => (None, 0),
    };
    Ok(SpaceTimeResult {
        outcome: SearchOutcome {
            path,
            expansions,
            budget_exhausted,
            collision_unavoidable: false,
            tree,
        },
        penalized_on_path,
    })
}

/// Cached per-frame occupancy of every dynamic obstacle.
struct ObstacleSampler<'a> {
    g: &'a GridGeometry,
    obstacles: &'a [ObstacleTrajectory],
    frames: HashMap<u32, Vec<bool>>,
}

impl<'a> ObstacleSampler<'a> {
    fn new(g: &'a GridGeometry, obstacles: &'a [ObstacleTrajectory]) -> Self {
        Self {
            g,
            obstacles,
            frames: HashMap::new(),
        }
    }

    fn at_seconds(&self, time: f64) -> Vec<bool> {
        let mut occ = vec![false; self.g.len()];
        for obs in self.obstacles {
            for c in obs.cells_at(time) {
                if self.g.contains(c) {
                    occ[self.g.index(c)] = true;
                }
            }
        }
        occ
    }

    fn occupied(&mut self, cell: Cell, frame: u32) -> bool {
        if !self.frames.contains_key(&frame) {
            let occ = self.at_seconds(self.g.frame_to_seconds(frame));
            self.frames.insert(frame, occ);
        }
        self.frames[&frame][self.g.index(cell)]
    }
}

/// A* around known moving obstacles.
///
/// In the default [`TimingMode::SpaceTime`] mode a successor is rejected when
/// any obstacle occupies its cell at the successor's (frame-rounded) arrival
/// time. [`TimingMode::BareCell`] keeps bare-cell states and samples
/// obstacles at the expanded node's travel time `T_c`.
pub fn dynamic_astar(
    g: &GridGeometry,
    static_mask: &PixelMask,
    obstacles: &[ObstacleTrajectory],
    start: Cell,
    goal: Cell,
    cfg: &PlannerConfig,
) -> Result<SearchOutcome<TimedPath>> {
    cfg.validate()?;
    check_endpoints(g, static_mask, start, goal)?;
    match cfg.timing {
        TimingMode::SpaceTime => {
            let mut sampler = ObstacleSampler::new(g, obstacles);
            let res = space_time_search(g, static_mask, start, goal, cfg, 0.0, |cell, frame, _| {
                if sampler.occupied(cell, frame) {
                    Verdict::Blocked
                } else {
                    Verdict::Free
                }
            })?;
            Ok(res.outcome)
        }
        TimingMode::BareCell => bare_cell_search(g, static_mask, obstacles, start, goal, cfg),
    }
}

fn bare_cell_search(
    g: &GridGeometry,
    static_mask: &PixelMask,
    obstacles: &[ObstacleTrajectory],
    start: Cell,
    goal: Cell,
    cfg: &PlannerConfig,
) -> Result<SearchOutcome<TimedPath>> {
    let sampler = ObstacleSampler::new(g, obstacles);
    let mut tree = SearchTree::new(g, cfg);
    let mut best_g = vec![f64::INFINITY; g.len()];
    let mut best_node: Vec<Option<NodeId>> = vec![None; g.len()];
    let mut closed = vec![false; g.len()];
    let mut in_open = vec![false; g.len()];
    let mut open = BinaryHeap::new();

    let h0 = cfg.heuristic(g, start, goal);
    let root = tree.push(PlanNode {
        cell: start,
        frame: 0,
        g: 0.0,
        f: h0,
        heading: cfg.initial_heading,
        parent: None,
    });
    best_g[g.index(start)] = 0.0;
    best_node[g.index(start)] = Some(root);
    in_open[g.index(start)] = true;
    open.push(OpenEntry {
        f: h0,
        h: h0,
        cell_index: g.index(start),
        frame: 0,
        node: root,
    });

    let mut expansions = 0;
    let mut budget_exhausted = false;
    let mut found = None;
    while let Some(entry) = open.pop() {
        let ci = entry.cell_index;
        if best_node[ci] != Some(entry.node) || closed[ci] {
            continue;
        }
        if expansions >= cfg.max_expansions {
            budget_exhausted = true;
            break;
        }
        closed[ci] = true;
        in_open[ci] = false;
        expansions += 1;
        let (cell, cost, heading) = {
            let n = tree.get(entry.node);
            (n.cell, n.g, n.heading)
        };
        if cell == goal {
            found = Some(entry.node);
            break;
        }
        let travel = tree.find_parent(entry.node, root)?;
        let occupied = sampler.at_seconds(travel);
        let temporarily_closed: Vec<usize> = occupied
            .iter()
            .enumerate()
            .filter(|&(i, &o)| o && !in_open[i] && !closed[i])
            .map(|(i, _)| i)
            .collect();
        for &i in &temporarily_closed {
            closed[i] = true;
        }
        for &off in cfg.connectivity.offsets() {
            let Some(next) = step(g, cell, off) else { continue };
            let ni = g.index(next);
            if static_mask.get_cell(next) || closed[ni] {
                continue;
            }
            let t = cost + cfg.edge_time(g, cell, next);
            if t >= best_g[ni] {
                continue;
            }
            best_g[ni] = t;
            let h = cfg.heuristic(g, next, goal);
            let id = tree.push(PlanNode {
                cell: next,
                frame: g.seconds_to_frame(t),
                g: t,
                f: t + h,
                heading: if next == cell { heading } else { move_heading(cell, next) },
                parent: Some(entry.node),
            });
            best_node[ni] = Some(id);
            in_open[ni] = true;
            open.push(OpenEntry {
                f: t + h,
                h,
                cell_index: ni,
                frame: 0,
                node: id,
            });
        }
        for &i in &temporarily_closed {
            closed[i] = false;
        }
    }

    let path = match found {
        Some(node) => Some(TimedPath::from_tree(g, &tree, node, root)?),
        None => None,
    };
    Ok(SearchOutcome {
        path,
        expansions,
        budget_exhausted,
        collision_unavoidable: false,
        tree,
    })
}

/// Ego footprints keyed by cell and heading.
pub(crate) struct FootprintCache<'a> {
    g: &'a GridGeometry,
    shape: VehicleShape,
    cache: HashMap<(usize, u64), Vec<usize>>,
}

impl<'a> FootprintCache<'a> {
    pub(crate) fn new(g: &'a GridGeometry, shape: VehicleShape) -> Self {
        Self {
            g,
            shape,
            cache: HashMap::new(),
        }
    }

    pub(crate) fn indices(&mut self, cell: Cell, heading: f64) -> &[usize] {
        let g = self.g;
        let shape = self.shape;
        self.cache
            .entry((g.index(cell), heading.to_bits()))
            .or_insert_with(|| {
                let pose = Pose::new(g.cell_center(cell), heading, 0);
                mask_for_pose(g, &pose, &shape).iter_true().collect()
            })
    }
}

/// A* guided by the occupancy windows `occ` / `dep`.
///
/// Each candidate state is ranked by `f = c + |p - p_goal| / speed + K * chk`,
/// where `chk` is the mask-gated window test of the ego footprint (placed at
/// the cell with the heading of the incoming move) at the state's frame.
/// The start state is never penalized. With `K > 0`, a best path that still
/// collides is withheld and `collision_unavoidable` is set; `K = 0` disables
/// the collision term.
#[allow(clippy::too_many_arguments)]
pub fn t2nod_astar(
    g: &GridGeometry,
    occ: &TimeField,
    dep: &TimeField,
    static_mask: &PixelMask,
    start: Cell,
    goal: Cell,
    cfg: &PlannerConfig,
    shape: &VehicleShape,
) -> Result<SearchOutcome<TimedPath>> {
    cfg.validate()?;
    check_endpoints(g, static_mask, start, goal)?;
    let dims = (g.height(), g.width());
    if occ.dims() != dims || dep.dims() != dims {
        return Err(Error::arg("occupancy fields do not match the grid"));
    }
    let penalty = cfg.penalty(g);
    let mut footprints = FootprintCache::new(g, *shape);
    let res = space_time_search(g, static_mask, start, goal, cfg, penalty, |cell, frame, heading| {
        if penalty > 0.0 && check_indices(footprints.indices(cell, heading), frame, occ, dep) {
            Verdict::Penalized
        } else {
            Verdict::Free
        }
    })?;
    let mut outcome = res.outcome;
    if penalty > 0.0 && res.penalized_on_path > 0 {
        outcome.path = None;
        outcome.collision_unavoidable = true;
    }
    Ok(outcome)
}
