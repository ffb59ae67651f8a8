//! The receding-horizon ego loop.

use serde::{Deserialize, Serialize};

use crate::ego_mask::{mask_for_pose, Pose, VehicleShape};
use crate::error::{Error, Result};
use crate::geometry::{Cell, GridGeometry, Vec2};
use crate::planner::{
    classical_astar, dynamic_astar, smooth_path, t2nod_astar, ObstacleTrajectory, SpaceTimePoint,
    TrajectorySpline,
};
use crate::raster::PixelMask;

use super::render::Oracle;
use super::scenario::{PlannerMode, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Outcome {
    ReachedGoal { frame: u32 },
    /// The frame cap ran out before the goal was reached.
    Timeout,
    /// No plan could be made at the first frame.
    NeverStarted,
    /// Planning failed and the goal is no longer reachable even ignoring traffic.
    PlannerFailure { frame: u32 },
}

impl Outcome {
    pub fn success(&self) -> bool {
        matches!(self, Outcome::ReachedGoal { .. })
    }

    /// The planner could not produce a usable plan.
    pub fn infeasible(&self) -> bool {
        matches!(self, Outcome::NeverStarted | Outcome::PlannerFailure { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Found,
    NoPath,
    BudgetExhausted,
    CollisionUnavoidable,
    /// The ego could not be placed on a drivable cell.
    OffRoad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub status: PlanStatus,
    pub expansions: usize,
    /// Smoothed plan in absolute seconds; empty unless a plan was found.
    pub path: Vec<SpaceTimePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub frame: u32,
    pub position: Vec2,
    pub heading: f64,
    /// Position of every agent, `None` while it is off the scene.
    pub agents: Vec<Option<Vec2>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanRecord>,
}

/// Start of a ground-truth contact between the ego and one agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub frame: u32,
    pub agent: usize,
    pub overlap_pixels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub seed: u64,
    pub episode: u64,
    pub mode: PlannerMode,
    pub frame_period: f64,
    pub goal: Vec2,
    pub steps: Vec<StepRecord>,
    pub collisions: Vec<CollisionEvent>,
    pub outcome: Outcome,
}

impl RunRecord {
    pub fn positions(&self) -> Vec<Vec2> {
        self.steps.iter().map(|s| s.position).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    /// One row per frame: `frame,t_seconds,x_m,y_m,heading_rad`.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("frame,t_seconds,x_m,y_m,heading_rad\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.frame,
                s.frame as f64 * self.frame_period,
                s.position.x,
                s.position.y,
                s.heading
            ));
        }
        out
    }
}

/// Where the ego is heading between replans.
enum Motion {
    Follow(TrajectorySpline),
    Hold(Vec2),
}

impl Motion {
    fn position(&self, t: f64) -> Vec2 {
        match self {
            Motion::Follow(s) => s.position(t),
            Motion::Hold(p) => *p,
        }
    }
}

/// Nearest drivable cell to `cell`, searching outward ring by ring.
fn nearest_free(g: &GridGeometry, blocked: &PixelMask, cell: Cell, max_ring: usize) -> Option<Cell> {
    if !blocked.get_cell(cell) {
        return Some(cell);
    }
    for ring in 1..=max_ring {
        let r = ring as isize;
        let mut best: Option<(usize, Cell)> = None;
        for dr in -r..=r {
            for dc in -r..=r {
                if dr.abs() != r && dc.abs() != r {
                    continue;
                }
                let (Some(row), Some(col)) =
                    (cell.row.checked_add_signed(dr), cell.col.checked_add_signed(dc))
                else {
                    continue;
                };
                let c = Cell::new(row, col);
                let d = (dr * dr + dc * dc) as usize;
                if g.contains(c) && !blocked.get_cell(c) && best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, c));
                }
            }
        }
        if let Some((_, c)) = best {
            return Some(c);
        }
    }
    None
}

/// Agent trajectories as planner obstacles, grown so that the ego center
/// cells they return keep the padded ego body clear of the agent.
fn agent_obstacles(s: &Scenario, now_s: f64) -> Vec<ObstacleTrajectory> {
    let ego = s.ego.planning_shape;
    let grow = 0.5 * ego.length().hypot(ego.width());
    s.agents
        .iter()
        .map(|a| {
            let a = a.clone();
            let g = s.geometry.clone();
            let shape = a.shape().padded(grow).expect("padding a valid shape");
            ObstacleTrajectory::from_fn(move |t| match a.pose_at(now_s + t) {
                Some((p, h)) => mask_for_pose(&g, &Pose::new(p, h, 0), &shape)
                    .iter_true()
                    .map(|i| g.cell_at(i))
                    .collect(),
                None => Vec::new(),
            })
        })
        .collect()
}

struct Planned {
    record: PlanRecord,
    motion: Option<Motion>,
}

struct Planner<'a> {
    s: &'a Scenario,
    oracle: Option<Oracle<'a>>,
    blocked: PixelMask,
    goal_cell: Cell,
}

impl<'a> Planner<'a> {
    fn new(s: &'a Scenario) -> Result<Self> {
        let oracle = match s.ego.mode {
            PlannerMode::T2nod => Some(Oracle::new(s)?),
            _ => None,
        };
        Ok(Planner {
            s,
            oracle,
            blocked: s.road_mask.inverted(),
            goal_cell: s.geometry.sp2px(s.ego.goal)?,
        })
    }

    fn start_cell(&self, pos: Vec2) -> Option<Cell> {
        nearest_free(&self.s.geometry, &self.blocked, self.s.geometry.sp2px_clamped(pos), 3)
    }

    /// The goal can still be reached ignoring all traffic.
    fn statically_reachable(&self, pos: Vec2) -> Result<bool> {
        let Some(start) = self.start_cell(pos) else {
            return Ok(false);
        };
        let out = classical_astar(&self.s.geometry, &self.blocked, start, self.goal_cell, &self.s.ego.planner)?;
        Ok(out.found() || out.budget_exhausted)
    }

    fn plan(&mut self, frame: u32, pos: Vec2, heading: f64) -> Result<Planned> {
        let s = self.s;
        let g = &s.geometry;
        let now_s = g.frame_to_seconds(frame);
        let Some(start) = self.start_cell(pos) else {
            return Ok(Planned {
                record: PlanRecord {
                    status: PlanStatus::OffRoad,
                    expansions: 0,
                    path: Vec::new(),
                },
                motion: None,
            });
        };
        let mut cfg = s.ego.planner.clone();
        cfg.initial_heading = heading;
        // (relative time, position) of every node after the start
        let (found, expansions, budget, unavoidable): (Option<Vec<(f64, Vec2)>>, _, _, _) =
            match s.ego.mode {
                PlannerMode::Classical => {
                    let out = classical_astar(g, &self.blocked, start, self.goal_cell, &cfg)?;
                    let nodes = out.path.as_ref().map(|p| {
                        p.times(&out.tree)
                            .into_iter()
                            .zip(&p.cells)
                            .map(|(t, c)| (t, g.cell_center(*c)))
                            .collect()
                    });
                    (nodes, out.expansions, out.budget_exhausted, false)
                }
                mode => {
                    let out = if mode == PlannerMode::T2nod {
                        let fields = self
                            .oracle
                            .as_mut()
                            .expect("t2nod mode has an oracle")
                            .fields(frame, s.horizon)?;
                        t2nod_astar(
                            g,
                            &fields.occ,
                            &fields.dep,
                            &self.blocked,
                            start,
                            self.goal_cell,
                            &cfg,
                            &s.ego.planning_shape,
                        )?
                    } else {
                        let obstacles = agent_obstacles(s, now_s);
                        dynamic_astar(g, &self.blocked, &obstacles, start, self.goal_cell, &cfg)?
                    };
                    let nodes = out
                        .path
                        .as_ref()
                        .map(|p| p.nodes.iter().map(|n| (n.time, n.position)).collect());
                    (nodes, out.expansions, out.budget_exhausted, out.collision_unavoidable)
                }
            };
        let Some(nodes) = found else {
            let status = if unavoidable {
                PlanStatus::CollisionUnavoidable
            } else if budget {
                PlanStatus::BudgetExhausted
            } else {
                PlanStatus::NoPath
            };
            return Ok(Planned {
                record: PlanRecord {
                    status,
                    expansions,
                    path: Vec::new(),
                },
                motion: None,
            });
        };
        // The spline starts from the actual pose; the search's start cell is
        // only a discretization of it. The last knot is the exact goal.
        let mut knots = vec![SpaceTimePoint::new(now_s, pos)];
        knots.extend(nodes.iter().skip(1).map(|&(t, p)| SpaceTimePoint::new(now_s + t, p)));
        if let Some(last) = knots.last_mut().filter(|_| nodes.len() > 1) {
            last.position = s.ego.goal;
        } else {
            let dt = (pos.distance(s.ego.goal) / s.ego.speed).max(g.frame_period());
            knots.push(SpaceTimePoint::new(now_s + dt, s.ego.goal));
        }
        let path = smooth_path(&knots, s.ego.samples_per_segment)?;
        Ok(Planned {
            record: PlanRecord {
                status: PlanStatus::Found,
                expansions,
                path,
            },
            motion: Some(Motion::Follow(TrajectorySpline::new(&knots)?)),
        })
    }
}

fn agent_positions(s: &Scenario, frame: u32) -> Vec<Option<Vec2>> {
    let t = s.geometry.frame_to_seconds(frame);
    s.agents.iter().map(|a| a.pose_at(t).map(|(p, _)| p)).collect()
}

/// Ground-truth contacts between the ego body and each agent at `frame`.
fn contacts(s: &Scenario, frame: u32, ego: &Pose, shape: &VehicleShape) -> Vec<(usize, usize)> {
    let g = &s.geometry;
    let t = g.frame_to_seconds(frame);
    let ego_mask = mask_for_pose(g, ego, shape);
    s.agents
        .iter()
        .enumerate()
        .filter_map(|(k, a)| {
            let (p, h) = a.pose_at(t)?;
            let m = mask_for_pose(g, &Pose::new(p, h, frame), a.shape());
            let n = m
                .bits()
                .iter()
                .zip(ego_mask.bits())
                .filter(|(x, y)| **x && **y)
                .count();
            (n > 0).then_some((k, n))
        })
        .collect()
}

/// Simulate one episode: replan every `replan_period` frames and follow the
/// current smoothed plan in time. Collisions are recorded and do not end
/// the episode.
pub fn run_episode(s: &Scenario) -> Result<RunRecord> {
    let g = &s.geometry;
    let mut planner = Planner::new(s)?;
    let mut pos = s.ego.start;
    let mut heading = s.ego.heading;
    let mut motion: Option<Motion> = None;
    let mut steps = vec![StepRecord {
        frame: 0,
        position: pos,
        heading,
        agents: agent_positions(s, 0),
        plan: None,
    }];
    let mut collisions = Vec::new();
    let mut in_contact = vec![false; s.agents.len()];
    let mut note_contacts = |frame: u32, pose: &Pose, collisions: &mut Vec<CollisionEvent>| {
        let now = contacts(s, frame, pose, &s.ego.shape);
        let mut touching = vec![false; s.agents.len()];
        for (agent, overlap_pixels) in now {
            touching[agent] = true;
            if !in_contact[agent] {
                collisions.push(CollisionEvent {
                    frame,
                    agent,
                    overlap_pixels,
                });
            }
        }
        in_contact = touching;
    };
    note_contacts(0, &Pose::new(pos, heading, 0), &mut collisions);

    let mut outcome = Outcome::Timeout;
    for frame in 0..=s.max_frames {
        if pos.distance(s.ego.goal) <= s.ego.goal_tolerance {
            outcome = Outcome::ReachedGoal { frame };
            break;
        }
        if frame == s.max_frames {
            break;
        }
        if frame % s.replan_period == 0 {
            let planned = planner.plan(frame, pos, heading)?;
            let failed = planned.motion.is_none();
            if let Some(m) = planned.motion {
                motion = Some(m);
            }
            steps.last_mut().expect("step recorded").plan = Some(planned.record);
            if failed {
                if frame == 0 {
                    outcome = Outcome::NeverStarted;
                    break;
                }
                if !planner.statically_reachable(pos)? {
                    outcome = Outcome::PlannerFailure { frame };
                    break;
                }
            }
        }
        let next = frame + 1;
        let new_pos = motion
            .get_or_insert(Motion::Hold(pos))
            .position(g.frame_to_seconds(next));
        if !(new_pos.x.is_finite() && new_pos.y.is_finite()) {
            return Err(Error::Invariant(format!("ego position diverged at frame {next}")));
        }
        let d = new_pos - pos;
        if d.norm() > 1e-9 {
            heading = d.y.atan2(d.x);
        }
        pos = new_pos;
        let pose = Pose::new(pos, heading, next);
        heading = pose.heading;
        steps.push(StepRecord {
            frame: next,
            position: pos,
            heading,
            agents: agent_positions(s, next),
            plan: None,
        });
        note_contacts(next, &pose, &mut collisions);
    }
    Ok(RunRecord {
        scenario: s.name.clone(),
        seed: s.seed,
        episode: s.episode,
        mode: s.ego.mode,
        frame_period: g.frame_period(),
        goal: s.ego.goal,
        steps,
        collisions,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic_sim::scenario::parse_scenario;

    fn scenario(extra: &[&str]) -> Scenario {
        let text = r#"{
            "schema_version": 1,
            "geometry": {"height": 9, "width": 40},
            "road": [{"rect": {"min": [0, 2], "max": [39, 6]}}],
            "background_window": 20,
            "horizon": 20,
            "ego": {"start": [2, 4], "goal": [32, 4]}
        }"#;
        let overrides: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
        Scenario::new(&parse_scenario(text, &overrides).unwrap()).unwrap()
    }

    #[test]
    fn empty_road_straight_run() {
        for mode in ["t2nod", "classical", "dynamic", "bare-cell"] {
            let s = scenario(&[&format!("ego.planner.mode={mode}")]);
            let r = run_episode(&s).unwrap();
            // 30 m at 10 m/s, 0.1 s frames; the goal tolerance may save a frame
            let Outcome::ReachedGoal { frame } = r.outcome else {
                panic!("{mode}: {:?}", r.outcome)
            };
            assert!((29..=32).contains(&frame), "{mode}: {frame}");
            assert!(r.collisions.is_empty());
            assert_eq!(r.steps.len() as u32, frame + 1);
        }
    }

    #[test]
    fn walled_off_goal_never_starts() {
        let s = scenario(&[r#"road=[{"rect": {"min": [0, 2], "max": [20, 6]}}, {"rect": {"min": [25, 2], "max": [39, 6]}}]"#]);
        let r = run_episode(&s).unwrap();
        assert_eq!(r.outcome, Outcome::NeverStarted);
        assert!(r.outcome.infeasible());
    }

    #[test]
    fn head_on_agent_is_a_collision_for_classical() {
        let agent = r#"agents=[{"length": 4, "width": 2, "route": [[39, 4], [0, 4]], "speed": 10}]"#;
        let s = scenario(&[agent, "ego.planner.mode=classical"]);
        let r = run_episode(&s).unwrap();
        assert_eq!(r.collisions.len(), 1);
        assert_eq!(r.collisions[0].agent, 0);
    }

    #[test]
    fn records_are_deterministic_and_serializable() {
        let agent = r#"agents=[{"length": 4, "width": 2, "route": [[39, 3], [0, 3]], "speed": 6}]"#;
        let s = scenario(&[agent, "ego.planner.allow_wait=true"]);
        let a = run_episode(&s).unwrap();
        let b = run_episode(&s).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back: RunRecord = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
        assert!(a.trajectory_csv().starts_with("frame,t_seconds"));
    }

    #[test]
    fn nearest_free_cell() {
        let g = GridGeometry::unit(5, 5);
        let mut blocked = PixelMask::new(5, 5);
        blocked.set(2, 2, true);
        blocked.set(2, 3, true);
        assert_eq!(nearest_free(&g, &blocked, Cell::new(2, 2), 2), Some(Cell::new(1, 2)));
        assert_eq!(nearest_free(&g, &blocked.inverted(), Cell::new(0, 0), 4), Some(Cell::new(2, 2)));
        assert_eq!(nearest_free(&g, &PixelMask::new(5, 5).inverted(), Cell::new(0, 0), 4), None);
    }
}
