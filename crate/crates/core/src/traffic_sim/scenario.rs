//! Scenario files (versioned JSON) and their validated runtime form.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ego_mask::VehicleShape;
use crate::error::{Error, Result};
use crate::geometry::{GridGeometry, Vec2};
use crate::multi_view::{UnobservedPolicy, ViewLayout};
use crate::planner::{Connectivity, PlannerConfig, TimingMode};
use crate::raster::{fill_polygon, PixelMask, Rgb};
use crate::t2nod::Thresholds;

use super::agent::Agent;

pub const SCHEMA_VERSION: u32 = 1;

/// Which planner drives the ego.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerMode {
    /// Time-aware A* over T2NO/T2ND fields computed from oracle frames.
    #[default]
    T2nod,
    /// Time-aware A* around the agents' known trajectories.
    Dynamic,
    /// Static A* that ignores every agent.
    Classical,
    /// Dynamic A* with bare-cell states, obstacles sampled at the expanded node.
    BareCell,
}

/// Drivable area, in world coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    Rect { min: Vec2, max: Vec2 },
    Polygon { vertices: Vec<Vec2> },
}

impl Region {
    fn vertices(&self) -> Vec<Vec2> {
        match self {
            Region::Rect { min, max } => vec![
                *min,
                Vec2::new(max.x, min.y),
                *max,
                Vec2::new(min.x, max.y),
            ],
            Region::Polygon { vertices } => vertices.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Palette {
    #[serde(default = "default_road_color")]
    pub road: Rgb,
    #[serde(default = "default_offroad_color")]
    pub offroad: Rgb,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            road: default_road_color(),
            offroad: default_offroad_color(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub length: f64,
    pub width: f64,
    pub route: Vec<Vec2>,
    pub speed: f64,
    #[serde(default = "default_agent_color")]
    pub color: Rgb,
    #[serde(default)]
    pub start_time: f64,
}

impl AgentSpec {
    fn build(&self) -> Result<Agent> {
        Agent::new(
            VehicleShape::new(self.length, self.width)?,
            self.route.clone(),
            self.speed,
            self.color,
            self.start_time,
        )
    }
}

/// Per-episode randomization: jitter on the scripted agents plus extra
/// agents drawn from candidate routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficSpec {
    /// Scripted agents' start times move by up to this many seconds either way.
    #[serde(default)]
    pub start_jitter: f64,
    /// Scripted agents' speeds move by up to this many m/s either way.
    #[serde(default)]
    pub speed_jitter: f64,
    #[serde(default)]
    pub routes: Vec<Vec<Vec2>>,
    /// Inclusive range for the number of random agents.
    #[serde(default)]
    pub count: [u32; 2],
    #[serde(default = "default_traffic_speed")]
    pub speed: [f64; 2],
    #[serde(default)]
    pub start_time: [f64; 2],
    #[serde(default = "default_traffic_length")]
    pub length: f64,
    #[serde(default = "default_traffic_width")]
    pub width: f64,
    #[serde(default = "default_traffic_colors")]
    pub colors: Vec<Rgb>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSpec {
    #[serde(default)]
    pub mode: PlannerMode,
    #[serde(default = "default_connectivity")]
    pub connectivity: Connectivity,
    /// Collision penalty; omitted means "effectively infinite".
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default = "default_max_expansions")]
    pub max_expansions: usize,
    #[serde(default)]
    pub allow_wait: bool,
    #[serde(default)]
    pub unobserved: UnobservedPolicy,
    #[serde(default = "default_samples")]
    pub samples_per_segment: usize,
}

impl Default for PlannerSpec {
    fn default() -> Self {
        serde_json::from_value(Value::Object(Default::default())).expect("all fields default")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoSpec {
    pub start: Vec2,
    #[serde(default)]
    pub heading: f64,
    pub goal: Vec2,
    #[serde(default = "default_ego_length")]
    pub length: f64,
    #[serde(default = "default_ego_width")]
    pub width: f64,
    /// Extra clearance (m) added around the body for planning.
    #[serde(default = "default_padding")]
    pub padding: f64,
    #[serde(default = "default_ego_speed")]
    pub speed: f64,
    #[serde(default = "default_ego_color")]
    pub color: Rgb,
    #[serde(default = "default_goal_tolerance")]
    pub goal_tolerance: f64,
    #[serde(default)]
    pub planner: PlannerSpec,
}

/// On-disk scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub geometry: GridGeometry,
    /// Drivable regions; an empty list makes the whole grid drivable.
    #[serde(default)]
    pub road: Vec<Region>,
    #[serde(default)]
    pub palette: Palette,
    #[serde(default)]
    pub agents: Vec<AgentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traffic: Option<TrafficSpec>,
    pub ego: EgoSpec,
    #[serde(default = "default_horizon")]
    pub horizon: u32,
    /// Frames between replans; defaults to a 20 Hz cadence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replan_period: Option<u32>,
    #[serde(default = "default_background_window")]
    pub background_window: u32,
    #[serde(default = "default_max_frames")]
    pub max_frames: u32,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default = "default_field_horizons")]
    pub field_horizons: Vec<u32>,
    #[serde(default)]
    pub seed: u64,
    /// Camera views stitched onto the grid; empty means one view covering it.
    #[serde(default)]
    pub views: Vec<GridGeometry>,
}

fn default_road_color() -> Rgb {
    [70, 70, 70]
}
fn default_offroad_color() -> Rgb {
    [40, 100, 50]
}
fn default_agent_color() -> Rgb {
    [220, 40, 40]
}
fn default_ego_color() -> Rgb {
    [240, 240, 240]
}
fn default_traffic_speed() -> [f64; 2] {
    [8.0, 10.0]
}
fn default_traffic_length() -> f64 {
    4.5
}
fn default_traffic_width() -> f64 {
    2.0
}
fn default_traffic_colors() -> Vec<Rgb> {
    vec![[220, 40, 40], [40, 80, 220], [230, 200, 30], [200, 60, 200]]
}
fn default_connectivity() -> Connectivity {
    Connectivity::Eight
}
fn default_max_expansions() -> usize {
    200_000
}
fn default_samples() -> usize {
    4
}
fn default_ego_length() -> f64 {
    4.0
}
fn default_ego_width() -> f64 {
    2.0
}
fn default_padding() -> f64 {
    0.5
}
fn default_ego_speed() -> f64 {
    10.0
}
fn default_goal_tolerance() -> f64 {
    0.5
}
fn default_horizon() -> u32 {
    60
}
fn default_background_window() -> u32 {
    600
}
fn default_max_frames() -> u32 {
    300
}
fn default_field_horizons() -> Vec<u32> {
    vec![2, 10, 20, 30, 60]
}

/// Apply one `dotted.path=value` override to a JSON document. The value is
/// parsed as JSON when possible and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {spec:?} is not key=value")))?;
    if path.is_empty() {
        return Err(Error::Config(format!("override {spec:?} has an empty key")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = doc;
    let keys: Vec<&str> = path.split('.').collect();
    for (k, key) in keys.iter().enumerate() {
        let last = k + 1 == keys.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                map.entry(key.to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let i: usize = key.parse().map_err(|_| {
                    Error::Config(format!("override {path}: {key:?} is not an array index"))
                })?;
                let len = items.len();
                let slot = items.get_mut(i).ok_or_else(|| {
                    Error::Config(format!("override {path}: index {i} out of range (len {len})"))
                })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(Error::Config(format!(
                    "override {path}: {key:?} does not name an object field"
                )))
            }
        };
    }
    unreachable!("the loop returns on the last key")
}

/// Parse a scenario document, applying overrides on top of the file.
pub fn parse_scenario(text: &str, overrides: &[String]) -> Result<ScenarioFile> {
    let file: ScenarioFile = if overrides.is_empty() {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            Error::Config(format!(
                "line {} column {}, field `{}`: {inner}",
                inner.line(),
                inner.column(),
                e.path()
            ))
        })?
    } else {
        let mut doc: Value = serde_json::from_str(text).map_err(|e| {
            Error::Config(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        serde_path_to_error::deserialize(doc)
            .map_err(|e| Error::Config(format!("field `{}`: {}", e.path(), e.inner())))?
    };
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "field `schema_version`: unsupported version {} (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    Ok(file)
}

pub fn load_scenario(path: &Path, overrides: &[String]) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text, overrides).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Ego parameters resolved from an [`EgoSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct EgoConfig {
    pub start: Vec2,
    pub heading: f64,
    pub goal: Vec2,
    pub shape: VehicleShape,
    /// Body grown by the padding; used for planning footprints.
    pub planning_shape: VehicleShape,
    pub speed: f64,
    pub color: Rgb,
    pub goal_tolerance: f64,
    pub mode: PlannerMode,
    pub planner: PlannerConfig,
    pub unobserved: UnobservedPolicy,
    pub samples_per_segment: usize,
}

/// A validated scenario ready to simulate.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub geometry: GridGeometry,
    pub road_mask: PixelMask,
    pub palette: Palette,
    pub agents: Vec<Agent>,
    pub ego: EgoConfig,
    pub horizon: u32,
    pub replan_period: u32,
    pub background_window: u32,
    pub max_frames: u32,
    pub thresholds: Thresholds,
    pub field_horizons: Vec<u32>,
    pub seed: u64,
    /// Index within a batch (0 for single runs).
    pub episode: u64,
    pub views: Option<ViewLayout>,
    regions: Vec<Region>,
}

fn config_err(field: &str, e: Error) -> Error {
    match e {
        Error::Argument(msg) | Error::Config(msg) => Error::Config(format!("field `{field}`: {msg}")),
        other => other,
    }
}

fn uniform(rng: &mut impl Rng, [lo, hi]: [f64; 2]) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

impl Scenario {
    /// The scripted scenario exactly as written (no randomization).
    pub fn new(file: &ScenarioFile) -> Result<Self> {
        let agents = file
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| a.build().map_err(|e| config_err(&format!("agents[{i}]"), e)))
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(file, agents)
    }

    /// The scenario with its traffic randomization drawn from `rng`.
    pub fn randomized(file: &ScenarioFile, rng: &mut impl Rng) -> Result<Self> {
        let Some(t) = &file.traffic else {
            return Self::new(file);
        };
        validate_traffic(t)?;
        let mut agents = Vec::new();
        for (i, spec) in file.agents.iter().enumerate() {
            let mut spec = spec.clone();
            spec.start_time += uniform(rng, [-t.start_jitter, t.start_jitter]);
            spec.speed = (spec.speed + uniform(rng, [-t.speed_jitter, t.speed_jitter])).max(0.0);
            agents.push(spec.build().map_err(|e| config_err(&format!("agents[{i}]"), e))?);
        }
        if !t.routes.is_empty() {
            let n = rng.gen_range(t.count[0]..=t.count[1]);
            let shape = VehicleShape::new(t.length, t.width).map_err(|e| config_err("traffic", e))?;
            for k in 0..n as usize {
                let route = t.routes[rng.gen_range(0..t.routes.len())].clone();
                let speed = uniform(rng, t.speed);
                let start = uniform(rng, t.start_time);
                let color = t.colors[k % t.colors.len()];
                agents.push(
                    Agent::new(shape, route, speed, color, start)
                        .map_err(|e| config_err("traffic.routes", e))?,
                );
            }
        }
        Self::assemble(file, agents)
    }

    fn assemble(file: &ScenarioFile, agents: Vec<Agent>) -> Result<Self> {
        let g = file.geometry.clone();
        let e = &file.ego;
        if file.horizon < 1 {
            return Err(Error::Config("field `horizon`: must be at least 1".into()));
        }
        if file.background_window < 1 || file.max_frames < 1 {
            return Err(Error::Config(
                "fields `background_window` and `max_frames` must be at least 1".into(),
            ));
        }
        if file.field_horizons.is_empty() || file.field_horizons.contains(&0) {
            return Err(Error::Config("field `field_horizons`: needs positive horizons".into()));
        }
        let replan_period = match file.replan_period {
            Some(0) => return Err(Error::Config("field `replan_period`: must be at least 1".into())),
            Some(p) => p,
            None => ((1.0 / (20.0 * g.frame_period())).round() as u32).max(1),
        };
        let shape = VehicleShape::new(e.length, e.width).map_err(|err| config_err("ego", err))?;
        if !(e.padding >= 0.0 && e.padding.is_finite()) {
            return Err(Error::Config("field `ego.padding`: must be >= 0".into()));
        }
        if !(e.goal_tolerance >= 0.0 && e.goal_tolerance.is_finite()) {
            return Err(Error::Config("field `ego.goal_tolerance`: must be >= 0".into()));
        }
        if e.planner.samples_per_segment == 0 {
            return Err(Error::Config("field `ego.planner.samples_per_segment`: must be >= 1".into()));
        }
        let planner = PlannerConfig {
            connectivity: e.planner.connectivity,
            speed: e.speed,
            collision_penalty: e.planner.k,
            max_expansions: e.planner.max_expansions,
            allow_wait: e.planner.allow_wait,
            timing: if e.planner.mode == PlannerMode::BareCell {
                TimingMode::BareCell
            } else {
                TimingMode::SpaceTime
            },
            initial_heading: e.heading,
            horizon_frames: file.horizon,
        };
        planner.validate().map_err(|err| config_err("ego.planner", err))?;
        let ego = EgoConfig {
            start: e.start,
            heading: e.heading,
            goal: e.goal,
            shape,
            planning_shape: shape.padded(e.padding)?,
            speed: e.speed,
            color: e.color,
            goal_tolerance: e.goal_tolerance,
            mode: e.planner.mode,
            planner,
            unobserved: e.planner.unobserved,
            samples_per_segment: e.planner.samples_per_segment,
        };
        for (i, r) in file.road.iter().enumerate() {
            if r.vertices().len() < 3 || r.vertices().iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
                return Err(Error::Config(format!("field `road[{i}]`: degenerate region")));
            }
        }
        let views = if file.views.is_empty() {
            None
        } else {
            Some(ViewLayout::new(g.clone(), file.views.clone()).map_err(|err| config_err("views", err))?)
        };
        let mut s = Scenario {
            name: file.name.clone(),
            road_mask: PixelMask::for_geometry(&g),
            geometry: g,
            palette: file.palette,
            agents,
            ego,
            horizon: file.horizon,
            replan_period,
            background_window: file.background_window,
            max_frames: file.max_frames,
            thresholds: file.thresholds,
            field_horizons: file.field_horizons.clone(),
            seed: file.seed,
            episode: 0,
            views,
            regions: file.road.clone(),
        };
        s.road_mask = s.road_mask_for(&s.geometry);
        for (what, p) in [("start", s.ego.start), ("goal", s.ego.goal)] {
            let cell = s
                .geometry
                .sp2px(p)
                .map_err(|_| Error::Config(format!("field `ego.{what}`: outside the grid")))?;
            if !s.road_mask.get_cell(cell) {
                return Err(Error::Config(format!("field `ego.{what}`: not on the drivable area")));
            }
        }
        Ok(s)
    }

    /// Drivable pixels of an arbitrary grid (e.g. one camera view).
    pub fn road_mask_for(&self, g: &GridGeometry) -> PixelMask {
        let mut m = PixelMask::for_geometry(g);
        if self.regions.is_empty() {
            return m.inverted();
        }
        for r in &self.regions {
            let verts: Vec<Vec2> = r.vertices().into_iter().map(|v| g.to_pixel_coords(v)).collect();
            m.union_with(&fill_polygon(g, &verts).expect("regions are validated"));
        }
        m
    }

    /// Agents active at `frame`.
    pub fn active_agents(&self, frame: u32) -> usize {
        let t = self.geometry.frame_to_seconds(frame);
        self.agents.iter().filter(|a| a.is_active(t)).count()
    }
}

fn validate_traffic(t: &TrafficSpec) -> Result<()> {
    let bad = |msg: &str| Err(Error::Config(format!("field `traffic`: {msg}")));
    if !(t.start_jitter >= 0.0 && t.speed_jitter >= 0.0) {
        return bad("jitter must be >= 0");
    }
    if t.count[0] > t.count[1] || t.speed[0] > t.speed[1] || t.start_time[0] > t.start_time[1] {
        return bad("ranges must be [low, high]");
    }
    if t.speed[0] < 0.0 {
        return bad("speeds must be >= 0");
    }
    if !t.routes.is_empty() && t.colors.is_empty() {
        return bad("needs at least one color");
    }
    if t.routes.is_empty() && t.count[1] > 0 {
        return bad("random agents need candidate routes");
    }
    Ok(())
}
