//! Kinematic multi-agent traffic, rendered top-down, standing in for the
//! camera predictor, plus the ego's receding-horizon loop.

mod agent;
mod batch;
mod episode;
mod metrics;
mod render;
mod scenario;

pub use agent::Agent;
pub use batch::{episode_rng, run_batch, BatchRun};
pub use episode::{
    run_episode, CollisionEvent, Outcome, PlanRecord, PlanStatus, RunRecord, StepRecord,
};
pub use metrics::{
    accelerations, aggregate, compute_metrics, effort_and_reversals, travel_distance,
    BatchSummary, EpisodeMetrics, Stat,
};
pub use render::{empty_road, oracle_predict, render_frame, render_with_ego, Oracle};
pub use scenario::{
    apply_override, load_scenario, parse_scenario, AgentSpec, EgoConfig, EgoSpec, Palette,
    PlannerMode, PlannerSpec, Region, Scenario, ScenarioFile, TrafficSpec, SCHEMA_VERSION,
};
