//! Command-line front end. `main.rs` only forwards to [`main_with_args`].

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::ego_mask::Pose;
use crate::error::{Error, Result};
use crate::raster::{Frame, Rgb};
use crate::t2nod::{FrameTime, TimeField};
use crate::traffic_sim::{
    compute_metrics, episode_rng, load_scenario, render_frame, render_with_ego, run_batch,
    run_episode, aggregate, BatchSummary, EpisodeMetrics, Oracle, PlannerMode, RunRecord, Scenario,
    ScenarioFile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "t2nod", version, about = "T2NO/T2ND fields, time-aware planning and traffic simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seed for traffic randomization; overrides the file's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Dotted-path override, e.g. `ego.planner.K=0` (repeatable).
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Planner driving the ego.
    #[arg(long, value_enum)]
    pub mode: Option<PlannerMode>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one episode; writes trajectory.csv, metrics.json and record.json.
    Run {
        #[command(flatten)]
        common: Common,
        /// Also write every frame (ego included) as numbered PPM files.
        #[arg(long)]
        dump_frames: bool,
    },
    /// Simulate randomized-traffic episodes and write an aggregate table.
    Batch {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        episodes: usize,
    },
    /// Write O/D fields at one frame for every configured horizon.
    Fields {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        frame: u32,
    },
    /// Write rendered frames as PPM files.
    Render {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        frame: u32,
        #[arg(long, default_value_t = 1)]
        count: u32,
        /// Draw the ego at its start pose.
        #[arg(long)]
        include_ego: bool,
    },
    /// Metric table: from saved run records, or by running a batch per planner mode.
    Metrics {
        /// Saved record.json files (repeatable).
        #[arg(long)]
        record: Vec<PathBuf>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 20)]
        episodes: usize,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Modes to compare when running a scenario.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "t2nod,dynamic,classical")]
        modes: Vec<PlannerMode>,
    },
}

/// Why a command did not finish cleanly.
#[derive(Debug)]
pub enum Failure {
    Infeasible(String),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Infeasible(_) => EXIT_INFEASIBLE,
            Failure::Error(Error::Invariant(_)) => EXIT_INVARIANT,
            Failure::Error(_) => EXIT_CONFIG,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            Failure::Error(e) => write!(f, "{e}"),
        }
    }
}

/// Parse arguments, run the command and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<(), Failure> {
    match cmd {
        Command::Run { common, dump_frames } => cmd_run(common, *dump_frames),
        Command::Batch { common, episodes } => cmd_batch(common, *episodes),
        Command::Fields { common, frame } => cmd_fields(common, *frame),
        Command::Render {
            common,
            frame,
            count,
            include_ego,
        } => cmd_render(common, *frame, *count, *include_ego),
        Command::Metrics {
            record,
            scenario,
            out,
            seed,
            episodes,
            overrides,
            modes,
        } => cmd_metrics(record, scenario.as_deref(), out, *seed, *episodes, overrides, modes),
    }
}

fn load(common: &Common) -> Result<ScenarioFile> {
    let mut overrides = common.overrides.clone();
    if let Some(m) = common.mode {
        overrides.push(format!("ego.planner.mode={}", mode_name(m)));
    }
    let mut file = load_scenario(&common.scenario, &overrides)?;
    if let Some(seed) = common.seed {
        file.seed = seed;
    }
    Ok(file)
}

fn mode_name(m: PlannerMode) -> String {
    serde_json::to_value(m)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .expect("modes serialize as strings")
}

/// The scenario as written, or with traffic drawn from `--seed` when given.
fn scenario_for(common: &Common, file: &ScenarioFile) -> Result<Scenario> {
    match common.seed {
        Some(seed) => Scenario::randomized(file, &mut episode_rng(seed, 0)),
        None => Scenario::new(file),
    }
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn metrics_json(record: &RunRecord, m: &EpisodeMetrics) -> serde_json::Value {
    json!({
        "scenario": record.scenario,
        "seed": record.seed,
        "episode": record.episode,
        "mode": record.mode,
        "outcome": record.outcome,
        "metrics": m,
    })
}

pub fn cmd_run(common: &Common, dump_frames: bool) -> Result<(), Failure> {
    let file = load(common)?;
    let s = scenario_for(common, &file)?;
    let record = run_episode(&s)?;
    let m = compute_metrics(&record);
    let out = &common.out;
    write(&out.join("trajectory.csv"), record.trajectory_csv())?;
    write(&out.join("metrics.json"), pretty(&metrics_json(&record, &m)))?;
    write(&out.join("record.json"), record.to_json())?;
    if dump_frames {
        for step in &record.steps {
            let pose = Pose::new(step.position, step.heading, step.frame);
            let f = render_with_ego(&s, step.frame, &pose);
            write(&out.join(format!("frames/frame_{:05}.ppm", step.frame)), f.to_ppm_bytes())?;
        }
    }
    println!(
        "{}: {:?}, {} collision(s), {:.2} m traveled",
        s.name, record.outcome, m.collisions, m.travel_distance
    );
    if record.outcome.infeasible() {
        return Err(Failure::Infeasible(format!("{:?}", record.outcome)));
    }
    Ok(())
}

pub fn cmd_batch(common: &Common, episodes: usize) -> Result<(), Failure> {
    let file = load(common)?;
    let seed = file.seed;
    let run = run_batch(&file, episodes, seed)?;
    for (record, m) in run.records.iter().zip(&run.metrics) {
        write(
            &common.out.join(format!("episodes/episode_{:03}.json", record.episode)),
            pretty(&metrics_json(record, m)),
        )?;
    }
    let label = mode_name(file.ego.planner.mode);
    let table = BatchSummary::table(&[(&label, &run.summary)]);
    write(&common.out.join("summary.json"), pretty(&json!({"seed": seed, "episodes": episodes, "summary": run.summary})))?;
    write(&common.out.join("table.md"), &table)?;
    print!("{table}");
    if run.records.iter().all(|r| r.outcome.infeasible()) {
        return Err(Failure::Infeasible("no episode could be planned".into()));
    }
    Ok(())
}

const YELLOW: Rgb = [255, 255, 0];

/// Black (0) to yellow (`horizon`) ramp; `INFINITY` is yellow.
pub fn ramp_color(v: FrameTime, horizon: u32) -> Rgb {
    match v.finite() {
        Some(t) => {
            let level = (255.0 * t.min(horizon) as f64 / horizon as f64).round() as u8;
            [level, level, 0]
        }
        None => YELLOW,
    }
}

pub fn false_color(field: &TimeField, horizon: u32) -> Frame {
    let pixels = field.values().iter().map(|&v| ramp_color(v, horizon)).collect();
    Frame::from_pixels(field.height(), field.width(), pixels).expect("dimensions match")
}

pub fn cmd_fields(common: &Common, frame: u32) -> Result<(), Failure> {
    let file = load(common)?;
    let s = scenario_for(common, &file)?;
    let mut oracle = Oracle::new(&s)?;
    for &h in &s.field_horizons {
        let st = oracle.fields(frame, h)?;
        let base = common.out.join(format!("t{frame:05}_T{h:03}"));
        write(&base.with_extension("o.bin"), st.occ.to_binary())?;
        write(&base.with_extension("d.bin"), st.dep.to_binary())?;
        write(&base.with_extension("o.ppm"), false_color(&st.occ, h).to_ppm_bytes())?;
        write(&base.with_extension("d.ppm"), false_color(&st.dep, h).to_ppm_bytes())?;
        if st.unobserved.any() {
            write(&base.with_extension("unobserved.pgm"), st.unobserved.to_pgm_bytes())?;
        }
    }
    println!("wrote fields for horizons {:?} to {}", s.field_horizons, common.out.display());
    Ok(())
}

pub fn cmd_render(common: &Common, frame: u32, count: u32, include_ego: bool) -> Result<(), Failure> {
    let file = load(common)?;
    let s = scenario_for(common, &file)?;
    for t in frame..frame.saturating_add(count) {
        let f = render_frame(&s, t, include_ego);
        write(&common.out.join(format!("frames/frame_{t:05}.ppm")), f.to_ppm_bytes())?;
    }
    Ok(())
}

fn cmd_metrics(
    records: &[PathBuf],
    scenario: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
    episodes: usize,
    overrides: &[String],
    modes: &[PlannerMode],
) -> Result<(), Failure> {
    let mut rows: Vec<(String, BatchSummary)> = Vec::new();
    if !records.is_empty() {
        let mut ms = Vec::new();
        for p in records {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let r: RunRecord = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            let m = compute_metrics(&r);
            println!("{}", serde_json::to_string(&metrics_json(&r, &m)).expect("serializes"));
            ms.push(m);
        }
        rows.push(("records".into(), aggregate(&ms)));
    }
    if let Some(path) = scenario {
        for &mode in modes {
            let mut o = overrides.to_vec();
            o.push(format!("ego.planner.mode={}", mode_name(mode)));
            let mut file = load_scenario(path, &o)?;
            if let Some(seed) = seed {
                file.seed = seed;
            }
            let run = run_batch(&file, episodes, file.seed)?;
            rows.push((mode_name(mode), run.summary));
        }
    }
    if rows.is_empty() {
        return Err(Error::Config("metrics needs --record or --scenario".into()).into());
    }
    let refs: Vec<(&str, &BatchSummary)> = rows.iter().map(|(n, b)| (n.as_str(), b)).collect();
    let table = BatchSummary::table(&refs);
    write(&out.join("metrics_table.md"), &table)?;
    print!("{table}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp_color(FrameTime::at(0), 60), [0, 0, 0]);
        assert_eq!(ramp_color(FrameTime::at(60), 60), [255, 255, 0]);
        assert_eq!(ramp_color(FrameTime::at(20), 60), [85, 85, 0]);
        assert_eq!(ramp_color(FrameTime::INFINITY, 2), YELLOW);
    }

    #[test]
    fn parses_documented_flags() {
        let cli = Cli::try_parse_from([
            "t2nod", "run", "--scenario", "s.json", "--out", "o", "--seed", "7",
            "--override", "ego.planner.K=0", "--override", "horizon=10", "--mode", "bare-cell",
            "--dump-frames",
        ])
        .unwrap();
        let Command::Run { common, dump_frames } = cli.command else { panic!() };
        assert!(dump_frames);
        assert_eq!(common.seed, Some(7));
        assert_eq!(common.overrides.len(), 2);
        assert_eq!(common.mode, Some(PlannerMode::BareCell));
        assert!(Cli::try_parse_from(["t2nod", "batch", "--scenario", "s", "--episodes", "3"]).is_ok());
        assert!(Cli::try_parse_from(["t2nod", "teleport"]).is_err());
    }

    #[test]
    fn missing_scenario_is_a_config_error() {
        let code = main_with_args(["t2nod", "run", "--scenario", "/nonexistent/x.json"]);
        assert_eq!(code, EXIT_CONFIG);
    }
}
