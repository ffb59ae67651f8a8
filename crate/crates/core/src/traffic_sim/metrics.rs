//! Per-episode metrics and their batch aggregation.

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;

use super::episode::RunRecord;

/// Accelerations below this magnitude (m/s^2) carry no sign.
const SIGN_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub success: bool,
    pub collisions: usize,
    /// Meters driven over the whole episode.
    pub travel_distance: f64,
    /// Frames until the goal was reached.
    pub total_timesteps: Option<u32>,
    /// Sum over frames of the acceleration norm (m/s^2).
    pub control_effort: Option<f64>,
    /// Sign changes of the longitudinal plus the lateral acceleration.
    pub sudden_reversals: Option<usize>,
}

pub fn travel_distance(positions: &[Vec2]) -> f64 {
    positions.windows(2).fold(0.0, |acc, w| acc + w[0].distance(w[1]))
}

/// Central-difference accelerations `(x[t+1] - 2 x[t] + x[t-1]) / dt^2`.
pub fn accelerations(positions: &[Vec2], dt: f64) -> Vec<Vec2> {
    positions
        .windows(3)
        .map(|w| (w[2] - w[1] * 2.0 + w[0]) * (1.0 / (dt * dt)))
        .collect()
}

fn sign(v: f64) -> i8 {
    if v > SIGN_EPS {
        1
    } else if v < -SIGN_EPS {
        -1
    } else {
        0
    }
}

fn count_flips(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0;
    let mut flips = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            flips += 1;
        }
        last = s;
    }
    flips
}

/// Control effort and sudden reversals of a trajectory sampled every `dt`
/// seconds, or `None` for fewer than three samples.
///
/// Accelerations are split along the direction of travel (central-difference
/// velocity); while stationary the previous direction is kept.
pub fn effort_and_reversals(positions: &[Vec2], dt: f64) -> Option<(f64, usize)> {
    if positions.len() < 3 {
        return None;
    }
    let acc = accelerations(positions, dt);
    let effort = acc.iter().fold(0.0, |s, a| s + a.norm());
    let mut dir: Option<Vec2> = None;
    let mut lon = Vec::with_capacity(acc.len());
    let mut lat = Vec::with_capacity(acc.len());
    for (k, a) in acc.iter().enumerate() {
        let v = positions[k + 2] - positions[k];
        if v.norm() > 1e-9 {
            dir = Some(v * (1.0 / v.norm()));
        }
        if let Some(u) = dir {
            lon.push(sign(a.dot(u)));
            lat.push(sign(a.dot(Vec2::new(-u.y, u.x))));
        }
    }
    Some((effort, count_flips(lon.into_iter()) + count_flips(lat.into_iter())))
}

pub fn compute_metrics(record: &RunRecord) -> EpisodeMetrics {
    let positions = record.positions();
    let er = effort_and_reversals(&positions, record.frame_period);
    EpisodeMetrics {
        success: record.outcome.success(),
        collisions: record.collisions.len(),
        travel_distance: travel_distance(&positions),
        total_timesteps: match record.outcome {
            super::episode::Outcome::ReachedGoal { frame } => Some(frame),
            _ => None,
        },
        control_effort: er.map(|(e, _)| e),
        sudden_reversals: er.map(|(_, r)| r),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation (zero for a single value).
    pub std: f64,
    pub n: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Stat> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Stat { mean, std, n })
    }
}

/// Batch summary. Apart from the success rate and travel distance, metrics
/// are averaged over successful episodes only: failed runs are shorter and
/// would otherwise look smoother.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub collisions: Option<Stat>,
    pub total_timesteps: Option<Stat>,
    pub control_effort: Option<Stat>,
    pub sudden_reversals: Option<Stat>,
    pub travel_distance: Option<Stat>,
}

pub fn aggregate(metrics: &[EpisodeMetrics]) -> BatchSummary {
    let ok: Vec<&EpisodeMetrics> = metrics.iter().filter(|m| m.success).collect();
    let over_ok = |f: &dyn Fn(&EpisodeMetrics) -> Option<f64>| {
        Stat::of(&ok.iter().filter_map(|m| f(m)).collect::<Vec<_>>())
    };
    BatchSummary {
        episodes: metrics.len(),
        successes: ok.len(),
        success_rate: if metrics.is_empty() {
            0.0
        } else {
            100.0 * ok.len() as f64 / metrics.len() as f64
        },
        collisions: over_ok(&|m| Some(m.collisions as f64)),
        total_timesteps: over_ok(&|m| m.total_timesteps.map(f64::from)),
        control_effort: over_ok(&|m| m.control_effort),
        sudden_reversals: over_ok(&|m| m.sudden_reversals.map(|r| r as f64)),
        travel_distance: Stat::of(&metrics.iter().map(|m| m.travel_distance).collect::<Vec<_>>()),
    }
}

impl BatchSummary {
    /// Markdown table, one row per summary, `mean ± std` cells.
    pub fn table(rows: &[(&str, &BatchSummary)]) -> String {
        let cell = |s: &Option<Stat>| match s {
            Some(s) => format!("{:.2} ± {:.2}", s.mean, s.std),
            None => "n/a".to_string(),
        };
        let mut out = String::from(
            "| Method | Success Rate (%) | Number of Collisions | Total Timesteps | Total Control Effort | Total Sudden Reversals | Travel Distance (m) |\n\
             |---|---|---|---|---|---|---|\n",
        );
        for (name, b) in rows {
            out.push_str(&format!(
                "| {name} | {:.1} | {} | {} | {} | {} | {} |\n",
                b.success_rate,
                cell(&b.collisions),
                cell(&b.total_timesteps),
                cell(&b.control_effort),
                cell(&b.sudden_reversals),
                cell(&b.travel_distance),
            ));
        }
        out
    }
}
