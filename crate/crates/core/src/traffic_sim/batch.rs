use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::episode::{run_episode, RunRecord};
use super::metrics::{aggregate, compute_metrics, BatchSummary, EpisodeMetrics};
use super::scenario::{Scenario, ScenarioFile};

/// Independent random stream for one episode of a batch.
pub fn episode_rng(seed: u64, episode: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode);
    rng
}

#[derive(Debug, Clone)]
pub struct BatchRun {
    pub records: Vec<RunRecord>,
    pub metrics: Vec<EpisodeMetrics>,
    pub summary: BatchSummary,
}

/// Run `episodes` randomized episodes in parallel. Results are in episode
/// order regardless of scheduling.
pub fn run_batch(file: &ScenarioFile, episodes: usize, seed: u64) -> Result<BatchRun> {
    if episodes == 0 {
        return Err(Error::arg("a batch needs at least one episode"));
    }
    let records = (0..episodes as u64)
        .into_par_iter()
        .map(|k| {
            let mut s = Scenario::randomized(file, &mut episode_rng(seed, k))?;
            s.seed = seed;
            s.episode = k;
            run_episode(&s)
        })
        .collect::<Result<Vec<_>>>()?;
    let metrics: Vec<_> = records.iter().map(compute_metrics).collect();
    let summary = aggregate(&metrics);
    Ok(BatchRun {
        records,
        metrics,
        summary,
    })
}
