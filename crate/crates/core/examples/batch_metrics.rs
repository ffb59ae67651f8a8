//! Randomized-traffic batches on the four-view intersection, one per
//! planner, summarized as mean ± std.

use t2nod::traffic_sim::{load_scenario, run_batch, BatchSummary};

const SCENARIO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/four_view_intersection.json");

pub fn run_example() -> t2nod::Result<()> {
    let episodes = 4;
    let mut rows = Vec::new();
    for mode in ["t2nod", "classical"] {
        let file = load_scenario(SCENARIO.as_ref(), &[format!("ego.planner.mode={mode}")])?;
        rows.push((mode, run_batch(&file, episodes, file.seed)?.summary));
    }
    let refs: Vec<_> = rows.iter().map(|(m, s)| (*m, s)).collect();
    print!("{}", BatchSummary::table(&refs));
    Ok(())
}

fn main() {
    run_example().unwrap();
}
