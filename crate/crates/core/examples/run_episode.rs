//! The control experiment on the crossing-car map: the T2NO/D planner
//! waits for the car, the obstacle-blind planner drives into it.

use t2nod::traffic_sim::{compute_metrics, load_scenario, run_episode, Scenario};

const SCENARIO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/crossing_car.json");

pub fn run_example() -> t2nod::Result<()> {
    for mode in ["t2nod", "dynamic", "classical"] {
        let file = load_scenario(SCENARIO.as_ref(), &[format!("ego.planner.mode={mode}")])?;
        let record = run_episode(&Scenario::new(&file)?)?;
        let m = compute_metrics(&record);
        println!(
            "{mode:>9}: {:?}, collisions {}, distance {:.1} m, effort {:.1}, reversals {}",
            record.outcome,
            m.collisions,
            m.travel_distance,
            m.control_effort.unwrap_or(0.0),
            m.sudden_reversals.unwrap_or(0)
        );
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
