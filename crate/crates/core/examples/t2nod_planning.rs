//! One planning step of the pipeline: oracle frames -> O/D fields ->
//! time-aware A* with the ego footprint -> smoothed trajectory.

use t2nod::planner::{smooth_path, t2nod_astar};
use t2nod::traffic_sim::{load_scenario, Oracle, Scenario};

const SCENARIO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/crossing_car.json");

pub fn run_example() -> t2nod::Result<()> {
    let s = Scenario::new(&load_scenario(SCENARIO.as_ref(), &[])?)?;
    let g = &s.geometry;
    let fields = Oracle::new(&s)?.fields(0, s.horizon)?;
    let blocked = s.road_mask.inverted();
    let start = g.sp2px(s.ego.start)?;
    let goal = g.sp2px(s.ego.goal)?;
    let out = t2nod_astar(g, &fields.occ, &fields.dep, &blocked, start, goal, &s.ego.planner, &s.ego.planning_shape)?;
    let path = out.path.expect("the crossing car can be avoided");
    let waits = path.nodes.windows(2).filter(|w| w[0].cell == w[1].cell).count();
    println!(
        "{} nodes, {} waits, arrival at {:.2} s after {} expansions",
        path.nodes.len(),
        waits,
        path.cost(),
        out.expansions
    );
    let smooth = smooth_path(&path.points(), s.ego.samples_per_segment)?;
    for p in smooth.iter().step_by(20) {
        println!("  t = {:.3} s  ({:.2}, {:.2})", p.time, p.position.x, p.position.y);
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
