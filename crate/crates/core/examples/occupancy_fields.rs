//! T2NO / T2ND for the bundled crossing-car scenario: a 5 m car at 10 m/s
//! whose front reaches the conflict pixel at t = 2.0 s.

use t2nod::t2nod::compute_t2no_t2nd;
use t2nod::traffic_sim::{load_scenario, oracle_predict, Oracle, Scenario};

const SCENARIO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/crossing_car.json");

pub fn run_example() -> t2nod::Result<()> {
    let s = Scenario::new(&load_scenario(SCENARIO.as_ref(), &[])?)?;
    let bg = Oracle::new(&s)?.backgrounds()[0].clone();
    let frames = oracle_predict(&s, 0, s.horizon);
    let (occ, dep) = compute_t2no_t2nd(&frames, &bg, s.thresholds)?;
    for col in 29..=32 {
        println!(
            "pixel (24, {col}): O = {} frames, D = {} frames",
            occ.get(24, col),
            dep.get(24, col)
        );
    }
    assert_eq!((occ.get(24, 30).finite(), dep.get(24, 30).finite()), (Some(20), Some(25)));
    assert_eq!((occ.get(24, 31).finite(), dep.get(24, 31).finite()), (Some(21), Some(26)));
    Ok(())
}

fn main() {
    run_example().unwrap();
}
