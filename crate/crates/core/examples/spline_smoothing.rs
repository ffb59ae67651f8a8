//! Natural cubic spline through timed waypoints.

use t2nod::planner::{smooth_path, SpaceTimePoint, TrajectorySpline};
use t2nod::Vec2;

pub fn run_example() -> t2nod::Result<()> {
    let knots: Vec<SpaceTimePoint> = [(0.0, 0.0, 0.0), (0.1, 1.0, 0.0), (0.2, 2.0, 1.0), (0.3, 3.0, 1.0)]
        .iter()
        .map(|&(t, x, y)| SpaceTimePoint::new(t, Vec2::new(x, y)))
        .collect();
    let dense = smooth_path(&knots, 5)?;
    println!("{} knots -> {} samples", knots.len(), dense.len());
    for p in &dense {
        println!("{:.2}: ({:.3}, {:.3})", p.time, p.position.x, p.position.y);
    }
    let spline = TrajectorySpline::new(&knots)?;
    let v = spline.velocity(0.15);
    println!("velocity at 0.15 s: ({:.2}, {:.2}) m/s", v.x, v.y);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
