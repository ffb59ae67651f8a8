//! Time-aware A* in a one-lane corridor with an obstacle crossing it.
//! The space-time search waits for it; the bare-cell variant keeps one
//! state per cell, cannot wait, and finds nothing here.

use t2nod::planner::{dynamic_astar, Connectivity, ObstacleTrajectory, PlannerConfig, TimingMode};
use t2nod::raster::PixelMask;
use t2nod::{Cell, GridGeometry};

pub fn run_example() -> t2nod::Result<()> {
    let g = GridGeometry::unit(3, 10);
    let mut walls = PixelMask::new(3, 10);
    for c in 0..10 {
        walls.set(0, c, true);
        walls.set(2, c, true);
    }
    // Cell (1, 4) is blocked from 0.15 s to 0.65 s.
    let crossing = ObstacleTrajectory::from_intervals(vec![(0.15, 0.65, Cell::new(1, 4))]);
    for timing in [TimingMode::SpaceTime, TimingMode::BareCell] {
        let cfg = PlannerConfig {
            connectivity: Connectivity::Four,
            speed: 10.0,
            allow_wait: true,
            timing,
            ..PlannerConfig::default()
        };
        let out = dynamic_astar(&g, &walls, &[crossing.clone()], Cell::new(1, 0), Cell::new(1, 9), &cfg)?;
        match out.path {
            Some(p) => {
                println!("{timing:?}: arrives at {:.1} s", p.cost());
                print!("{}", p.to_csv());
            }
            None => println!("{timing:?}: no path"),
        }
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
