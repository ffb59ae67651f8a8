//! Static A* around a wall, 4- and 8-connected.

use t2nod::planner::{classical_astar, Connectivity, PlannerConfig};
use t2nod::raster::PixelMask;
use t2nod::{Cell, GridGeometry};

pub fn run_example() -> t2nod::Result<()> {
    let g = GridGeometry::unit(10, 14);
    let mut walls = PixelMask::new(10, 14);
    for r in 0..8 {
        walls.set(r, 6, true);
    }
    for conn in [Connectivity::Four, Connectivity::Eight] {
        let cfg = PlannerConfig {
            connectivity: conn,
            speed: 1.0,
            ..PlannerConfig::default()
        };
        let out = classical_astar(&g, &walls, Cell::new(1, 1), Cell::new(1, 12), &cfg)?;
        let path = out.path.expect("a path exists");
        println!(
            "{conn:?}: {} cells, {:.3} s, {} expansions",
            path.cells.len(),
            path.cost,
            out.expansions
        );
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
