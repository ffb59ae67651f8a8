//! Pixel <-> world mapping on a grid with a non-trivial origin and resolution.

use t2nod::{Cell, GridGeometry, Vec2};

pub fn run_example() -> t2nod::Result<()> {
    let g = GridGeometry::new(4, 6, Vec2::new(-3.0, 10.0), 0.5, 0.1)?;
    for (row, col) in [(0, 0), (0, 1), (3, 5)] {
        let p = g.px2sp(row, col)?;
        let back = g.sp2px(p)?;
        println!("pixel ({row}, {col}) -> world ({}, {}) -> {back:?}", p.x, p.y);
        assert_eq!(back, Cell::new(row, col));
    }
    // Half a pixel rounds up; out-of-extent points report the nearest pixel.
    println!("{:?}", g.sp2px(Vec2::new(-2.75, 10.0))?);
    println!("{}", g.sp2px(Vec2::new(100.0, 0.0)).unwrap_err());
    println!("frame 25 = {} s", g.frame_to_seconds(25));
    Ok(())
}

fn main() {
    run_example().unwrap();
}
