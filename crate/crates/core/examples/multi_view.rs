//! Stitch two overlapping camera views onto one canvas; the uncovered
//! strip is reported and, in pessimistic mode, treated as occupied.

use t2nod::multi_view::{stitch_fields, UnobservedPolicy, ViewLayout};
use t2nod::t2nod::{FrameTime, TimeField};
use t2nod::{GridGeometry, Vec2};

fn window(h: usize, w: usize, o: u32, d: u32) -> (TimeField, TimeField) {
    let f = |v| TimeField::from_values(h, w, vec![FrameTime::at(v); h * w]).unwrap();
    (f(o), f(d))
}

pub fn run_example() -> t2nod::Result<()> {
    let canvas = GridGeometry::new(2, 8, Vec2::default(), 1.0, 0.1)?;
    let left = GridGeometry::new(2, 4, Vec2::new(0.0, 0.0), 1.0, 0.1)?;
    let right = GridGeometry::new(2, 3, Vec2::new(3.0, 0.0), 1.0, 0.1)?;
    let layout = ViewLayout::new(canvas, vec![left, right])?;
    println!("overlaps (view, view, pixels): {:?}", layout.overlaps());

    let mut st = stitch_fields(&layout, &[window(2, 4, 3, 5), window(2, 3, 4, 8)])?;
    let row: Vec<String> = (0..8)
        .map(|c| format!("[{},{}]", st.occ.get(0, c), st.dep.get(0, c)))
        .collect();
    println!("free policy:     {}", row.join(" "));
    st.apply_policy(UnobservedPolicy::Occupied);
    let row: Vec<String> = (0..8)
        .map(|c| format!("[{},{}]", st.occ.get(0, c), st.dep.get(0, c)))
        .collect();
    println!("occupied policy: {}", row.join(" "));
    println!("unobserved pixels: {}", st.unobserved.count());
    Ok(())
}

fn main() {
    run_example().unwrap();
}
