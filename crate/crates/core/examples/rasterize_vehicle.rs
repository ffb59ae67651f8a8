//! Polygon fill and vehicle footprints, drawn as ASCII.

use t2nod::ego_mask::{mask_for_pose, vehicle_vertices, Pose, VehicleShape};
use t2nod::raster::{fill_polygon, PixelMask};
use t2nod::{GridGeometry, Vec2};

fn show(m: &PixelMask) {
    for r in 0..m.height() {
        let line: String = (0..m.width()).map(|c| if m.get(r, c) { '#' } else { '.' }).collect();
        println!("{line}");
    }
}

pub fn run_example() -> t2nod::Result<()> {
    let g = GridGeometry::unit(12, 16);
    let tri = fill_polygon(&g, &[Vec2::new(1.0, 1.0), Vec2::new(14.0, 2.0), Vec2::new(4.0, 10.0)])?;
    show(&tri);
    println!();

    let car = VehicleShape::new(5.0, 2.0)?;
    let pose = Pose::new(Vec2::new(8.0, 6.0), 0.6, 0);
    println!("corners: {:?}", vehicle_vertices(&pose, &car));
    let m = mask_for_pose(&g, &pose, &car);
    show(&m);
    println!("{} pixels for a {} m^2 body", m.count(), car.area());
    Ok(())
}

fn main() {
    run_example().unwrap();
}
