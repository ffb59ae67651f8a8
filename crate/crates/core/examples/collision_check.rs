//! Check ego poses against occupancy windows.

use t2nod::collision::{check_t2nod, first_collision_time, CollisionQuery};
use t2nod::ego_mask::{mask_for_pose, Pose, VehicleShape};
use t2nod::t2nod::{FrameTime, TimeField};
use t2nod::{GridGeometry, Vec2};

pub fn run_example() -> t2nod::Result<()> {
    let g = GridGeometry::unit(10, 10);
    // Column 5 is occupied from frame 20 through frame 25.
    let mut occ = TimeField::infinite(10, 10);
    let mut dep = TimeField::infinite(10, 10);
    for r in 0..10 {
        occ.set(r, 5, FrameTime::at(20));
        dep.set(r, 5, FrameTime::at(25));
    }
    let ego = VehicleShape::new(4.0, 2.0)?;
    let mask = mask_for_pose(&g, &Pose::new(Vec2::new(5.0, 5.0), 0.0, 0), &ego);
    for t in [10, 20, 23, 25, 26] {
        let hit = check_t2nod(&CollisionQuery::new(mask.clone(), t), &occ, &dep)?;
        println!("t = {t:2}: {}", if hit { "collision" } else { "clear" });
    }
    let queries: Vec<_> = (0..40).map(|t| (t, mask.clone())).collect();
    println!("first collision: {:?}", first_collision_time(&queries, &occ, &dep)?);
    Ok(())
}

fn main() {
    run_example().unwrap();
}
