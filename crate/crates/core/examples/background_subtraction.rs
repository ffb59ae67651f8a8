//! Estimate a background from frames that occasionally contain a car, then
//! see which pixels of a new frame count as foreground.

use t2nod::raster::{estimate_background, Frame};
use t2nod::t2nod::{pixel_difference, Thresholds};

pub fn run_example() -> t2nod::Result<()> {
    let road = [70, 70, 70];
    let car = [220, 40, 40];
    let frames: Vec<Frame> = (0..200u32)
        .map(|t| {
            let mut f = Frame::filled(4, 20, road).with_timestamp(t);
            // a car crosses row 1 between frames 50 and 70
            if (50..70).contains(&t) {
                f.set(1, (t - 50) as usize, car);
            }
            f
        })
        .collect();
    let bg = estimate_background(&frames)?;
    println!("background at a crossed pixel: {:?}", bg.get(1, 3));

    let thr = Thresholds::default();
    let probe = &frames[55];
    for c in 0..8 {
        let d = pixel_difference(probe.get(1, c), bg.get(1, c));
        println!("col {c}: difference {d:3} -> {}", if d >= thr.tau_o() { "occupied" } else { "background" });
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
