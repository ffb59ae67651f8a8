//! A pixel crossed by two cars: the single O/D pair only sees the first,
//! the occupancy list keeps both windows.

use t2nod::raster::Frame;
use t2nod::t2nod::{compute_occupancy_list, compute_t2no_t2nd, Thresholds};

pub fn run_example() -> t2nod::Result<()> {
    let bg = Frame::filled(1, 1, [70, 70, 70]);
    let frames: Vec<Frame> = (0..40)
        .map(|t| {
            let busy = (20..25).contains(&t) || (30..35).contains(&t);
            Frame::filled(1, 1, if busy { [220, 40, 40] } else { [70, 70, 70] })
        })
        .collect();
    let thr = Thresholds::default();
    let (o, d) = compute_t2no_t2nd(&frames, &bg, thr)?;
    println!("single window: O = {}, D = {}", o.get(0, 0), d.get(0, 0));
    for n in [2, 4, 6] {
        let list = compute_occupancy_list(&frames, &bg, thr, n)?;
        let entries: Vec<String> = list.entries(0, 0).iter().map(|t| t.to_string()).collect();
        println!("n_L = {n}: [{}]", entries.join(", "));
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
