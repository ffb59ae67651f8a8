//! Binary, CSV and image formats for fields and frames.

use t2nod::raster::{Frame, PixelMask};
use t2nod::t2nod::{FrameTime, OccupancyList, TimeField};

pub fn run_example() -> t2nod::Result<()> {
    let mut o = TimeField::infinite(2, 3);
    o.set(0, 1, FrameTime::at(20));
    o.set(1, 2, FrameTime::at(21));
    let csv = o.to_csv();
    print!("{csv}");
    assert_eq!(TimeField::from_csv(&csv)?, o);

    let bin = o.to_binary();
    println!("{} bytes, magic {:?}", bin.len(), std::str::from_utf8(&bin[..4]).unwrap());
    assert_eq!(TimeField::read_binary(&bin[..])?, o);

    let list = OccupancyList::from_times(1, 1, 4, vec![FrameTime::at(2), FrameTime::at(5), FrameTime::at(9), FrameTime::INFINITY])?;
    assert_eq!(OccupancyList::read_binary(&list.to_binary()[..])?, list);

    let frame = Frame::filled(2, 2, [10, 20, 30]);
    assert_eq!(Frame::read_ppm(&frame.to_ppm_bytes()[..])?.pixels(), frame.pixels());
    let mut mask = PixelMask::new(2, 2);
    mask.set(1, 0, true);
    assert_eq!(PixelMask::read_pgm(&mask.to_pgm_bytes()[..])?, mask);
    println!("all formats round-trip");
    Ok(())
}

fn main() {
    run_example().unwrap();
}
