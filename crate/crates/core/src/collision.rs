//! Spatiotemporal collision checks of ego masks against occupancy windows.
//!
//! A pose collides at frame `t` when any pixel under the ego mask satisfies
//! `O <= t <= D`. Only masked pixels take part in the comparison.

use crate::error::{Error, Result};
use crate::raster::PixelMask;
use crate::t2nod::{FrameTime, OccupancyList, TimeField};

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionQuery {
    pub mask: PixelMask,
    pub time: u32,
}

impl CollisionQuery {
    pub fn new(mask: PixelMask, time: u32) -> Self {
        Self { mask, time }
    }
}

/// Whether `t` lies in the closed window `[occ, dep]`. An infinite departure
/// leaves the window open to the end of time.
#[inline]
pub fn in_window(occ: FrameTime, dep: FrameTime, t: u32) -> bool {
    match occ.finite() {
        Some(o) => o <= t && dep.finite().map_or(true, |d| t <= d),
        None => false,
    }
}

fn check_dims(mask: (usize, usize), field: (usize, usize)) -> Result<()> {
    if mask != field {
        return Err(Error::arg(format!(
            "mask is {}x{}, field is {}x{}",
            mask.0, mask.1, field.0, field.1
        )));
    }
    Ok(())
}

pub fn check_t2nod(q: &CollisionQuery, occ: &TimeField, dep: &TimeField) -> Result<bool> {
    check_dims(q.mask.dims(), occ.dims())?;
    check_dims(q.mask.dims(), dep.dims())?;
    Ok(q
        .mask
        .iter_true()
        .any(|i| in_window(occ.at_index(i), dep.at_index(i), q.time)))
}

/// Same test on pre-extracted flat pixel indices.
pub fn check_indices(indices: &[usize], time: u32, occ: &TimeField, dep: &TimeField) -> bool {
    indices
        .iter()
        .any(|&i| in_window(occ.at_index(i), dep.at_index(i), time))
}

pub fn check_occupancy_list(q: &CollisionQuery, list: &OccupancyList) -> Result<bool> {
    check_dims(q.mask.dims(), list.dims())?;
    Ok(q.mask.iter_true().any(|i| {
        list.windows_at(i)
            .any(|(occ, dep)| in_window(occ, dep, q.time))
    }))
}

/// Earliest frame in a strictly increasing sequence whose pose collides.
pub fn first_collision_time(
    masks: &[(u32, PixelMask)],
    occ: &TimeField,
    dep: &TimeField,
) -> Result<Option<u32>> {
    if masks.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::arg("mask times must be strictly increasing"));
    }
    for (t, mask) in masks {
        check_dims(mask.dims(), occ.dims())?;
        check_dims(mask.dims(), dep.dims())?;
        if mask
            .iter_true()
            .any(|i| in_window(occ.at_index(i), dep.at_index(i), *t))
        {
            return Ok(Some(*t));
        }
    }
    Ok(None)
}
