//! Geometric fusion of several camera views onto one planning canvas.
//!
//! Views share the canvas resolution and sit at whole-pixel offsets inside
//! it. Where views overlap, occupancy windows are fused conservatively: the
//! earliest occupancy and the latest departure among the views that report
//! any occupancy at that pixel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridGeometry;
use crate::raster::PixelMask;
use crate::t2nod::{FrameTime, OccupancyList, TimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnobservedPolicy {
    /// Pixels no view covers are treated as free.
    #[default]
    Free,
    /// Pixels no view covers are treated as occupied for all time.
    Occupied,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViewLayout {
    canvas: GridGeometry,
    views: Vec<GridGeometry>,
    offsets: Vec<(usize, usize)>,
}

impl ViewLayout {
    pub fn new(canvas: GridGeometry, views: Vec<GridGeometry>) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::arg("a layout needs at least one view"));
        }
        let res = canvas.resolution();
        let mut offsets = Vec::with_capacity(views.len());
        for (k, v) in views.iter().enumerate() {
            if (v.resolution() - res).abs() > 1e-9 * res {
                return Err(Error::arg(format!(
                    "view {k} resolution {} differs from canvas resolution {res}",
                    v.resolution()
                )));
            }
            let shift = canvas.to_pixel_coords(v.origin());
            let (r, c) = (shift.y.round(), shift.x.round());
            if (shift.y - r).abs() > 1e-6 || (shift.x - c).abs() > 1e-6 {
                return Err(Error::arg(format!("view {k} is not aligned to the canvas pixels")));
            }
            if r < 0.0
                || c < 0.0
                || r as usize + v.height() > canvas.height()
                || c as usize + v.width() > canvas.width()
            {
                return Err(Error::arg(format!("view {k} extends beyond the canvas")));
            }
            offsets.push((r as usize, c as usize));
        }
        Ok(Self {
            canvas,
            views,
            offsets,
        })
    }

    pub fn canvas(&self) -> &GridGeometry {
        &self.canvas
    }

    pub fn views(&self) -> &[GridGeometry] {
        &self.views
    }

    /// Canvas `(row, col)` of view pixel `(0, 0)`.
    pub fn offset(&self, view: usize) -> (usize, usize) {
        self.offsets[view]
    }

    /// Pixels covered by at least one view.
    pub fn coverage(&self) -> PixelMask {
        let mut m = PixelMask::for_geometry(&self.canvas);
        for (v, &(r0, c0)) in self.views.iter().zip(&self.offsets) {
            for r in 0..v.height() {
                for c in 0..v.width() {
                    m.set(r0 + r, c0 + c, true);
                }
            }
        }
        m
    }

    /// Number of canvas pixels shared by each pair of views that overlap.
    pub fn overlaps(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.views.len() {
            for b in a + 1..self.views.len() {
                let span = |k: usize| {
                    let (r, c) = self.offsets[k];
                    (r, r + self.views[k].height(), c, c + self.views[k].width())
                };
                let (ar0, ar1, ac0, ac1) = span(a);
                let (br0, br1, bc0, bc1) = span(b);
                let rows = ar1.min(br1).saturating_sub(ar0.max(br0));
                let cols = ac1.min(bc1).saturating_sub(ac0.max(bc0));
                if rows * cols > 0 {
                    out.push((a, b, rows * cols));
                }
            }
        }
        out
    }
}

/// Fused fields on the canvas plus the pixels no view observes.
#[derive(Debug, Clone, PartialEq)]
pub struct Stitched {
    pub occ: TimeField,
    pub dep: TimeField,
    pub unobserved: PixelMask,
}

impl Stitched {
    pub fn apply_policy(&mut self, policy: UnobservedPolicy) {
        if policy == UnobservedPolicy::Occupied {
            let w = self.occ.width();
            for idx in self.unobserved.iter_true().collect::<Vec<_>>() {
                self.occ.set(idx / w, idx % w, FrameTime::at(0));
                self.dep.set(idx / w, idx % w, FrameTime::INFINITY);
            }
        }
    }
}

pub fn stitch_fields(layout: &ViewLayout, fields: &[(TimeField, TimeField)]) -> Result<Stitched> {
    if fields.len() != layout.views.len() {
        return Err(Error::arg(format!(
            "layout has {} views but {} field pairs were given",
            layout.views.len(),
            fields.len()
        )));
    }
    let (h, w) = (layout.canvas.height(), layout.canvas.width());
    let mut occ = TimeField::infinite(h, w);
    let mut dep = TimeField::infinite(h, w);
    // Departure accumulates as a max, so track "no window yet" separately.
    let mut has_window = vec![false; h * w];
    for (k, ((o, d), view)) in fields.iter().zip(&layout.views).enumerate() {
        let dims = (view.height(), view.width());
        if o.dims() != dims || d.dims() != dims {
            return Err(Error::arg(format!("fields for view {k} do not match its geometry")));
        }
        let (r0, c0) = layout.offsets[k];
        for r in 0..view.height() {
            for c in 0..view.width() {
                let vo = o.get(r, c);
                if !vo.is_finite() {
                    continue;
                }
                let vd = d.get(r, c);
                let (cr, cc) = (r0 + r, c0 + c);
                let idx = cr * w + cc;
                if has_window[idx] {
                    occ.set(cr, cc, occ.get(cr, cc).min(vo));
                    dep.set(cr, cc, dep.get(cr, cc).max(vd));
                } else {
                    has_window[idx] = true;
                    occ.set(cr, cc, vo);
                    dep.set(cr, cc, vd);
                }
            }
        }
    }
    Ok(Stitched {
        occ,
        dep,
        unobserved: layout.coverage().inverted(),
    })
}

/// Stitch single-window occupancy lists (`n_L = 2`).
pub fn stitch_lists(layout: &ViewLayout, lists: &[OccupancyList]) -> Result<Stitched> {
    if let Some(l) = lists.iter().find(|l| l.capacity() != 2) {
        return Err(Error::arg(format!(
            "list stitching supports n_L = 2 only, got {}",
            l.capacity()
        )));
    }
    let pairs: Vec<_> = lists.iter().map(OccupancyList::first_window).collect();
    stitch_fields(layout, &pairs)
}
