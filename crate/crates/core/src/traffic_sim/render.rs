//! Top-down rendering and the ground-truth "predictor".

use std::collections::BTreeMap;

use crate::ego_mask::{mask_for_pose, Pose};
use crate::error::Result;
use crate::geometry::GridGeometry;
use crate::multi_view::{stitch_fields, Stitched};
use crate::raster::{estimate_background, Frame, PixelMask};
use crate::t2nod::compute_t2no_t2nd;

use super::scenario::Scenario;

/// Road and off-road colors only.
pub fn empty_road(s: &Scenario, g: &GridGeometry, road: &PixelMask) -> Frame {
    let mut f = Frame::filled(g.height(), g.width(), s.palette.offroad);
    f.paint(road, s.palette.road);
    f
}

fn paint_scene(s: &Scenario, g: &GridGeometry, base: &Frame, frame: u32, ego: Option<&Pose>) -> Frame {
    let mut f = base.clone().with_timestamp(frame);
    let t = s.geometry.frame_to_seconds(frame);
    for a in &s.agents {
        if let Some((p, heading)) = a.pose_at(t) {
            f.paint(&mask_for_pose(g, &Pose::new(p, heading, frame), a.shape()), a.color());
        }
    }
    if let Some(pose) = ego {
        f.paint(&mask_for_pose(g, pose, &s.ego.shape), s.ego.color);
    }
    f
}

/// Render the scenario grid at `frame`. With `include_ego` the ego is drawn
/// at its start pose.
pub fn render_frame(s: &Scenario, frame: u32, include_ego: bool) -> Frame {
    let base = empty_road(s, &s.geometry, &s.road_mask);
    let ego = Pose::new(s.ego.start, s.ego.heading, frame);
    paint_scene(s, &s.geometry, &base, frame, include_ego.then_some(&ego))
}

/// Render the grid with the ego at an arbitrary pose.
pub fn render_with_ego(s: &Scenario, frame: u32, ego: &Pose) -> Frame {
    let base = empty_road(s, &s.geometry, &s.road_mask);
    paint_scene(s, &s.geometry, &base, frame, Some(ego))
}

/// Ground-truth renders of frames `now..=now + horizon` without the ego.
pub fn oracle_predict(s: &Scenario, now: u32, horizon: u32) -> Vec<Frame> {
    let base = empty_road(s, &s.geometry, &s.road_mask);
    (now..=now + horizon)
        .map(|t| paint_scene(s, &s.geometry, &base, t, None))
        .collect()
}

/// Renders every camera surface (the views, or the whole grid when there
/// are none), caching future frames across replans.
pub struct Oracle<'a> {
    scenario: &'a Scenario,
    surfaces: Vec<(GridGeometry, Frame)>,
    cache: BTreeMap<u32, Vec<Frame>>,
    backgrounds: Vec<Frame>,
}

impl<'a> Oracle<'a> {
    /// Builds the surfaces and estimates each one's background from the
    /// first `background_window` ego-free frames.
    pub fn new(s: &'a Scenario) -> Result<Self> {
        let geoms = match &s.views {
            Some(l) => l.views().to_vec(),
            None => vec![s.geometry.clone()],
        };
        let surfaces: Vec<_> = geoms
            .into_iter()
            .map(|g| {
                let road = s.road_mask_for(&g);
                let base = empty_road(s, &g, &road);
                (g, base)
            })
            .collect();
        let backgrounds = surfaces
            .iter()
            .map(|(g, base)| {
                let frames: Vec<Frame> = (0..s.background_window)
                    .map(|t| paint_scene(s, g, base, t, None))
                    .collect();
                estimate_background(&frames)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Oracle {
            scenario: s,
            surfaces,
            cache: BTreeMap::new(),
            backgrounds,
        })
    }

    pub fn backgrounds(&self) -> &[Frame] {
        &self.backgrounds
    }

    fn ensure(&mut self, frame: u32) {
        if !self.cache.contains_key(&frame) {
            let s = self.scenario;
            let rendered = self
                .surfaces
                .iter()
                .map(|(g, base)| paint_scene(s, g, base, frame, None))
                .collect();
            self.cache.insert(frame, rendered);
        }
    }

    /// Drop cached frames older than `frame`.
    pub fn evict_before(&mut self, frame: u32) {
        self.cache = self.cache.split_off(&frame);
    }

    /// Predicted sequence `now..=now + horizon` for surface `k`.
    pub fn predict(&mut self, k: usize, now: u32, horizon: u32) -> Vec<Frame> {
        (now..=now + horizon)
            .map(|t| {
                self.ensure(t);
                self.cache[&t][k].clone()
            })
            .collect()
    }

    /// O/D on the scenario grid for the window starting at `now`, with
    /// unobserved pixels handled by the ego's policy.
    pub fn fields(&mut self, now: u32, horizon: u32) -> Result<Stitched> {
        let thr = self.scenario.thresholds;
        let mut pairs = Vec::with_capacity(self.surfaces.len());
        for k in 0..self.surfaces.len() {
            let frames = self.predict(k, now, horizon);
            pairs.push(compute_t2no_t2nd(&frames, &self.backgrounds[k], thr)?);
        }
        let mut out = match &self.scenario.views {
            Some(layout) => stitch_fields(layout, &pairs)?,
            None => {
                let (occ, dep) = pairs.pop().expect("one surface");
                Stitched {
                    unobserved: PixelMask::new(occ.height(), occ.width()),
                    occ,
                    dep,
                }
            }
        };
        out.apply_policy(self.scenario.ego.unobserved);
        Ok(out)
    }
}
