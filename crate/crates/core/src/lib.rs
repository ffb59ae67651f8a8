//! Time-to-next-occupancy / time-to-next-departure fields from predicted
//! top-down imagery, spatiotemporal collision checking, and time-aware A*
//! planning, driven end to end by a kinematic traffic simulator.

pub mod cli;
pub mod collision;
pub mod ego_mask;
pub mod error;
pub mod geometry;
pub mod multi_view;
pub mod planner;
pub mod raster;
pub mod t2nod;
pub mod traffic_sim;

pub use error::{Error, Result};
pub use geometry::{Cell, GridGeometry, Vec2};
