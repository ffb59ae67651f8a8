//! Every example must keep running.

#[allow(dead_code)]
#[path = "../examples/background_subtraction.rs"]
mod background_subtraction;

#[allow(dead_code)]
#[path = "../examples/batch_metrics.rs"]
mod batch_metrics;

#[allow(dead_code)]
#[path = "../examples/classical_astar.rs"]
mod classical_astar;

#[allow(dead_code)]
#[path = "../examples/cli_fields.rs"]
mod cli_fields;

#[allow(dead_code)]
#[path = "../examples/collision_check.rs"]
mod collision_check;

#[allow(dead_code)]
#[path = "../examples/dynamic_astar.rs"]
mod dynamic_astar;

#[allow(dead_code)]
#[path = "../examples/field_formats.rs"]
mod field_formats;

#[allow(dead_code)]
#[path = "../examples/grid_geometry.rs"]
mod grid_geometry;

#[allow(dead_code)]
#[path = "../examples/multi_view.rs"]
mod multi_view;

#[allow(dead_code)]
#[path = "../examples/occupancy_fields.rs"]
mod occupancy_fields;

#[allow(dead_code)]
#[path = "../examples/occupancy_list.rs"]
mod occupancy_list;

#[allow(dead_code)]
#[path = "../examples/rasterize_vehicle.rs"]
mod rasterize_vehicle;

#[allow(dead_code)]
#[path = "../examples/run_episode.rs"]
mod run_episode;

#[allow(dead_code)]
#[path = "../examples/spline_smoothing.rs"]
mod spline_smoothing;

#[allow(dead_code)]
#[path = "../examples/t2nod_planning.rs"]
mod t2nod_planning;

#[test]
fn background_subtraction_runs() {
    background_subtraction::run_example().unwrap();
}

#[test]
fn batch_metrics_runs() {
    batch_metrics::run_example().unwrap();
}

#[test]
fn classical_astar_runs() {
    classical_astar::run_example().unwrap();
}

#[test]
fn cli_fields_runs() {
    cli_fields::run_example().unwrap();
}

#[test]
fn collision_check_runs() {
    collision_check::run_example().unwrap();
}

#[test]
fn dynamic_astar_runs() {
    dynamic_astar::run_example().unwrap();
}

#[test]
fn field_formats_runs() {
    field_formats::run_example().unwrap();
}

#[test]
fn grid_geometry_runs() {
    grid_geometry::run_example().unwrap();
}

#[test]
fn multi_view_runs() {
    multi_view::run_example().unwrap();
}

#[test]
fn occupancy_fields_runs() {
    occupancy_fields::run_example().unwrap();
}

#[test]
fn occupancy_list_runs() {
    occupancy_list::run_example().unwrap();
}

#[test]
fn rasterize_vehicle_runs() {
    rasterize_vehicle::run_example().unwrap();
}

#[test]
fn run_episode_runs() {
    run_episode::run_example().unwrap();
}

#[test]
fn spline_smoothing_runs() {
    spline_smoothing::run_example().unwrap();
}

#[test]
fn t2nod_planning_runs() {
    t2nod_planning::run_example().unwrap();
}
