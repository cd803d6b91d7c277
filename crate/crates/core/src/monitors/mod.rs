//! Diagnostics evaluated on flow snapshots: ramp, barriers, areas, geometry.

mod area;
mod clearance;
mod geometry;
mod ramp;
mod report;

pub use area::{
    area_slopes, check_area_inequality, corner_bound, region_area, AreaReport, AreaSample, AreaTolerance,
    AreaViolation, AreaViolationKind, RegionSpec, SLAB_LIMIT,
};
pub use clearance::barrier_clearance;
pub use geometry::{geometry_report, small_angle_check, small_angle_max, GeometryReport};
pub use ramp::{ramp_diagnostics, RAMP_DOT_FLOOR};
pub use report::MonitorReport;
