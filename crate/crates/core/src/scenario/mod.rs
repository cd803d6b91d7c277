//! Scenario files, runs with their artifact trees, exports and R-sweeps.

mod config;
mod export;
mod monitors;
mod run;
mod sweep;

pub use config::{parse_raw_scenario, parse_scenario, RawScenario, ScenarioConfig};
pub use export::{export_plotdata, ExportKind, EXPORT_DIR};
pub use monitors::{AreaMonitor, ClearanceMonitor, GeometryMonitor, RampMonitor};
pub use run::{
    evaluate, run_scenario, scenario_barriers, RunOutcome, Verdict, VerdictLine, CHECKPOINT_DIR, CONFIG_FILE,
    MONITOR_FILE, RAMP_DROP_RATE, RATIO_LIMIT, SNAPSHOT_DIR, VERDICT_FILE,
};
pub use sweep::{regression_slope, sweep, SweepOutcome, AREA_SLOPE_TOL};
