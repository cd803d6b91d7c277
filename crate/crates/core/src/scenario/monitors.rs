//! The monitors a scenario run records at every cadence point.

use crate::construction::barrier_clearances;
use crate::error::Result;
use crate::exact::BarrierCylinder;
use crate::flow::{FlowState, Monitor, Observation};
use crate::geom::Vec3;
use crate::monitors::{geometry_report, ramp_diagnostics, region_area, RegionSpec};

pub struct RampMonitor {
    pub direction: Vec3,
}

impl Monitor for RampMonitor {
    fn name(&self) -> &str {
        "ramp"
    }

    fn columns(&self) -> Vec<String> {
        vec!["ramp_min".into(), "ratio_max".into()]
    }

    fn observe(&self, state: &FlowState) -> Result<Observation> {
        let d = ramp_diagnostics(&state.curve, &self.direction)?;
        let violation = d
            .max_ratio
            .is_infinite()
            .then(|| format!("tangent no longer ramped, min <T, V> = {:e}", d.min_dot));
        Ok(Observation {
            values: vec![d.min_dot, d.max_ratio],
            violation,
        })
    }
}

pub struct ClearanceMonitor {
    pub barriers: Vec<BarrierCylinder>,
    pub labels: Vec<String>,
}

impl Monitor for ClearanceMonitor {
    fn name(&self) -> &str {
        "clearance"
    }

    fn columns(&self) -> Vec<String> {
        self.labels.iter().map(|l| format!("clear_{l}")).collect()
    }

    fn observe(&self, state: &FlowState) -> Result<Observation> {
        let c = barrier_clearances(&state.curve, &self.barriers, state.t)?;
        let violation = c
            .iter()
            .zip(&self.labels)
            .find(|(d, _)| !(**d > 0.0))
            .map(|(d, l)| format!("barrier {l} touched, clearance {d:e}"));
        Ok(Observation { values: c, violation })
    }
}

pub struct AreaMonitor {
    pub region: RegionSpec,
}

impl Monitor for AreaMonitor {
    fn name(&self) -> &str {
        "area"
    }

    fn columns(&self) -> Vec<String> {
        let l = self.region.label();
        ["area", "slab", "excess_a", "excess_b"]
            .iter()
            .map(|c| format!("{c}_{l}"))
            .collect()
    }

    /// A region that cannot be delimited is recorded as a row of NaN.
    fn observe(&self, state: &FlowState) -> Result<Observation> {
        let values = match region_area(&state.curve, self.region) {
            Ok(r) => vec![r.area, r.slab_width, r.corner_excess[0], r.corner_excess[1]],
            Err(_) => vec![f64::NAN; 4],
        };
        Ok(Observation {
            values,
            violation: None,
        })
    }
}

pub struct GeometryMonitor {
    pub r: f64,
    pub radius: f64,
}

impl Monitor for GeometryMonitor {
    fn name(&self) -> &str {
        "geometry"
    }

    fn columns(&self) -> Vec<String> {
        [
            "nonplanarity",
            "line_deviation",
            "tip_upper_y",
            "tip_lower_y",
            "crossings",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    }

    fn observe(&self, state: &FlowState) -> Result<Observation> {
        let values = match geometry_report(&state.curve, self.r, self.radius) {
            Ok(g) => vec![
                g.nonplanarity,
                g.line_deviation,
                g.tips[0].map_or(f64::NAN, |p| p.y),
                g.tips[1].map_or(f64::NAN, |p| p.y),
                g.crossings as f64,
            ],
            Err(_) => vec![f64::NAN, f64::NAN, f64::NAN, f64::NAN, 0.0],
        };
        Ok(Observation {
            values,
            violation: None,
        })
    }
}
