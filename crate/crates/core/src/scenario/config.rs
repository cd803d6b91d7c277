use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::construction::{BarrierLayout, BarrierVariant, GammaConfig};
use crate::error::{CsfError, Result};
use crate::flow::StepControl;
use crate::geom::{ramp_direction, Vec3};
use crate::monitors::AreaTolerance;

/// Scenario file as written: every key but `R` optional, unknown keys
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[serde(rename = "R_bend")]
    pub r_bend: Option<f64>,
    pub beta: Option<f64>,
    pub blend_window: Option<f64>,
    pub flare_rate: Option<f64>,
    pub tail_length: Option<f64>,
    pub h: Option<f64>,
    pub domain_halflength: Option<f64>,
    pub dt_max: Option<f64>,
    pub c_cfl: Option<f64>,
    pub resample_every: Option<u64>,
    pub ramp_direction: Option<[f64; 3]>,
    pub t_end: Option<f64>,
    pub t_end_fraction: Option<f64>,
    pub cadence: Option<f64>,
    pub snapshot_every: Option<u64>,
    pub checkpoint_every: Option<f64>,
    pub barriers: Option<Vec<String>>,
    pub ball_radius: Option<f64>,
    pub nonplanarity_floor: Option<f64>,
    pub tol_slope: Option<f64>,
    pub tol_angle: Option<f64>,
    pub abort_on_violation: Option<bool>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// A fully resolved scenario. `domain_halflength` and
/// `nonplanarity_floor` stay optional: the first is derived from the flare
/// when absent and the second disables the floor check.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub gamma: GammaConfig,
    pub step: StepControl,
    pub ramp_direction: Vec3,
    pub t_end: f64,
    pub t_end_fraction: f64,
    /// Time between monitor rows.
    pub cadence: f64,
    /// Write a snapshot every this many monitor rows; 0 disables snapshots.
    pub snapshot_every: u64,
    /// Time between checkpoints; 0 disables them.
    pub checkpoint_every: f64,
    pub barriers: Vec<BarrierVariant>,
    pub layout: BarrierLayout,
    pub ball_radius: f64,
    pub nonplanarity_floor: Option<f64>,
    pub tolerance: AreaTolerance,
    pub abort_on_violation: bool,
    pub output_dir: PathBuf,
    pub seed: u64,
}

fn config_err(key: &str, reason: impl Into<String>) -> CsfError {
    CsfError::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_variant(s: &str) -> Result<BarrierVariant> {
    match s {
        "corner" => Ok(BarrierVariant::Corner),
        "tip" => Ok(BarrierVariant::Tip),
        other => Err(config_err(
            "barriers",
            format!("unknown variant `{other}` (corner|tip)"),
        )),
    }
}

impl RawScenario {
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let r = self.r.ok_or_else(|| config_err("R", "missing required key"))?;
        let mut gamma = GammaConfig::new(r);
        macro_rules! take {
            ($dst:expr, $src:ident) => {
                if let Some(v) = self.$src {
                    $dst = v;
                }
            };
        }
        take!(gamma.r_bend, r_bend);
        take!(gamma.beta, beta);
        take!(gamma.blend_window, blend_window);
        take!(gamma.flare_rate, flare_rate);
        take!(gamma.tail_length, tail_length);
        take!(gamma.h, h);
        gamma.domain_halflength = self.domain_halflength;
        gamma.validate().map_err(|e| match e {
            CsfError::Parameter { name, reason } => config_err(name, reason),
            other => other,
        })?;

        let step = StepControl {
            dt_max: self.dt_max.unwrap_or(1e-2),
            c_cfl: self.c_cfl.unwrap_or(0.5),
            resample_every: self.resample_every.unwrap_or(20),
            h: gamma.h,
        };
        step.validate().map_err(|e| match e {
            CsfError::Parameter { name, reason } => config_err(name, reason),
            other => other,
        })?;

        let v = match self.ramp_direction {
            None => ramp_direction(),
            Some(a) => {
                let v = Vec3::from(a);
                if (v.norm() - 1.0).abs() > 1e-9 {
                    return Err(config_err(
                        "ramp_direction",
                        format!("must be a unit vector, |V| = {}", v.norm()),
                    ));
                }
                v
            }
        };

        let fraction = self.t_end_fraction.unwrap_or(0.7);
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(config_err(
                "t_end_fraction",
                format!("must lie in (0, 1), got {fraction}"),
            ));
        }
        let t_end = self.t_end.unwrap_or(r - 3.0);
        if !(t_end > 0.0) {
            return Err(config_err("t_end", format!("must be positive, got {t_end}")));
        }
        if t_end > fraction * r {
            return Err(config_err(
                "t_end",
                format!(
                    "{t_end} exceeds {fraction} R = {}; the barriers would expire",
                    fraction * r
                ),
            ));
        }
        let cadence = self.cadence.unwrap_or(0.1);
        if !(cadence > 0.0) {
            return Err(config_err("cadence", format!("must be positive, got {cadence}")));
        }
        let checkpoint_every = self.checkpoint_every.unwrap_or(0.5);
        if !(checkpoint_every >= 0.0) {
            return Err(config_err(
                "checkpoint_every",
                format!("must be nonnegative, got {checkpoint_every}"),
            ));
        }
        let barriers = match &self.barriers {
            None => vec![BarrierVariant::Corner],
            Some(list) => list.iter().map(|s| parse_variant(s)).collect::<Result<_>>()?,
        };
        let ball_radius = self.ball_radius.unwrap_or(10.0);
        if !(ball_radius > 0.0) {
            return Err(config_err(
                "ball_radius",
                format!("must be positive, got {ball_radius}"),
            ));
        }
        if let Some(f) = self.nonplanarity_floor {
            if !(f >= 0.0) {
                return Err(config_err(
                    "nonplanarity_floor",
                    format!("must be nonnegative, got {f}"),
                ));
            }
        }
        let tolerance = AreaTolerance {
            slope: self.tol_slope.unwrap_or(0.2),
            angle: self.tol_angle.unwrap_or(0.05),
        };
        if !(tolerance.slope >= 0.0) {
            return Err(config_err("tol_slope", "must be nonnegative"));
        }
        if !(tolerance.angle >= 0.0) {
            return Err(config_err("tol_angle", "must be nonnegative"));
        }
        Ok(ScenarioConfig {
            gamma,
            step,
            ramp_direction: v,
            t_end,
            t_end_fraction: fraction,
            cadence,
            snapshot_every: self.snapshot_every.unwrap_or(1),
            checkpoint_every,
            barriers,
            layout: BarrierLayout::default(),
            ball_radius,
            nonplanarity_floor: self.nonplanarity_floor,
            tolerance,
            abort_on_violation: self.abort_on_violation.unwrap_or(true),
            output_dir: self
                .output_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("runs/R{r}"))),
            seed: self.seed.unwrap_or(0),
        })
    }
}

impl ScenarioConfig {
    /// The raw form with every resolved value written out.
    pub fn to_raw(&self) -> RawScenario {
        let g = &self.gamma;
        RawScenario {
            r: Some(g.r),
            r_bend: Some(g.r_bend),
            beta: Some(g.beta),
            blend_window: Some(g.blend_window),
            flare_rate: Some(g.flare_rate),
            tail_length: Some(g.tail_length),
            h: Some(g.h),
            domain_halflength: g.domain_halflength,
            dt_max: Some(self.step.dt_max),
            c_cfl: Some(self.step.c_cfl),
            resample_every: Some(self.step.resample_every),
            ramp_direction: Some(self.ramp_direction.into()),
            t_end: Some(self.t_end),
            t_end_fraction: Some(self.t_end_fraction),
            cadence: Some(self.cadence),
            snapshot_every: Some(self.snapshot_every),
            checkpoint_every: Some(self.checkpoint_every),
            barriers: Some(self.barriers.iter().map(|b| b.label().to_string()).collect()),
            ball_radius: Some(self.ball_radius),
            nonplanarity_floor: self.nonplanarity_floor,
            tol_slope: Some(self.tolerance.slope),
            tol_angle: Some(self.tolerance.angle),
            abort_on_violation: Some(self.abort_on_violation),
            output_dir: Some(self.output_dir.clone()),
            seed: Some(self.seed),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_raw()).expect("scenario config serializes")
    }
}

pub fn parse_raw_scenario(text: &str) -> Result<RawScenario> {
    toml::from_str(text).map_err(|e| CsfError::Parse {
        what: "scenario config".into(),
        reason: e.to_string(),
    })
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    parse_raw_scenario(text)?.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_scenario("R = 5").unwrap();
        assert_eq!(c.t_end, 2.0);
        assert_eq!(c.gamma, GammaConfig::new(5.0));
        assert_eq!(c.barriers, vec![BarrierVariant::Corner]);
        assert_eq!(c.ball_radius, 10.0);
        assert_eq!(c.step.h, c.gamma.h);
        let text = c.to_toml();
        for key in ["R_bend", "beta", "dt_max", "cadence", "t_end", "seed"] {
            assert!(text.contains(key), "{key} missing from\n{text}");
        }
    }

    #[test]
    fn round_trip_is_identity() {
        for src in [
            "R = 5",
            "R = 4.5\nbeta = 0.001\nbarriers = [\"corner\", \"tip\"]\nnonplanarity_floor = 0.25\ndomain_halflength = 90.0",
            "R = 6\nramp_direction = [0.0, 0.0, 1.0]\nt_end = 1.25\noutput_dir = \"/tmp/x\"",
        ] {
            let c = parse_scenario(src).unwrap();
            let again = parse_scenario(&c.to_toml()).unwrap();
            assert_eq!(c, again);
            assert_eq!(c.to_toml(), again.to_toml());
        }
    }

    #[test]
    fn rejections_name_the_key() {
        let key = |src: &str| match parse_scenario(src) {
            Err(CsfError::Config { key, .. }) => key,
            other => panic!("{src}: {other:?}"),
        };
        assert_eq!(key("beta = 1.0"), "R");
        assert_eq!(key("R = 5\nt_end = 5.0"), "t_end");
        assert_eq!(key("R = 5\nR_bend = 10.0"), "R_bend");
        assert_eq!(key("R = 5\nbarriers = [\"wall\"]"), "barriers");
        assert_eq!(key("R = 5\nramp_direction = [1.0, 1.0, 0.0]"), "ramp_direction");
        assert_eq!(key("R = 0.5"), "R");
        assert!(matches!(
            parse_scenario("R = 5\nbogus = 1"),
            Err(CsfError::Parse { .. })
        ));
    }
}
