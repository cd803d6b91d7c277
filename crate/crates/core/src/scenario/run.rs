use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::monitors::{AreaMonitor, ClearanceMonitor, GeometryMonitor, RampMonitor};
use crate::construction::{build_gamma, check_initial_clearance, place_barriers};
use crate::curve::{read_snapshot, write_snapshot, EndCondition, Snapshot, Topology};
use crate::error::{CsfError, Result};
use crate::exact::BarrierCylinder;
use crate::flow::{evolve_with_hook, FlowState, Monitor, MonitorSchedule, StepControl, StepStats};
use crate::geom::ramp_direction;
use crate::io::write_atomic;
use crate::monitors::{
    area_slopes, check_area_inequality, corner_bound, AreaSample, AreaViolationKind, MonitorReport, RegionSpec,
    SLAB_LIMIT,
};

pub const CONFIG_FILE: &str = "config.toml";
pub const MONITOR_FILE: &str = "monitors.csv";
pub const VERDICT_FILE: &str = "verdict.txt";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const CHECKPOINT_DIR: &str = "checkpoints";

/// Largest allowed decrease rate of `min <T, V>` between cadence rows.
pub const RAMP_DROP_RATE: f64 = 1e-3;
/// Bound on `max kappa / <T, V>` over a run, the construction's 2 plus slack.
pub const RATIO_LIMIT: f64 = 2.0 + 1e-2;

/// Sidecar of a checkpoint; the curve itself sits next to it as a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckpointMeta {
    t: f64,
    stats: StepStats,
    schedule: MonitorSchedule,
    step: StepControl,
    clamp_direction: [f64; 3],
    next_checkpoint: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictLine {
    pub property: String,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
}

impl fmt::Display for VerdictLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "property={} status={} measured={:?} threshold={:?}",
            self.property,
            if self.pass { "pass" } else { "fail" },
            self.measured,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub lines: Vec<VerdictLine>,
}

impl Verdict {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn get(&self, property: &str) -> Option<&VerdictLine> {
        self.lines.iter().find(|l| l.property == property)
    }

    pub fn to_text(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |reason: String| CsfError::Parse {
            what: "verdict".into(),
            reason,
        };
        let lines = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let mut prop = None;
                let mut status = None;
                let mut measured = None;
                let mut threshold = None;
                for kv in l.split_whitespace() {
                    let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("bad field `{kv}`")))?;
                    let num = |v: &str| v.parse::<f64>().map_err(|e| bad(format!("{k}: {e}")));
                    match k {
                        "property" => prop = Some(v.to_string()),
                        "status" => status = Some(v == "pass"),
                        "measured" => measured = Some(num(v)?),
                        "threshold" => threshold = Some(num(v)?),
                        _ => return Err(bad(format!("unknown field `{k}`"))),
                    }
                }
                match (prop, status, measured, threshold) {
                    (Some(property), Some(pass), Some(measured), Some(threshold)) => Ok(VerdictLine {
                        property,
                        pass,
                        measured,
                        threshold,
                    }),
                    _ => Err(bad(format!("incomplete line `{l}`"))),
                }
            })
            .collect::<Result<_>>()?;
        Ok(Verdict { lines })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub report: MonitorReport,
    pub verdict: Verdict,
    pub final_state: FlowState,
}

fn snapshot_path(dir: &Path, row: usize) -> PathBuf {
    dir.join(SNAPSHOT_DIR).join(format!("snap_{row:05}.curve"))
}

fn checkpoint_base(dir: &Path, k: u64) -> PathBuf {
    dir.join(CHECKPOINT_DIR).join(format!("ckpt_{k:04}"))
}

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write_checkpoint(
    base: &Path,
    state: &FlowState,
    schedule: &MonitorSchedule,
    step: &StepControl,
    next: u64,
    report: &MonitorReport,
) -> Result<()> {
    let clamp = match state.curve.topology() {
        Topology::Open {
            start: EndCondition::Clamped { direction },
            ..
        } => direction,
        _ => ramp_direction(),
    };
    let meta = CheckpointMeta {
        t: state.t,
        stats: state.stats,
        schedule: *schedule,
        step: *step,
        clamp_direction: clamp.into(),
        next_checkpoint: next,
    };
    let text = toml::to_string(&meta).expect("checkpoint sidecar serializes");
    write_snapshot(
        &with_ext(base, "curve"),
        &Snapshot {
            curve: state.curve.clone(),
            time: state.t,
        },
    )?;
    write_atomic(&with_ext(base, "csv"), report.to_csv().as_bytes())?;
    write_atomic(&with_ext(base, "toml"), text.as_bytes())
}

/// Loads a checkpoint given its sidecar, curve, or common base path.
fn read_checkpoint(path: &Path) -> Result<(FlowState, MonitorSchedule, u64, MonitorReport, StepControl)> {
    let base = match path.extension().and_then(|e| e.to_str()) {
        Some("toml" | "curve" | "csv") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let meta_path = with_ext(&base, "toml");
    let text = std::fs::read_to_string(&meta_path).map_err(|_| CsfError::MissingArtifact(meta_path.clone()))?;
    let meta: CheckpointMeta = toml::from_str(&text).map_err(|e| CsfError::Parse {
        what: meta_path.display().to_string(),
        reason: e.to_string(),
    })?;
    let snap = read_snapshot(&with_ext(&base, "curve"))?;
    let csv_path = with_ext(&base, "csv");
    let csv = std::fs::read_to_string(&csv_path).map_err(|_| CsfError::MissingArtifact(csv_path))?;
    let report = MonitorReport::from_csv(&csv)?;
    let d = meta.clamp_direction.into();
    let curve = snap.curve.with_topology(Topology::Open {
        start: EndCondition::Clamped { direction: d },
        end: EndCondition::Clamped { direction: d },
    })?;
    if snap.time != meta.t {
        return Err(CsfError::Parse {
            what: meta_path.display().to_string(),
            reason: format!("sidecar time {} disagrees with snapshot time {}", meta.t, snap.time),
        });
    }
    let state = FlowState {
        curve,
        t: meta.t,
        stats: meta.stats,
    };
    Ok((state, meta.schedule, meta.next_checkpoint, report, meta.step))
}

/// Barrier list of the configured variants with a column label for each.
pub fn scenario_barriers(cfg: &ScenarioConfig) -> Result<(Vec<BarrierCylinder>, Vec<String>)> {
    let mut barriers = Vec::new();
    let mut labels = Vec::new();
    for v in &cfg.barriers {
        let b = place_barriers(cfg.gamma.r, *v, &cfg.layout)?;
        labels.extend((0..b.len()).map(|i| format!("{}{i}", v.label())));
        barriers.extend(b);
    }
    Ok((barriers, labels))
}

/// Builds `Gamma_R`, evolves it to `t_end` with every monitor, and writes
/// the artifact tree under `cfg.output_dir`. With `resume`, continues from
/// a checkpoint of the same configuration instead of starting over.
pub fn run_scenario(cfg: &ScenarioConfig, resume: Option<&Path>) -> Result<RunOutcome> {
    let dir = cfg.output_dir.clone();
    write_atomic(&dir.join(CONFIG_FILE), cfg.to_toml().as_bytes())?;

    let (barriers, labels) = scenario_barriers(cfg)?;
    let (state, mut schedule, mut next_ckpt, prefix, saved_step) = match resume {
        None => {
            let g = build_gamma(&cfg.gamma)?;
            check_initial_clearance(&g.curve, &barriers)?;
            let mut schedule = MonitorSchedule::new(0.0, cfg.cadence);
            schedule.abort_on_violation = cfg.abort_on_violation;
            (FlowState::new(g.curve, 0.0), schedule, 1, None, None)
        }
        Some(p) => {
            let (s, sch, k, rep, step) = read_checkpoint(p)?;
            (s, sch, k, Some(rep), Some(step))
        }
    };
    let step = cfg.step;
    if let Some(saved) = saved_step {
        if saved != step {
            return Err(CsfError::Precondition(
                "checkpoint was written with different step controls".into(),
            ));
        }
    }

    let ramp = RampMonitor {
        direction: cfg.ramp_direction,
    };
    let clear = ClearanceMonitor { barriers, labels };
    let upper = AreaMonitor {
        region: RegionSpec::Upper,
    };
    let lower = AreaMonitor {
        region: RegionSpec::Lower,
    };
    let geom = GeometryMonitor {
        r: cfg.gamma.r,
        radius: cfg.ball_radius,
    };
    let monitors: [&dyn Monitor; 5] = [&ramp, &clear, &upper, &lower, &geom];
    let columns: Vec<String> = monitors.iter().flat_map(|m| m.columns()).collect();
    let mut so_far = match prefix {
        Some(p) => {
            if p.columns()[1..] != columns[..] {
                return Err(CsfError::Precondition(
                    "checkpoint columns do not match this configuration".into(),
                ));
            }
            p
        }
        None => MonitorReport::new(columns),
    };

    let mut last_good: Option<FlowState> = None;
    let result = {
        let mut hook = |s: &FlowState, sch: &MonitorSchedule, values: &[f64]| -> Result<()> {
            let row = so_far.len();
            so_far.push(s.t, values)?;
            if cfg.snapshot_every > 0 && (row as u64).is_multiple_of(cfg.snapshot_every) {
                write_snapshot(
                    &snapshot_path(&dir, row),
                    &Snapshot {
                        curve: s.curve.clone(),
                        time: s.t,
                    },
                )?;
            }
            let due = |k: u64| k as f64 * cfg.checkpoint_every - 1e-12 * (1.0 + s.t);
            if cfg.checkpoint_every > 0.0 && s.t >= due(next_ckpt) {
                let k = next_ckpt;
                while s.t >= due(next_ckpt) {
                    next_ckpt += 1;
                }
                write_checkpoint(&checkpoint_base(&dir, k), s, sch, &step, next_ckpt, &so_far)?;
            }
            last_good = Some(s.clone());
            Ok(())
        };
        evolve_with_hook(state, cfg.t_end, &step, &mut schedule, &monitors, &mut hook)
    };
    let final_state = match result {
        Ok((s, _)) => s,
        Err(e) => {
            write_atomic(&dir.join(MONITOR_FILE), so_far.to_csv().as_bytes())?;
            if let Some(s) = &last_good {
                write_checkpoint(
                    &dir.join(CHECKPOINT_DIR).join("last_good"),
                    s,
                    &schedule,
                    &step,
                    next_ckpt,
                    &so_far,
                )?;
            }
            return Err(e);
        }
    };
    write_atomic(&dir.join(MONITOR_FILE), so_far.to_csv().as_bytes())?;
    let verdict = evaluate(&so_far, cfg);
    write_atomic(&dir.join(VERDICT_FILE), verdict.to_text().as_bytes())?;
    Ok(RunOutcome {
        dir,
        report: so_far,
        verdict,
        final_state,
    })
}

fn region_samples(report: &MonitorReport, region: RegionSpec) -> Vec<AreaSample> {
    let l = region.label();
    let col = |c: &str| report.column(&format!("{c}_{l}")).unwrap_or_default();
    let (area, slab, ea, eb) = (col("area"), col("slab"), col("excess_a"), col("excess_b"));
    report
        .times()
        .into_iter()
        .enumerate()
        .filter(|(i, _)| area[*i].is_finite())
        .map(|(i, t)| AreaSample {
            t,
            area: area[i],
            trusted: slab[i] <= SLAB_LIMIT,
            corner_excess: [ea[i], eb[i]],
        })
        .collect()
}

fn line(property: impl Into<String>, pass: bool, measured: f64, threshold: f64) -> VerdictLine {
    VerdictLine {
        property: property.into(),
        pass,
        measured,
        threshold,
    }
}

/// The pass/fail table of a finished (or partial) run.
pub fn evaluate(report: &MonitorReport, cfg: &ScenarioConfig) -> Verdict {
    let mut lines = Vec::new();
    let t = report.times();
    let col = |c: &str| report.column(c).unwrap_or_default();

    let m = col("ramp_min");
    let drop = (1..m.len())
        .map(|k| (m[k] - m[k - 1]) / (t[k] - t[k - 1]))
        .fold(f64::INFINITY, f64::min);
    let drop = if drop.is_finite() { drop } else { 0.0 };
    lines.push(line("ramp_monotone", drop >= -RAMP_DROP_RATE, drop, -RAMP_DROP_RATE));
    let ratio = col("ratio_max").into_iter().fold(0.0, f64::max);
    lines.push(line("ratio_bound", ratio <= RATIO_LIMIT, ratio, RATIO_LIMIT));

    let clear = report
        .columns()
        .iter()
        .filter(|c| c.starts_with("clear_"))
        .flat_map(|c| col(c))
        .fold(f64::INFINITY, f64::min);
    lines.push(line("clearance", clear > 0.0, clear, 0.0));

    let r = cfg.gamma.r;
    let tol = cfg.tolerance;
    for region in [RegionSpec::Upper, RegionSpec::Lower] {
        let l = region.label();
        let samples = region_samples(report, region);
        let trusted: Vec<usize> = (0..samples.len()).filter(|i| samples[*i].trusted).collect();
        let (slopes, violations) = match (area_slopes(&samples), check_area_inequality(&samples, r, &tol)) {
            (Ok(s), Ok(v)) if !trusted.is_empty() => (s, v),
            _ => {
                lines.push(line(format!("area_{l}_decay"), false, f64::NAN, tol.slope));
                continue;
            }
        };
        let has = |k| violations.iter().any(|v| v.kind == k);
        let worst = |f: &dyn Fn(usize) -> f64, max: bool| {
            trusted
                .iter()
                .map(|i| f(*i))
                .fold(if max { f64::NEG_INFINITY } else { f64::INFINITY }, |a, b| {
                    if max {
                        a.max(b)
                    } else {
                        a.min(b)
                    }
                })
        };
        let eps = |i: usize| corner_bound(r, samples[i].t);
        let decay = worst(&|i| slopes[i] + std::f64::consts::PI - eps(i), true);
        let calib = worst(&|i| slopes[i] + std::f64::consts::PI, false);
        let corner = worst(
            &|i| samples[i].corner_excess[0] + samples[i].corner_excess[1] - eps(i),
            true,
        );
        lines.push(line(
            format!("area_{l}_decay"),
            !has(AreaViolationKind::SlowDecay),
            decay,
            tol.slope,
        ));
        lines.push(line(
            format!("area_{l}_calibration"),
            !has(AreaViolationKind::FastDecay),
            calib,
            -tol.slope,
        ));
        lines.push(line(
            format!("area_{l}_corner"),
            !has(AreaViolationKind::CornerExcess),
            corner,
            tol.angle,
        ));
    }

    let last = |c: &str| col(c).last().copied().unwrap_or(f64::NAN);
    let floor = cfg.nonplanarity_floor.unwrap_or(0.0);
    let np = last("nonplanarity");
    lines.push(line("nonplanarity", np > floor, np, floor));
    let crossings = last("crossings");
    lines.push(line("crossings", crossings == 2.0, crossings, 2.0));
    Verdict { lines }
}
