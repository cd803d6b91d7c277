//! Semi-implicit curve shortening flow on polylines.
//!
//! Each step solves `(I - dt L) x^{n+1} = x^n`, where `L` is the three-point
//! second arclength derivative with edge lengths frozen at `x^n`. The solve
//! is tridiagonal for open curves and cyclic tridiagonal for closed ones.

use serde::{Deserialize, Serialize};

use crate::curve::{EndCondition, SpaceCurve, Topology};
use crate::error::{CsfError, Result};
use crate::geom::Vec3;
use crate::monitors::MonitorReport;
use crate::tridiag;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepControl {
    pub dt_max: f64,
    pub c_cfl: f64,
    /// Remesh every this many steps; 0 disables remeshing.
    pub resample_every: u64,
    /// Target edge length.
    pub h: f64,
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(CsfError::Parameter { name, reason });
        if !(self.dt_max > 0.0) {
            return bad("dt_max", format!("must be positive, got {}", self.dt_max));
        }
        if !(self.c_cfl > 0.0 && self.c_cfl <= 1.0) {
            return bad("c_cfl", format!("must lie in (0, 1], got {}", self.c_cfl));
        }
        if !(self.h > 0.0) {
            return bad("h", format!("must be positive, got {}", self.h));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepStats {
    pub last_dt: f64,
    pub max_kappa: f64,
    pub step_count: u64,
    pub remesh_count: u64,
    /// Sticky: set once a remesh-time scan finds a self-intersection.
    pub self_intersection: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub curve: SpaceCurve,
    pub t: f64,
    pub stats: StepStats,
}

impl FlowState {
    pub fn new(curve: SpaceCurve, t: f64) -> Self {
        Self {
            curve,
            t,
            stats: StepStats::default(),
        }
    }
}

/// Vertex curvature from the turning angle: `2 sin(theta/2)` over the mean of
/// the two adjacent edges, i.e. the inverse circumradius. Ends of open curves
/// copy their neighbour.
pub fn vertex_curvatures(curve: &SpaceCurve) -> Vec<f64> {
    let v = curve.vertices();
    let n = v.len();
    let closed = curve.is_closed();
    let mut k = vec![0.0; n];
    let range = if closed { 0..n } else { 1..n - 1 };
    for i in range {
        let a = v[i] - v[(i + n - 1) % n];
        let b = v[(i + 1) % n] - v[i];
        let (la, lb) = (a.norm(), b.norm());
        // |a/la - b/lb| = 2 sin(theta/2)
        let turn = (a / la - b / lb).norm();
        k[i] = 2.0 * turn / (la + lb);
    }
    if !closed {
        k[0] = k[1];
        k[n - 1] = k[n - 2];
    }
    k
}

/// `min(dt_max, c h^2 / 2, c / kappa_max^2)` with `h` the control's target
/// edge length.
pub fn stability_dt(state: &FlowState, ctrl: &StepControl) -> f64 {
    let kmax = vertex_curvatures(&state.curve).into_iter().fold(0.0, f64::max);
    dt_for(kmax, ctrl)
}

fn dt_for(kmax: f64, ctrl: &StepControl) -> f64 {
    let mesh = ctrl.c_cfl * ctrl.h * ctrl.h / 2.0;
    let curv = if kmax > 0.0 {
        ctrl.c_cfl / (kmax * kmax)
    } else {
        f64::INFINITY
    };
    ctrl.dt_max.min(mesh).min(curv)
}

/// One accepted step of size `dt`, followed by a remesh when the step count
/// reaches a multiple of `ctrl.resample_every`.
pub fn flow_step(state: &FlowState, dt: f64, ctrl: &StepControl) -> Result<FlowState> {
    ctrl.validate()?;
    let limit = stability_dt(state, ctrl);
    if !(dt >= 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(CsfError::StepRejected {
            time: state.t,
            reason: format!("dt = {dt:e} exceeds the stability limit {limit:e}"),
        });
    }
    step_unchecked(state, dt, ctrl)
}

fn step_unchecked(state: &FlowState, dt: f64, ctrl: &StepControl) -> Result<FlowState> {
    let reject = |reason: String| CsfError::StepRejected { time: state.t, reason };
    let curve = &state.curve;
    let x = curve.vertices();
    let n = x.len();
    let h: Vec<f64> = curve.edge_lengths();

    let new = match curve.topology() {
        Topology::Closed => {
            let mut lo = vec![0.0; n];
            let mut di = vec![0.0; n];
            let mut up = vec![0.0; n];
            for i in 0..n {
                let (hm, hp) = (h[(i + n - 1) % n], h[i]);
                let a = 2.0 / ((hm + hp) * hm);
                let c = 2.0 / ((hm + hp) * hp);
                lo[i] = -dt * a;
                up[i] = -dt * c;
                di[i] = 1.0 + dt * (a + c);
            }
            tridiag::solve_cyclic(&lo, &di, &up, x).map_err(|e| reject(e.to_string()))?
        }
        Topology::Open { start, end } => {
            let m = n - 2;
            let x0 = match start {
                EndCondition::Moving { velocity } => x[0] + velocity * dt,
                _ => x[0],
            };
            let xn = match end {
                EndCondition::Moving { velocity } => x[n - 1] + velocity * dt,
                _ => x[n - 1],
            };
            let mut lo = vec![0.0; m];
            let mut di = vec![0.0; m];
            let mut up = vec![0.0; m];
            let mut rhs = x[1..n - 1].to_vec();
            for k in 0..m {
                let i = k + 1;
                let (hm, hp) = (h[i - 1], h[i]);
                let a = 2.0 / ((hm + hp) * hm);
                let c = 2.0 / ((hm + hp) * hp);
                lo[k] = -dt * a;
                up[k] = -dt * c;
                di[k] = 1.0 + dt * (a + c);
            }
            rhs[0] -= x0 * lo[0];
            rhs[m - 1] -= xn * up[m - 1];
            let inner = tridiag::solve(&lo, &di, &up, &rhs).map_err(|e| reject(e.to_string()))?;
            let mut out = Vec::with_capacity(n);
            out.push(x0);
            out.extend(inner);
            out.push(xn);
            apply_end(&mut out, start, true, x);
            apply_end(&mut out, end, false, x);
            out
        }
    };

    if let Some(p) = new.iter().find(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(reject(format!("non-finite vertex {p:?}")));
    }
    let mut curve = SpaceCurve::from_parts(new, curve.topology()).map_err(|e| reject(e.to_string()))?;
    let mut stats = state.stats;
    stats.step_count += 1;
    stats.last_dt = dt;
    if ctrl.resample_every > 0 && stats.step_count.is_multiple_of(ctrl.resample_every) {
        curve = remesh(&curve, ctrl.h).map_err(|e| reject(e.to_string()))?;
        stats.remesh_count += 1;
        if curve.find_self_intersection().is_some() {
            stats.self_intersection = true;
        }
    }
    stats.max_kappa = vertex_curvatures(&curve).into_iter().fold(0.0, f64::max);
    Ok(FlowState {
        curve,
        t: state.t + dt,
        stats,
    })
}

/// Enforces one end condition on freshly solved positions. `old` is the
/// pre-step vertex list.
fn apply_end(x: &mut [Vec3], cond: EndCondition, start: bool, old: &[Vec3]) {
    let n = x.len();
    let (e, p) = if start { (0, 1) } else { (n - 1, n - 2) };
    match cond {
        EndCondition::Clamped { direction } => {
            let d = x[p] - x[e];
            x[p] = x[e] + direction * d.dot(&direction);
        }
        EndCondition::Free => {
            x[e] = old[e] + (x[p] - old[p]);
        }
        EndCondition::Moving { .. } => {}
    }
}

/// Cubic Hermite remesh to edge length close to `h`, keeping open ends and
/// clamp lines. Tangents come from the quadratic through each vertex and its
/// neighbours, so smooth curves lose only O(h^4) per remesh instead of the
/// chord sagitta that linear resampling would cost.
pub fn remesh(curve: &SpaceCurve, h: f64) -> Result<SpaceCurve> {
    let x = curve.vertices();
    let n = x.len();
    let closed = curve.is_closed();
    let cum = cumulative(curve);
    let total = *cum.last().unwrap();
    let m = curve.edge_count();
    let edge = |j: usize| cum[j + 1] - cum[j];

    let mut tangent = vec![Vec3::zeros(); n];
    for i in 0..n {
        let interior = closed || (i > 0 && i + 1 < n);
        tangent[i] = if interior {
            let (im, ip) = ((i + n - 1) % n, (i + 1) % n);
            let hm = edge((i + m - 1) % m);
            let hp = edge(i % m);
            (x[ip] - x[i]) * (hm / (hp * (hm + hp))) + (x[i] - x[im]) * (hp / (hm * (hm + hp)))
        } else if i == 0 {
            let (h1, h2) = (edge(0), edge(1));
            x[0] * (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) + x[1] * ((h1 + h2) / (h1 * h2))
                - x[2] * (h1 / (h2 * (h1 + h2)))
        } else {
            let (h1, h2) = (edge(m - 1), edge(m - 2));
            -(x[n - 1] * (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) + x[n - 2] * ((h1 + h2) / (h1 * h2))
                - x[n - 3] * (h1 / (h2 * (h1 + h2))))
        };
    }
    if let Topology::Open { start, end } = curve.topology() {
        if let EndCondition::Clamped { direction } = start {
            tangent[0] = direction;
        }
        if let EndCondition::Clamped { direction } = end {
            tangent[n - 1] = direction;
        }
    }

    let count = if closed {
        ((total / h).round() as usize).max(8)
    } else {
        ((total / h).round() as usize + 1).max(4)
    };
    let intervals = if closed { count } else { count - 1 };
    let mut out = Vec::with_capacity(count);
    let mut j = 0;
    for k in 0..count {
        let s = total * k as f64 / intervals as f64;
        while j + 1 < m && cum[j + 1] <= s {
            j += 1;
        }
        let d = edge(j);
        let u = ((s - cum[j]) / d).clamp(0.0, 1.0);
        let (p0, p1) = (x[j], x[(j + 1) % n]);
        let (m0, m1) = (tangent[j] * d, tangent[(j + 1) % n] * d);
        let u2 = u * u;
        let u3 = u2 * u;
        out.push(
            p0 * (2.0 * u3 - 3.0 * u2 + 1.0) + m0 * (u3 - 2.0 * u2 + u) + p1 * (-2.0 * u3 + 3.0 * u2) + m1 * (u3 - u2),
        );
    }
    if let Topology::Open { start, end } = curve.topology() {
        out[0] = x[0];
        out[count - 1] = x[n - 1];
        apply_end(&mut out, clamp_only(start), true, &[]);
        apply_end(&mut out, clamp_only(end), false, &[]);
    }
    SpaceCurve::from_parts(out, curve.topology())
}

// Only clamps need re-enforcing after a remesh.
fn clamp_only(c: EndCondition) -> EndCondition {
    match c {
        EndCondition::Clamped { .. } => c,
        _ => EndCondition::Moving {
            velocity: Vec3::zeros(),
        },
    }
}

fn cumulative(curve: &SpaceCurve) -> Vec<f64> {
    let mut acc = vec![0.0];
    let mut s = 0.0;
    for (a, b) in curve.edges() {
        s += (b - a).norm();
        acc.push(s);
    }
    acc
}

/// One row of monitor output, plus an optional hard violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub values: Vec<f64>,
    pub violation: Option<String>,
}

/// A diagnostic evaluated on read-only flow states at cadence points.
pub trait Monitor: Sync {
    fn name(&self) -> &str;
    fn columns(&self) -> Vec<String>;
    fn observe(&self, state: &FlowState) -> Result<Observation>;
}

/// Cadence points are `origin + k * interval` for `k >= next_index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorSchedule {
    pub origin: f64,
    pub interval: f64,
    pub next_index: u64,
    pub abort_on_violation: bool,
}

impl MonitorSchedule {
    pub fn new(origin: f64, interval: f64) -> Self {
        Self {
            origin,
            interval,
            next_index: 0,
            abort_on_violation: true,
        }
    }

    pub fn time_of(&self, k: u64) -> f64 {
        self.origin + k as f64 * self.interval
    }

    fn next_time(&self) -> f64 {
        self.time_of(self.next_index)
    }
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

fn observe_all(monitors: &[&dyn Monitor], state: &FlowState) -> Result<(Vec<f64>, Vec<String>)> {
    let results: Vec<Result<Observation>> = if monitors.len() > 1 {
        std::thread::scope(|s| {
            let handles: Vec<_> = monitors.iter().map(|m| s.spawn(move || m.observe(state))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("monitor thread panicked"))
                .collect()
        })
    } else {
        monitors.iter().map(|m| m.observe(state)).collect()
    };
    let mut values = Vec::new();
    let mut violations = Vec::new();
    for (m, r) in monitors.iter().zip(results) {
        let obs = r?;
        values.extend(obs.values);
        if let Some(v) = obs.violation {
            violations.push(format!("{}: {v}", m.name()));
        }
    }
    Ok((values, violations))
}

/// Hook called after each recorded cadence row with the state, the schedule
/// (already advanced past this row) and the row values.
pub type CadenceHook<'a> = dyn FnMut(&FlowState, &MonitorSchedule, &[f64]) -> Result<()> + 'a;

/// Steps from `state.t` to `t_end`, landing exactly on every cadence point
/// and recording one report row there.
pub fn evolve(
    state: FlowState,
    t_end: f64,
    ctrl: &StepControl,
    schedule: &mut MonitorSchedule,
    monitors: &[&dyn Monitor],
) -> Result<(FlowState, MonitorReport)> {
    evolve_with_hook(state, t_end, ctrl, schedule, monitors, &mut |_, _, _| Ok(()))
}

pub fn evolve_with_hook(
    mut state: FlowState,
    t_end: f64,
    ctrl: &StepControl,
    schedule: &mut MonitorSchedule,
    monitors: &[&dyn Monitor],
    hook: &mut CadenceHook<'_>,
) -> Result<(FlowState, MonitorReport)> {
    ctrl.validate()?;
    if !(schedule.interval > 0.0) {
        return Err(CsfError::Parameter {
            name: "interval",
            reason: format!("monitor cadence must be positive, got {}", schedule.interval),
        });
    }
    if t_end < state.t {
        return Err(CsfError::Precondition(format!(
            "t_end = {t_end} precedes the state time {}",
            state.t
        )));
    }
    let columns = monitors.iter().flat_map(|m| m.columns()).collect();
    let mut report = MonitorReport::new(columns);
    if t_end == state.t {
        return Ok((state, report));
    }
    // cadence points already behind us are skipped
    while schedule.next_time() < state.t && !same_time(schedule.next_time(), state.t) {
        schedule.next_index += 1;
    }

    loop {
        if same_time(schedule.next_time(), state.t) {
            schedule.next_index += 1;
            let (values, violations) = observe_all(monitors, &state)?;
            report.push(state.t, &values)?;
            hook(&state, schedule, &values)?;
            if schedule.abort_on_violation && !violations.is_empty() {
                return Err(CsfError::MonitorViolation {
                    monitor: violations.join("; "),
                    time: state.t,
                    detail: format!("row {:?}", values),
                });
            }
        }
        if state.t >= t_end || same_time(state.t, t_end) {
            break;
        }
        let target = schedule.next_time().min(t_end);
        let mut dt = dt_for(state.stats_kmax_or_compute(), ctrl);
        let land = state.t + dt >= target || same_time(state.t + dt, target);
        if land {
            dt = target - state.t;
        }
        let mut next = step_unchecked(&state, dt, ctrl)?;
        if land {
            next.t = target;
        }
        state = next;
    }
    Ok((state, report))
}

impl FlowState {
    // Steps record the max curvature of the curve they produce; a fresh state
    // has none yet.
    fn stats_kmax_or_compute(&self) -> f64 {
        if self.stats.step_count > 0 {
            self.stats.max_kappa
        } else {
            vertex_curvatures(&self.curve).into_iter().fold(0.0, f64::max)
        }
    }
}
