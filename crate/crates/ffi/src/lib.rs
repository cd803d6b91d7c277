//! C ABI over `csf_core`.
//!
//! Every function returns a [`CsfStatus`]; on anything but `CSF_STATUS_OK`
//! the thread's last error message is set and can be read with
//! [`csf_last_error_message`]. Objects are opaque handles created by a
//! `*_new`/`*_parse`/`*_run` call and released with the matching `*_free`.
//!
//! Callers must pass handles obtained from this library and not yet freed,
//! NUL-terminated UTF-8 strings, and buffers at least as large as the length
//! argument that accompanies them. NULL is reported as
//! `CSF_STATUS_NULL_POINTER` wherever a pointer is required.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use csf_core::construction::{build_gamma, GammaConfig};
use csf_core::curve::{hausdorff_distance, nonplanarity};
use csf_core::exact::{verify_soliton_residual, SolitonKind};
use csf_core::flow::{evolve, FlowState, MonitorSchedule, StepControl};
use csf_core::scenario::{parse_scenario, run_scenario, RunOutcome, ScenarioConfig};
use csf_core::{CsfError, SpaceCurve, Topology, Vec3};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidCurve = 3,
    Construction = 4,
    Numerical = 5,
    Parse = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsfSoliton {
    Reaper = 0,
    Oval = 1,
}

pub struct CsfCurve(SpaceCurve);
pub struct CsfScenario(ScenarioConfig);
pub struct CsfRun(RunOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(CsfStatus, String);

impl From<CsfError> for Fail {
    fn from(e: CsfError) -> Self {
        let code = match e {
            CsfError::InvalidCurve(_) | CsfError::Degenerate(_) => CsfStatus::InvalidCurve,
            CsfError::Precondition(_)
            | CsfError::Parameter { .. }
            | CsfError::Config { .. }
            | CsfError::ExpiredBarrier { .. } => CsfStatus::InvalidArgument,
            CsfError::Construction(_) => CsfStatus::Construction,
            CsfError::StepRejected { .. } | CsfError::MonitorViolation { .. } => CsfStatus::Numerical,
            CsfError::Parse { .. } => CsfStatus::Parse,
            CsfError::MissingArtifact(_) | CsfError::Io { .. } => CsfStatus::Io,
        };
        Fail(code, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CsfStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CsfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CsfStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            CsfStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn string(p: *const c_char, what: &str) -> Result<String, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Fail(CsfStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or NULL after a
/// successful one. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn csf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Builds a curve from `n` packed `x y z` triples at `xyz`. Open curves get
/// free ends.
#[no_mangle]
pub unsafe extern "C" fn csf_curve_new(xyz: *const f64, n: usize, closed: bool, out: *mut *mut CsfCurve) -> CsfStatus {
    guard(|| {
        if xyz.is_null() {
            return Err(null("xyz"));
        }
        let raw = std::slice::from_raw_parts(xyz, 3 * n);
        let v = raw.chunks_exact(3).map(|p| Vec3::new(p[0], p[1], p[2])).collect();
        let topo = if closed {
            Topology::Closed
        } else {
            Topology::open_free()
        };
        let c = SpaceCurve::new(v, topo)?;
        put(out, boxed(CsfCurve(c)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn csf_curve_free(curve: *mut CsfCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

#[no_mangle]
pub unsafe extern "C" fn csf_curve_vertex_count(curve: *const CsfCurve, out: *mut usize) -> CsfStatus {
    guard(|| put(out, get(curve, "curve")?.0.len(), "out"))
}

/// Copies the vertices as packed triples into `buf`, which holds `cap`
/// doubles. Fails with `CSF_STATUS_BUFFER_TOO_SMALL` if `cap < 3 n`.
#[no_mangle]
pub unsafe extern "C" fn csf_curve_copy_vertices(curve: *const CsfCurve, buf: *mut f64, cap: usize) -> CsfStatus {
    guard(|| {
        let c = &get(curve, "curve")?.0;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let need = 3 * c.len();
        if cap < need {
            return Err(Fail(
                CsfStatus::BufferTooSmall,
                format!("need {need} doubles, got {cap}"),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (d, p) in dst.chunks_exact_mut(3).zip(c.vertices()) {
            d.copy_from_slice(p.as_slice());
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn csf_curve_length(curve: *const CsfCurve, out: *mut f64) -> CsfStatus {
    guard(|| put(out, get(curve, "curve")?.0.length(), "out"))
}

/// Largest vertex distance from the least-squares plane.
#[no_mangle]
pub unsafe extern "C" fn csf_curve_nonplanarity(curve: *const CsfCurve, out: *mut f64) -> CsfStatus {
    guard(|| put(out, nonplanarity(&get(curve, "curve")?.0), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn csf_hausdorff_distance(a: *const CsfCurve, b: *const CsfCurve, out: *mut f64) -> CsfStatus {
    guard(|| put(out, hausdorff_distance(&get(a, "a")?.0, &get(b, "b")?.0), "out"))
}

/// Evolves a copy of `curve` from t = 0 to `t_end` and returns it as a new
/// handle. `resample_every = 0` disables remeshing.
#[no_mangle]
pub unsafe extern "C" fn csf_curve_evolve(
    curve: *const CsfCurve,
    t_end: f64,
    h: f64,
    dt_max: f64,
    c_cfl: f64,
    resample_every: u64,
    out: *mut *mut CsfCurve,
) -> CsfStatus {
    guard(|| {
        let c = get(curve, "curve")?.0.clone();
        if !(t_end > 0.0) {
            return Err(Fail(
                CsfStatus::InvalidArgument,
                format!("t_end must be positive, got {t_end}"),
            ));
        }
        let ctrl = StepControl {
            dt_max,
            c_cfl,
            resample_every,
            h,
        };
        ctrl.validate()?;
        let mut sched = MonitorSchedule::new(0.0, t_end);
        let (s, _) = evolve(FlowState::new(c, 0.0), t_end, &ctrl, &mut sched, &[])?;
        put(out, boxed(CsfCurve(s.curve)), "out")
    })
}

/// The assembled initial curve for parameter `r` with default construction
/// settings.
#[no_mangle]
pub unsafe extern "C" fn csf_build_gamma(r: f64, out: *mut *mut CsfCurve) -> CsfStatus {
    guard(|| {
        let g = build_gamma(&GammaConfig::new(r))?;
        put(out, boxed(CsfCurve(g.curve)), "out")
    })
}

/// Relative normal-velocity residual of an exact solution sampled with `n`
/// vertices at time `t`. `half_width` is used only for the reaper.
#[no_mangle]
pub unsafe extern "C" fn csf_soliton_residual(
    kind: CsfSoliton,
    half_width: f64,
    t: f64,
    n: usize,
    out: *mut f64,
) -> CsfStatus {
    guard(|| {
        let k = match kind {
            CsfSoliton::Reaper => SolitonKind::Reaper { half_width },
            CsfSoliton::Oval => SolitonKind::Oval,
        };
        put(out, verify_soliton_residual(k, t, n)?, "out")
    })
}

/// Parses and validates a scenario config from NUL-terminated TOML text.
#[no_mangle]
pub unsafe extern "C" fn csf_scenario_parse(toml: *const c_char, out: *mut *mut CsfScenario) -> CsfStatus {
    guard(|| {
        let cfg = parse_scenario(&string(toml, "toml")?)?;
        put(out, boxed(CsfScenario(cfg)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn csf_scenario_set_output_dir(scenario: *mut CsfScenario, dir: *const c_char) -> CsfStatus {
    guard(|| {
        let s = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        s.0.output_dir = PathBuf::from(string(dir, "dir")?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn csf_scenario_free(scenario: *mut CsfScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs the scenario, writing its artifacts to the output directory.
/// `resume` is NULL for a fresh run or the path of a checkpoint.
#[no_mangle]
pub unsafe extern "C" fn csf_scenario_run(
    scenario: *const CsfScenario,
    resume: *const c_char,
    out: *mut *mut CsfRun,
) -> CsfStatus {
    guard(|| {
        let cfg = &get(scenario, "scenario")?.0;
        let resume = if resume.is_null() {
            None
        } else {
            Some(PathBuf::from(string(resume, "resume")?))
        };
        let run = run_scenario(cfg, resume.as_deref())?;
        put(out, boxed(CsfRun(run)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn csf_run_free(run: *mut CsfRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

#[no_mangle]
pub unsafe extern "C" fn csf_run_all_pass(run: *const CsfRun, out: *mut bool) -> CsfStatus {
    guard(|| put(out, get(run, "run")?.0.verdict.all_pass(), "out"))
}

/// Copies the verdict text, NUL-terminated, into `buf` of `cap` bytes.
/// `needed` (optional) receives the size including the terminator, so a
/// first call with `cap = 0` sizes the buffer.
#[no_mangle]
pub unsafe extern "C" fn csf_run_verdict_text(
    run: *const CsfRun,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> CsfStatus {
    guard(|| {
        let text = get(run, "run")?.0.verdict.to_text();
        let n = text.len() + 1;
        if !needed.is_null() {
            needed.write(n);
        }
        if cap < n {
            return Err(Fail(CsfStatus::BufferTooSmall, format!("need {n} bytes, got {cap}")));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        std::ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        buf.add(text.len()).write(0);
        Ok(())
    })
}

/// The curve at the end of the run, as a new handle.
#[no_mangle]
pub unsafe extern "C" fn csf_run_final_curve(run: *const CsfRun, out: *mut *mut CsfCurve) -> CsfStatus {
    guard(|| {
        let c = get(run, "run")?.0.final_state.curve.clone();
        put(out, boxed(CsfCurve(c)), "out")
    })
}
