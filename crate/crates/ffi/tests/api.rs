use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use csf_ffi::*;

fn last_error() -> String {
    let p = csf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn circle(n: usize) -> Vec<f64> {
    (0..n)
        .flat_map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            [a.cos(), a.sin(), 0.0]
        })
        .collect()
}

#[test]
fn curve_round_trip_and_metrics() {
    let xyz = circle(100);
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(csf_curve_new(xyz.as_ptr(), 100, true, &mut c), CsfStatus::Ok);
        assert!(csf_last_error_message().is_null());
        let mut n = 0;
        assert_eq!(csf_curve_vertex_count(c, &mut n), CsfStatus::Ok);
        assert_eq!(n, 100);
        let mut back = vec![0.0; 300];
        assert_eq!(csf_curve_copy_vertices(c, back.as_mut_ptr(), back.len()), CsfStatus::Ok);
        assert_eq!(back, xyz);
        assert_eq!(
            csf_curve_copy_vertices(c, back.as_mut_ptr(), 299),
            CsfStatus::BufferTooSmall
        );
        assert!(last_error().contains("300"));

        let (mut len, mut np, mut hd) = (0.0, 1.0, 1.0);
        assert_eq!(csf_curve_length(c, &mut len), CsfStatus::Ok);
        assert!((len - 100.0 * 2.0 * (std::f64::consts::PI / 100.0).sin()).abs() < 1e-12);
        assert_eq!(csf_curve_nonplanarity(c, &mut np), CsfStatus::Ok);
        assert!(np < 1e-12);
        assert_eq!(csf_hausdorff_distance(c, c, &mut hd), CsfStatus::Ok);
        assert_eq!(hd, 0.0);
        csf_curve_free(c);
    }
}

#[test]
fn errors_are_reported() {
    let mut c = ptr::null_mut();
    unsafe {
        let xyz = [0.0; 6];
        assert_eq!(csf_curve_new(xyz.as_ptr(), 2, false, &mut c), CsfStatus::InvalidCurve);
        assert!(c.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(csf_curve_new(ptr::null(), 3, false, &mut c), CsfStatus::NullPointer);
        assert_eq!(last_error(), "xyz is null");
        assert_eq!(csf_build_gamma(0.5, &mut c), CsfStatus::InvalidArgument);
        assert!(last_error().contains('R'));

        let mut s = ptr::null_mut();
        let bad = CString::new("R = 5\nbogus = 1").unwrap();
        assert_eq!(csf_scenario_parse(bad.as_ptr(), &mut s), CsfStatus::Parse);
        let beta = CString::new("R = 4\nbeta = 1.0").unwrap();
        assert_eq!(csf_scenario_parse(beta.as_ptr(), &mut s), CsfStatus::Ok);
        let mut run = ptr::null_mut();
        assert_eq!(csf_scenario_run(s, ptr::null(), &mut run), CsfStatus::Construction);
        csf_scenario_free(s);
        csf_curve_free(ptr::null_mut());
        csf_run_free(ptr::null_mut());
    }
}

#[test]
fn evolve_and_residual() {
    let n = 400;
    let xyz = circle(n);
    let (mut c, mut later) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(csf_curve_new(xyz.as_ptr(), n, true, &mut c), CsfStatus::Ok);
        let h = std::f64::consts::TAU / n as f64;
        assert_eq!(csf_curve_evolve(c, 0.45, h, 1.0, 0.5, 0, &mut later), CsfStatus::Ok);
        let mut v = vec![0.0; 3 * n];
        csf_curve_copy_vertices(later, v.as_mut_ptr(), v.len());
        let r = v.chunks(3).map(|p| p[0].hypot(p[1])).sum::<f64>() / n as f64;
        assert!((r - 0.1f64.sqrt()).abs() / 0.1f64.sqrt() < 5e-3);
        assert_eq!(
            csf_curve_evolve(c, -1.0, h, 1.0, 0.5, 0, &mut later),
            CsfStatus::InvalidArgument
        );
        csf_curve_free(later);
        csf_curve_free(c);

        let mut res = 1.0;
        assert_eq!(
            csf_soliton_residual(CsfSoliton::Reaper, 1.4, 0.0, 400, &mut res),
            CsfStatus::Ok
        );
        assert!(res < 1e-3);
        assert_eq!(
            csf_soliton_residual(CsfSoliton::Oval, 0.0, 1.0, 400, &mut res),
            CsfStatus::InvalidArgument
        );
    }
}

#[test]
fn scenario_run_through_the_abi() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = CString::new("R = 4\nt_end = 0.3\nsnapshot_every = 0").unwrap();
    let dir = CString::new(tmp.path().to_str().unwrap()).unwrap();
    let (mut s, mut run, mut c) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(csf_scenario_parse(cfg.as_ptr(), &mut s), CsfStatus::Ok);
        assert_eq!(csf_scenario_set_output_dir(s, dir.as_ptr()), CsfStatus::Ok);
        assert_eq!(csf_scenario_run(s, ptr::null(), &mut run), CsfStatus::Ok);
        let mut pass = false;
        assert_eq!(csf_run_all_pass(run, &mut pass), CsfStatus::Ok);
        assert!(pass);

        let mut need = 0;
        assert_eq!(
            csf_run_verdict_text(run, ptr::null_mut(), 0, &mut need),
            CsfStatus::BufferTooSmall
        );
        let mut buf = vec![0 as std::ffi::c_char; need];
        assert_eq!(
            csf_run_verdict_text(run, buf.as_mut_ptr(), need, ptr::null_mut()),
            CsfStatus::Ok
        );
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert_eq!(text, std::fs::read_to_string(tmp.path().join("verdict.txt")).unwrap());

        assert_eq!(csf_run_final_curve(run, &mut c), CsfStatus::Ok);
        let mut g = ptr::null_mut();
        assert_eq!(csf_build_gamma(4.0, &mut g), CsfStatus::Ok);
        let mut hd = 0.0;
        csf_hausdorff_distance(c, g, &mut hd);
        assert!(hd > 0.0 && hd < 1.0, "{hd}");
        csf_curve_free(g);
        csf_curve_free(c);
        csf_run_free(run);
        csf_scenario_free(s);
    }
}

/// The test binary sits next to the library's staticlib in `deps/`.
fn deps_dir() -> PathBuf {
    std::env::current_exe().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = deps_dir().join("libcsf_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = Command::new(cc)
        .args(["-std=c11", "-D_DEFAULT_SOURCE", "-Wall", "-Werror", "-I"])
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok radius"));
}
