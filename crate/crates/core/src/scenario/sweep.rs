use std::f64::consts::PI;

use super::config::RawScenario;
use super::run::{run_scenario, RunOutcome, VerdictLine};
use crate::error::Result;
use crate::io::write_atomic;
use crate::monitors::{region_area, RegionSpec};

/// Relative tolerance on the slope of initial area against `R`.
pub const AREA_SLOPE_TOL: f64 = 0.02;

#[derive(Debug)]
pub struct SweepOutcome {
    pub runs: Vec<(f64, Result<RunOutcome>)>,
    /// Initial area of each region per `R`.
    pub initial_areas: Vec<(f64, [f64; 2])>,
    /// Least-squares slope of initial area against `R`, per region.
    pub slopes: [f64; 2],
    pub lines: Vec<VerdictLine>,
}

/// Least-squares slope of `y` against `x`.
pub fn regression_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Runs the scenario once per `R` (concurrently, each under
/// `<output_dir>/R<R>`), then regresses the initial lobe areas against `R`.
/// Keys the base config leaves unset are re-derived for each `R`.
pub fn sweep(base: &RawScenario, rs: &[f64]) -> Result<SweepOutcome> {
    let root = sweep_root(base);
    let configs = rs
        .iter()
        .map(|&r| {
            let mut raw = base.clone();
            raw.r = Some(r);
            raw.output_dir = Some(root.join(format!("R{r}")));
            raw.resolve()
        })
        .collect::<Result<Vec<_>>>()?;

    let runs: Vec<(f64, Result<RunOutcome>)> = std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| s.spawn(move || (c.gamma.r, run_scenario(c, None))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });

    let mut initial_areas = Vec::new();
    for c in &configs {
        let g = crate::construction::build_gamma(&c.gamma)?;
        let up = region_area(&g.curve, RegionSpec::Upper)?.area;
        let lo = region_area(&g.curve, RegionSpec::Lower)?.area;
        initial_areas.push((c.gamma.r, [up, lo]));
    }
    let x: Vec<f64> = initial_areas.iter().map(|a| a.0).collect();
    let slope = |k: usize| regression_slope(&x, &initial_areas.iter().map(|a| a.1[k]).collect::<Vec<_>>());
    let slopes = [slope(0), slope(1)];

    let mut lines = Vec::new();
    for (r, out) in &runs {
        let pass = out.as_ref().is_ok_and(|o| o.verdict.all_pass());
        lines.push(VerdictLine {
            property: format!("run_R{r}"),
            pass,
            measured: if pass { 1.0 } else { 0.0 },
            threshold: 1.0,
        });
    }
    for (k, l) in ["upper", "lower"].iter().enumerate() {
        lines.push(VerdictLine {
            property: format!("area_slope_{l}"),
            pass: (slopes[k] - PI).abs() <= AREA_SLOPE_TOL * PI,
            measured: slopes[k],
            threshold: PI,
        });
    }
    let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
    write_atomic(&root.join("sweep.txt"), text.as_bytes())?;
    Ok(SweepOutcome {
        runs,
        initial_areas,
        slopes,
        lines,
    })
}

fn sweep_root(base: &RawScenario) -> std::path::PathBuf {
    base.output_dir.clone().unwrap_or_else(|| "runs/sweep".into())
}
