use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use csf_core::exact::{verify_soliton_residual, SolitonKind};
use csf_core::flow::{evolve, FlowState, MonitorSchedule, StepControl};
use csf_core::scenario::{export_plotdata, parse_raw_scenario, run_scenario, sweep, ExportKind};
use csf_core::{CsfError, SpaceCurve, Topology, Vec3};

#[derive(Parser)]
#[command(name = "csflab", version, about = "Curve shortening flow laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the initial curve, evolve it with all monitors, write artifacts.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Checkpoint (`ckpt_NNNN` with or without extension) to continue from.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Re-emit snapshots or the monitor time series of a run.
    Export {
        run_dir: PathBuf,
        #[arg(long, value_enum)]
        what: What,
    },
    /// Regress the flow against the exact solutions.
    VerifyExact {
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Run the scenario for several R and regress initial area against R.
    Sweep {
        config: PathBuf,
        /// Comma-separated values of R; runs go under `<output_dir>/R<r>`.
        #[arg(long = "R", value_delimiter = ',', required = true)]
        r: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Snapshots,
    Timeseries,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Kind {
    Circle,
    Reaper,
    Oval,
}

fn read(path: &PathBuf) -> Result<String, CsfError> {
    std::fs::read_to_string(path).map_err(|_| CsfError::MissingArtifact(path.clone()))
}

fn circle_check() -> Result<(f64, bool), CsfError> {
    let n = 400;
    let v = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            Vec3::new(a.cos(), a.sin(), 0.0)
        })
        .collect();
    let c = SpaceCurve::new(v, Topology::Closed)?;
    let ctrl = StepControl {
        dt_max: 1e-4,
        c_cfl: 0.5,
        resample_every: 0,
        h: std::f64::consts::TAU / n as f64,
    };
    let mut sch = MonitorSchedule::new(0.0, 1.0);
    let (s, _) = evolve(FlowState::new(c, 0.0), 0.45, &ctrl, &mut sch, &[])?;
    let r = s.curve.vertices().iter().map(|p| p.norm()).sum::<f64>() / n as f64;
    let exact = 0.1f64.sqrt();
    let rel = (r - exact).abs() / exact;
    Ok((rel, rel < 5e-3))
}

fn verify(kind: Option<Kind>) -> Result<bool, CsfError> {
    let mut ok = true;
    let want = |k| kind.is_none() || kind == Some(k);
    if want(Kind::Circle) {
        let (rel, pass) = circle_check()?;
        println!(
            "circle radius at t=0.45: relative error {rel:.3e} (limit 5e-3) {}",
            status(pass)
        );
        ok &= pass;
    }
    let residual = |name: &str, k: SolitonKind, t: f64| -> Result<bool, CsfError> {
        let r = verify_soliton_residual(k, t, 400)?;
        let pass = r < 1e-3;
        println!("{name} normal-velocity residual {r:.3e} (limit 1e-3) {}", status(pass));
        Ok(pass)
    };
    if want(Kind::Reaper) {
        ok &= residual("reaper", SolitonKind::Reaper { half_width: 1.4 }, 0.0)?;
    }
    if want(Kind::Oval) {
        ok &= residual("oval at t=-1", SolitonKind::Oval, -1.0)?;
    }
    Ok(ok)
}

fn status(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run { config, out, resume } => (|| {
            let mut raw = parse_raw_scenario(&read(&config)?)?;
            if out.is_some() {
                raw.output_dir = out;
            }
            let cfg = raw.resolve()?;
            let outcome = run_scenario(&cfg, resume.as_deref())?;
            print!("{}", outcome.verdict.to_text());
            println!("artifacts in {}", outcome.dir.display());
            Ok(outcome.verdict.all_pass())
        })(),
        Cmd::Export { run_dir, what } => (|| {
            let kind = match what {
                What::Snapshots => ExportKind::Snapshots,
                What::Timeseries => ExportKind::Timeseries,
            };
            for p in export_plotdata(&run_dir, kind)? {
                println!("{}", p.display());
            }
            Ok(true)
        })(),
        Cmd::VerifyExact { kind } => verify(kind),
        Cmd::Sweep { config, r } => (|| {
            let raw = parse_raw_scenario(&read(&config)?)?;
            let out = sweep(&raw, &r)?;
            for (r, run) in &out.runs {
                if let Err(e) = run {
                    eprintln!("R = {r}: {e}");
                }
            }
            for l in &out.lines {
                println!("{l}");
            }
            Ok(out.lines.iter().all(|l| l.pass))
        })(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
