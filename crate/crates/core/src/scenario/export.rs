use std::fs;
use std::path::{Path, PathBuf};

use super::run::{MONITOR_FILE, SNAPSHOT_DIR};
use crate::curve::{read_snapshot, Snapshot};
use crate::error::{CsfError, Result};
use crate::io::write_atomic;
use crate::monitors::MonitorReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportKind {
    Snapshots,
    Timeseries,
}

impl ExportKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "snapshots" => Ok(ExportKind::Snapshots),
            "timeseries" => Ok(ExportKind::Timeseries),
            other => Err(CsfError::Config {
                key: "what".into(),
                reason: format!("unknown export `{other}` (snapshots|timeseries)"),
            }),
        }
    }
}

pub const EXPORT_DIR: &str = "export";

/// Re-emits a run's artifacts under `<run>/export`, parsing and rewriting
/// each file so the output is canonical. Returns the written paths in
/// order.
pub fn export_plotdata(run_dir: &Path, what: ExportKind) -> Result<Vec<PathBuf>> {
    let out = run_dir.join(EXPORT_DIR);
    match what {
        ExportKind::Timeseries => {
            let src = run_dir.join(MONITOR_FILE);
            let text = fs::read_to_string(&src).map_err(|_| CsfError::MissingArtifact(src.clone()))?;
            let report = MonitorReport::from_csv(&text)?;
            let dst = out.join("timeseries.csv");
            write_atomic(&dst, report.to_csv().as_bytes())?;
            Ok(vec![dst])
        }
        ExportKind::Snapshots => {
            let src = run_dir.join(SNAPSHOT_DIR);
            let mut files: Vec<PathBuf> = fs::read_dir(&src)
                .map_err(|_| CsfError::MissingArtifact(src.clone()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "curve"))
                .collect();
            if files.is_empty() {
                return Err(CsfError::MissingArtifact(src));
            }
            files.sort();
            let mut written = Vec::with_capacity(files.len());
            for f in files {
                let snap: Snapshot = read_snapshot(&f)?;
                let dst = out
                    .join(SNAPSHOT_DIR)
                    .join(f.file_name().expect("snapshot has a file name"));
                write_atomic(&dst, snap.to_text().as_bytes())?;
                written.push(dst);
            }
            Ok(written)
        }
    }
}
