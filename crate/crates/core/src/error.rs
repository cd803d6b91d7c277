use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in the laboratory, from malformed curves to
/// failed scenario runs.
#[derive(Debug, Error)]
pub enum CsfError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parameter `{name}` out of range: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("barrier {index} expired at t = {time} (t + t0 = {clock} >= 0)")]
    ExpiredBarrier { index: usize, time: f64, clock: f64 },

    #[error("construction rejected: {0}")]
    Construction(String),

    #[error("step rejected at t = {time}: {reason}")]
    StepRejected { time: f64, reason: String },

    #[error("monitor `{monitor}` hard violation at t = {time}: {detail}")]
    MonitorViolation { monitor: String, time: f64, detail: String },

    #[error("config error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("parse error in {what}: {reason}")]
    Parse { what: String, reason: String },

    #[error("missing artifact: {0}")]
    MissingArtifact(PathBuf),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CsfError>;

impl CsfError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CsfError::Io {
            path: path.into(),
            source,
        }
    }
}
