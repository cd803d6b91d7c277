pub mod curve;
pub mod error;
pub mod geom;
mod io;

pub use curve::{EndCondition, SpaceCurve, Topology};
pub use error::{CsfError, Result};
pub use geom::{Pose, Vec3};
pub mod construction;
pub mod exact;
pub mod flow;
pub mod monitors;
pub mod scenario;
pub mod tridiag;
