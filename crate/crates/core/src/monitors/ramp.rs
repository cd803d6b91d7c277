use crate::construction::RampDiagnostics;
use crate::curve::{compute_frenet, SpaceCurve};
use crate::error::{CsfError, Result};
use crate::geom::Vec3;

/// Below this `<T, V>` a vertex counts as not ramped and its ratio is
/// reported as infinite. Far out on the flared ends of `Gamma_R` the tangent
/// is within about `1e-11` of perpendicular to `e`, so the floor sits just
/// above rounding level.
pub const RAMP_DOT_FLOOR: f64 = 1e-14;

/// Min over vertices of `<T, V>` and max of `kappa / <T, V>`.
pub fn ramp_diagnostics(curve: &SpaceCurve, v: &Vec3) -> Result<RampDiagnostics> {
    if !((v.norm() - 1.0).abs() < 1e-12) {
        return Err(CsfError::Precondition(format!(
            "ramp direction must be a unit vector, |V| = {}",
            v.norm()
        )));
    }
    let f = compute_frenet(curve)?;
    let mut min_dot = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for (t, k) in f.tangent.iter().zip(&f.kappa) {
        let d = t.dot(v);
        min_dot = min_dot.min(d);
        let ratio = if d < RAMP_DOT_FLOOR { f64::INFINITY } else { k / d };
        max_ratio = max_ratio.max(ratio);
    }
    Ok(RampDiagnostics {
        direction: *v,
        min_dot,
        max_ratio,
    })
}
