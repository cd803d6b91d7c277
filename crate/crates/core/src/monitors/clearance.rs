use crate::construction::barrier_clearances;
use crate::curve::SpaceCurve;
use crate::error::Result;
use crate::exact::BarrierCylinder;

/// Smallest signed clearance over all vertices and barriers at time `t`,
/// with the index of the barrier attaining it.
pub fn barrier_clearance(curve: &SpaceCurve, barriers: &[BarrierCylinder], t: f64) -> Result<(f64, usize)> {
    let c = barrier_clearances(curve, barriers, t)?;
    Ok(c.iter().enumerate().fold(
        (f64::INFINITY, 0),
        |best, (i, d)| if *d < best.0 { (*d, i) } else { best },
    ))
}
