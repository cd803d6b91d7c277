use crate::construction::asymptote_lines;
use crate::curve::{compute_frenet, nonplanarity_of_points, SpaceCurve};
use crate::error::{CsfError, Result};
use crate::geom::{Vec3, E2};
use crate::monitors::area::{bounded_run, RegionSpec};

/// `true` iff `max |<T, v>| < 3 sqrt(eps)` over the vertices at least
/// `sqrt(eps)` of arclength away from both ends of an open curve. Errors
/// unless `v` is a unit vector orthogonal to `e2`, the discrete curvature is
/// at most 1, and the curve fits in the two slabs of width `eps` normal to
/// `e1` and `e3` (centred on its bounding box).
pub fn small_angle_check(curve: &SpaceCurve, eps: f64, v: &Vec3) -> Result<bool> {
    Ok(small_angle_max(curve, eps, v)? < 3.0 * eps.sqrt())
}

/// The measured `max |<T, v>|` behind [`small_angle_check`].
pub fn small_angle_max(curve: &SpaceCurve, eps: f64, v: &Vec3) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(CsfError::Precondition(format!(
            "slab width must be positive, got {eps}"
        )));
    }
    if (v.norm() - 1.0).abs() > 1e-12 || v.dot(&E2).abs() > 1e-12 {
        return Err(CsfError::Precondition(
            "direction must be a unit vector orthogonal to e2".into(),
        ));
    }
    let x = curve.vertices();
    let extent = |k: usize| {
        let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p[k]), hi.max(p[k]))
        });
        hi - lo
    };
    for (k, name) in [(0, "e1"), (2, "e3")] {
        let w = extent(k);
        if w > eps {
            return Err(CsfError::Precondition(format!(
                "curve spans {w} along {name}, wider than the slab {eps}"
            )));
        }
    }
    let f = compute_frenet(curve)?;
    let kmax = f.max_kappa();
    if kmax > 1.0 {
        return Err(CsfError::Precondition(format!(
            "curvature {kmax} exceeds 1; rescale the curve first"
        )));
    }
    let cum = curve.cumulative_length();
    let total = *cum.last().unwrap();
    let margin = if curve.is_closed() { 0.0 } else { eps.sqrt() };
    Ok(f.tangent
        .iter()
        .zip(&cum)
        .filter(|(_, s)| **s >= margin && total - **s >= margin)
        .map(|(t, _)| t.dot(v).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    /// Vertices of the curve inside the ball.
    pub inside: usize,
    pub nonplanarity: f64,
    /// Largest distance from an inside vertex to the nearest asymptote line.
    pub line_deviation: f64,
    /// Highest vertex of the bounded `y > 0` run and lowest of the bounded
    /// `y < 0` run, when those runs exist.
    pub tips: [Option<Vec3>; 2],
    /// Sign changes of `|p| - radius` along the curve.
    pub crossings: usize,
}

/// Shape of the part of the curve inside `B(0, radius)`, measured against
/// the asymptote lines of `Gamma_R`.
pub fn geometry_report(curve: &SpaceCurve, r: f64, radius: f64) -> Result<GeometryReport> {
    if !(radius > 0.0) {
        return Err(CsfError::Precondition(format!(
            "ball radius must be positive, got {radius}"
        )));
    }
    let pts: Vec<Vec3> = curve.vertices().iter().copied().filter(|p| p.norm() < radius).collect();
    if pts.is_empty() {
        return Err(CsfError::Precondition(format!(
            "no part of the curve lies inside B(0, {radius})"
        )));
    }
    let lines = asymptote_lines(r);
    let line_deviation = pts
        .iter()
        .map(|p| {
            lines
                .iter()
                .map(|l| ((p.x - l.x).powi(2) + (p.z - l.z).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let v = curve.vertices();
    let tip = |spec, upper: bool| {
        bounded_run(curve, spec).ok().map(|(a, b)| {
            let key = |p: &&Vec3| if upper { p.y } else { -p.y };
            *v[a..=b].iter().max_by(|p, q| key(p).total_cmp(&key(q))).unwrap()
        })
    };
    let (top, bottom) = (tip(RegionSpec::Upper, true), tip(RegionSpec::Lower, false));
    let side: Vec<bool> = curve.vertices().iter().map(|p| p.norm() < radius).collect();
    let mut crossings = side.windows(2).filter(|w| w[0] != w[1]).count();
    if curve.is_closed() && side.first() != side.last() {
        crossings += 1;
    }
    Ok(GeometryReport {
        inside: pts.len(),
        nonplanarity: nonplanarity_of_points(&pts),
        line_deviation,
        tips: [top, bottom],
        crossings,
    })
}
