use super::{SpaceCurve, Topology};
use crate::error::{CsfError, Result};
use crate::geom::Vec3;

/// Below this scalar curvature the Frenet frame is undefined and torsion is
/// reported as zero.
pub const STRAIGHT_CURVATURE: f64 = 1e-6;

/// Largest neighbouring edge-length ratio the stencils accept.
const MAX_EDGE_RATIO: f64 = 1.1;

/// Per-vertex discrete differential geometry of a [`SpaceCurve`].
#[derive(Debug, Clone)]
pub struct FrenetData {
    pub tangent: Vec<Vec3>,
    pub curvature_vector: Vec<Vec3>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub total_length: f64,
}

impl FrenetData {
    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    pub fn max_kappa(&self) -> f64 {
        self.kappa.iter().copied().fold(0.0, f64::max)
    }
}

/// Finite-difference Frenet quantities.
///
/// Derivatives are taken with respect to the vertex index and fed through the
/// parametrization-invariant formulas `kappa = |x' x x''| / |x'|^3` and
/// `tau = (x' x x'') . x''' / |x' x x''|^2`, so on a smoothly spaced polyline
/// they are second-order accurate in the edge length. Open ends use one-sided
/// stencils.
pub fn compute_frenet(curve: &SpaceCurve) -> Result<FrenetData> {
    let n = curve.len();
    if n < 4 {
        return Err(CsfError::Precondition(format!(
            "frenet data needs at least 4 vertices, got {n}"
        )));
    }
    let ratio = curve.adjacent_edge_ratio();
    if ratio > MAX_EDGE_RATIO {
        return Err(CsfError::Precondition(format!(
            "edge spacing too uneven for the stencils (neighbour ratio {ratio:.3})"
        )));
    }
    let x = curve.vertices();
    let closed = matches!(curve.topology(), Topology::Closed);
    let at = |i: isize| -> Vec3 { x[i.rem_euclid(n as isize) as usize] };

    let mut tangent = Vec::with_capacity(n);
    let mut curvature_vector = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    let mut tau = Vec::with_capacity(n);

    for i in 0..n {
        let k = i as isize;
        let (d1, d2) = if closed || (i > 0 && i + 1 < n) {
            let (xm, x0, xp) = (at(k - 1), at(k), at(k + 1));
            ((xp - xm) * 0.5, xp - x0 * 2.0 + xm)
        } else if i == 0 {
            (
                (x[1] * 4.0 - x[0] * 3.0 - x[2]) * 0.5,
                x[0] * 2.0 - x[1] * 5.0 + x[2] * 4.0 - x[3],
            )
        } else {
            (
                (x[n - 1] * 3.0 - x[n - 2] * 4.0 + x[n - 3]) * 0.5,
                x[n - 1] * 2.0 - x[n - 2] * 5.0 + x[n - 3] * 4.0 - x[n - 4],
            )
        };
        let d3 = if closed || (i >= 2 && i + 2 < n) {
            (at(k + 2) - at(k + 1) * 2.0 + at(k - 1) * 2.0 - at(k - 2)) * 0.5
        } else if n < 5 {
            Vec3::zeros()
        } else if i < 2 {
            (x[i + 1] * 18.0 - x[i] * 5.0 - x[i + 2] * 24.0 + x[i + 3] * 14.0 - x[i + 4] * 3.0) * 0.5
        } else {
            (x[i] * 5.0 - x[i - 1] * 18.0 + x[i - 2] * 24.0 - x[i - 3] * 14.0 + x[i - 4] * 3.0) * 0.5
        };

        let speed = d1.norm();
        let t = d1 / speed;
        let cross = d1.cross(&d2);
        let k_val = cross.norm() / (speed * speed * speed);
        let kv = (d2 - t * d2.dot(&t)) / (speed * speed);
        let tau_val = if k_val < STRAIGHT_CURVATURE {
            0.0
        } else {
            cross.dot(&d3) / cross.norm_squared()
        };
        tangent.push(t);
        curvature_vector.push(kv);
        kappa.push(k_val);
        tau.push(tau_val);
    }

    Ok(FrenetData {
        tangent,
        curvature_vector,
        kappa,
        tau,
        total_length: curve.length(),
    })
}
