use nalgebra::{Matrix3, SymmetricEigen};

use super::SpaceCurve;
use crate::error::{CsfError, Result};
use crate::geom::{point_segment_distance, Vec3};

/// A slab `{p : |<p, normal> - offset| <= width / 2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slab {
    normal: Vec3,
    offset: f64,
    width: f64,
}

impl Slab {
    pub fn new(normal: Vec3, offset: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(CsfError::Parameter {
                name: "width",
                reason: format!("slab width must be positive, got {width}"),
            });
        }
        let len = normal.norm();
        if !(len > 0.0) {
            return Err(CsfError::Parameter {
                name: "normal",
                reason: "slab normal must be nonzero".into(),
            });
        }
        Ok(Self {
            normal: normal / len,
            offset,
            width,
        })
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn distance_to_center(&self, p: &Vec3) -> f64 {
        (p.dot(&self.normal) - self.offset).abs()
    }
}

/// Half-width minus the largest vertex distance from the slab's centre
/// plane. Nonnegative iff every vertex lies in the slab.
pub fn slab_margin(curve: &SpaceCurve, slab: &Slab) -> f64 {
    let worst = curve
        .vertices()
        .iter()
        .map(|p| slab.distance_to_center(p))
        .fold(0.0, f64::max);
    slab.width / 2.0 - worst
}

fn one_sided(a: &SpaceCurve, b: &SpaceCurve) -> f64 {
    let bv = b.vertices();
    let n = bv.len();
    let edges: Vec<(usize, usize)> = (0..b.edge_count()).map(|i| (i, (i + 1) % n)).collect();
    a.vertices()
        .iter()
        .map(|p| {
            edges
                .iter()
                .map(|&(i, j)| point_segment_distance(p, &bv[i], &bv[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two polylines, measured from each
/// curve's vertices to the other curve's segments.
pub fn hausdorff_distance(a: &SpaceCurve, b: &SpaceCurve) -> f64 {
    one_sided(a, b).max(one_sided(b, a))
}

/// Least-squares plane through a point set.
#[derive(Debug, Clone, Copy)]
pub struct BestFitPlane {
    pub centroid: Vec3,
    pub normal: Vec3,
}

impl BestFitPlane {
    pub fn fit(points: &[Vec3]) -> Option<Self> {
        if points.is_empty() {
            return None;
        }
        let centroid = points.iter().sum::<Vec3>() / points.len() as f64;
        let mut cov = Matrix3::zeros();
        for p in points {
            let d = p - centroid;
            cov += d * d.transpose();
        }
        let eig = SymmetricEigen::new(cov);
        let (imin, _) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
        let normal = eig.eigenvectors.column(imin).into_owned().normalize();
        Some(Self { centroid, normal })
    }

    pub fn distance(&self, p: &Vec3) -> f64 {
        (p - self.centroid).dot(&self.normal).abs()
    }
}

/// Largest distance of a vertex from the least-squares plane of all
/// vertices; zero for coplanar vertex sets.
pub fn nonplanarity(curve: &SpaceCurve) -> f64 {
    nonplanarity_of_points(curve.vertices())
}

pub(crate) fn nonplanarity_of_points(points: &[Vec3]) -> f64 {
    match BestFitPlane::fit(points) {
        Some(plane) => points.iter().map(|p| plane.distance(p)).fold(0.0, f64::max),
        None => 0.0,
    }
}
