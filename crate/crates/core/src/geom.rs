//! Small vector helpers shared by the curve, barrier and monitor code.

use std::collections::HashMap;

use nalgebra::{Isometry3, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Pose = Isometry3<f64>;

pub const E1: Vec3 = Vec3::new(1.0, 0.0, 0.0);
pub const E2: Vec3 = Vec3::new(0.0, 1.0, 0.0);
pub const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

/// The diagonal ramp direction `(e1 + e3)/sqrt(2)`.
pub fn ramp_direction() -> Vec3 {
    Vec3::new(std::f64::consts::FRAC_1_SQRT_2, 0.0, std::f64::consts::FRAC_1_SQRT_2)
}

/// Closest point on segment `[a, b]` to `p`.
pub fn closest_on_segment(p: &Vec3, a: &Vec3, b: &Vec3) -> Vec3 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

pub fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    (p - closest_on_segment(p, a, b)).norm()
}

/// Minimum distance between segments `[p0, p1]` and `[q0, q1]`.
pub fn segment_segment_distance(p0: &Vec3, p1: &Vec3, q0: &Vec3, q1: &Vec3) -> f64 {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return r.norm();
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}

/// Uniform hash grid over segments, used to keep the pairwise self-intersection
/// scan linear in the vertex count.
pub(crate) struct SegmentGrid {
    cell: f64,
    buckets: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl SegmentGrid {
    pub(crate) fn new(cell: f64) -> Self {
        Self {
            cell,
            buckets: HashMap::new(),
        }
    }

    fn key(&self, p: &Vec3) -> (i64, i64, i64) {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
            (p.z / self.cell).floor() as i64,
        )
    }

    fn cells_of(&self, a: &Vec3, b: &Vec3, pad: f64) -> impl Iterator<Item = (i64, i64, i64)> {
        let lo = self.key(&Vec3::new(a.x.min(b.x) - pad, a.y.min(b.y) - pad, a.z.min(b.z) - pad));
        let hi = self.key(&Vec3::new(a.x.max(b.x) + pad, a.y.max(b.y) + pad, a.z.max(b.z) + pad));
        (lo.0..=hi.0).flat_map(move |i| (lo.1..=hi.1).flat_map(move |j| (lo.2..=hi.2).map(move |k| (i, j, k))))
    }

    pub(crate) fn insert(&mut self, id: usize, a: &Vec3, b: &Vec3) {
        let keys: Vec<_> = self.cells_of(a, b, 0.0).collect();
        for k in keys {
            self.buckets.entry(k).or_default().push(id);
        }
    }

    /// Candidate segment ids whose cells overlap the padded box of `[a, b]`.
    pub(crate) fn query(&self, a: &Vec3, b: &Vec3, pad: f64) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .cells_of(a, b, pad)
            .filter_map(|k| self.buckets.get(&k))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_segments_distance() {
        let d = segment_segment_distance(
            &Vec3::new(-1.0, 0.0, 0.0),
            &Vec3::new(1.0, 0.0, 0.0),
            &Vec3::new(0.0, -1.0, 0.5),
            &Vec3::new(0.0, 1.0, 0.5),
        );
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn parallel_segments_distance() {
        let d = segment_segment_distance(
            &Vec3::zeros(),
            &E1,
            &Vec3::new(2.0, 0.3, 0.0),
            &Vec3::new(3.0, 0.3, 0.0),
        );
        assert!((d - (1.0f64 + 0.09).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn point_projects_inside_segment() {
        let d = point_segment_distance(&Vec3::new(0.5, 2.0, 0.0), &Vec3::zeros(), &E1);
        assert_eq!(d, 2.0);
    }
}
