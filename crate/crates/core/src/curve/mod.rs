//! Discrete space curves: representation, arclength resampling, and the
//! line-oriented snapshot format.

mod frenet;
mod metrics;
mod snapshot;

pub use frenet::{compute_frenet, FrenetData, STRAIGHT_CURVATURE};
pub(crate) use metrics::nonplanarity_of_points;
pub use metrics::{hausdorff_distance, nonplanarity, slab_margin, BestFitPlane, Slab};
pub use snapshot::{parse_snapshot, read_snapshot, write_snapshot, Snapshot};

use crate::error::{CsfError, Result};
use crate::geom::{segment_segment_distance, SegmentGrid, Vec3};

/// Segments closer than this are treated as intersecting.
pub const SELF_INTERSECTION_TOL: f64 = 1e-9;
/// Allowed angle between a clamped end segment and its declared line.
pub const CLAMP_ANGLE_TOL: f64 = 1e-6;

/// Boundary behaviour of one end of an open curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndCondition {
    /// The end is unconstrained by the integrator and only moves with its
    /// neighbours' one-sided stencil. Used for measurement-only curves.
    Free,
    /// The end vertex is held fixed and the end segment is kept on the line
    /// through it with the given unit direction (the curve's tangent there,
    /// in traversal order).
    Clamped { direction: Vec3 },
    /// The end vertex translates with a prescribed velocity; used to impose
    /// exact boundary data for translating solitons.
    Moving { velocity: Vec3 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology {
    Open { start: EndCondition, end: EndCondition },
    Closed,
}

impl Topology {
    pub fn open_free() -> Self {
        Topology::Open {
            start: EndCondition::Free,
            end: EndCondition::Free,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Topology::Closed)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Topology::Open { .. } => "open",
            Topology::Closed => "closed",
        }
    }
}

/// An ordered polyline in 3-space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceCurve {
    vertices: Vec<Vec3>,
    topology: Topology,
}

impl SpaceCurve {
    /// Builds a curve and checks every structural invariant, including the
    /// pairwise self-intersection scan.
    pub fn new(vertices: Vec<Vec3>, topology: Topology) -> Result<Self> {
        let curve = Self::from_parts(vertices, topology)?;
        if let Some((i, j)) = curve.find_self_intersection() {
            return Err(CsfError::InvalidCurve(format!("segments {i} and {j} intersect")));
        }
        Ok(curve)
    }

    /// Like [`SpaceCurve::new`] without the O(n) grid scan for
    /// self-intersections. The flow engine uses this on every step and runs
    /// the scan at its own cadence.
    pub fn from_parts(vertices: Vec<Vec3>, topology: Topology) -> Result<Self> {
        if vertices.len() < 4 {
            return Err(CsfError::InvalidCurve(format!(
                "need at least 4 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(v) = vertices.iter().find(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(CsfError::InvalidCurve(format!("non-finite vertex {v:?}")));
        }
        let curve = Self { vertices, topology };
        for (i, (a, b)) in curve.edges().enumerate() {
            if a == b {
                return Err(CsfError::InvalidCurve(format!(
                    "consecutive vertices {i} and {} coincide",
                    (i + 1) % curve.len()
                )));
            }
        }
        curve.check_clamps()?;
        Ok(curve)
    }

    fn check_clamps(&self) -> Result<()> {
        let Topology::Open { start, end } = self.topology else {
            return Ok(());
        };
        let n = self.len();
        let v = &self.vertices;
        for (cond, seg, which) in [(start, v[1] - v[0], "start"), (end, v[n - 1] - v[n - 2], "end")] {
            if let EndCondition::Clamped { direction } = cond {
                if (direction.norm() - 1.0).abs() > 1e-9 {
                    return Err(CsfError::InvalidCurve(format!(
                        "{which} clamp direction is not a unit vector"
                    )));
                }
                let angle = seg.normalize().dot(&direction).clamp(-1.0, 1.0).acos();
                if angle > CLAMP_ANGLE_TOL {
                    return Err(CsfError::InvalidCurve(format!(
                        "{which} segment deviates {angle:.3e} rad from its clamp line"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vec3> {
        self.vertices
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.topology.is_closed()
    }

    pub fn edge_count(&self) -> usize {
        if self.is_closed() {
            self.len()
        } else {
            self.len() - 1
        }
    }

    /// Iterates over `(start, end)` vertex pairs of every edge, including
    /// the closing edge of a closed curve.
    pub fn edges(&self) -> impl Iterator<Item = (&Vec3, &Vec3)> + '_ {
        let n = self.len();
        (0..self.edge_count()).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.edges().map(|(a, b)| (b - a).norm()).collect()
    }

    pub fn length(&self) -> f64 {
        self.edges().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Largest ratio between neighbouring edge lengths.
    pub fn adjacent_edge_ratio(&self) -> f64 {
        let e = self.edge_lengths();
        let m = e.len();
        let pairs = if self.is_closed() { m } else { m - 1 };
        (0..pairs)
            .map(|i| {
                let (a, b) = (e[i], e[(i + 1) % m]);
                a.max(b) / a.min(b)
            })
            .fold(1.0, f64::max)
    }

    /// Replaces the topology, re-validating clamp constraints.
    pub fn with_topology(self, topology: Topology) -> Result<Self> {
        Self::from_parts(self.vertices, topology)
    }

    /// Returns the first pair of non-adjacent edges closer than
    /// [`SELF_INTERSECTION_TOL`].
    pub fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let m = self.edge_count();
        let n = self.len();
        let v = &self.vertices;
        let longest = self.edge_lengths().into_iter().fold(0.0, f64::max);
        let mut grid = SegmentGrid::new(longest.max(1e-6) * 2.0);
        for i in 0..m {
            grid.insert(i, &v[i], &v[(i + 1) % n]);
        }
        for i in 0..m {
            let (a0, a1) = (&v[i], &v[(i + 1) % n]);
            for j in grid.query(a0, a1, SELF_INTERSECTION_TOL) {
                if j <= i + 1 {
                    continue;
                }
                if self.is_closed() && i == 0 && j == m - 1 {
                    continue;
                }
                let (b0, b1) = (&v[j], &v[(j + 1) % n]);
                if segment_segment_distance(a0, a1, b0, b1) < SELF_INTERSECTION_TOL {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Cumulative arclength at each vertex; for closed curves the final entry
    /// is the full perimeter (one more entry than vertices).
    pub(crate) fn cumulative_length(&self) -> Vec<f64> {
        let mut acc = Vec::with_capacity(self.edge_count() + 1);
        acc.push(0.0);
        let mut s = 0.0;
        for (a, b) in self.edges() {
            s += (b - a).norm();
            acc.push(s);
        }
        acc
    }

    /// Resamples to `n` vertices spaced at equal arclength along this
    /// polyline. Open curves keep both endpoints exactly, closed curves keep
    /// vertex 0.
    ///
    /// The first pass places points at equal arclength of the input; a short
    /// fixed-point refinement then slides them along the input until the
    /// output chords are equal too, which makes the operation idempotent.
    pub fn resample_by_arclength(&self, n: usize) -> Result<SpaceCurve> {
        if n < 4 {
            return Err(CsfError::Precondition(format!("resampling needs n >= 4, got {n}")));
        }
        let cum = self.cumulative_length();
        let total = *cum.last().unwrap();
        if !(total > 0.0) {
            return Err(CsfError::Degenerate("curve has zero length".into()));
        }
        let closed = self.is_closed();
        let intervals = if closed { n } else { n - 1 };
        let mut params: Vec<f64> = (0..n).map(|i| total * i as f64 / intervals as f64).collect();
        let mut points: Vec<Vec3> = params.iter().map(|&s| self.point_at(&cum, s)).collect();

        for _ in 0..50 {
            // chord arclength of the current output polyline
            let mut chord = Vec::with_capacity(intervals + 1);
            chord.push(0.0);
            for i in 0..intervals {
                let d = (points[(i + 1) % n] - points[i]).norm();
                chord.push(chord[i] + d);
            }
            let chord_total = chord[intervals];
            let mut next = params.clone();
            let mut shift: f64 = 0.0;
            let movable = if closed { 1..n } else { 1..n - 1 };
            for i in movable {
                let target = chord_total * i as f64 / intervals as f64;
                let j = match chord.partition_point(|&c| c <= target) {
                    0 => 0,
                    k => (k - 1).min(intervals - 1),
                };
                let span = chord[j + 1] - chord[j];
                let f = if span > 0.0 { (target - chord[j]) / span } else { 0.0 };
                let s_lo = params[j];
                let s_hi = if j + 1 == n { total } else { params[j + 1] };
                next[i] = s_lo + f * (s_hi - s_lo);
                shift = shift.max((next[i] - params[i]).abs());
            }
            params = next;
            points = params.iter().map(|&s| self.point_at(&cum, s)).collect();
            if shift <= 1e-13 * total {
                break;
            }
        }
        if !closed {
            points[0] = self.vertices[0];
            points[n - 1] = self.vertices[self.len() - 1];
        }
        SpaceCurve::from_parts(points, self.topology)
    }

    /// Position at arclength `s` along the polyline, given its cumulative
    /// length table.
    pub(crate) fn point_at(&self, cum: &[f64], s: f64) -> Vec3 {
        let m = cum.len() - 1;
        let n = self.len();
        let j = match cum.partition_point(|&c| c <= s) {
            0 => 0,
            k => (k - 1).min(m - 1),
        };
        let span = cum[j + 1] - cum[j];
        let f = if span > 0.0 {
            ((s - cum[j]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let a = self.vertices[j];
        let b = self.vertices[(j + 1) % n];
        a + (b - a) * f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn segment(n: usize) -> SpaceCurve {
        let v = (0..n).map(|i| Vec3::new(i as f64 / (n - 1) as f64, 0.0, 0.0)).collect();
        SpaceCurve::new(v, Topology::open_free()).unwrap()
    }

    fn circle(n: usize, r: f64, phase: f64) -> SpaceCurve {
        let v = (0..n)
            .map(|i| {
                let a = phase + 2.0 * PI * i as f64 / n as f64;
                Vec3::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        SpaceCurve::new(v, Topology::Closed).unwrap()
    }

    #[test]
    fn rejects_short_and_repeated() {
        let v = vec![Vec3::zeros(); 3];
        assert!(SpaceCurve::new(v, Topology::Closed).is_err());
        let v = vec![
            Vec3::zeros(),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
        ];
        assert!(SpaceCurve::new(v, Topology::open_free()).is_err());
    }

    #[test]
    fn rejects_self_intersection() {
        // a bow tie
        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let err = SpaceCurve::new(v, Topology::Closed).unwrap_err();
        assert!(err.to_string().contains("intersect"));
    }

    #[test]
    fn clamp_direction_is_checked() {
        let v: Vec<Vec3> = (0..5).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        let ok = Topology::Open {
            start: EndCondition::Clamped { direction: Vec3::x() },
            end: EndCondition::Clamped { direction: Vec3::x() },
        };
        assert!(SpaceCurve::new(v.clone(), ok).is_ok());
        let bad = Topology::Open {
            start: EndCondition::Clamped { direction: Vec3::y() },
            end: EndCondition::Free,
        };
        assert!(SpaceCurve::new(v, bad).is_err());
    }

    #[test]
    fn resample_unit_segment() {
        let c = segment(7).resample_by_arclength(5).unwrap();
        let xs: Vec<f64> = c.vertices().iter().map(|p| p.x).collect();
        for (x, want) in xs.iter().zip([0.0, 0.25, 0.5, 0.75, 1.0]) {
            assert!((x - want).abs() < 1e-15, "{xs:?}");
        }
    }

    #[test]
    fn resample_closed_square() {
        let v = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let sq = SpaceCurve::new(v, Topology::Closed).unwrap();
        let r = sq.resample_by_arclength(8).unwrap();
        assert_eq!(r.len(), 8);
        for e in r.edge_lengths() {
            assert!((e - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn resample_circle_has_equal_edges() {
        // Oracle: the equal-angle 50-gon has all edges 2 sin(pi/50).
        let want = 2.0 * (PI / 50.0).sin();
        let r = circle(100, 1.0, 0.0).resample_by_arclength(50).unwrap();
        for e in r.edge_lengths() {
            assert!(((e - want) / want).abs() < 1e-6, "{e} vs {want}");
        }
        // Off-phase input: the result is still equilateral.
        let r = circle(97, 1.0, 0.3).resample_by_arclength(50).unwrap();
        let e = r.edge_lengths();
        let mean = e.iter().sum::<f64>() / e.len() as f64;
        for x in e {
            assert!(((x - mean) / mean).abs() < 1e-6);
        }
    }

    #[test]
    fn resample_preserves_length_and_endpoints_when_refining() {
        let v: Vec<Vec3> = (0..6).map(|i| Vec3::new(i as f64, (i % 2) as f64 * 0.5, 0.0)).collect();
        let c = SpaceCurve::new(v, Topology::open_free()).unwrap();
        // Refining by an integer factor reproduces every input corner.
        let r = c.resample_by_arclength(5 * 8 + 1).unwrap();
        assert_eq!(r.vertices()[0], c.vertices()[0]);
        assert_eq!(r.vertices()[40], c.vertices()[5]);
        assert!(((r.length() - c.length()) / c.length()).abs() < 1e-6);
    }

    #[test]
    fn resample_rejects_degenerate() {
        let c = segment(5);
        assert!(c.resample_by_arclength(3).is_err());
    }

    #[test]
    fn resample_is_idempotent() {
        let v: Vec<Vec3> = (0..40)
            .map(|i| {
                let s = i as f64 * 0.1;
                Vec3::new(s.cos() * (1.0 + 0.3 * s), s.sin(), 0.2 * s)
            })
            .collect();
        let c = SpaceCurve::new(v, Topology::open_free()).unwrap();
        let once = c.resample_by_arclength(57).unwrap();
        let twice = once.resample_by_arclength(57).unwrap();
        for (a, b) in once.vertices().iter().zip(twice.vertices()) {
            assert!((a - b).norm() < 1e-9);
        }
    }
}
