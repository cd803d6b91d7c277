use std::f64::consts::{FRAC_PI_2, PI};

use crate::curve::SpaceCurve;
use crate::error::{CsfError, Result};
use crate::geom::Vec3;

/// Which side of `{y = 0}` the region lives on, and the plane it is
/// projected onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSpec {
    /// The bounded run with `y > 0`, projected onto the xy-plane.
    Upper,
    /// The bounded run with `y < 0`, projected onto the yz-plane.
    Lower,
}

impl RegionSpec {
    pub fn label(&self) -> &'static str {
        match self {
            RegionSpec::Upper => "upper",
            RegionSpec::Lower => "lower",
        }
    }

    fn inside(&self, p: &Vec3) -> bool {
        match self {
            RegionSpec::Upper => p.y > 0.0,
            RegionSpec::Lower => p.y < 0.0,
        }
    }

    /// In-plane coordinates and the dropped (out-of-plane) coordinate.
    fn project(&self, p: &Vec3) -> ([f64; 2], f64) {
        match self {
            RegionSpec::Upper => ([p.x, p.y], p.z),
            RegionSpec::Lower => ([p.y, p.z], p.x),
        }
    }
}

/// Widest slab (in the dropped coordinate) for which the projected area is
/// trusted as a stand-in for the minimal disk.
pub const SLAB_LIMIT: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaReport {
    pub area: f64,
    /// Extent of the compact piece in the dropped coordinate.
    pub slab_width: f64,
    pub trusted: bool,
    /// `pi/2` minus the interior angle at each endpoint; they sum to
    /// `pi - (alpha_A + alpha_B)`, the amount by which `dA/dt` may exceed
    /// `-pi`.
    pub corner_excess: [f64; 2],
    pub endpoints: [Vec3; 2],
}

fn crossing(a: &Vec3, b: &Vec3) -> Vec3 {
    let s = a.y / (a.y - b.y);
    let mut p = a + (b - a) * s;
    p.y = 0.0;
    p
}

fn angle(u: [f64; 2], v: [f64; 2]) -> f64 {
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    cross.abs().atan2(dot)
}

/// Index range of the unique run of vertices on the chosen side of `{y = 0}`
/// that does not reach an end of the curve.
pub(crate) fn bounded_run(curve: &SpaceCurve, spec: RegionSpec) -> Result<(usize, usize)> {
    let v = curve.vertices();
    let n = v.len();
    let mut runs = Vec::new();
    let mut i = 0;
    while i < n {
        if spec.inside(&v[i]) {
            let start = i;
            while i + 1 < n && spec.inside(&v[i + 1]) {
                i += 1;
            }
            if curve.is_closed() || (start > 0 && i + 1 < n) {
                runs.push((start, i));
            }
        }
        i += 1;
    }
    match runs.as_slice() {
        [one] => Ok(*one),
        [] => Err(CsfError::Precondition(format!(
            "no bounded run of the curve lies in the {} half",
            spec.label()
        ))),
        many => Err(CsfError::Precondition(format!(
            "{} bounded runs in the {} half, expected one",
            many.len(),
            spec.label()
        ))),
    }
}

/// Area enclosed by the projection of the unique bounded run of vertices on
/// the chosen side of `{y = 0}`, closed by the chord between the two
/// crossings.
pub fn region_area(curve: &SpaceCurve, spec: RegionSpec) -> Result<AreaReport> {
    let v = curve.vertices();
    let n = v.len();
    let (start, end) = bounded_run(curve, spec)?;
    let at = |k: isize| v[k.rem_euclid(n as isize) as usize];
    let before = at(start as isize - 1);
    let after = at(end as isize + 1);
    let a = crossing(&before, &v[start]);
    let b = crossing(&v[end], &after);

    let mut pts = Vec::with_capacity(end - start + 3);
    pts.push(a);
    pts.extend_from_slice(&v[start..=end]);
    pts.push(b);

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut twice = 0.0;
    let proj: Vec<[f64; 2]> = pts
        .iter()
        .map(|p| {
            let (q, d) = spec.project(p);
            lo = lo.min(d);
            hi = hi.max(d);
            q
        })
        .collect();
    for k in 0..proj.len() {
        let p = proj[k];
        let q = proj[(k + 1) % proj.len()];
        twice += p[0] * q[1] - q[0] * p[1];
    }
    let sub = |p: [f64; 2], q: [f64; 2]| [p[0] - q[0], p[1] - q[1]];
    let (pa, pb) = (proj[0], proj[proj.len() - 1]);
    let alpha_a = angle(sub(pb, pa), sub(spec.project(&v[start]).0, spec.project(&before).0));
    let alpha_b = angle(sub(pa, pb), sub(spec.project(&v[end]).0, spec.project(&after).0));
    let width = hi - lo;
    Ok(AreaReport {
        area: 0.5 * twice.abs(),
        slab_width: width,
        trusted: width <= SLAB_LIMIT,
        corner_excess: [FRAC_PI_2 - alpha_a, FRAC_PI_2 - alpha_b],
        endpoints: [a, b],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaSample {
    pub t: f64,
    pub area: f64,
    pub trusted: bool,
    pub corner_excess: [f64; 2],
}

impl AreaSample {
    pub fn new(t: f64, r: &AreaReport) -> Self {
        Self {
            t,
            area: r.area,
            trusted: r.trusted,
            corner_excess: r.corner_excess,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaTolerance {
    pub slope: f64,
    pub angle: f64,
}

impl Default for AreaTolerance {
    fn default() -> Self {
        Self {
            slope: 0.2,
            angle: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AreaViolationKind {
    /// Slope above `-pi + eps(t) + tol`.
    SlowDecay,
    /// Slope below `-pi - tol`; the measurement itself is off.
    FastDecay,
    /// Corner excesses above `eps(t) + tol_angle`.
    CornerExcess,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaViolation {
    pub row: usize,
    pub t: f64,
    pub kind: AreaViolationKind,
    pub measured: f64,
    pub threshold: f64,
}

/// `2 e^{-(R - t)/2}`, the allowed corner excess at time `t`.
pub fn corner_bound(r: f64, t: f64) -> f64 {
    2.0 * (-(r - t) / 2.0).exp()
}

/// Discrete slope of each row: centred in the interior, one-sided at the
/// two ends. Needs at least three rows.
pub fn area_slopes(samples: &[AreaSample]) -> Result<Vec<f64>> {
    let n = samples.len();
    if n < 3 {
        return Err(CsfError::Precondition(format!(
            "area slopes need at least 3 rows, got {n}"
        )));
    }
    let d = |i: usize, j: usize| (samples[j].area - samples[i].area) / (samples[j].t - samples[i].t);
    Ok((0..n)
        .map(|i| match i {
            0 => d(0, 1),
            i if i == n - 1 => d(n - 2, n - 1),
            i => d(i - 1, i + 1),
        })
        .collect())
}

/// Checks `-pi - tol <= dA/dt <= -pi + eps(t) + tol` and the corner excess
/// bound on every trusted row.
pub fn check_area_inequality(samples: &[AreaSample], r: f64, tol: &AreaTolerance) -> Result<Vec<AreaViolation>> {
    let slopes = area_slopes(samples)?;
    let mut out = Vec::new();
    for (row, (s, slope)) in samples.iter().zip(slopes).enumerate() {
        if !s.trusted {
            continue;
        }
        let eps = corner_bound(r, s.t);
        let upper = -PI + eps + tol.slope;
        let lower = -PI - tol.slope;
        let mut push = |kind, measured, threshold| {
            out.push(AreaViolation {
                row,
                t: s.t,
                kind,
                measured,
                threshold,
            })
        };
        if !(slope <= upper) {
            push(AreaViolationKind::SlowDecay, slope, upper);
        } else if !(slope >= lower) {
            push(AreaViolationKind::FastDecay, slope, lower);
        }
        let excess = s.corner_excess[0] + s.corner_excess[1];
        if !(excess <= eps + tol.angle) {
            push(AreaViolationKind::CornerExcess, excess, eps + tol.angle);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Topology;
    use crate::flow::{evolve, FlowState, MonitorSchedule, StepControl};

    fn semicircle(r: f64, n: usize) -> SpaceCurve {
        // full circle so the upper run is bounded on both sides
        let v = (0..n)
            .map(|k| {
                let a = -FRAC_PI_2 + 2.0 * PI * (k as f64 + 0.5) / n as f64;
                Vec3::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        SpaceCurve::new(v, Topology::Closed).unwrap()
    }

    #[test]
    fn half_disk() {
        let c = semicircle(1.0, 800);
        let rep = region_area(&c, RegionSpec::Upper).unwrap();
        assert!((rep.area - FRAC_PI_2).abs() < 1e-3);
        assert!(rep.trusted && rep.slab_width == 0.0);
        for e in rep.corner_excess {
            assert!(e.abs() < 1e-2, "{e}");
        }
        assert!((rep.endpoints[0].norm() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn chord_only_region_is_empty() {
        let v = vec![
            Vec3::new(-1.0, -1.0, 0.0),
            Vec3::new(-0.5, 0.0, 0.0),
            Vec3::new(0.5, 0.0, 0.0),
            Vec3::new(1.0, -1.0, 0.0),
        ];
        let c = SpaceCurve::new(v, Topology::open_free()).unwrap();
        assert!(region_area(&c, RegionSpec::Upper).is_err());
        // a sliver a hair above the axis has vanishing area
        let v = vec![
            Vec3::new(-1.0, -1.0, 0.0),
            Vec3::new(-0.5, 1e-12, 0.0),
            Vec3::new(0.5, 1e-12, 0.0),
            Vec3::new(1.0, -1.0, 0.0),
        ];
        let c = SpaceCurve::new(v, Topology::open_free()).unwrap();
        assert!(region_area(&c, RegionSpec::Upper).unwrap().area < 1e-11);
    }

    #[test]
    fn lower_region_projects_to_yz() {
        let v: Vec<Vec3> = (0..=200)
            .map(|k| {
                let a = (PI + 0.2) * k as f64 / 200.0 - 0.1;
                Vec3::new(0.05, -a.sin(), a.cos())
            })
            .collect();
        let c = SpaceCurve::new(v, Topology::open_free()).unwrap();
        let rep = region_area(&c, RegionSpec::Lower).unwrap();
        assert!((rep.area - FRAC_PI_2).abs() < 1e-3);
    }

    #[test]
    fn tilted_piece_is_untrusted() {
        let v: Vec<Vec3> = (0..=200)
            .map(|k| {
                let a = (PI + 0.2) * k as f64 / 200.0 - 0.1;
                Vec3::new(a.cos(), a.sin(), 0.3 * a.cos())
            })
            .collect();
        let c = SpaceCurve::new(v, Topology::open_free()).unwrap();
        assert!(!region_area(&c, RegionSpec::Upper).unwrap().trusted);
    }

    #[test]
    fn shrinking_circle_slope_calibrates() {
        let n = 400;
        let mut st = FlowState::new(semicircle(1.0, n), 0.0);
        let ctrl = StepControl {
            dt_max: 1e-4,
            c_cfl: 0.5,
            resample_every: 0,
            h: 2.0 * PI / n as f64,
        };
        let mut samples = vec![AreaSample::new(
            0.0,
            &region_area(&st.curve, RegionSpec::Upper).unwrap(),
        )];
        for k in 1..=6 {
            let mut sch = MonitorSchedule::new(st.t, 1.0);
            st = evolve(st, 0.05 * k as f64, &ctrl, &mut sch, &[]).unwrap().0;
            let rep = region_area(&st.curve, RegionSpec::Upper).unwrap();
            samples.push(AreaSample::new(st.t, &rep));
        }
        for s in area_slopes(&samples).unwrap() {
            assert!((s + PI).abs() < 0.05, "{s}");
        }
        // R large makes eps negligible; the slope sits at -pi, inside both bounds
        assert!(check_area_inequality(&samples, 60.0, &AreaTolerance::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn constant_area_is_flagged_everywhere() {
        let samples: Vec<AreaSample> = (0..6)
            .map(|k| AreaSample {
                t: k as f64 * 0.1,
                area: 3.0,
                trusted: true,
                corner_excess: [0.0, 0.0],
            })
            .collect();
        let v = check_area_inequality(&samples, 5.0, &AreaTolerance::default()).unwrap();
        assert_eq!(v.len(), 6);
        assert!(v.iter().all(|x| x.kind == AreaViolationKind::SlowDecay));
        assert!(check_area_inequality(&samples[..2], 5.0, &AreaTolerance::default()).is_err());
    }

    #[test]
    fn untrusted_rows_are_skipped() {
        let samples: Vec<AreaSample> = (0..4)
            .map(|k| AreaSample {
                t: k as f64,
                area: 3.0,
                trusted: false,
                corner_excess: [1.0, 1.0],
            })
            .collect();
        assert!(check_area_inequality(&samples, 5.0, &AreaTolerance::default())
            .unwrap()
            .is_empty());
    }
}
