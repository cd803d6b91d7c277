//! Closed-form planar solutions: the grim reaper translating soliton and the
//! Angenent oval `{cos x = e^t cosh y}`, plus oval cylinders as barriers.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Point3;

use crate::curve::{compute_frenet, SpaceCurve, Topology};
use crate::error::{CsfError, Result};
use crate::geom::{Pose, Vec3};

/// Gudermannian `atan(sinh u)`, written so the gap to `pi/2` keeps full
/// relative precision for large `|u|`.
pub fn gd(u: f64) -> f64 {
    let v = FRAC_PI_2 - 2.0 * (-u.abs()).exp().atan();
    v.copysign(u)
}

/// Inverse Gudermannian on `(-pi/2, pi/2)`.
pub fn gd_inv(x: f64) -> f64 {
    x.tan().asinh()
}

/// `ln cosh u` without overflow.
pub fn ln_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

pub(crate) fn apply(pose: &Pose, p: Vec3) -> Vec3 {
    (pose * Point3::from(p)).coords
}

/// A grim reaper of width `scale * pi` moving with speed `1/scale`, placed in
/// space by `pose`. In the model frame it is the graph
/// `y = scale ln cos(x/scale) - t/scale` in the plane `z = 0`.
#[derive(Debug, Clone, Copy)]
pub struct ReaperSpec {
    scale: f64,
    pub pose: Pose,
    pub time: f64,
}

impl ReaperSpec {
    pub fn new(scale: f64, pose: Pose, time: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(CsfError::Parameter {
                name: "scale",
                reason: format!("reaper scale must be positive, got {scale}"),
            });
        }
        Ok(Self { scale, pose, time })
    }

    /// The width-pi, unit-speed reaper in the xy-plane at time `time`.
    pub fn unit(time: f64) -> Self {
        Self {
            scale: 1.0,
            pose: Pose::identity(),
            time,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Point at signed arclength `s` from the tip.
    pub fn point_at_arclength(&self, s: f64) -> Vec3 {
        let l = self.scale;
        let u = s / l;
        apply(&self.pose, Vec3::new(l * gd(u), -l * ln_cosh(u) - self.time / l, 0.0))
    }

    /// Point on the graph above model abscissa `x`.
    pub fn point_at_x(&self, x: f64) -> Vec3 {
        let l = self.scale;
        apply(&self.pose, Vec3::new(x, l * (x / l).cos().ln() - self.time / l, 0.0))
    }

    fn arclength_of_x(&self, x: f64) -> f64 {
        self.scale * gd_inv(x / self.scale)
    }
}

/// Samples the reaper over model abscissae `x_range` with `n` vertices at
/// equal arclength along the exact curve.
pub fn sample_grim_reaper(spec: &ReaperSpec, x_range: (f64, f64), n: usize) -> Result<SpaceCurve> {
    let half = spec.scale * FRAC_PI_2;
    let (a, b) = x_range;
    if !(a > -half && b < half) {
        return Err(CsfError::Parameter {
            name: "x_range",
            reason: format!("[{a}, {b}] must lie strictly inside (-{half}, {half})"),
        });
    }
    if !(a < b) {
        return Err(CsfError::Parameter {
            name: "x_range",
            reason: format!("empty range [{a}, {b}]"),
        });
    }
    if n < 4 {
        return Err(CsfError::Precondition(format!("need n >= 4, got {n}")));
    }
    let (s0, s1) = (spec.arclength_of_x(a), spec.arclength_of_x(b));
    let v = (0..n)
        .map(|i| spec.point_at_arclength(s0 + (s1 - s0) * i as f64 / (n - 1) as f64))
        .collect();
    SpaceCurve::new(v, Topology::open_free())
}

fn require_negative(t: f64) -> Result<()> {
    if t < 0.0 {
        Ok(())
    } else {
        Err(CsfError::Parameter {
            name: "t",
            reason: format!("the oval exists only for t < 0, got {t}"),
        })
    }
}

/// Half-width `arccos(e^t)` of the oval at time `t` along the x-axis.
pub fn oval_halfwidth(t: f64) -> f64 {
    t.exp().acos()
}

/// Half-height `arccosh(e^-t)` of the oval along the y-axis.
pub fn oval_halfheight(t: f64) -> f64 {
    (-t).exp().acosh()
}

/// `|x|` of the oval point at height `|y| <= Y`. Uses
/// `1 - cos x = 2 e^t sinh((Y+y)/2) sinh((Y-y)/2)` so the tips keep full
/// precision.
fn oval_x(t: f64, big_y: f64, y: f64) -> f64 {
    let y = y.abs().min(big_y);
    let w = 2.0 * t.exp() * ((big_y + y) / 2.0).sinh() * ((big_y - y) / 2.0).sinh();
    2.0 * (w / 2.0).max(0.0).sqrt().min(1.0).asin()
}

/// Closed, counterclockwise sample of `{cos x = e^t cosh y}` starting at the
/// bottom tip, with cosine-spaced heights `y = -Y cos(2 pi j / n)`.
pub fn sample_angenent_oval(t: f64, n: usize) -> Result<SpaceCurve> {
    require_negative(t)?;
    if n < 8 {
        return Err(CsfError::Precondition(format!("oval needs n >= 8, got {n}")));
    }
    let big_y = oval_halfheight(t);
    let v = (0..n)
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / n as f64;
            let y = -big_y * phi.cos();
            let x = oval_x(t, big_y, y);
            let sign = if phi.sin() < 0.0 { -1.0 } else { 1.0 };
            Vec3::new(sign * x, y, 0.0)
        })
        .collect();
    SpaceCurve::new(v, Topology::Closed)
}

/// Gap `pi/2 - arccos(e^t)` between the oval and the wall of its slab.
/// The bound `< 2 e^t` is asserted.
pub fn slab_distance(t: f64) -> Result<f64> {
    require_negative(t)?;
    let d = t.exp().asin();
    assert!(
        d < 2.0 * t.exp(),
        "slab distance {d} violates the 2e^t bound at t = {t}"
    );
    Ok(d)
}

/// An Angenent cylinder `a_{t + t0} x R`: the oval lies in the xy-plane of
/// the barrier frame and the axis is its z-direction. At simulation time `t`
/// the cylinder is valid while `t + time_offset < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierCylinder {
    pub pose: Pose,
    pub time_offset: f64,
}

impl BarrierCylinder {
    pub fn new(pose: Pose, time_offset: f64) -> Self {
        Self { pose, time_offset }
    }

    pub fn axis(&self) -> Vec3 {
        self.pose.rotation * Vec3::z()
    }

    pub fn center(&self) -> Vec3 {
        self.pose.translation.vector
    }

    pub fn clock(&self, t: f64) -> f64 {
        t + self.time_offset
    }

    /// Closed oval slice of the cylinder at axial height `h` and time `t`.
    pub fn slice(&self, t: f64, h: f64, n: usize) -> Result<SpaceCurve> {
        let oval = sample_angenent_oval(self.clock(t), n)?;
        let v = oval
            .vertices()
            .iter()
            .map(|p| apply(&self.pose, Vec3::new(p.x, p.y, h)))
            .collect();
        SpaceCurve::from_parts(v, Topology::Closed)
    }
}

const GOLDEN_TOL: f64 = 1e-12;
const COARSE_SAMPLES: usize = 256;

/// Signed distance from `p` to the barrier surface at time `t`: positive
/// outside the cylinder, negative inside.
pub fn cylinder_clearance(p: &Vec3, b: &BarrierCylinder, t: f64) -> Result<f64> {
    let tau = b.clock(t);
    if tau >= 0.0 {
        return Err(CsfError::ExpiredBarrier {
            index: 0,
            time: t,
            clock: tau,
        });
    }
    let q = b.pose.inverse_transform_point(&Point3::from(*p));
    Ok(oval_signed_distance(q.x, q.y, tau))
}

/// Signed planar distance to `{cos x = e^tau cosh y}`.
pub fn oval_signed_distance(x: f64, y: f64, tau: f64) -> f64 {
    // The oval is symmetric in both axes, so the nearest point lies in the
    // quadrant of the query.
    let (x, y) = (x.abs(), y.abs());
    let big_y = oval_halfheight(tau);
    let curve = |phi: f64| {
        let yo = big_y * phi.cos();
        (oval_x(tau, big_y, yo), yo)
    };
    let dist2 = |phi: f64| {
        let (xo, yo) = curve(phi);
        (x - xo).powi(2) + (y - yo).powi(2)
    };

    let step = FRAC_PI_2 / COARSE_SAMPLES as f64;
    let coarse: Vec<f64> = (0..=COARSE_SAMPLES).map(|i| dist2(i as f64 * step)).collect();
    let mut order: Vec<usize> = (0..coarse.len()).collect();
    order.sort_by(|&i, &j| coarse[i].total_cmp(&coarse[j]));
    let mut best = coarse[order[0]];
    for &i in order.iter().take(3) {
        let lo = (i as f64 - 1.0).max(0.0) * step;
        let hi = ((i + 1) as f64 * step).min(FRAC_PI_2);
        best = best.min(golden_min(&dist2, lo, hi));
    }
    let d = best.sqrt();
    let inside = x < FRAC_PI_2 && tau.exp() * y.cosh() < x.cos();
    if inside {
        -d
    } else {
        d
    }
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    f(a).min(f(b)).min(fc).min(fd)
}

/// Which exact solution a residual check samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolitonKind {
    /// Unit reaper on `|x| <= half_width`.
    Reaper {
        half_width: f64,
    },
    Oval,
}

/// Time step of the finite difference in [`verify_soliton_residual`].
pub const RESIDUAL_DT: f64 = 1e-4;

/// Max relative mismatch between the exact normal velocity, measured as the
/// normal component of the displacement over `RESIDUAL_DT` at a fixed
/// parameter, and the discrete curvature of the sample at `t`.
pub fn verify_soliton_residual(kind: SolitonKind, t: f64, n: usize) -> Result<f64> {
    let (now, later) = match kind {
        SolitonKind::Reaper { half_width } => {
            let r = (-half_width, half_width);
            (
                sample_grim_reaper(&ReaperSpec::unit(t), r, n)?,
                sample_grim_reaper(&ReaperSpec::unit(t + RESIDUAL_DT), r, n)?,
            )
        }
        SolitonKind::Oval => (sample_angenent_oval(t, n)?, sample_angenent_oval(t + RESIDUAL_DT, n)?),
    };
    let f = compute_frenet(&now)?;
    let mut worst: f64 = 0.0;
    for i in 0..now.len() {
        let k = f.kappa[i];
        if k < crate::curve::STRAIGHT_CURVATURE {
            continue;
        }
        let normal = f.curvature_vector[i] / f.curvature_vector[i].norm();
        let vn = (later.vertices()[i] - now.vertices()[i]).dot(&normal) / RESIDUAL_DT;
        worst = worst.max((vn - k).abs() / k);
    }
    Ok(worst)
}
