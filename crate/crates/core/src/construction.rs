//! Initial data: two perpendicular half grim reapers spliced at the origin,
//! bent slightly at the junction, flared out to straight ends along the ramp
//! direction, plus the Angenent cylinders that fence them in.
//!
//! Conventions. `P` lies in the plane `z = 0` and is parametrized by signed
//! arclength `s <= 0` with the junction at `s = 0`:
//! `P(s) = (gd(s + sigma_R) - x_R, R - ln cosh(s + sigma_R), 0)`, where
//! `x_R = arccos(e^-R)` and `cosh sigma_R = e^R`. `Q` is its image under
//! `M(x, y, z) = (-z, -y, -x)` with the parameter reversed, so
//! `Q(s) = M(P(-s))` lies in `{x = 0, z >= 0}`. The assembled curve keeps
//! that symmetry: `Gamma(s) = M(Gamma(-s))`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, LN_2, SQRT_2};

use nalgebra::{Translation3, UnitQuaternion};

use crate::curve::{EndCondition, SpaceCurve, Topology};
use crate::error::{CsfError, Result};
use crate::exact::{cylinder_clearance, gd, ln_cosh, BarrierCylinder};
use crate::geom::{point_segment_distance, ramp_direction, Pose, Vec3};
use crate::monitors::ramp_diagnostics;

/// `arccos(e^-R)`, the half-width of the oval slice at time `-R` and the
/// abscissa of the junction on the unshifted reaper.
pub fn x_r(r: f64) -> f64 {
    gd(sigma_r(r))
}

/// Arclength from the tip of the unit reaper to its point at height `-R`
/// below the tip, `arccosh(e^R)`.
pub fn sigma_r(r: f64) -> f64 {
    // arccosh(e^R) = R + ln(1 + sqrt(1 - e^-2R))
    r + (1.0 + (1.0 - (-2.0 * r).exp()).sqrt()).ln()
}

/// The reflection `(x, y, z) -> (-z, -y, -x)` that carries `P` onto `Q`.
pub fn mirror(p: &Vec3) -> Vec3 {
    Vec3::new(-p.z, -p.y, -p.x)
}

fn p_point(r: f64, s: f64) -> Vec3 {
    let u = s + sigma_r(r);
    Vec3::new(gd(u) - x_r(r), r - ln_cosh(u), 0.0)
}

fn p_tangent(r: f64, s: f64) -> Vec3 {
    let u = s + sigma_r(r);
    Vec3::new(1.0 / u.cosh(), -u.tanh(), 0.0)
}

/// Curvature of `P` at `s`; it equals `<T, e1>` there.
fn p_kappa(r: f64, s: f64) -> f64 {
    1.0 / (s + sigma_r(r)).cosh()
}

fn check_r(r: f64) -> Result<()> {
    if r > 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(CsfError::Parameter {
            name: "R",
            reason: format!("the splice needs R > 1, got {r}"),
        })
    }
}

/// Arclength parameter on the far (left) arm of `P + shift` at which the
/// distance to the origin equals `radius`.
fn far_arm_parameter(r: f64, shift: Vec3, radius: f64) -> f64 {
    let tip = -sigma_r(r);
    let f = |s: f64| (p_point(r, s) + shift).norm() - radius;
    let mut lo = tip - 1.0;
    while f(lo) < 0.0 {
        lo = tip - 2.0 * (tip - lo);
    }
    let mut hi = tip;
    if f(hi) > 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Default sampling extent of the reference half reapers: far past the
/// default flare radius.
fn default_extent(r: f64) -> f64 {
    4.0 * r + 4.0
}

/// Samples `P` at arclength spacing close to `h` from the point on its far
/// arm at distance `4R + 4` from the origin up to the junction.
pub fn build_half_reaper_p(r: f64, h: f64) -> Result<SpaceCurve> {
    build_half_reaper_p_to(r, h, default_extent(r))
}

/// As [`build_half_reaper_p`], out to distance `extent`.
pub fn build_half_reaper_p_to(r: f64, h: f64, extent: f64) -> Result<SpaceCurve> {
    check_r(r)?;
    if !(h > 0.0) {
        return Err(CsfError::Parameter {
            name: "h",
            reason: format!("must be positive, got {h}"),
        });
    }
    let s0 = far_arm_parameter(r, Vec3::zeros(), extent);
    let k = ((-s0) / h).ceil().max(3.0) as usize;
    let v = (0..=k).map(|i| p_point(r, s0 * (k - i) as f64 / k as f64)).collect();
    SpaceCurve::new(v, Topology::open_free())
}

pub fn build_half_reaper_q(r: f64, h: f64) -> Result<SpaceCurve> {
    build_half_reaper_q_to(r, h, default_extent(r))
}

pub fn build_half_reaper_q_to(r: f64, h: f64, extent: f64) -> Result<SpaceCurve> {
    let p = build_half_reaper_p_to(r, h, extent)?;
    let v = p.vertices().iter().rev().map(mirror).collect();
    SpaceCurve::new(v, Topology::open_free())
}

/// The three lines the unflared arms approach, all parallel to `e2`:
/// `{x = -pi/2 - x_R, z = 0}`, `{x = 0, z = 0}`, `{x = 0, z = pi/2 + x_R}`.
/// Each is returned as a point on it.
pub fn asymptote_lines(r: f64) -> [Vec3; 3] {
    let w = FRAC_PI_2 + x_r(r);
    [Vec3::new(-w, 0.0, 0.0), Vec3::zeros(), Vec3::new(0.0, 0.0, w)]
}

/// Distance between two lines parallel to `e2` through `a` and `b`.
pub fn parallel_line_distance(a: &Vec3, b: &Vec3) -> f64 {
    let d = a - b;
    (d.x * d.x + d.z * d.z).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaConfig {
    pub r: f64,
    pub r_bend: f64,
    /// Size of the junction bend, of order `e^-R`.
    pub beta: f64,
    /// Arclength width of the junction blend window.
    pub blend_window: f64,
    /// Rate `k` in the flare profile `tan psi(u) = tan psi_0 e^{-k u}`;
    /// the flare keeps `kappa / <T, e> = k sin psi <= k`.
    pub flare_rate: f64,
    /// Straight length kept after the flare has turned onto `e`.
    pub tail_length: f64,
    pub h: f64,
    /// Arclength from the junction to each end; `None` means flare end plus
    /// `tail_length`.
    pub domain_halflength: Option<f64>,
}

impl GammaConfig {
    pub fn new(r: f64) -> Self {
        Self {
            r,
            r_bend: 3.0 * r + 0.5,
            beta: (-r).exp(),
            blend_window: 2.0,
            flare_rate: SQRT_2,
            tail_length: 12.0,
            h: 0.05,
            domain_halflength: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(CsfError::Parameter { name, reason });
        check_r(self.r)?;
        if !(self.r_bend > 3.0 * self.r) {
            return bad(
                "R_bend",
                format!("must exceed 3R = {}, got {}", 3.0 * self.r, self.r_bend),
            );
        }
        if !(self.beta > 0.0) {
            return bad("beta", format!("must be positive, got {}", self.beta));
        }
        if !(self.blend_window > 0.0 && self.blend_window < self.r) {
            return bad("blend_window", format!("must lie in (0, R), got {}", self.blend_window));
        }
        if !(self.flare_rate > 0.0 && self.flare_rate <= 2.0) {
            return bad("flare_rate", format!("must lie in (0, 2], got {}", self.flare_rate));
        }
        if !(self.tail_length > 0.0) {
            return bad("tail_length", format!("must be positive, got {}", self.tail_length));
        }
        if !(self.h > 0.0 && self.h < 0.5) {
            return bad("h", format!("must lie in (0, 0.5), got {}", self.h));
        }
        Ok(())
    }
}

/// Ramp quality of a curve with respect to a unit direction `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampDiagnostics {
    pub direction: Vec3,
    pub min_dot: f64,
    pub max_ratio: f64,
}

/// Measurements taken while assembling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyReport {
    pub ramp: RampDiagnostics,
    /// Hausdorff distance to `P u Q` inside the ball of radius `R_bend`.
    pub hausdorff_to_pq: f64,
    /// Translation applied to the far part of `P` by the junction bend.
    pub p_shift: Vec3,
    /// Arclength parameter (negative) where the `P` flare starts.
    pub flare_start: f64,
    pub flare_length: f64,
    pub domain_halflength: f64,
    pub h: f64,
}

#[derive(Debug, Clone)]
pub struct AssembledGamma {
    pub curve: SpaceCurve,
    pub report: AssemblyReport,
}

/// The tangent angle is cut to exactly `e` once `tan psi` drops below this.
const FLARE_CUT: f64 = 1e-10;

struct Blend {
    r: f64,
    half: f64,
    beta: f64,
}

impl Blend {
    fn weights(&self, s: f64) -> (f64, f64) {
        let xi = ((s + self.half) / (2.0 * self.half)).clamp(0.0, 1.0);
        let w = xi * xi * xi * (10.0 - 15.0 * xi + 6.0 * xi * xi);
        let q = (s / self.half).clamp(-1.0, 1.0);
        let phi = (1.0 - q * q).powi(2);
        (w, phi)
    }

    /// Unit tangent on the window: `(a, -sqrt(1 - a^2 - b^2), b)` with `a`
    /// fading the `P` curvature out and `b` fading the `Q` curvature in, both
    /// lifted by the bump.
    fn tangent(&self, s: f64) -> Result<Vec3> {
        let (w, phi) = self.weights(s);
        let lift = self.beta * phi * FRAC_1_SQRT_2;
        let a = p_kappa(self.r, s) * (1.0 - w) + lift;
        let b = p_kappa(self.r, -s) * w + lift;
        let rest = 1.0 - a * a - b * b;
        if !(rest > 0.0) {
            return Err(CsfError::Construction(format!(
                "junction bend beta = {} tilts the tangent past horizontal",
                self.beta
            )));
        }
        Ok(Vec3::new(a, -rest.sqrt(), b))
    }

    /// `int_{s0}^{s1} T`, 5-point Gauss-Legendre on pieces no longer than 0.05.
    fn integrate(&self, s0: f64, s1: f64) -> Result<Vec3> {
        const X: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683,
            0.538_469_310_105_683,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const W: [f64; 5] = [
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
            0.236_926_885_056_189,
        ];
        let pieces = ((s1 - s0).abs() / 0.05).ceil().max(1.0) as usize;
        let step = (s1 - s0) / pieces as f64;
        let mut acc = Vec3::zeros();
        for k in 0..pieces {
            let mid = s0 + (k as f64 + 0.5) * step;
            for (x, w) in X.iter().zip(W) {
                acc += self.tangent(mid + 0.5 * step * x)? * (0.5 * step * w);
            }
        }
        Ok(acc)
    }
}

struct Flare {
    start: Vec3,
    e: Vec3,
    n: Vec3,
    a: f64,
    k: f64,
    cut: f64,
}

impl Flare {
    fn new(start: Vec3, t0: Vec3, k: f64) -> Self {
        let e = ramp_direction();
        let c = t0.dot(&e);
        let perp = t0 - e * c;
        let sin = perp.norm();
        let a = sin / c;
        let cut = if a > FLARE_CUT { (a / FLARE_CUT).ln() / k } else { 0.0 };
        Self {
            start,
            e,
            n: perp / sin,
            a,
            k,
            cut,
        }
    }

    /// Position at outward arclength `u` from the flare start, walking
    /// against the traversal tangent.
    fn point(&self, u: f64) -> Vec3 {
        let (k, a) = (self.k, self.a);
        let along = |u: f64| ((k * u).exp() / a).asinh() - (1.0 / a).asinh();
        let across = |u: f64| a.asinh() - (a * (-k * u).exp()).asinh();
        let uc = u.min(self.cut);
        let mut p = self.start - (self.e * along(uc) + self.n * across(uc)) / k;
        if u > self.cut {
            p -= self.e * (u - self.cut);
        }
        p
    }
}

/// Builds the flared, bent splice of `P` and `Q` and checks it against the
/// ramp, ratio and proximity requirements. `p` and `q` are the reference
/// half reapers used for the proximity measurement.
pub fn assemble_gamma(p: &SpaceCurve, q: &SpaceCurve, cfg: &GammaConfig) -> Result<AssembledGamma> {
    cfg.validate()?;
    let r = cfg.r;
    let blend = Blend {
        r,
        half: cfg.blend_window / 2.0,
        beta: cfg.beta,
    };
    let shift = blend.integrate(0.0, -blend.half)? - p_point(r, -blend.half);
    let s_flare = far_arm_parameter(r, shift, cfg.r_bend);
    let flare = Flare::new(p_point(r, s_flare) + shift, p_tangent(r, s_flare), cfg.flare_rate);

    let needed = -s_flare + flare.cut + cfg.tail_length;
    let halflength = match cfg.domain_halflength {
        None => needed,
        Some(l) if l >= needed => l,
        Some(l) => {
            return Err(CsfError::Parameter {
                name: "domain_halflength",
                reason: format!("{l} is shorter than the flare end plus tail, {needed}"),
            })
        }
    };
    let kmax = (halflength / cfg.h).round() as usize;
    let h = halflength / kmax as f64;

    // The s <= 0 half, from the junction outward.
    let mut half = Vec::with_capacity(kmax + 1);
    let mut acc = Vec3::zeros();
    let mut prev = 0.0;
    for k in 0..=kmax {
        let s = -(k as f64) * h;
        let x = if s >= -blend.half {
            acc += blend.integrate(prev, s)?;
            prev = s;
            acc
        } else if s >= s_flare {
            p_point(r, s) + shift
        } else {
            flare.point(s_flare - s)
        };
        half.push(x);
    }
    let mut v: Vec<Vec3> = half.iter().rev().copied().collect();
    v.extend(half[1..].iter().map(mirror));

    let e = ramp_direction();
    let topo = Topology::Open {
        start: EndCondition::Clamped { direction: e },
        end: EndCondition::Clamped { direction: e },
    };
    let curve = SpaceCurve::new(v, topo)?;

    let ramp = ramp_diagnostics(&curve, &e)?;
    let hd = hausdorff_to_union_in_ball(&curve, &[p, q], cfg.r_bend);
    let report = AssemblyReport {
        ramp,
        hausdorff_to_pq: hd,
        p_shift: shift,
        flare_start: s_flare,
        flare_length: flare.cut,
        domain_halflength: halflength,
        h,
    };
    let bound = 10.0 * (-r).exp();
    if !(ramp.min_dot > 0.0) {
        return Err(CsfError::Construction(format!(
            "ramp condition fails: min <T, e> = {:e}",
            ramp.min_dot
        )));
    }
    if !(ramp.max_ratio <= 2.0) {
        return Err(CsfError::Construction(format!(
            "curvature ratio bound fails: measured max kappa/<T, e> = {} > 2; decrease beta",
            ramp.max_ratio
        )));
    }
    if !(hd <= bound) {
        return Err(CsfError::Construction(format!(
            "Hausdorff distance to P u Q inside R_bend is {hd:e} > 10 e^-R = {bound:e}"
        )));
    }
    Ok(AssembledGamma { curve, report })
}

/// Convenience: reference reapers sampled at the config's `h`, then
/// [`assemble_gamma`].
pub fn build_gamma(cfg: &GammaConfig) -> Result<AssembledGamma> {
    cfg.validate()?;
    let extent = cfg.r_bend + 1.0;
    let p = build_half_reaper_p_to(cfg.r, cfg.h, extent)?;
    let q = build_half_reaper_q_to(cfg.r, cfg.h, extent)?;
    assemble_gamma(&p, &q, cfg)
}

fn distance_to_polyline(x: &Vec3, c: &SpaceCurve) -> f64 {
    c.edges()
        .map(|(a, b)| point_segment_distance(x, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Two-sided Hausdorff distance between the vertices of `a` and of the
/// reference curves, both restricted to the closed ball of `radius`.
fn hausdorff_to_union_in_ball(a: &SpaceCurve, refs: &[&SpaceCurve], radius: f64) -> f64 {
    let inside = |p: &&Vec3| p.norm() <= radius;
    let forward = a
        .vertices()
        .iter()
        .filter(inside)
        .map(|x| {
            refs.iter()
                .map(|c| distance_to_polyline(x, c))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let backward = refs
        .iter()
        .flat_map(|c| c.vertices().iter())
        .filter(inside)
        .map(|x| distance_to_polyline(x, a))
        .fold(0.0, f64::max);
    forward.max(backward)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierVariant {
    /// Two cylinders threaded through the lobes plus four walls forming the
    /// two orthogonal slabs around the middle line.
    Corner,
    /// Four cylinders centred half way up the lobes, forming a slab around
    /// each lobe's plane.
    Tip,
}

impl BarrierVariant {
    pub fn label(&self) -> &'static str {
        match self {
            BarrierVariant::Corner => "corner",
            BarrierVariant::Tip => "tip",
        }
    }
}

/// Offsets of the barrier poses, in units of `e^-R` where noted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierLayout {
    /// Gap (units of `e^-R`) between a threaded cylinder and the middle line.
    pub thread_gap: f64,
    /// How far (absolute) the threaded cylinders sit below the lobe tips.
    pub thread_drop: f64,
    /// Gap (units of `e^-R`) between the outer walls and the middle line.
    pub wall_gap: f64,
    /// Gap (units of `e^-R`) of the tip-variant cylinders.
    pub tip_gap: f64,
}

impl Default for BarrierLayout {
    fn default() -> Self {
        Self {
            thread_gap: 0.4,
            thread_drop: 0.5,
            wall_gap: 1.5,
            tip_gap: 0.75,
        }
    }
}

fn axis_z(center: Vec3, r: f64) -> BarrierCylinder {
    BarrierCylinder::new(
        Pose::from_parts(Translation3::from(center), UnitQuaternion::identity()),
        -r,
    )
}

fn axis_x(center: Vec3, r: f64) -> BarrierCylinder {
    // barrier z -> world -x, barrier x -> world z
    let rot = UnitQuaternion::from_axis_angle(&Vec3::y_axis(), -FRAC_PI_2);
    BarrierCylinder::new(Pose::from_parts(Translation3::from(center), rot), -r)
}

/// Barrier poses for `Gamma_R`, all with time offset `-R`. Cylinders come in
/// pairs exchanged by [`mirror`].
pub fn place_barriers(r: f64, variant: BarrierVariant, layout: &BarrierLayout) -> Result<Vec<BarrierCylinder>> {
    check_r(r)?;
    let eps = (-r).exp();
    let xr = x_r(r);
    let pair = |c: Vec3| [axis_z(c, r), axis_x(mirror(&c), r)];
    let mut out = Vec::new();
    match variant {
        BarrierVariant::Corner => {
            let g = layout.thread_gap * eps;
            let gw = layout.wall_gap * eps;
            out.extend(pair(Vec3::new(-xr - g, -LN_2 - layout.thread_drop, 0.0)));
            out.extend(pair(Vec3::new(xr + gw, 0.0, 0.0)));
            out.extend(pair(Vec3::new(-FRAC_PI_2 - 2.0 * xr - gw, 0.0, 0.0)));
        }
        BarrierVariant::Tip => {
            let g = layout.tip_gap * eps;
            out.extend(pair(Vec3::new(xr + g, -r / 2.0, 0.0)));
            out.extend(pair(Vec3::new(-xr - g, -r / 2.0, 0.0)));
        }
    }
    Ok(out)
}

/// Minimum signed clearance of the curve's vertices from each barrier at
/// time `t`. Signed distance is 1-Lipschitz, so a vertex is skipped when the
/// last exact value minus the path length walked since, or its distance to
/// the oval's bounding box, already rules it out.
pub fn barrier_clearances(curve: &SpaceCurve, barriers: &[BarrierCylinder], t: f64) -> Result<Vec<f64>> {
    barriers
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let tau = b.clock(t);
            if tau >= 0.0 {
                return Err(CsfError::ExpiredBarrier {
                    index: i,
                    time: t,
                    clock: tau,
                });
            }
            let (w, yh) = (crate::exact::oval_halfwidth(tau), crate::exact::oval_halfheight(tau));
            // a strided pass first, so the pruning below has a tight bound
            let mut best = f64::INFINITY;
            for p in curve.vertices().iter().step_by(32) {
                best = best.min(cylinder_clearance(p, b, t)?);
            }
            let mut anchor = f64::NEG_INFINITY;
            let mut prev: Option<&Vec3> = None;
            for p in curve.vertices() {
                if let Some(q) = prev {
                    anchor -= (p - q).norm();
                }
                prev = Some(p);
                if anchor >= best {
                    continue;
                }
                let q = b.pose.inverse_transform_point(&nalgebra::Point3::from(*p));
                let dx = (q.x.abs() - w).max(0.0);
                let dy = (q.y.abs() - yh).max(0.0);
                if (dx * dx + dy * dy).sqrt() >= best {
                    continue;
                }
                anchor = cylinder_clearance(p, b, t)?;
                best = best.min(anchor);
            }
            Ok(best)
        })
        .collect()
}

/// Rejects a layout unless every barrier starts strictly clear of the curve.
pub fn check_initial_clearance(curve: &SpaceCurve, barriers: &[BarrierCylinder]) -> Result<Vec<f64>> {
    let c = barrier_clearances(curve, barriers, 0.0)?;
    let bad: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, d)| !(**d > 0.0))
        .map(|(i, d)| format!("#{i} ({d:e})"))
        .collect();
    if bad.is_empty() {
        Ok(c)
    } else {
        Err(CsfError::Construction(format!(
            "barriers with nonpositive initial clearance: {}",
            bad.join(", ")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{compute_frenet, hausdorff_distance};
    use crate::exact::slab_distance;
    use std::f64::consts::PI;

    #[test]
    fn x_r_values() {
        assert!((x_r(5.0) - 1.56406).abs() < 1e-5);
        assert!((x_r(5.0) - (-5.0f64).exp().acos()).abs() < 1e-15);
        assert!((FRAC_PI_2 - x_r(40.0)) < 1e-17 + (-40.0f64).exp() * 1.01);
        assert!(((sigma_r(3.0)).cosh() - 3.0f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn p_geometry() {
        for r in [2.0, 5.0] {
            let p = build_half_reaper_p(r, 0.05).unwrap();
            let v = p.vertices();
            assert!(v.last().unwrap().norm() < 1e-9);
            for q in v {
                assert_eq!(q.z, 0.0);
                assert!(q.x <= 1e-12);
                // on the translated graph cos(x + x_R) = e^{y - R}
                assert!(((q.x + x_r(r)).cos() - (q.y - r).exp()).abs() < 1e-13);
            }
            // far end near the asymptote x = -pi/2 - x_R
            let far = v[0];
            // distance to the asymptote decays like 2 e^-|u|, |u| ~ |y| + R
            let gap = far.x + FRAC_PI_2 + x_r(r);
            assert!(gap > 0.0 && gap < 4.0 * (-(r - far.y)).exp(), "{gap}");
            // tangent at the junction differs from -e2 by about e^-R
            let n = v.len();
            let t = (v[n - 1] - v[n - 2]).normalize();
            let dev = (t + Vec3::y()).norm();
            assert!(dev > 0.5 * (-r).exp() && dev < 2.0 * (-r).exp(), "{dev}");
        }
        assert!(build_half_reaper_p(1.0, 0.05).is_err());
    }

    #[test]
    fn q_geometry() {
        let r = 5.0;
        let q = build_half_reaper_q(r, 0.05).unwrap();
        let v = q.vertices();
        assert!(v[0].norm() < 1e-9);
        for p in v {
            assert!(p.x.abs() < 1e-12);
            assert!(p.z >= -1e-12);
            assert!(p.y >= -r - 1e-12);
        }
        let far = v.last().unwrap();
        assert!((far.z - (FRAC_PI_2 + x_r(r))).abs() < 1e-6);
    }

    #[test]
    fn ramp_on_unmodified_pieces() {
        // <T, e> = (sqrt2/2) kappa on P and on Q
        let r = 4.0;
        let e = ramp_direction();
        for c in [
            build_half_reaper_p(r, 0.02).unwrap(),
            build_half_reaper_q(r, 0.02).unwrap(),
        ] {
            let f = compute_frenet(&c).unwrap();
            for i in 5..c.len() - 5 {
                let want = FRAC_1_SQRT_2 * f.kappa[i];
                assert!((f.tangent[i].dot(&e) - want).abs() < 1e-4 * (1.0 + want));
                assert!(f.tangent[i].dot(&e) > 0.0);
            }
        }
    }

    #[test]
    fn asymptote_triple() {
        for r in [2.0, 4.0, 8.0, 30.0] {
            let [a, b, c] = asymptote_lines(r);
            let w = FRAC_PI_2 + x_r(r);
            assert!((parallel_line_distance(&a, &b) - w).abs() < 1e-15);
            assert!((parallel_line_distance(&b, &c) - w).abs() < 1e-15);
            assert!((parallel_line_distance(&a, &c) - SQRT_2 * w).abs() < 1e-14);
            assert!(SQRT_2 * w < SQRT_2 * PI);
        }
    }

    #[test]
    fn assembled_gamma_meets_contract() {
        for r in [4.0, 5.0, 6.0] {
            let cfg = GammaConfig::new(r);
            let g = build_gamma(&cfg).unwrap();
            let rep = g.report;
            assert!(rep.ramp.min_dot > 0.0);
            assert!(rep.ramp.max_ratio <= 2.0, "{}", rep.ramp.max_ratio);
            assert!(rep.hausdorff_to_pq <= 10.0 * (-r).exp());
            let v = g.curve.vertices();
            let e = ramp_direction();
            let n = v.len();
            assert!(((v[1] - v[0]).normalize() - e).norm() < 1e-9);
            assert!(((v[n - 1] - v[n - 2]).normalize() - e).norm() < 1e-9);
            // symmetric under the mirror
            for i in 0..n {
                assert!((mirror(&v[i]) - v[n - 1 - i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gamma_is_ramp_for_quarter_directions() {
        let g = build_gamma(&GammaConfig::new(5.0)).unwrap();
        let f = compute_frenet(&g.curve).unwrap();
        for k in 0..=16 {
            let a = (k as f64 / 16.0 * FRAC_PI_2).cos();
            let b = (k as f64 / 16.0 * FRAC_PI_2).sin();
            let v = Vec3::new(a, 0.0, b);
            let min = f.tangent.iter().map(|t| t.dot(&v)).fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-12, "direction {v:?}: {min}");
        }
    }

    #[test]
    fn big_bend_is_rejected() {
        let cfg = GammaConfig {
            beta: 1.0,
            ..GammaConfig::new(5.0)
        };
        assert!(matches!(build_gamma(&cfg), Err(CsfError::Construction(_))));
        let cfg = GammaConfig {
            r_bend: 15.0,
            ..GammaConfig::new(5.0)
        };
        assert!(build_gamma(&cfg).is_err());
    }

    #[test]
    fn inside_r_bend_close_to_reapers() {
        let cfg = GammaConfig::new(5.0);
        let g = build_gamma(&cfg).unwrap();
        let p = build_half_reaper_p_to(5.0, 0.05, cfg.r_bend).unwrap();
        let inside: Vec<Vec3> = g
            .curve
            .vertices()
            .iter()
            .copied()
            .filter(|x| x.norm() < cfg.r_bend && x.z <= 0.0 && x.x <= 0.0)
            .collect();
        let piece = SpaceCurve::from_parts(inside, Topology::open_free()).unwrap();
        assert!(hausdorff_distance(&piece, &p) < 10.0 * (-5.0f64).exp());
    }

    #[test]
    fn barrier_slab_width() {
        for r in [3.0, 5.0, 8.0] {
            let d = slab_distance(-r).unwrap();
            let width = PI + 2.0 * d;
            assert!(width < PI + 4.0 * (-r).exp());
            // an oval at -R fits in |x| < pi/2 with gap d
            assert!((crate::exact::oval_halfwidth(-r) + d - FRAC_PI_2).abs() < 1e-15);
        }
        // corner-slab bound at time t
        for t in [0.0, 1.0, 2.0] {
            let eps = 2.0 * (-(5.0 - t) / 2.0f64).exp();
            assert!(eps < 1.0);
        }
    }

    #[test]
    fn barriers_start_clear() {
        for r in [4.0, 5.0, 6.0] {
            let g = build_gamma(&GammaConfig::new(r)).unwrap();
            for variant in [BarrierVariant::Corner, BarrierVariant::Tip] {
                let b = place_barriers(r, variant, &BarrierLayout::default()).unwrap();
                let c = check_initial_clearance(&g.curve, &b).unwrap_or_else(|e| panic!("R = {r}, {variant:?}: {e}"));
                assert!(c.iter().all(|d| *d > 0.0));
                // mirror pairs see the same clearance
                for k in (0..b.len()).step_by(2) {
                    assert!((c[k] - c[k + 1]).abs() < 1e-9 * (1.0 + c[k].abs()), "{c:?}");
                }
            }
        }
    }

    #[test]
    fn overlapping_barrier_is_rejected() {
        let g = build_gamma(&GammaConfig::new(4.0)).unwrap();
        let b = vec![axis_z(Vec3::new(0.0, 0.0, 0.0), 4.0)];
        let err = check_initial_clearance(&g.curve, &b).unwrap_err();
        assert!(err.to_string().contains("#0"));
    }
}
