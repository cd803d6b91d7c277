mod common;

use std::f64::consts::{FRAC_PI_2, TAU};

use csf_core::curve::{hausdorff_distance, nonplanarity};
use csf_core::exact::{oval_halfwidth, sample_angenent_oval, slab_distance};
use csf_core::flow::{flow_step, stability_dt, FlowState, StepControl};
use csf_core::monitors::small_angle_check;
use csf_core::{SpaceCurve, Topology, Vec3};
use nalgebra::{Isometry3, Point3, Translation3, UnitQuaternion};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn points(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec3>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0), n)
        .prop_map(|v| v.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect())
}

/// A wobbly closed loop: radius `1 + sum a_k cos(k th + p_k)` plus a small
/// out-of-plane wave, so it never self-intersects.
fn loop_curve(n: usize, a: &[f64], z: f64) -> SpaceCurve {
    let v = (0..n)
        .map(|i| {
            let th = TAU * i as f64 / n as f64;
            let r = 1.0
                + a.iter()
                    .enumerate()
                    .map(|(k, c)| c * ((k + 2) as f64 * th).cos())
                    .sum::<f64>();
            Vec3::new(r * th.cos(), r * th.sin(), z * (3.0 * th).sin())
        })
        .collect();
    SpaceCurve::new(v, Topology::Closed).unwrap()
}

fn rigid() -> impl Strategy<Value = Isometry3<f64>> {
    (
        -5.0f64..5.0,
        -5.0f64..5.0,
        -5.0f64..5.0,
        -3.0f64..3.0,
        -1.5f64..1.5,
        -3.0f64..3.0,
    )
        .prop_map(|(x, y, z, r, p, w)| {
            Isometry3::from_parts(Translation3::new(x, y, z), UnitQuaternion::from_euler_angles(r, p, w))
        })
}

fn moved(c: &SpaceCurve, m: &Isometry3<f64>) -> SpaceCurve {
    let v = c
        .vertices()
        .iter()
        .map(|p| m.transform_point(&Point3::from(*p)).coords)
        .collect();
    SpaceCurve::new(v, c.topology()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nonplanarity_ignores_rigid_motion(a in prop::collection::vec(-0.2f64..0.2, 3), z in 0.0f64..0.5, m in rigid()) {
        let c = loop_curve(120, &a, z);
        prop_assert!((nonplanarity(&c) - nonplanarity(&moved(&c, &m))).abs() < 1e-9);
    }

    #[test]
    fn hausdorff_is_a_metric(p in points(4..12), q in points(4..12), r in points(4..12)) {
        let mk = |v: Vec<Vec3>| SpaceCurve::new(v, Topology::open_free());
        let (Ok(a), Ok(b), Ok(c)) = (mk(p), mk(q), mk(r)) else { return Ok(()) };
        let ab = hausdorff_distance(&a, &b);
        prop_assert!((ab - hausdorff_distance(&b, &a)).abs() < 1e-9);
        prop_assert!(ab <= hausdorff_distance(&a, &c) + hausdorff_distance(&c, &b) + 1e-9);
        prop_assert!(hausdorff_distance(&a, &a) < 1e-9);
    }

    #[test]
    fn resampling_is_idempotent(a in prop::collection::vec(-0.2f64..0.2, 3), z in 0.0f64..0.5, n in 20usize..300) {
        let c = loop_curve(97, &a, z);
        let once = c.resample_by_arclength(n).unwrap();
        let twice = once.resample_by_arclength(n).unwrap();
        for (p, q) in once.vertices().iter().zip(twice.vertices()) {
            prop_assert!((p - q).norm() < 1e-9);
        }
    }

    #[test]
    fn closed_length_decreases(a in prop::collection::vec(-0.15f64..0.15, 3), z in 0.0f64..0.3) {
        let c = loop_curve(150, &a, z);
        let ctrl = StepControl { dt_max: 1.0, c_cfl: 0.5, resample_every: 0, h: c.length() / 150.0 };
        let mut s = FlowState::new(c, 0.0);
        let mut len = s.curve.length();
        for _ in 0..200 {
            let dt = stability_dt(&s, &ctrl);
            s = flow_step(&s, dt, &ctrl).unwrap();
            let l = s.curve.length();
            prop_assert!(l < len);
            len = l;
        }
    }

    #[test]
    fn oval_is_convex_and_inside_its_slab(t in -6.0f64..-0.05) {
        let c = sample_angenent_oval(t, 240).unwrap();
        let x = c.vertices();
        let n = x.len();
        let turn: Vec<f64> = (0..n)
            .map(|i| {
                let a = x[i] - x[(i + n - 1) % n];
                let b = x[(i + 1) % n] - x[i];
                a.x * b.y - a.y * b.x
            })
            .collect();
        prop_assert!(turn.iter().all(|s| *s > 0.0) || turn.iter().all(|s| *s < 0.0));
        prop_assert!(slab_distance(t).unwrap() < 2.0 * t.exp());
        prop_assert!(oval_halfwidth(t - 0.1) > oval_halfwidth(t));
        prop_assert!(oval_halfwidth(t) < FRAC_PI_2);
    }

    #[test]
    fn small_angle_holds_on_admissible_curves(seed in any::<u64>(), wide in any::<bool>()) {
        let eps = if wide { 0.04 } else { 0.01 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (worst, _) = common::small_angle_worst(&mut rng, eps, 5);
        prop_assert!(worst < 3.0 * eps.sqrt());
    }
}

#[test]
fn small_angle_check_agrees_with_the_generator() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c = common::wiggle(&mut rng, 0.04);
    assert!(small_angle_check(&c, 0.04, &Vec3::x()).unwrap());
}

/// Nonplanarity of a helix against a plane found by brute force over a grid
/// of normals, minimizing the sum of squared distances.
#[test]
fn helix_nonplanarity_matches_grid_search() {
    for (turns, pitch) in [(0.5, 0.3), (1.0, 0.2), (1.7, 0.05)] {
        let n = 400;
        let v: Vec<Vec3> = (0..n)
            .map(|i| {
                let s = TAU * turns * i as f64 / (n - 1) as f64;
                Vec3::new(s.cos(), s.sin(), pitch * s)
            })
            .collect();
        let c = SpaceCurve::new(v.clone(), Topology::open_free()).unwrap();
        let centroid = v.iter().sum::<Vec3>() / n as f64;
        let cost = |nrm: &Vec3| v.iter().map(|p| (p - centroid).dot(nrm).powi(2)).sum::<f64>();
        let dir = |th: f64, ph: f64| Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
        let (mut best, mut th0, mut ph0, mut span) = (f64::INFINITY, 0.0, 0.0, std::f64::consts::PI);
        for _ in 0..10 {
            let (mut bt, mut bp) = (th0, ph0);
            for i in 0..=40 {
                for j in 0..=40 {
                    let th = th0 + span * (i as f64 / 40.0 - 0.5);
                    let ph = ph0 + 2.0 * span * (j as f64 / 40.0 - 0.5);
                    let f = cost(&dir(th, ph));
                    if f < best {
                        (best, bt, bp) = (f, th, ph);
                    }
                }
            }
            (th0, ph0, span) = (bt, bp, span / 8.0);
        }
        let nrm = dir(th0, ph0);
        let oracle = v.iter().map(|p| (p - centroid).dot(&nrm).abs()).fold(0.0, f64::max);
        let got = nonplanarity(&c);
        assert!((got - oracle).abs() < 1e-8, "turns {turns}: {got} vs {oracle}");
    }
}
