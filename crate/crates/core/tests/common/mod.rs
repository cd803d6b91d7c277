#![allow(dead_code)]

use csf_core::monitors::small_angle_max;
use csf_core::{SpaceCurve, Topology, Vec3};
use rand::Rng;

/// A random curve running along e2 whose e1 and e3 offsets are short sums of
/// sine modes. Amplitudes are drawn up to half the slab width and the mode
/// frequencies up to where curvature reaches about 1, so a fair share of
/// draws breaks a precondition and is rejected by the caller.
pub fn wiggle(rng: &mut impl Rng, eps: f64) -> SpaceCurve {
    let len = rng.gen_range(2.0..10.0);
    let n = (len / 0.01) as usize;
    let wmax = (2.0 / eps).sqrt();
    let modes = |rng: &mut dyn rand::RngCore| {
        let k = rng.gen_range(1..=3);
        (0..k)
            .map(|_| {
                (
                    rng.gen_range(0.0..eps / (2.0 * k as f64)),
                    rng.gen_range(0.0..wmax),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect::<Vec<_>>()
    };
    let mx = modes(rng);
    let mz = modes(rng);
    let eval = |m: &[(f64, f64, f64)], y: f64| m.iter().map(|(a, w, p)| a * (w * y + p).sin()).sum::<f64>();
    let v = (0..=n)
        .map(|i| {
            let y = len * i as f64 / n as f64;
            Vec3::new(eval(&mx, y), y, eval(&mz, y))
        })
        .collect();
    SpaceCurve::new(v, Topology::open_free()).unwrap()
}

pub fn unit_in_e1e3(rng: &mut impl Rng) -> Vec3 {
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    Vec3::new(a.cos(), 0.0, a.sin())
}

/// Draws admissible curves until `count` have been accepted; returns the
/// worst measured `|<T, v>|` and the number of rejected draws.
pub fn small_angle_worst(rng: &mut impl Rng, eps: f64, count: usize) -> (f64, usize) {
    let (mut worst, mut accepted, mut rejected) = (0.0f64, 0, 0);
    while accepted < count {
        let c = wiggle(rng, eps);
        let v = unit_in_e1e3(rng);
        match small_angle_max(&c, eps, &v) {
            Ok(m) => {
                worst = worst.max(m);
                accepted += 1;
            }
            Err(_) => rejected += 1,
        }
    }
    (worst, rejected)
}
