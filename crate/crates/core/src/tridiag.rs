//! Tridiagonal solves with vector right-hand sides.
//!
//! Row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
//! In the cyclic variant `lower[0]` couples to `x[n-1]` and `upper[n-1]` to
//! `x[0]`.

use crate::error::{CsfError, Result};
use crate::geom::Vec3;

fn singular(i: usize) -> CsfError {
    CsfError::Degenerate(format!("tridiagonal pivot {i} vanished"))
}

/// Thomas algorithm. `lower[0]` and `upper[n-1]` are ignored.
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[Vec3]) -> Result<Vec<Vec3>> {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![Vec3::zeros(); n];
    let mut m = diag[0];
    if m == 0.0 {
        return Err(singular(0));
    }
    c[0] = upper[0] / m;
    d[0] = rhs[0] / m;
    for i in 1..n {
        m = diag[i] - lower[i] * c[i - 1];
        if m == 0.0 || !m.is_finite() {
            return Err(singular(i));
        }
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - d[i - 1] * lower[i]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] = d[i] - d[i + 1] * c[i];
    }
    Ok(d)
}

/// Cyclic tridiagonal solve via Sherman-Morrison on top of [`solve`].
pub fn solve_cyclic(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[Vec3]) -> Result<Vec<Vec3>> {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n < 3 {
        return Err(CsfError::Precondition(format!("cyclic system needs n >= 3, got {n}")));
    }
    let alpha = upper[n - 1];
    let beta = lower[0];
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;

    let x = solve(lower, &bb, upper, rhs)?;
    let mut u = vec![Vec3::zeros(); n];
    u[0] = Vec3::repeat(gamma);
    u[n - 1] = Vec3::repeat(alpha);
    let z = solve(lower, &bb, upper, &u)?;

    // All three components share the matrix, so the correction factor is a
    // per-component ratio.
    let mut out = x;
    for k in 0..3 {
        let denom = 1.0 + z[0][k] + beta * z[n - 1][k] / gamma;
        if denom == 0.0 {
            return Err(singular(n));
        }
        let fact = (out[0][k] + beta * out[n - 1][k] / gamma) / denom;
        for i in 0..n {
            out[i][k] -= fact * z[i][k];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn apply(lower: &[f64], diag: &[f64], upper: &[f64], x: &[Vec3], cyclic: bool) -> Vec<Vec3> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut r = x[i] * diag[i];
                if i > 0 {
                    r += x[i - 1] * lower[i];
                } else if cyclic {
                    r += x[n - 1] * lower[0];
                }
                if i + 1 < n {
                    r += x[i + 1] * upper[i];
                } else if cyclic {
                    r += x[0] * upper[n - 1];
                }
                r
            })
            .collect()
    }

    fn system(n: usize, seed: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<Vec3>) {
        let at = |k: usize| seed[k % seed.len()];
        let lower: Vec<f64> = (0..n).map(|i| -0.3 - 0.5 * at(i).abs()).collect();
        let upper: Vec<f64> = (0..n).map(|i| -0.2 - 0.5 * at(i + 7).abs()).collect();
        let diag: Vec<f64> = (0..n).map(|i| 1.0 + lower[i].abs() + upper[i].abs()).collect();
        let x: Vec<Vec3> = (0..n)
            .map(|i| Vec3::new(at(i + 1), at(i + 2) * 10.0, -at(i + 3)))
            .collect();
        (lower, diag, upper, x)
    }

    proptest! {
        #[test]
        fn thomas_inverts(n in 1usize..60, seed in prop::collection::vec(-1.0f64..1.0, 8)) {
            let (l, d, u, x) = system(n, &seed);
            let b = apply(&l, &d, &u, &x, false);
            let y = solve(&l, &d, &u, &b).unwrap();
            for (a, b) in x.iter().zip(&y) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn cyclic_inverts(n in 3usize..60, seed in prop::collection::vec(-1.0f64..1.0, 8)) {
            let (l, d, u, x) = system(n, &seed);
            let b = apply(&l, &d, &u, &x, true);
            let y = solve_cyclic(&l, &d, &u, &b).unwrap();
            for (a, b) in x.iter().zip(&y) {
                prop_assert!((a - b).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn singular_is_reported() {
        let z = vec![0.0; 3];
        let rhs = vec![Vec3::zeros(); 3];
        assert!(solve(&z, &z, &z, &rhs).is_err());
    }
}
