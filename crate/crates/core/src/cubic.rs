//! Scalar cubic solvers for the pointwise nonlinear resolvents, plus a small
//! damped Newton fallback for the 2x2 pointwise systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl CubicCoeffs {
    pub fn eval(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }

    fn eval_deriv(&self, x: f64) -> f64 {
        (3.0 * self.c3 * x + 2.0 * self.c2) * x + self.c1
    }
}

/// Unique real root of the strictly increasing cubic `c3 x^3 + c1 x = r`
/// with `c3, c1 > 0`. Cardano's depressed-cubic formula plus one Newton
/// polish step.
pub fn solve_increasing_cubic(c3: f64, c1: f64, r: f64) -> Result<f64> {
    if !(c3 > 0.0) || !(c1 > 0.0) {
        return Err(Error::Argument(format!(
            "increasing cubic requires c3 > 0 and c1 > 0, got c3 = {c3}, c1 = {c1}"
        )));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    // x^3 + p x = q with p > 0: single real root, discriminant positive.
    let p = c1 / c3;
    let q = r / c3;
    let half_q = q.abs() / 2.0;
    let disc = (half_q * half_q + (p / 3.0).powi(3)).sqrt();
    let u = (half_q + disc).cbrt();
    // v = cbrt(half_q - disc) = -p/(3u); the product form avoids cancellation.
    let mut x = q.signum() * (u - p / (3.0 * u));
    // One Newton step removes the remaining roundoff.
    let f = c3 * x * x * x + c1 * x - r;
    let df = 3.0 * c3 * x * x + c1;
    x -= f / df;
    Ok(x)
}

/// All real roots of a general cubic, ascending, multiplicities collapsed.
///
/// Cardano with the trigonometric branch for three real roots; every root is
/// polished by one Newton step and roots closer than 1e-9 are merged.
pub fn real_roots_cubic(c: CubicCoeffs) -> Result<Vec<f64>> {
    let max_coeff = c.c3.abs().max(c.c2.abs()).max(c.c1.abs()).max(c.c0.abs());
    if !max_coeff.is_finite() {
        return Err(Error::Argument("non-finite cubic coefficients".into()));
    }
    if c.c3 == 0.0 || c.c3.abs() < 1e-14 * max_coeff {
        return Err(Error::Argument(format!(
            "leading coefficient {} too small relative to {max_coeff}; reduce the degree",
            c.c3
        )));
    }
    // Normalize to x^3 + a x^2 + b x + d, then depress with x = t - a/3.
    let a = c.c2 / c.c3;
    let b = c.c1 / c.c3;
    let d = c.c0 / c.c3;
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;

    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let mut roots: Vec<f64> = if disc > 0.0 {
        // One real root.
        let s = disc.sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        vec![u + v - shift]
    } else if p == 0.0 && q == 0.0 {
        vec![-shift]
    } else {
        // Casus irreducibilis: three real roots via the trigonometric form.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        (0..3)
            .map(|k| m * (theta - k as f64 * tau).cos() - shift)
            .collect()
    };

    for x in &mut roots {
        // Newton converges only linearly at (near-)double roots, so allow a
        // few polish steps; keep a step only if it reduces the residual.
        for _ in 0..4 {
            let df = c.eval_deriv(*x);
            if df == 0.0 {
                break;
            }
            let polished = *x - c.eval(*x) / df;
            if c.eval(polished).abs() < c.eval(*x).abs() {
                *x = polished;
            } else {
                break;
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(roots)
}

/// Damped Newton iteration for a 2x2 system. `eval` returns the residual and
/// its Jacobian at the current iterate; convergence is residual max-norm
/// below `tol`.
pub fn newton_2x2<E>(eval: E, guess: [f64; 2], tol: f64, max_iter: usize) -> Result<[f64; 2]>
where
    E: Fn([f64; 2]) -> ([f64; 2], [[f64; 2]; 2]),
{
    let mut v = guess;
    let (mut res, mut jac) = eval(v);
    let mut res_norm = res[0].abs().max(res[1].abs());
    if !res_norm.is_finite() {
        return Err(Error::Argument("non-finite residual at initial guess".into()));
    }
    for _ in 0..max_iter {
        if res_norm <= tol {
            return Ok(v);
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NoConvergence {
                iters: max_iter,
                residual: res_norm,
            });
        }
        let dx = (jac[1][1] * res[0] - jac[0][1] * res[1]) / det;
        let dy = (jac[0][0] * res[1] - jac[1][0] * res[0]) / det;
        // Backtrack until the residual actually decreases.
        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = [v[0] - damping * dx, v[1] - damping * dy];
            let (r, j) = eval(trial);
            let rn = r[0].abs().max(r[1].abs());
            if rn.is_finite() && rn < res_norm {
                v = trial;
                res = r;
                jac = j;
                res_norm = rn;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res_norm <= tol {
        Ok(v)
    } else {
        Err(Error::NoConvergence {
            iters: max_iter,
            residual: res_norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn increasing_cubic_spot_values() {
        assert_eq!(solve_increasing_cubic(1.0, 0.5, 0.0).unwrap(), 0.0);
        let x = solve_increasing_cubic(1.0, 0.5, 1.5).unwrap();
        assert!((x - 1.0).abs() < 1e-12);
        let x = solve_increasing_cubic(0.5, 1.0, -1.5).unwrap();
        assert!((x + 1.0).abs() < 1e-12);
    }

    #[test]
    fn increasing_cubic_rejects_bad_coefficients() {
        assert!(solve_increasing_cubic(0.0, 1.0, 1.0).is_err());
        assert!(solve_increasing_cubic(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn general_cubic_spot_values() {
        // x^3 - x: roots -1, 0, 1
        let r = real_roots_cubic(CubicCoeffs { c3: 1.0, c2: 0.0, c1: -1.0, c0: 0.0 }).unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[0] + 1.0).abs() < 1e-12 && r[1].abs() < 1e-12 && (r[2] - 1.0).abs() < 1e-12);
        // x^3 + x: single real root 0
        let r = real_roots_cubic(CubicCoeffs { c3: 1.0, c2: 0.0, c1: 1.0, c0: 0.0 }).unwrap();
        assert_eq!(r, vec![0.0]);
        // (x-2)^2 (x+1) = x^3 - 3x^2 + 4: double root collapses
        let r = real_roots_cubic(CubicCoeffs { c3: 1.0, c2: -3.0, c1: 0.0, c0: 4.0 }).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] + 1.0).abs() < 1e-7 && (r[1] - 2.0).abs() < 1e-4);
        let c = CubicCoeffs { c3: 1.0, c2: -3.0, c1: 0.0, c0: 4.0 };
        for x in &r {
            assert!(c.eval(*x).abs() < 1e-10 * 4.0);
        }
    }

    #[test]
    fn general_cubic_refuses_tiny_leading_coefficient() {
        let c = CubicCoeffs { c3: 1e-20, c2: 1.0, c1: 0.0, c0: -1.0 };
        assert!(real_roots_cubic(c).is_err());
        let c = CubicCoeffs { c3: 0.0, c2: 1.0, c1: 0.0, c0: -1.0 };
        assert!(real_roots_cubic(c).is_err());
    }

    #[test]
    fn newton_affine_converges_in_one_step() {
        let v = newton_2x2(
            |[x, y]| ([x - 1.0, y - 2.0], [[1.0, 0.0], [0.0, 1.0]]),
            [0.0, 0.0],
            1e-14,
            5,
        )
        .unwrap();
        assert_eq!(v, [1.0, 2.0]);
    }

    #[test]
    fn newton_reports_nonconvergence() {
        // Residual bounded away from zero.
        let r = newton_2x2(
            |[x, y]| ([x * 0.0 + 1.0, y * 0.0 + 1.0], [[0.0, 0.0], [0.0, 0.0]]),
            [0.0, 0.0],
            1e-12,
            10,
        );
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }

    proptest! {
        #[test]
        fn increasing_cubic_residual_bound(
            c3 in 1e-6f64..10.0,
            c1 in 1e-6f64..10.0,
            r in -10.0f64..10.0,
        ) {
            let x = solve_increasing_cubic(c3, c1, r).unwrap();
            let resid = (c3 * x * x * x + c1 * x - r).abs();
            prop_assert!(resid <= 1e-12 * r.abs().max(1.0));
        }

        #[test]
        fn general_cubic_residuals(
            c3 in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0],
            c2 in -10.0f64..10.0,
            c1 in -10.0f64..10.0,
            c0 in -10.0f64..10.0,
        ) {
            let c = CubicCoeffs { c3, c2, c1, c0 };
            let max = c3.abs().max(c2.abs()).max(c1.abs()).max(c0.abs());
            let roots = real_roots_cubic(c).unwrap();
            prop_assert!(!roots.is_empty() && roots.len() <= 3);
            for x in &roots {
                prop_assert!(c.eval(*x).abs() <= 1e-10 * max.max(1.0) * 10.0);
            }
        }
    }
}
