//! Concrete problem definitions: the Caginalp solidification system and the
//! Gray-Scott pattern formation system.
//!
//! Both are posed as u' = (A + F)u with A the (coupled) diffusion operator
//! handled spectrally and F a pointwise polynomial nonlinearity whose
//! resolvent reduces to a scalar cubic per grid point.

use std::sync::Arc;

use crate::cubic::{self, CubicCoeffs};
use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, LinearSymbol, State};
use crate::norms::{self, NormKind};

/// Common interface of the two split problems. States hold the transformed
/// variables the operators act on; the Caginalp temperature exists only at
/// I/O boundaries via [`caginalp_extract_theta`].
pub trait SplitProblem: Send + Sync {
    fn name(&self) -> &'static str;
    fn grid(&self) -> &Arc<GridSpec>;
    fn linear_symbol(&self) -> &LinearSymbol;
    fn apply_nonlinear(&self, u: &State) -> State;
    /// Solves `(I - tau F) v = w` pointwise.
    fn nonlinear_resolvent(&self, tau: f64, w: &State) -> Result<State>;
    fn norm_kind(&self) -> NormKind;
    /// Dissipativity constant of the linear part (zero for both models).
    fn m_linear(&self) -> f64 {
        0.0
    }
    /// Dissipativity constant of the nonlinearity. For Gray-Scott no global
    /// constant is available and zero is reported; the stability guard is
    /// advisory there and blow-up is caught by the per-step health checks.
    fn m_nonlinear(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaginalpParams {
    /// Latent-heat coupling l > 0.
    pub ell: f64,
    /// Dissipativity constant max{3/2 - l, l^2}.
    pub m_f: f64,
}

impl CaginalpParams {
    pub fn new(ell: f64) -> Result<Self> {
        if !(ell > 0.0) {
            return Err(Error::Argument(format!("l must be positive, got {ell}")));
        }
        Ok(CaginalpParams {
            ell,
            m_f: (1.5 - ell).max(ell * ell),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrayScottParams {
    pub d1: f64,
    pub d2: f64,
    pub l1: f64,
    pub l2: f64,
}

impl GrayScottParams {
    pub fn new(d1: f64, d2: f64, l1: f64, l2: f64) -> Result<Self> {
        if !(d1 > 0.0 && d2 > 0.0 && l1 > 0.0 && l2 > 0.0) {
            return Err(Error::Argument(
                "Gray-Scott parameters must all be positive".into(),
            ));
        }
        Ok(GrayScottParams { d1, d2, l1, l2 })
    }

    /// Parameter set used in the benchmark runs.
    pub fn benchmark() -> Self {
        GrayScottParams {
            d1: 8e-4,
            d2: 4e-4,
            l1: 0.024,
            l2: 0.084,
        }
    }
}

pub struct CaginalpProblem {
    grid: Arc<GridSpec>,
    pub params: CaginalpParams,
    symbol: LinearSymbol,
}

impl CaginalpProblem {
    pub fn new(grid: Arc<GridSpec>, params: CaginalpParams) -> Self {
        let symbol = LinearSymbol::caginalp(grid.clone(), params.ell);
        CaginalpProblem {
            grid,
            params,
            symbol,
        }
    }
}

impl SplitProblem for CaginalpProblem {
    fn name(&self) -> &'static str {
        "caginalp"
    }

    fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    fn linear_symbol(&self) -> &LinearSymbol {
        &self.symbol
    }

    /// `F u = [0, (1 - l) phi - phi^3 + psi]`.
    fn apply_nonlinear(&self, u: &State) -> State {
        let ell = self.params.ell;
        let mut out = State::zeros(u.grid.clone());
        for k in 0..u.c0.data.len() {
            let psi = u.c0.data[k];
            let phi = u.c1.data[k];
            out.c1.data[k] = (1.0 - ell) * phi - phi * phi * phi + psi;
        }
        out
    }

    fn nonlinear_resolvent(&self, tau: f64, w: &State) -> Result<State> {
        if tau == 0.0 {
            return Ok(w.clone());
        }
        let ell = self.params.ell;
        if tau * (1.0 - ell) >= 1.0 {
            return Err(Error::StepSize(format!(
                "tau (1 - l) = {} >= 1; the pointwise cubic loses monotonicity",
                tau * (1.0 - ell)
            )));
        }
        let lin = 1.0 - tau * (1.0 - ell);
        let mut out = w.clone();
        for k in 0..w.c0.data.len() {
            let rhs = w.c1.data[k] + tau * w.c0.data[k];
            out.c1.data[k] = cubic::solve_increasing_cubic(tau, lin, rhs)?;
        }
        Ok(out)
    }

    fn norm_kind(&self) -> NormKind {
        NormKind::WeightedCaginalp {
            ell: self.params.ell,
        }
    }

    fn m_nonlinear(&self) -> f64 {
        self.params.m_f
    }
}

/// Initial data of the solidification benchmark in the `(psi, phi)` variables:
/// `theta_0 = 1`, `phi_0 = exp(-20(x1^2 + x2^2/6)) + exp(-20(x1^2/6 + x2^2)) - 1`,
/// `psi_0 = theta_0 + l phi_0`.
pub fn caginalp_initial(grid: &Arc<GridSpec>, params: &CaginalpParams) -> State {
    let phi0 = grid.sample(|x1, x2| {
        (-20.0 * (x1 * x1 + x2 * x2 / 6.0)).exp() + (-20.0 * (x1 * x1 / 6.0 + x2 * x2)).exp() - 1.0
    });
    let ell = params.ell;
    let mut psi0 = Field::zeros(grid.n);
    for k in 0..phi0.data.len() {
        psi0.data[k] = 1.0 + ell * phi0.data[k];
    }
    State::new(grid.clone(), psi0, phi0)
}

/// Recovers the temperature `theta = psi - l phi`.
pub fn caginalp_extract_theta(u: &State, params: &CaginalpParams) -> Field {
    let mut theta = u.c0.clone();
    for (t, phi) in theta.data.iter_mut().zip(&u.c1.data) {
        *t -= params.ell * phi;
    }
    theta
}

pub struct GrayScottProblem {
    grid: Arc<GridSpec>,
    pub params: GrayScottParams,
    symbol: LinearSymbol,
}

impl GrayScottProblem {
    pub fn new(grid: Arc<GridSpec>, params: GrayScottParams) -> Self {
        let symbol = LinearSymbol::diffusion(grid.clone(), params.d1, params.d2);
        GrayScottProblem {
            grid,
            params,
            symbol,
        }
    }

    /// Pointwise resolvent residual of `(I - tau F) v = w` and its Jacobian.
    fn point_residual(
        &self,
        tau: f64,
        w: [f64; 2],
        v: [f64; 2],
    ) -> ([f64; 2], [[f64; 2]; 2]) {
        let p = &self.params;
        let [v1, v2] = v;
        let r1 = v1 - tau * (-v1 * v2 * v2 + p.l1 * (1.0 - v1)) - w[0];
        let r2 = v2 - tau * (v1 * v2 * v2 - p.l2 * v2) - w[1];
        let jac = [
            [1.0 + tau * (v2 * v2 + p.l1), 2.0 * tau * v1 * v2],
            [-tau * v2 * v2, 1.0 + tau * p.l2 - 2.0 * tau * v1 * v2],
        ];
        ([r1, r2], jac)
    }

    /// Resolvent at a single grid point. Eliminating `v1` leaves a cubic in
    /// `v2`; among its real roots the one closest to `w2` is the branch
    /// continuous in `tau` at zero. The full 2x2 residual is verified and a
    /// damped Newton run from `w` serves as fallback.
    fn point_resolvent(&self, tau: f64, w1: f64, w2: f64) -> Result<[f64; 2]> {
        let p = &self.params;
        let a1 = 1.0 + tau * p.l1;
        let a2 = 1.0 + tau * p.l2;
        let coeffs = CubicCoeffs {
            c3: tau * a2,
            c2: -tau * (w1 + w2 + tau * p.l1),
            c1: a1 * a2,
            c0: -a1 * w2,
        };
        let tol = 1e-10 * w1.abs().max(w2.abs()).max(1.0);
        if let Ok(roots) = cubic::real_roots_cubic(coeffs) {
            let v2 = roots
                .iter()
                .copied()
                .min_by(|a, b| {
                    (a - w2).abs().partial_cmp(&(b - w2).abs()).unwrap()
                })
                .unwrap();
            let v1 = (w1 + tau * p.l1) / (a1 + tau * v2 * v2);
            let (res, _) = self.point_residual(tau, [w1, w2], [v1, v2]);
            if res[0].abs().max(res[1].abs()) <= tol {
                return Ok([v1, v2]);
            }
        }
        cubic::newton_2x2(
            |v| self.point_residual(tau, [w1, w2], v),
            [w1, w2],
            tol,
            50,
        )
    }
}

impl SplitProblem for GrayScottProblem {
    fn name(&self) -> &'static str {
        "gray-scott"
    }

    fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    fn linear_symbol(&self) -> &LinearSymbol {
        &self.symbol
    }

    /// `F u = [-u1 u2^2 + l1 (1 - u1), u1 u2^2 - l2 u2]`.
    fn apply_nonlinear(&self, u: &State) -> State {
        let p = &self.params;
        let mut out = State::zeros(u.grid.clone());
        for k in 0..u.c0.data.len() {
            let u1 = u.c0.data[k];
            let u2 = u.c1.data[k];
            let auto = u1 * u2 * u2;
            out.c0.data[k] = -auto + p.l1 * (1.0 - u1);
            out.c1.data[k] = auto - p.l2 * u2;
        }
        out
    }

    fn nonlinear_resolvent(&self, tau: f64, w: &State) -> Result<State> {
        if tau == 0.0 {
            return Ok(w.clone());
        }
        let n = w.grid.n;
        let mut out = w.clone();
        for k in 0..w.c0.data.len() {
            match self.point_resolvent(tau, w.c0.data[k], w.c1.data[k]) {
                Ok([v1, v2]) => {
                    out.c0.data[k] = v1;
                    out.c1.data[k] = v2;
                }
                Err(e) => {
                    return Err(Error::PointSolve {
                        i: k % n,
                        j: k / n,
                        detail: e.to_string(),
                    })
                }
            }
        }
        Ok(out)
    }

    fn norm_kind(&self) -> NormKind {
        NormKind::GraphGrayScott {
            d1: self.params.d1,
            d2: self.params.d2,
        }
    }

    fn m_nonlinear(&self) -> f64 {
        0.0
    }
}

/// Compactly supported bump `exp(-eps^2 / (eps^2 - |x - y|^2))` for
/// `|x - y| < eps`, zero otherwise (including on the support boundary).
fn bump(x1: f64, x2: f64, y1: f64, y2: f64, eps: f64) -> f64 {
    let r2 = (x1 - y1).powi(2) + (x2 - y2).powi(2);
    let e2 = eps * eps;
    if r2 < e2 {
        (-e2 / (e2 - r2)).exp()
    } else {
        0.0
    }
}

/// Benchmark initial data: `u2` is `e/4` times the sum of four bumps with
/// midpoints `(+-pi/10, +-pi/10)` and radius `pi/10`; `u1 = 1 - 2 u2`.
pub fn grayscott_initial(grid: &Arc<GridSpec>) -> State {
    let pi = std::f64::consts::PI;
    let eps = pi / 10.0;
    let scale = 1.0_f64.exp() / 4.0;
    let centers = [
        (pi / 10.0, pi / 10.0),
        (pi / 10.0, -pi / 10.0),
        (-pi / 10.0, pi / 10.0),
        (-pi / 10.0, -pi / 10.0),
    ];
    let u2 = grid.sample(|x1, x2| {
        scale
            * centers
                .iter()
                .map(|&(y1, y2)| bump(x1, x2, y1, y2, eps))
                .sum::<f64>()
    });
    let mut u1 = Field::zeros(grid.n);
    for k in 0..u2.data.len() {
        u1.data[k] = 1.0 - 2.0 * u2.data[k];
    }
    State::new(grid.clone(), u1, u2)
}

/// `(Fu - Fv, u - v)_model - M[F] ||u - v||^2_model`; nonpositive (up to
/// roundoff) whenever the model's dissipativity constant is sharp.
pub fn dissipativity_gap(problem: &dyn SplitProblem, u: &State, v: &State) -> Result<f64> {
    let fu = problem.apply_nonlinear(u);
    let fv = problem.apply_nonlinear(v);
    let diff = u.sub(v);
    let kind = problem.norm_kind();
    let lhs = norms::inner(kind, &fu.sub(&fv), &diff)?;
    let nrm = norms::norm(kind, &diff)?;
    Ok(lhs - problem.m_nonlinear() * nrm * nrm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    const PI: f64 = std::f64::consts::PI;

    fn caginalp(n: usize, ell: f64) -> CaginalpProblem {
        CaginalpProblem::new(make_grid(n, PI).unwrap(), CaginalpParams::new(ell).unwrap())
    }

    fn grayscott(n: usize) -> GrayScottProblem {
        GrayScottProblem::new(make_grid(n, PI).unwrap(), GrayScottParams::benchmark())
    }

    #[test]
    fn caginalp_params_dissipativity_constant() {
        assert_eq!(CaginalpParams::new(0.5).unwrap().m_f, 1.0);
        assert_eq!(CaginalpParams::new(2.0).unwrap().m_f, 4.0);
        assert!(CaginalpParams::new(0.0).is_err());
    }

    #[test]
    fn caginalp_apply_f_pointwise() {
        let p = caginalp(8, 0.5);
        let g = p.grid().clone();
        let zero = State::zeros(g.clone());
        let fz = p.apply_nonlinear(&zero);
        assert!(fz.c0.data.iter().chain(&fz.c1.data).all(|&v| v == 0.0));

        let u = State::new(g.clone(), Field::zeros(8), Field::constant(8, 1.0));
        let fu = p.apply_nonlinear(&u);
        assert!(fu.c0.data.iter().all(|&v| v == 0.0));
        assert!(fu.c1.data.iter().all(|&v| (v + 0.5).abs() < 1e-15));

        let u = State::new(g, Field::constant(8, 2.0), Field::zeros(8));
        let fu = p.apply_nonlinear(&u);
        assert!(fu.c1.data.iter().all(|&v| (v - 2.0).abs() < 1e-15));
    }

    #[test]
    fn caginalp_resolvent_solves_cubic() {
        let p = caginalp(8, 0.5);
        let g = p.grid().clone();
        let w = State::new(g.clone(), Field::zeros(8), Field::constant(8, 1.5));
        let v = p.nonlinear_resolvent(1.0, &w).unwrap();
        // x^3 + 1/2 x = 3/2 has root 1
        assert!(v.c1.data.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert!(v.c0.data.iter().all(|&x| x == 0.0));

        let z = State::zeros(g);
        let vz = p.nonlinear_resolvent(0.25, &z).unwrap();
        assert!(vz.c1.data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn caginalp_resolvent_step_size_guard() {
        // l = 1/4: tau (1 - l) >= 1 at tau = 2
        let p = caginalp(4, 0.25);
        let w = State::zeros(p.grid().clone());
        assert!(matches!(
            p.nonlinear_resolvent(2.0, &w),
            Err(Error::StepSize(_))
        ));
    }

    #[test]
    fn caginalp_initial_data() {
        let p = caginalp(64, 0.5);
        let g = p.grid().clone();
        let u0 = caginalp_initial(&g, &p.params);
        // at the origin phi0 = 1, theta0 = 1, psi0 = 1 + l
        let mid = (g.n / 2) * g.n + g.n / 2;
        assert!((g.coord(g.n / 2)).abs() < 1e-14);
        assert!((u0.c1.data[mid] - 1.0).abs() < 1e-14);
        assert!((u0.c0.data[mid] - 1.5).abs() < 1e-14);
        // far corner: both Gaussians negligible
        assert!((u0.c1.data[0] + 1.0).abs() < 1e-30);
        assert!((u0.c0.data[0] - 0.5).abs() < 1e-30);
        // theta round-trips to the constant 1
        let theta = caginalp_extract_theta(&u0, &p.params);
        assert!(theta.data.iter().all(|&t| (t - 1.0).abs() < 1e-15));
    }

    #[test]
    fn grayscott_apply_f_pointwise() {
        let p = grayscott(8);
        let g = p.grid().clone();
        let eq = State::new(g.clone(), Field::constant(8, 1.0), Field::zeros(8));
        let feq = p.apply_nonlinear(&eq);
        assert!(feq.c0.data.iter().chain(&feq.c1.data).all(|&v| v == 0.0));

        let u = State::new(g.clone(), Field::constant(8, 1.0), Field::constant(8, 1.0));
        let fu = p.apply_nonlinear(&u);
        assert!(fu.c0.data.iter().all(|&v| (v + 1.0).abs() < 1e-15));
        assert!(fu.c1.data.iter().all(|&v| (v - 0.916).abs() < 1e-15));

        let u = State::new(g, Field::zeros(8), Field::constant(8, 1.0));
        let fu = p.apply_nonlinear(&u);
        assert!(fu.c0.data.iter().all(|&v| (v - 0.024).abs() < 1e-15));
        assert!(fu.c1.data.iter().all(|&v| (v + 0.084).abs() < 1e-15));
    }

    #[test]
    fn grayscott_resolvent_fixes_equilibrium() {
        let p = grayscott(8);
        let g = p.grid().clone();
        let eq = State::new(g, Field::constant(8, 1.0), Field::zeros(8));
        for tau in [0.01, 0.1, 1.0] {
            let v = p.nonlinear_resolvent(tau, &eq).unwrap();
            assert!(v.max_abs_diff(&eq) < 1e-13);
        }
    }

    #[test]
    fn grayscott_resolvent_residual_and_newton_agree() {
        let p = grayscott(4);
        let tau = 0.05;
        let v = p.point_resolvent(tau, 0.5, 0.25).unwrap();
        let (res, _) = p.point_residual(tau, [0.5, 0.25], v);
        assert!(res[0].abs().max(res[1].abs()) <= 1e-10);
        // independent route: damped Newton on the original 2x2 system
        let nv = cubic::newton_2x2(
            |x| p.point_residual(tau, [0.5, 0.25], x),
            [0.5, 0.25],
            1e-14,
            100,
        )
        .unwrap();
        assert!((v[0] - nv[0]).abs() < 1e-10 && (v[1] - nv[1]).abs() < 1e-10);
    }

    #[test]
    fn grayscott_initial_data_bounds() {
        let g = make_grid(128, PI).unwrap();
        let u0 = grayscott_initial(&g);
        assert!(u0.c1.data.iter().all(|&v| (0.0..=0.25 + 1e-12).contains(&v)));
        assert!(u0.c0.data.iter().all(|&v| (0.5 - 1e-12..=1.0).contains(&v)));
        // far from all bumps: (u1, u2) = (1, 0)
        assert_eq!(u0.c1.data[0], 0.0);
        assert_eq!(u0.c0.data[0], 1.0);
    }

    #[test]
    fn grayscott_bump_peak_value() {
        let pi = PI;
        let eps = pi / 10.0;
        // at a midpoint the bump is exp(-1); neighbors sit exactly 2 eps away
        assert!((bump(pi / 10.0, pi / 10.0, pi / 10.0, pi / 10.0, eps) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(bump(pi / 10.0, -pi / 10.0, pi / 10.0, pi / 10.0, eps), 0.0);
        // value exactly on the support boundary is zero
        assert_eq!(bump(eps, 0.0, 0.0, 0.0, eps), 0.0);
    }

    #[test]
    fn dissipativity_gap_zero_for_equal_states() {
        let p = caginalp(8, 0.5);
        let u0 = caginalp_initial(p.grid(), &p.params);
        assert_eq!(dissipativity_gap(&p, &u0, &u0).unwrap(), 0.0);
    }

    #[test]
    fn dissipativity_gap_psi_only_difference() {
        let p = caginalp(16, 0.5);
        let g = p.grid().clone();
        let u = State::new(g.clone(), g.sample(|x, y| x.sin() * y.cos()), Field::zeros(16));
        let v = State::zeros(g);
        // difference supported in psi: gap = l^2 ||dpsi||^2 - M_F ||dpsi||^2 <= 0
        let gap = dissipativity_gap(&p, &u, &v).unwrap();
        assert!(gap <= 1e-9);
    }
}
