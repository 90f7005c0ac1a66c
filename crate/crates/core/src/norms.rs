//! Inner products and norms used for error measurement.
//!
//! All discrete inner products carry the quadrature weight `dx^2` so that
//! values approximate the continuum integrals over `(-L, L)^2`.

use crate::error::{Error, Result};
use crate::grid::State;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// Plain componentwise L2.
    L2,
    /// `(psi1, psi2) + l^2 (phi1, phi2)`.
    WeightedCaginalp { ell: f64 },
    /// Graph inner product of the diffusion operator, `(Au, Av) + (u, v)`,
    /// evaluated in coefficient space as `sum_k (1 + d_i^2 lambda_k^2) u_hat v_hat`.
    GraphGrayScott { d1: f64, d2: f64 },
}

pub fn inner(kind: NormKind, u: &State, v: &State) -> Result<f64> {
    u.same_grid(v)?;
    let w = u.grid.dx * u.grid.dx;
    match kind {
        NormKind::L2 => {
            let mut s = 0.0;
            for (a, b) in u.c0.data.iter().zip(&v.c0.data) {
                s += a * b;
            }
            for (a, b) in u.c1.data.iter().zip(&v.c1.data) {
                s += a * b;
            }
            Ok(w * s)
        }
        NormKind::WeightedCaginalp { ell } => {
            assert!(ell > 0.0, "Caginalp weight requires l > 0");
            let mut s = 0.0;
            for (a, b) in u.c0.data.iter().zip(&v.c0.data) {
                s += a * b;
            }
            let l2 = ell * ell;
            for (a, b) in u.c1.data.iter().zip(&v.c1.data) {
                s += l2 * a * b;
            }
            Ok(w * s)
        }
        NormKind::GraphGrayScott { d1, d2 } => {
            assert!(d1 > 0.0 && d2 > 0.0, "graph norm requires positive diffusivities");
            let grid = &u.grid;
            let u0 = grid.forward(&u.c0);
            let u1 = grid.forward(&u.c1);
            let v0 = grid.forward(&v.c0);
            let v1 = grid.forward(&v.c1);
            // Parseval with the 1/n^2 forward normalization: sum over grid
            // points equals n^2 times the coefficient sum.
            let mut s = 0.0;
            for (k, lam) in grid.laplacian_symbol.iter().enumerate() {
                let l2 = lam * lam;
                s += (1.0 + d1 * d1 * l2) * (u0[k] * v0[k].conj()).re;
                s += (1.0 + d2 * d2 * l2) * (u1[k] * v1[k].conj()).re;
            }
            Ok(w * (grid.n * grid.n) as f64 * s)
        }
    }
}

pub fn norm(kind: NormKind, u: &State) -> Result<f64> {
    let q = inner(kind, u, u)?;
    if q < -1e-12 {
        return Err(Error::NonFinite(format!(
            "negative squared norm {q:.3e}"
        )));
    }
    Ok(q.max(0.0).sqrt())
}

pub fn error_norm(kind: NormKind, u: &State, v: &State) -> Result<f64> {
    u.same_grid(v)?;
    norm(kind, &u.sub(v))
}
