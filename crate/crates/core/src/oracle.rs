//! Brute-force reference implementations for validating the fast paths on
//! tiny grids: a dense matrix built from the spectral apply for the linear
//! resolvent, and a Picard iteration for the nonlinear resolvents.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, LinearSymbol, State};
use crate::models::SplitProblem;

const ORACLE_MAX_N: usize = 16;

/// Dense `2 n^2 x 2 n^2` matrix of the linear operator, built column by
/// column from unit basis states. Flattening order: component 0 first, then
/// component 1, each row-major.
pub struct DenseOperator {
    pub size: usize,
    pub matrix: DMatrix<f64>,
}

pub fn densify(sym: &LinearSymbol, grid: &std::sync::Arc<GridSpec>) -> Result<DenseOperator> {
    if grid.n > ORACLE_MAX_N {
        return Err(Error::OracleScale {
            n: grid.n,
            max: ORACLE_MAX_N,
        });
    }
    let points = grid.n * grid.n;
    let size = 2 * points;
    let mut matrix = DMatrix::zeros(size, size);
    let mut basis = State::zeros(grid.clone());
    for j in 0..size {
        if j < points {
            basis.c0.data[j] = 1.0;
        } else {
            basis.c1.data[j - points] = 1.0;
        }
        let col = sym.apply(&basis)?;
        for i in 0..points {
            matrix[(i, j)] = col.c0.data[i];
            matrix[(points + i, j)] = col.c1.data[i];
        }
        if j < points {
            basis.c0.data[j] = 0.0;
        } else {
            basis.c1.data[j - points] = 0.0;
        }
    }
    Ok(DenseOperator { size, matrix })
}

fn flatten(w: &State) -> DVector<f64> {
    DVector::from_iterator(
        2 * w.c0.data.len(),
        w.c0.data.iter().chain(&w.c1.data).copied(),
    )
}

fn unflatten(grid: &std::sync::Arc<GridSpec>, x: &DVector<f64>) -> State {
    let points = grid.n * grid.n;
    let mut out = State::zeros(grid.clone());
    out.c0.data.copy_from_slice(&x.as_slice()[..points]);
    out.c1.data.copy_from_slice(&x.as_slice()[points..]);
    out
}

/// Solves `(I - tau A_dense) x = w` by LU factorization.
pub fn dense_resolvent(op: &DenseOperator, tau: f64, w: &State) -> Result<State> {
    let system = DMatrix::identity(op.size, op.size) - tau * &op.matrix;
    let rhs = flatten(w);
    let x = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Argument("singular dense resolvent system".into()))?;
    Ok(unflatten(&w.grid, &x))
}

/// Fixed-point iteration `v <- w + tau F(v)` from `v = w`, independent of the
/// cubic-based resolvent path.
pub fn picard_nonlinear_resolvent(
    problem: &dyn SplitProblem,
    tau: f64,
    w: &State,
    tol: f64,
    max_iter: usize,
) -> Result<State> {
    let mut v = w.clone();
    let mut last_diff = f64::INFINITY;
    for _ in 0..max_iter {
        let fv = problem.apply_nonlinear(&v);
        let mut next = w.clone();
        for k in 0..next.c0.data.len() {
            next.c0.data[k] += tau * fv.c0.data[k];
            next.c1.data[k] += tau * fv.c1.data[k];
        }
        let diff = next.max_abs_diff(&v);
        if !diff.is_finite() || diff > 10.0 * last_diff.max(tol) {
            return Err(Error::NoConvergence {
                iters: max_iter,
                residual: diff,
            });
        }
        v = next;
        if diff <= tol {
            return Ok(v);
        }
        last_diff = diff;
    }
    Err(Error::NoConvergence {
        iters: max_iter,
        residual: last_diff,
    })
}
