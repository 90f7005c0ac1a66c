//! Periodic grid bookkeeping, Fourier transforms and per-mode linear algebra.
//!
//! Mode layout: for an `n x n` grid, coefficient index `iy * n + ix` holds the
//! wavenumber pair `(k(ix), k(iy))` with `k(i) = i` for `i < n/2` and
//! `k(i) = i - n` otherwise (standard FFT ordering). Symbol arrays are built
//! once per grid and reused; they never appear in the per-step hot path.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic square grid on `(-L, L)^2` with cached transform plans and the
/// spectral Laplacian symbol.
pub struct GridSpec {
    pub n: usize,
    pub domain_half_width: f64,
    pub dx: f64,
    /// Integer wavenumber for each 1-D index, FFT mode order.
    pub wavenumbers: Vec<i64>,
    /// Per-mode Laplacian eigenvalue, `-(k1^2 + k2^2) * (pi/L)^2`, length `n*n`.
    pub laplacian_symbol: Vec<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("n", &self.n)
            .field("domain_half_width", &self.domain_half_width)
            .finish()
    }
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.domain_half_width == other.domain_half_width
    }
}

pub fn make_grid(n: usize, domain_half_width: f64) -> Result<Arc<GridSpec>> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::Config(format!(
            "grid size must be a power of two >= 4, got {n}"
        )));
    }
    if !(domain_half_width > 0.0) {
        return Err(Error::Config(format!(
            "domain half-width must be positive, got {domain_half_width}"
        )));
    }
    let wavenumbers: Vec<i64> = (0..n)
        .map(|i| if i < n / 2 { i as i64 } else { i as i64 - n as i64 })
        .collect();
    let scale = (std::f64::consts::PI / domain_half_width).powi(2);
    let mut laplacian_symbol = vec![0.0; n * n];
    for iy in 0..n {
        let ky = wavenumbers[iy] as f64;
        for ix in 0..n {
            let kx = wavenumbers[ix] as f64;
            laplacian_symbol[iy * n + ix] = -(kx * kx + ky * ky) * scale;
        }
    }
    let mut planner = FftPlanner::new();
    let fft_fwd = planner.plan_fft_forward(n);
    let fft_inv = planner.plan_fft_inverse(n);
    Ok(Arc::new(GridSpec {
        n,
        domain_half_width,
        dx: 2.0 * domain_half_width / n as f64,
        wavenumbers,
        laplacian_symbol,
        fft_fwd,
        fft_inv,
    }))
}

impl GridSpec {
    /// Physical coordinate of 1-D index `i`, starting at `-L`.
    pub fn coord(&self, i: usize) -> f64 {
        -self.domain_half_width + i as f64 * self.dx
    }

    /// Sample a function of `(x1, x2)` at the grid points.
    pub fn sample(self: &Arc<Self>, f: impl Fn(f64, f64) -> f64) -> Field {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for iy in 0..n {
            let y = self.coord(iy);
            for ix in 0..n {
                data[iy * n + ix] = f(self.coord(ix), y);
            }
        }
        Field { n, data }
    }

    fn fft2(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.fft_inv } else { &self.fft_fwd };
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        for row in buf.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut scratch);
        }
        // Columns via transpose, row FFT, transpose back.
        transpose(buf, n);
        for row in buf.chunks_exact_mut(n) {
            plan.process_with_scratch(row, &mut scratch);
        }
        transpose(buf, n);
    }

    /// Forward transform, normalized so that `inverse(forward(u)) = u`.
    pub fn forward(&self, f: &Field) -> Vec<Complex64> {
        let n = self.n;
        let mut buf: Vec<Complex64> = f.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut buf, false);
        let norm = 1.0 / (n * n) as f64;
        for c in &mut buf {
            *c *= norm;
        }
        buf
    }

    /// Inverse transform back to a real field; the imaginary residue of a
    /// Hermitian-symmetric coefficient set is dropped.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Field {
        let n = self.n;
        assert_eq!(coeffs.len(), n * n);
        let mut buf = coeffs.to_vec();
        self.fft2(&mut buf, true);
        Field {
            n,
            data: buf.iter().map(|c| c.re).collect(),
        }
    }
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for iy in 0..n {
        for ix in (iy + 1)..n {
            buf.swap(iy * n + ix, ix * n + iy);
        }
    }
}

/// Scalar field on an `n x n` grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Field {
    pub fn zeros(n: usize) -> Self {
        Field {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Field {
            n,
            data: vec![c; n * n],
        }
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// Two-component state on a shared grid.
#[derive(Debug, Clone)]
pub struct State {
    pub grid: Arc<GridSpec>,
    pub c0: Field,
    pub c1: Field,
}

impl State {
    pub fn new(grid: Arc<GridSpec>, c0: Field, c1: Field) -> Self {
        assert_eq!(c0.n, grid.n);
        assert_eq!(c1.n, grid.n);
        State { grid, c0, c1 }
    }

    pub fn zeros(grid: Arc<GridSpec>) -> Self {
        let n = grid.n;
        State::new(grid, Field::zeros(n), Field::zeros(n))
    }

    pub fn check_finite(&self) -> Result<()> {
        for (name, f) in [("component 0", &self.c0), ("component 1", &self.c1)] {
            if let Some(idx) = f.data.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "{name} at index ({}, {})",
                    idx % f.n,
                    idx / f.n
                )));
            }
        }
        Ok(())
    }

    pub fn same_grid(&self, other: &State) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// Componentwise `self - other`.
    pub fn sub(&self, other: &State) -> State {
        let mut out = self.clone();
        for (a, b) in out.c0.data.iter_mut().zip(&other.c0.data) {
            *a -= b;
        }
        for (a, b) in out.c1.data.iter_mut().zip(&other.c1.data) {
            *a -= b;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &State) -> f64 {
        let d0 = self
            .c0
            .data
            .iter()
            .zip(&other.c0.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let d1 = self
            .c1
            .data
            .iter()
            .zip(&other.c1.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        d0.max(d1)
    }
}

/// Per-Fourier-mode 2x2 real matrix `G_k = lambda_k * B` representing the
/// linear operator A. The coefficient matrix `B` is stored once; `G_k` is
/// recovered from the cached Laplacian symbol.
#[derive(Debug, Clone)]
pub struct LinearSymbol {
    pub grid: Arc<GridSpec>,
    /// Row-major coefficient matrix: `[b11, b12, b21, b22]`.
    pub coeff: [f64; 4],
}

impl LinearSymbol {
    /// Caginalp coupling in the `(psi, phi)` variables: `G_k = lambda_k * [[1, -l], [0, 1]]`.
    pub fn caginalp(grid: Arc<GridSpec>, ell: f64) -> Self {
        LinearSymbol {
            grid,
            coeff: [1.0, -ell, 0.0, 1.0],
        }
    }

    /// Two-species diffusion: `G_k = lambda_k * diag(d1, d2)`.
    pub fn diffusion(grid: Arc<GridSpec>, d1: f64, d2: f64) -> Self {
        LinearSymbol {
            grid,
            coeff: [d1, 0.0, 0.0, d2],
        }
    }

    fn check_grid(&self, u: &State) -> Result<()> {
        if *self.grid != *u.grid {
            return Err(Error::GridMismatch(format!(
                "symbol on {:?}, state on {:?}",
                self.grid, u.grid
            )));
        }
        Ok(())
    }

    /// Per-mode action on a coefficient pair. `op` maps
    /// `(lambda, [u1_hat, u2_hat])` to the transformed pair.
    fn per_mode(
        &self,
        u: &State,
        op: impl Fn(f64, [Complex64; 2]) -> [Complex64; 2],
    ) -> State {
        let grid = &u.grid;
        let mut a = grid.forward(&u.c0);
        let mut b = grid.forward(&u.c1);
        for (k, lam) in grid.laplacian_symbol.iter().enumerate() {
            let [va, vb] = op(*lam, [a[k], b[k]]);
            a[k] = va;
            b[k] = vb;
        }
        State::new(grid.clone(), grid.inverse(&a), grid.inverse(&b))
    }

    /// `A u`, exact on band-limited inputs.
    pub fn apply(&self, u: &State) -> Result<State> {
        self.check_grid(u)?;
        let [b11, b12, b21, b22] = self.coeff;
        Ok(self.per_mode(u, |lam, [u1, u2]| {
            [
                lam * (b11 * u1 + b12 * u2),
                lam * (b21 * u1 + b22 * u2),
            ]
        }))
    }

    /// Solves `(I - tau A) v = w` mode by mode with the closed-form 2x2 inverse.
    pub fn resolvent(&self, tau: f64, w: &State) -> Result<State> {
        self.check_grid(w)?;
        assert!(tau >= 0.0, "resolvent requires tau >= 0");
        let [b11, b12, b21, b22] = self.coeff;
        Ok(self.per_mode(w, |lam, wh| solve_2x2(tau * lam, [b11, b12, b21, b22], wh)))
    }

    /// Cayley map `(I + tau A)(I - tau A)^{-1} w`, evaluated as
    /// `w + 2 tau A (I - tau A)^{-1} w` per mode so the unbounded part only
    /// ever acts on resolved data.
    pub fn cayley(&self, tau: f64, w: &State) -> Result<State> {
        self.check_grid(w)?;
        assert!(tau >= 0.0, "cayley requires tau >= 0");
        let [b11, b12, b21, b22] = self.coeff;
        Ok(self.per_mode(w, |lam, wh| {
            let c = tau * lam;
            let [v1, v2] = solve_2x2(c, [b11, b12, b21, b22], wh);
            [
                wh[0] + 2.0 * c * (b11 * v1 + b12 * v2),
                wh[1] + 2.0 * c * (b21 * v1 + b22 * v2),
            ]
        }))
    }
}

/// Closed-form solve of `(I - c B) v = w` for a 2x2 matrix `B`, `c = tau * lambda`.
/// Invertibility holds for `c <= 0` because the eigenvalues of `B` are positive.
#[inline]
fn solve_2x2(c: f64, [b11, b12, b21, b22]: [f64; 4], [w1, w2]: [Complex64; 2]) -> [Complex64; 2] {
    let m11 = 1.0 - c * b11;
    let m12 = -c * b12;
    let m21 = -c * b21;
    let m22 = 1.0 - c * b22;
    let det = m11 * m22 - m12 * m21;
    [
        (m22 * w1 - m12 * w2) / det,
        (m11 * w2 - m21 * w1) / det,
    ]
}
