//! Fourier-multiplier operators on the torus: transforms, derivatives, the
//! Laplacian and the Helmholtz inverse `(a - b·κ²Δ)^{-1}`.
//!
//! Coefficients follow the expansion `u(x) = Σ_k c_k e^{i k·x}` over the signed
//! wavenumbers `k ∈ [-n/2, n/2)^d`, so `cos(kx)` contributes `1/2` at `±k`.
//! The Nyquist wavenumber `-n/2` carries multiplier `-(n/2)²` in the Laplacian
//! and zero in first derivatives, which keeps derivatives of real fields real.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::grid::{Field, GridError, TorusGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("Helmholtz weights must satisfy a > 0 and b >= 0 (got a = {a}, b = {b})")]
    InvalidWeights { a: f64, b: f64 },
    #[error("kappa must be positive and finite, got {0}")]
    InvalidKappa(f64),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Complex Fourier coefficients of a real field, stored in FFT index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralCoeffs {
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at a signed wavenumber tuple (`[k]` or `[kx, ky]`).
    pub fn get(&self, k: &[i64]) -> Option<Complex64> {
        let idx: Option<Vec<usize>> = k
            .iter()
            .map(|&ki| self.grid.index_of_wavenumber(ki))
            .collect();
        let idx = idx?;
        if idx.len() != self.grid.dim() {
            return None;
        }
        Some(self.coeffs[self.grid.offset(&idx)])
    }

    /// Largest `|c_k - conj(c_{-k})|`, zero for an exactly real field.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n_per_axis();
        let neg = |i: usize| (n - i) % n;
        let mut worst: f64 = 0.0;
        for p in 0..self.coeffs.len() {
            let q = match self.grid.dim() {
                1 => neg(p),
                _ => neg(p / n) * n + neg(p % n),
            };
            worst = worst.max((self.coeffs[p] - self.coeffs[q].conj()).norm());
        }
        worst
    }
}

/// FFT plans and wavenumber tables for one grid. Immutable and `Sync`;
/// scratch buffers are allocated per call.
pub struct SpectralOps {
    grid: TorusGrid,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
    k_deriv: Vec<f64>,
}

impl std::fmt::Debug for SpectralOps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralOps").field("grid", &self.grid).finish()
    }
}

impl SpectralOps {
    pub fn new(grid: TorusGrid) -> Self {
        let n = grid.n_per_axis();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let k: Vec<f64> = grid.wavenumbers().into_iter().map(|k| k as f64).collect();
        let k_deriv = (0..n)
            .map(|j| if j == n / 2 { 0.0 } else { k[j] })
            .collect();
        Self {
            grid,
            fft,
            ifft,
            k,
            k_deriv,
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// In-place unnormalized DFT over every axis.
    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let plan = if inverse { &self.ifft } else { &self.fft };
        let n = self.grid.n_per_axis();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        if self.grid.dim() == 2 {
            let mut cols = vec![Complex64::new(0.0, 0.0); buf.len()];
            for iy in 0..n {
                for ix in 0..n {
                    cols[ix * n + iy] = buf[iy * n + ix];
                }
            }
            plan.process_with_scratch(&mut cols, &mut scratch);
            for ix in 0..n {
                for iy in 0..n {
                    buf[iy * n + ix] = cols[ix * n + iy];
                }
            }
        }
    }

    fn to_complex(f: &Field) -> Vec<Complex64> {
        f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    /// `(-1)^{Σk}`: moves the DFT phase origin from `x = 0` to the node `x = -π`.
    fn phase(&self, p: usize) -> f64 {
        let n = self.grid.n_per_axis();
        let parity = |i: usize| self.grid.wavenumber(i).rem_euclid(2);
        let s = match self.grid.dim() {
            1 => parity(p),
            _ => parity(p % n) + parity(p / n),
        };
        if s % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn forward(&self, f: &Field) -> SpectralCoeffs {
        debug_assert_eq!(f.grid(), self.grid);
        let mut buf = Self::to_complex(f);
        self.transform(&mut buf, false);
        let scale = 1.0 / self.grid.len() as f64;
        for (p, c) in buf.iter_mut().enumerate() {
            *c *= scale * self.phase(p);
        }
        SpectralCoeffs {
            grid: self.grid,
            coeffs: buf,
        }
    }

    /// Real part of the synthesis `Σ_k c_k e^{i k·x_j}`.
    pub fn inverse(&self, c: &SpectralCoeffs) -> Field {
        debug_assert_eq!(c.grid, self.grid);
        let mut buf: Vec<Complex64> = c
            .coeffs
            .iter()
            .enumerate()
            .map(|(p, &z)| z * self.phase(p))
            .collect();
        self.transform(&mut buf, true);
        let values = buf.into_iter().map(|z| z.re).collect();
        Field::new(self.grid, values).expect("grid length preserved")
    }

    /// Applies the multiplier `m(ix, iy)` (FFT indices) and returns the real part.
    fn apply_multiplier(&self, f: &Field, m: impl Fn(usize, usize) -> Complex64) -> Field {
        debug_assert_eq!(f.grid(), self.grid);
        let n = self.grid.n_per_axis();
        let mut buf = Self::to_complex(f);
        self.transform(&mut buf, false);
        let scale = 1.0 / self.grid.len() as f64;
        for (p, c) in buf.iter_mut().enumerate() {
            let (ix, iy) = (p % n, p / n);
            *c *= m(ix, iy) * scale;
        }
        self.transform(&mut buf, true);
        Field::new(self.grid, buf.into_iter().map(|z| z.re).collect())
            .expect("grid length preserved")
    }

    /// `|k|²` at FFT indices, Nyquist included.
    fn k_sq(&self, ix: usize, iy: usize) -> f64 {
        match self.grid.dim() {
            1 => self.k[ix] * self.k[ix],
            _ => self.k[ix] * self.k[ix] + self.k[iy] * self.k[iy],
        }
    }

    pub fn laplacian(&self, f: &Field) -> Field {
        self.apply_multiplier(f, |ix, iy| Complex64::new(-self.k_sq(ix, iy), 0.0))
    }

    /// Spectral `∂u/∂x_axis` with the Nyquist mode removed.
    pub fn derivative(&self, f: &Field, axis: usize) -> Field {
        assert!(axis < self.grid.dim(), "axis {axis} out of range");
        self.apply_multiplier(f, |ix, iy| {
            let k = if axis == 0 { self.k_deriv[ix] } else { self.k_deriv[iy] };
            Complex64::new(0.0, k)
        })
    }

    fn check_weights(kappa: f64, a: f64, b: f64) -> Result<(), SpectralError> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(SpectralError::InvalidKappa(kappa));
        }
        if !(a > 0.0 && a.is_finite() && b >= 0.0 && b.is_finite()) {
            return Err(SpectralError::InvalidWeights { a, b });
        }
        Ok(())
    }

    /// Solves `(a - b·κ²Δ) g = rhs` mode by mode.
    pub fn helmholtz_solve(
        &self,
        rhs: &Field,
        kappa: f64,
        a: f64,
        b: f64,
    ) -> Result<Field, SpectralError> {
        Self::check_weights(kappa, a, b)?;
        let c = b * kappa * kappa;
        Ok(self.apply_multiplier(rhs, |ix, iy| {
            Complex64::new(1.0 / (a + c * self.k_sq(ix, iy)), 0.0)
        }))
    }

    /// The forward operator `g ↦ a·g - b·κ²Δg`.
    pub fn helmholtz_apply(
        &self,
        g: &Field,
        kappa: f64,
        a: f64,
        b: f64,
    ) -> Result<Field, SpectralError> {
        Self::check_weights(kappa, a, b)?;
        let c = b * kappa * kappa;
        Ok(self.apply_multiplier(g, |ix, iy| Complex64::new(a + c * self.k_sq(ix, iy), 0.0)))
    }

    /// `∫|∇u|² dx` from spectral first derivatives and the rectangle rule.
    pub fn gradient_norm_sq(&self, f: &Field) -> f64 {
        (0..self.grid.dim())
            .map(|axis| self.derivative(f, axis).norm_sq())
            .sum()
    }
}

fn periodic_multiplier(values: &[f64], period: f64, m: impl Fn(f64, bool) -> Complex64) -> Vec<f64> {
    let n = values.len();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf);
    let base = 2.0 * std::f64::consts::PI / period;
    for (j, c) in buf.iter_mut().enumerate() {
        let k = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
        let nyquist = n % 2 == 0 && j == n / 2;
        *c *= m(base * k as f64, nyquist) / n as f64;
    }
    ifft.process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Spectral first derivative of uniform samples of a `period`-periodic function.
pub fn periodic_first_derivative(values: &[f64], period: f64) -> Vec<f64> {
    periodic_multiplier(values, period, |k, nyquist| {
        if nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, k)
        }
    })
}

/// Spectral second derivative of uniform samples of a `period`-periodic function.
pub fn periodic_second_derivative(values: &[f64], period: f64) -> Vec<f64> {
    periodic_multiplier(values, period, |k, _| Complex64::new(-k * k, 0.0))
}
