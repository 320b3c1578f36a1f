//! Uniform periodic grids on `[-π, π]^d` and the real grid functions living on them.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("unsupported dimension {0}: only 1 and 2 are supported")]
    UnsupportedDimension(usize),
    #[error("points per axis must be even and at least 4, got {0}")]
    InvalidSize(usize),
    #[error("field has {got} values but the grid needs {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fields live on different grids ({left:?} vs {right:?})")]
    GridMismatch { left: TorusGrid, right: TorusGrid },
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
}

/// Uniform grid on the torus `[-π, π]^d`, `d ∈ {1, 2}`.
///
/// Nodes are `x_j = -π + j·h` with `h = 2π/n`, `j = 0..n`; the right endpoint is
/// identified with the left one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, n_per_axis: usize) -> Result<Self, GridError> {
        if dim != 1 && dim != 2 {
            return Err(GridError::UnsupportedDimension(dim));
        }
        if n_per_axis < 4 || n_per_axis % 2 != 0 {
            return Err(GridError::InvalidSize(n_per_axis));
        }
        Ok(Self { dim, n: n_per_axis })
    }

    pub fn one_d(n: usize) -> Result<Self, GridError> {
        Self::new(1, n)
    }

    pub fn two_d(n: usize) -> Result<Self, GridError> {
        Self::new(2, n)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Volume element `h^dim` of the rectangle rule.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Measure of the torus, `(2π)^dim`.
    pub fn measure(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Coordinate of node `j` along any axis.
    pub fn node(&self, j: usize) -> f64 {
        -PI + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Signed wavenumber stored at FFT index `j`: `0, 1, …, n/2-1, -n/2, …, -1`.
    pub fn wavenumber(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn wavenumbers(&self) -> Vec<i64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    /// FFT index holding wavenumber `k`, or `None` outside `[-n/2, n/2)`.
    pub fn index_of_wavenumber(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    /// Flat row-major offset of a multi-index; axis 0 (x) varies fastest.
    pub fn offset(&self, idx: &[usize]) -> usize {
        match self.dim {
            1 => idx[0],
            _ => idx[1] * self.n + idx[0],
        }
    }

    /// Node coordinates of flat offset `p`, as `[x]` or `[x, y]`.
    pub fn coords(&self, p: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.node(p), 0.0],
            _ => [self.node(p % self.n), self.node(p / self.n)],
        }
    }
}

/// A real grid function on a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.len() {
            return Err(GridError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: TorusGrid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f` at every node. In 1D the second argument is always zero.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|p| {
                let [x, y] = grid.coords(p);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field, GridError> {
        self.check_same_grid(other)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<(), GridError> {
        if self.grid != other.grid {
            return Err(GridError::GridMismatch {
                left: self.grid,
                right: other.grid,
            });
        }
        Ok(())
    }

    /// Rectangle rule `h^d Σ u_j`, spectrally accurate for smooth periodic integrands.
    pub fn integrate(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }

    /// Discrete `‖u‖²_{L²}` under the rectangle rule.
    pub fn norm_sq(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// First non-finite entry, if any.
    pub fn check_finite(&self) -> Result<(), GridError> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(GridError::NonFinite {
                index,
                value: self.values[index],
            }),
            None => Ok(()),
        }
    }

    /// Cyclic shift by `m` nodes along axis 0: `out[j] = u[j - m]`.
    pub fn shift_x(&self, m: usize) -> Field {
        let n = self.grid.n;
        let rows = self.grid.len() / n;
        let mut values = vec![0.0; self.values.len()];
        for r in 0..rows {
            for j in 0..n {
                values[r * n + (j + m) % n] = self.values[r * n + j];
            }
        }
        Field {
            grid: self.grid,
            values,
        }
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl std::ops::Neg for &Field {
    type Output = Field;

    fn neg(self) -> Field {
        self.map(|v| -v)
    }
}
