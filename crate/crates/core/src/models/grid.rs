//! Position-grid density matrices `ρ(x, x′)` on a uniform 1-d grid.
//!
//! The stored matrix holds `ρ(x_i, x_j)·Δ`, so its trace is the discrete
//! normalization `Σ ρ(x_i, x_i) Δ = 1`.

use crate::error::{Error, Result};
use crate::quantum::{re, CMatrix, CVector, DensityMatrix, C64};

#[derive(Debug, Clone)]
pub struct GridState {
    x: Vec<f64>,
    rho: DensityMatrix,
}

pub fn uniform_grid(n: usize, spacing: f64) -> Vec<f64> {
    let centre = 0.5 * (n as f64 - 1.0);
    (0..n).map(|i| (i as f64 - centre) * spacing).collect()
}

impl GridState {
    pub fn new(x: Vec<f64>, rho: DensityMatrix) -> Result<Self> {
        if x.len() != rho.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} grid points for a {}-dimensional state",
                x.len(),
                rho.dim()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidArgument("grid needs at least two points".into()));
        }
        let h = x[1] - x[0];
        if !(h > 0.0) || x.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
            return Err(Error::InvalidArgument("grid must be uniform and ascending".into()));
        }
        Ok(Self { x, rho })
    }

    /// Pure state from wavefunction samples, normalized on the grid.
    pub fn from_wavefunction(x: Vec<f64>, psi: &[C64]) -> Result<Self> {
        if x.len() != psi.len() {
            return Err(Error::DimensionMismatch("grid and wavefunction lengths differ".into()));
        }
        let v = CVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let v = v.unscale(norm);
        let rho = DensityMatrix::new_unchecked(&v * v.adjoint(), vec![x.len()])?;
        Self::new(x, rho)
    }

    /// Equal-weight superposition of real Gaussians of width `sigma`
    /// centred at each of `centres`.
    pub fn gaussian_superposition(x: Vec<f64>, centres: &[f64], sigma: f64) -> Result<Self> {
        let psi: Vec<C64> = x
            .iter()
            .map(|&xi| {
                re(centres
                    .iter()
                    .map(|c| (-(xi - c) * (xi - c) / (4.0 * sigma * sigma)).exp())
                    .sum())
            })
            .collect();
        Self::from_wavefunction(x, &psi)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn spacing(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn into_density(self) -> DensityMatrix {
        self.rho
    }

    /// `ρ(x_i, x_j)` in physical units (1/length).
    pub fn value(&self, i: usize, j: usize) -> C64 {
        self.rho.matrix()[(i, j)] / self.spacing()
    }

    pub fn with_density(&self, rho: DensityMatrix) -> Result<Self> {
        Self::new(self.x.clone(), rho)
    }

    pub fn map_entries(&self, f: impl Fn(usize, usize, C64) -> C64) -> Result<Self> {
        let n = self.len();
        let m = self.rho.matrix();
        let out = CMatrix::from_fn(n, n, |i, j| f(i, j, m[(i, j)]));
        self.with_density(DensityMatrix::new_unchecked(out, vec![n])?)
    }

    pub fn mean_position(&self) -> f64 {
        let m = self.rho.matrix();
        self.x.iter().enumerate().map(|(i, x)| x * m[(i, i)].re).sum()
    }

    /// `⟨X²⟩ − ⟨X⟩²`.
    pub fn position_variance(&self) -> f64 {
        let m = self.rho.matrix();
        let mean = self.mean_position();
        self.x.iter().enumerate().map(|(i, x)| (x - mean) * (x - mean) * m[(i, i)].re).sum()
    }

    /// Frobenius norm of the block `ρ(x < split, x′ > split)`, the
    /// interference term between a left and a right packet.
    pub fn cross_block_norm(&self, split: f64) -> f64 {
        let m = self.rho.matrix();
        let mut s = 0.0;
        for (i, xi) in self.x.iter().enumerate() {
            if *xi >= split {
                continue;
            }
            for (j, xj) in self.x.iter().enumerate() {
                if *xj > split {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt() / self.spacing()
    }
}
