//! Discrete Wigner function `W(x,p) = (1/π)∫dy ρ(x+y, x−y) e^{−2ipy}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::grid::GridState;
use super::oscillator::OscillatorBasis;
use crate::dynamics::series::format_csv;
use crate::error::{Error, Result};
use crate::quantum::{re, CMatrix, DensityMatrix};

#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    /// `w[(i, j)] = W(x_i, p_j)`.
    pub w: DMatrix<f64>,
}

impl WignerGrid {
    fn cell(&self) -> f64 {
        let dx = self.x[1] - self.x[0];
        let dp = if self.p.len() > 1 { self.p[1] - self.p[0] } else { 1.0 };
        dx * dp
    }

    /// `Σ W Δx Δp`.
    pub fn integral(&self) -> f64 {
        self.w.sum() * self.cell()
    }

    /// `Σ |min(W, 0)| Δx Δp`.
    pub fn negative_volume(&self) -> f64 {
        self.w.iter().filter(|v| **v < 0.0).map(|v| -v).sum::<f64>() * self.cell()
    }

    /// Marginal `∫W dp` at each `x`.
    pub fn position_marginal(&self) -> Vec<f64> {
        let dp = self.cell() / (self.x[1] - self.x[0]);
        (0..self.x.len()).map(|i| self.w.row(i).sum() * dp).collect()
    }

    /// Largest `|W|` over cells with `lo ≤ x ≤ hi`.
    pub fn max_abs_in(&self, lo: f64, hi: f64) -> f64 {
        let mut m = 0.0f64;
        for (i, x) in self.x.iter().enumerate() {
            if *x >= lo && *x <= hi {
                m = self.w.row(i).iter().fold(m, |a, v| a.max(v.abs()));
            }
        }
        m
    }

    /// Columns `x, p, W`.
    pub fn to_csv(&self) -> String {
        let mut rows = Vec::with_capacity(self.x.len() * self.p.len());
        for (i, x) in self.x.iter().enumerate() {
            for (j, p) in self.p.iter().enumerate() {
                rows.push(vec![*x, *p, self.w[(i, j)]]);
            }
        }
        format_csv(&["x", "p", "W"], &rows)
    }
}

/// `M` momenta of spacing `π/(MΔ)` covering `[−π/(2Δ), π/(2Δ))`; on this grid
/// the discrete transform is normalized exactly for `M ≥ N`.
pub fn default_momentum_grid(n: usize, spacing: f64) -> Vec<f64> {
    let dp = PI / (n as f64 * spacing);
    (0..n).map(|m| -PI / (2.0 * spacing) + m as f64 * dp).collect()
}

pub fn wigner_transform(state: &GridState, p_grid: Option<&[f64]>) -> Result<WignerGrid> {
    let n = state.len();
    let h = state.spacing();
    let p = match p_grid {
        Some(p) => p.to_vec(),
        None => default_momentum_grid(n, h),
    };
    let nyquist = PI / (2.0 * h);
    if let Some(bad) = p.iter().find(|q| q.abs() > nyquist * (1.0 + 1e-12)) {
        return Err(Error::GridTooCoarse(format!(
            "momentum {bad} exceeds the grid limit π/(2Δ) = {nyquist}"
        )));
    }
    let m = state.density().matrix();
    let mut w = DMatrix::zeros(n, p.len());
    for i in 0..n {
        let reach = i.min(n - 1 - i);
        for (jp, q) in p.iter().enumerate() {
            let mut sum = m[(i, i)].re;
            for k in 1..=reach {
                let z = m[(i + k, i - k)];
                let (s, c) = (2.0 * q * k as f64 * h).sin_cos();
                // ρ(x+y,x−y)e^{−2ipy} + ρ(x−y,x+y)e^{2ipy} = 2 Re[ρ(x+y,x−y)e^{−2ipy}]
                sum += 2.0 * (z.re * c + z.im * s);
            }
            w[(i, jp)] = sum / PI;
        }
    }
    Ok(WignerGrid { x: state.x().to_vec(), p, w })
}

/// Oscillator density matrix sampled on a position grid through the
/// Hermite functions of the basis, renormalized on the grid.
pub fn oscillator_to_grid(rho: &DensityMatrix, basis: &OscillatorBasis, x: Vec<f64>) -> Result<GridState> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} for a basis of dimension {}",
            rho.dim(),
            basis.dim()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("grid needs at least two points".into()));
    }
    let s = (basis.mass * basis.omega).sqrt();
    let d = basis.dim();
    let mut phi = CMatrix::zeros(x.len(), d);
    for (i, xi) in x.iter().enumerate() {
        let xi_s = s * xi;
        let mut prev = 0.0;
        let mut cur = (s * s / PI).powf(0.25) * (-0.5 * xi_s * xi_s).exp();
        for n in 0..d {
            phi[(i, n)] = re(cur);
            let next = (2.0 / (n as f64 + 1.0)).sqrt() * xi_s * cur - (n as f64 / (n as f64 + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
    }
    let h = x[1] - x[0];
    let n = x.len();
    let mut g = &phi * rho.matrix() * phi.transpose() * re(h);
    let tr = g.trace().re;
    if !(tr > 0.0) {
        return Err(Error::GridTooCoarse("state has no weight on the grid".into()));
    }
    g.unscale_mut(tr);
    GridState::new(x, DensityMatrix::new_unchecked(g, vec![n])?)
}

pub fn wigner_transform_oscillator(
    rho: &DensityMatrix,
    basis: &OscillatorBasis,
    x: Vec<f64>,
    p_grid: Option<&[f64]>,
) -> Result<WignerGrid> {
    wigner_transform(&oscillator_to_grid(rho, basis, x)?, p_grid)
}
