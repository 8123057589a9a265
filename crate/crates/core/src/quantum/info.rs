//! Purity, von Neumann entropy and mutual information (entropies in bits).

use super::linalg::{eigvalsh, hermiticity_error, subset_offsets};
use super::{partial_trace, CMatrix, DensityMatrix, StateVector, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> Result<f64> {
    let herm = hermiticity_error(rho.matrix());
    if herm > HERMITIAN_TOL {
        return Err(Error::NotHermitian(herm));
    }
    // Tr ρ² = Σ_ij |ρ_ij|² for Hermitian ρ.
    Ok(rho.matrix().iter().map(|z| z.norm_sqr()).sum())
}

/// Shannon entropy in bits of a spectrum, with `0 log 0 = 0` and negative
/// round-off clipped.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .map(|&l| l.max(0.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy `−Tr ρ log₂ ρ`.
pub fn entropy(rho: &DensityMatrix) -> Result<f64> {
    let herm = hermiticity_error(rho.matrix());
    if herm > HERMITIAN_TOL {
        return Err(Error::NotHermitian(herm));
    }
    Ok(spectrum_entropy(&rho.eigenvalues()))
}

fn complement(n: usize, cut: &[usize]) -> Result<Vec<usize>> {
    if cut.is_empty() {
        return Err(Error::InvalidArgument("empty bipartition cut".into()));
    }
    let mut inside = vec![false; n];
    for &k in cut {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, n });
        }
        if inside[k] {
            return Err(Error::InvalidArgument(format!("factor {k} listed twice in cut")));
        }
        inside[k] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&k| !inside[k]).collect();
    if rest.is_empty() {
        return Err(Error::InvalidArgument("cut contains every factor".into()));
    }
    Ok(rest)
}

/// `S(ρ_A) + S(ρ_B) − S(ρ)` where `A` are the factors in `cut` and `B` the rest.
pub fn mutual_information(rho: &DensityMatrix, cut: &[usize]) -> Result<f64> {
    let rest = complement(rho.dims().len(), cut)?;
    let a = partial_trace(rho, cut)?;
    let b = partial_trace(rho, &rest)?;
    Ok(entropy(&a)? + entropy(&b)? - entropy(rho)?)
}

/// Entropy of the reduced state of `subset` for a pure global state,
/// diagonalizing whichever side of the cut is smaller.
pub fn subsystem_entropy(psi: &StateVector, subset: &[usize]) -> Result<f64> {
    let dims = psi.dims();
    let n = dims.len();
    if subset.is_empty() || subset.len() == n {
        return Ok(0.0);
    }
    let rest = complement(n, subset)?;
    let a = subset_offsets(dims, subset);
    let b = subset_offsets(dims, &rest);
    let (rows, cols) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    let amps = psi.amplitudes();
    let mut m = CMatrix::zeros(rows.len(), cols.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &s) in cols.iter().enumerate() {
            m[(i, j)] = amps[r + s];
        }
    }
    Ok(spectrum_entropy(&eigvalsh(&(&m * m.adjoint()))))
}
