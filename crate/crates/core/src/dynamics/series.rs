//! Plain-text CSV for time series and scans. Numbers are written as
//! `{:.16e}` (17 significant digits) so values round-trip exactly.

use std::fmt::Write as _;

use crate::error::Result;
use crate::quantum::{entropy, purity, DensityMatrix};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header line plus one line per row.
pub fn format_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

/// Columns `t`, every `ρ_ij` as `re,im` in row-major order, `purity`,
/// `entropy`, then `|ρ_ij|` for each requested pair.
pub fn density_series_csv(
    times: &[f64],
    states: &[DensityMatrix],
    coherences: &[(usize, usize)],
) -> Result<String> {
    let d = states.first().map(|s| s.dim()).unwrap_or(0);
    let mut header = vec!["t".to_string()];
    for i in 0..d {
        for j in 0..d {
            header.push(format!("rho_{i}_{j}_re"));
            header.push(format!("rho_{i}_{j}_im"));
        }
    }
    header.push("purity".into());
    header.push("entropy".into());
    for (i, j) in coherences {
        header.push(format!("abs_rho_{i}_{j}"));
    }
    let mut rows = Vec::with_capacity(states.len());
    for (t, s) in times.iter().zip(states) {
        let m = s.matrix();
        let mut row = vec![*t];
        for i in 0..d {
            for j in 0..d {
                row.push(m[(i, j)].re);
                row.push(m[(i, j)].im);
            }
        }
        row.push(purity(s)?);
        row.push(entropy(s)?);
        for &(i, j) in coherences {
            row.push(m[(i, j)].norm());
        }
        rows.push(row);
    }
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(format_csv(&refs, &rows))
}
