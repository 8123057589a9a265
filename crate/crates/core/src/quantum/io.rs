//! Matrix serialization: JSON arrays of `[re, im]` pairs and little-endian
//! binary, both row-major.
//!
//! The binary layout is `rows: u64`, `cols: u64`, then `rows * cols` pairs of
//! `f64` (real, imaginary), all little-endian.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{c, CMatrix, CVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.data.len() != j.rows * j.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix with {} entries",
                j.rows,
                j.cols,
                j.data.len()
            )));
        }
        Ok(CMatrix::from_row_iterator(j.rows, j.cols, j.data.iter().map(|p| c(p[0], p[1]))))
    }
}

/// Amplitudes as a JSON list of `[re, im]`.
pub fn vector_to_json(v: &CVector) -> serde_json::Value {
    serde_json::Value::Array(
        v.iter()
            .map(|z| serde_json::json!([z.re, z.im]))
            .collect(),
    )
}

pub fn write_binary<W: Write>(m: &CMatrix, mut w: W) -> std::io::Result<()> {
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> std::io::Result<CMatrix> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            r.read_exact(&mut word)?;
            let re = f64::from_le_bytes(word);
            r.read_exact(&mut word)?;
            let im = f64::from_le_bytes(word);
            m[(i, j)] = c(re, im);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix() -> impl Strategy<Value = CMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, cc)| {
            proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), r * cc).prop_map(move |v| {
                CMatrix::from_row_iterator(r, cc, v.into_iter().map(|(a, b)| c(a, b)))
            })
        })
    }

    proptest! {
        #[test]
        fn json_and_binary_round_trip(m in arb_matrix()) {
            let text = serde_json::to_string(&MatrixJson::from(&m)).unwrap();
            let back: MatrixJson = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(CMatrix::try_from(back).unwrap(), m.clone());

            let mut buf = Vec::new();
            write_binary(&m, &mut buf).unwrap();
            prop_assert_eq!(buf.len(), 16 + 16 * m.len());
            prop_assert_eq!(read_binary(&buf[..]).unwrap(), m);
        }
    }

    #[test]
    fn json_is_row_major() {
        let m = CMatrix::from_row_slice(1, 2, &[c(1.0, 2.0), c(3.0, 4.0)]);
        assert_eq!(MatrixJson::from(&m).data, vec![[1.0, 2.0], [3.0, 4.0]]);
    }
}
