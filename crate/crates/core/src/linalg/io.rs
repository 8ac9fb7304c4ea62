//! Shared matrix file format:
//!
//! ```json
//! { "legs": [2, 2], "re": [[...], ...], "im": [[...], ...] }
//! ```
//!
//! Rows are listed top to bottom; both `re` and `im` are required and must
//! be square with side equal to the product of `legs`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::operator::{C64, CMatrix, LeggedOperator};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub legs: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&LeggedOperator> for MatrixJson {
    fn from(x: &LeggedOperator) -> Self {
        let n = x.side();
        let e = x.entries();
        MatrixJson {
            legs: x.legs().to_vec(),
            re: (0..n).map(|i| (0..n).map(|j| e[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| e[(i, j)].im).collect()).collect(),
        }
    }
}

impl From<LeggedOperator> for MatrixJson {
    fn from(x: LeggedOperator) -> Self {
        MatrixJson::from(&x)
    }
}

impl TryFrom<MatrixJson> for LeggedOperator {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        let side: usize = m.legs.iter().product();
        if m.legs.is_empty() || m.legs.contains(&0) {
            return Err(Error::Format(format!("invalid legs {:?}", m.legs)));
        }
        for (name, rows) in [("re", &m.re), ("im", &m.im)] {
            if rows.len() != side {
                return Err(Error::Format(format!(
                    "`{name}` has {} rows but legs {:?} require {side}",
                    rows.len(),
                    m.legs
                )));
            }
            if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != side) {
                return Err(Error::Format(format!("`{name}` row {i} has {} entries, expected {side}", r.len())));
            }
            if rows.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Format(format!("`{name}` contains a non-finite entry")));
            }
        }
        let entries = CMatrix::from_fn(side, side, |i, j| C64::new(m.re[i][j], m.im[i][j]));
        LeggedOperator::new(entries, m.legs)
    }
}

pub fn matrix_from_json_str(s: &str) -> Result<LeggedOperator> {
    let m: MatrixJson = serde_json::from_str(s)?;
    m.try_into()
}

pub fn matrix_to_json_string(x: &LeggedOperator) -> String {
    serde_json::to_string_pretty(&MatrixJson::from(x)).expect("plain data serializes")
}

pub fn load_matrix(path: &Path) -> Result<LeggedOperator> {
    matrix_from_json_str(&std::fs::read_to_string(path)?)
}

pub fn save_matrix(path: &Path, x: &LeggedOperator) -> Result<()> {
    std::fs::write(path, matrix_to_json_string(x))?;
    Ok(())
}
