//! Matrix JSON format:
//! `{"dims": [d1, ...], "parties": ["A", ...], "data": [[re, im], ...]}`, row-major,
//! with an optional `"hermitian": true` flag that the reader checks.

use serde::{Deserialize, Serialize};

use super::layout::{Party, SystemLayout};
use super::matrix::{CMatrix, C64};
use crate::config::Tolerances;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dims: Vec<usize>,
    pub parties: Vec<Party>,
    pub data: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hermitian: Option<bool>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (dims, parties) = match m.layout() {
            Some(l) => l.factors().iter().map(|&(d, p)| (d, p)).unzip(),
            None => (vec![m.dim()], vec![Party::A]),
        };
        Self {
            dims,
            parties,
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
            hermitian: None,
        }
    }

    pub fn into_matrix(self) -> Result<CMatrix> {
        if self.dims.len() != self.parties.len() {
            return Err(Error::Parse(format!(
                "{} dims but {} parties",
                self.dims.len(),
                self.parties.len()
            )));
        }
        let layout = SystemLayout::new(self.dims.into_iter().zip(self.parties).collect())?;
        let dim = layout.total_dim();
        if self.data.len() != dim * dim {
            return Err(Error::Parse(format!(
                "matrix data has {} entries, layout implies {}",
                self.data.len(),
                dim * dim
            )));
        }
        let data = self.data.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        let m = CMatrix::from_vec(dim, data)?.with_layout(layout)?;
        if self.hermitian == Some(true) {
            let err = m.hermiticity_error();
            if err > Tolerances::default().structural {
                return Err(Error::Validation(format!("matrix flagged Hermitian has asymmetry {err:.3e}")));
            }
        }
        Ok(m)
    }
}

impl CMatrix {
    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(self)
    }

    pub fn from_json_str(s: &str) -> Result<CMatrix> {
        let parsed: MatrixJson = serde_json::from_str(s)?;
        parsed.into_matrix()
    }
}
