//! JSON file formats for tabulated channels and processes.
//!
//! Matrices may be written either as nested rows (`[[..], [..]]`) or as one
//! flat row-major array of `d⁴` numbers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basis::HermitianBasis;
use crate::channels::TransferMatrix;
use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::policy::POLICY;
use crate::processes::{QuantumProcess, TabulatedProcess};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixData {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixData {
    /// Row-major `n × n` matrix.
    pub fn to_matrix(&self, n: usize) -> Result<RMatrix> {
        match self {
            MatrixData::Nested(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(rows.len()),
                    });
                }
                Ok(RMatrix::from_fn(n, n, |i, j| rows[i][j]))
            }
            MatrixData::Flat(v) => {
                if v.len() != n * n {
                    return Err(Error::DimensionMismatch {
                        expected: n * n,
                        found: v.len(),
                    });
                }
                Ok(RMatrix::from_row_slice(n, n, v))
            }
        }
    }

    pub fn from_matrix(m: &RMatrix) -> Self {
        MatrixData::Nested((0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim: usize,
    pub rows: MatrixData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessFile {
    pub dim: usize,
    pub times: Vec<f64>,
    pub transfers: Vec<MatrixData>,
}

fn check_dim(dim: usize) -> Result<usize> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(dim * dim)
}

impl ChannelFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Rejected unless the first row is `(1, 0, …, 0)` within `1e-8`.
    pub fn to_transfer(&self) -> Result<TransferMatrix> {
        let n = check_dim(self.dim)?;
        TransferMatrix::with_tolerance(self.dim, self.rows.to_matrix(n)?, POLICY.file_trace_preservation)
    }
}

impl ProcessFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_process(&self, label: impl Into<String>, basis: &HermitianBasis) -> Result<QuantumProcess> {
        let n = check_dim(self.dim)?;
        if self.times.len() != self.transfers.len() {
            return Err(Error::InvalidInput(format!(
                "{} times but {} transfer matrices",
                self.times.len(),
                self.transfers.len()
            )));
        }
        let transfers = self
            .transfers
            .iter()
            .map(|m| m.to_matrix(n))
            .collect::<Result<Vec<_>>>()?;
        let table = TabulatedProcess::new(self.dim, self.times.clone(), transfers, basis)?;
        Ok(QuantumProcess::tabulated(label, table))
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_channel(path: &Path) -> Result<TransferMatrix> {
    ChannelFile::parse(&read(path)?)?.to_transfer()
}

pub fn load_process(path: &Path) -> Result<QuantumProcess> {
    let file = ProcessFile::parse(&read(path)?)?;
    let basis = HermitianBasis::new(file.dim)?;
    file.to_process(path.display().to_string(), &basis)
}
