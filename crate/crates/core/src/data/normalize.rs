// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::DataMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizeMode {
    None,
    /// Divide every sample by the largest sample norm, so all norms are ≤ 1.
    UnitColumns,
    /// Per-feature zero mean, unit population standard deviation.
    ZscoreFeatures,
    /// Per-feature affine map onto [0, 1].
    MinmaxFeatures,
}

impl std::str::FromStr for NormalizeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(NormalizeMode::None),
            "unit-columns" => Ok(NormalizeMode::UnitColumns),
            "zscore-features" | "zscore" => Ok(NormalizeMode::ZscoreFeatures),
            "minmax-features" | "minmax" => Ok(NormalizeMode::MinmaxFeatures),
            other => Err(Error::Parameter(format!(
                "unknown normalization mode {other:?} (expected none, unit-columns, zscore-features, minmax-features)"
            ))),
        }
    }
}

/// Fitted normalization, reusable on held-out data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum NormalizationParams {
    None,
    UnitColumns { scale: f64 },
    /// `x' = (x - shift) * factor`, per feature.
    Affine { shift: Vec<f64>, factor: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct Normalized {
    pub data: DataMatrix,
    pub params: NormalizationParams,
    /// Features with zero variance or zero range; they map to 0.
    pub degenerate_features: Vec<usize>,
}

pub fn normalize(x: &DataMatrix, mode: NormalizeMode) -> Normalized {
    let m = x.matrix();
    let mut degenerate = Vec::new();
    let params = match mode {
        NormalizeMode::None => NormalizationParams::None,
        NormalizeMode::UnitColumns => {
            let max = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
            NormalizationParams::UnitColumns {
                scale: if max > 0.0 { max } else { 1.0 },
            }
        }
        NormalizeMode::ZscoreFeatures | NormalizeMode::MinmaxFeatures => {
            let n = m.ncols() as f64;
            let mut shift = Vec::with_capacity(m.nrows());
            let mut factor = Vec::with_capacity(m.nrows());
            for (i, row) in m.row_iter().enumerate() {
                let (s, spread) = if mode == NormalizeMode::ZscoreFeatures {
                    let mean = row.sum() / n;
                    let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                    (mean, var.sqrt())
                } else {
                    let lo = row.min();
                    (lo, row.max() - lo)
                };
                shift.push(s);
                if spread > 0.0 {
                    factor.push(1.0 / spread);
                } else {
                    degenerate.push(i);
                    factor.push(0.0);
                }
            }
            NormalizationParams::Affine { shift, factor }
        }
    };
    let data = params.apply(x).expect("parameters fitted on this matrix");
    Normalized {
        data,
        params,
        degenerate_features: degenerate,
    }
}

impl NormalizationParams {
    pub fn apply(&self, x: &DataMatrix) -> Result<DataMatrix> {
        let m = x.matrix();
        let out: DMatrix<f64> = match self {
            NormalizationParams::None => m.clone(),
            NormalizationParams::UnitColumns { scale } => m / *scale,
            NormalizationParams::Affine { shift, factor } => {
                if shift.len() != m.nrows() {
                    return Err(Error::Shape(format!(
                        "normalization fitted on {} features, data has {}",
                        shift.len(),
                        m.nrows()
                    )));
                }
                DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] - shift[i]) * factor[i])
            }
        };
        DataMatrix::new(out)
    }
}
