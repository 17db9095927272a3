// SPDX-License-Identifier: Apache-2.0

//! Dataset containers, file formats, normalization, splits and synthetic fixtures.
//!
//! Samples are always stored as columns: a `DataMatrix` is `d × N`.

mod binary;
mod csv_io;
mod normalize;
mod split;
mod synth;

use nalgebra::DMatrix;
use crate::error::{Error, Result};

pub use binary::{decode_binary, encode_binary, load_binary, save_binary, BINARY_MAGIC, BINARY_VERSION};
pub use csv_io::{load_csv, render_csv, save_csv, CsvOptions, LabelColumn, Orientation};
pub use normalize::{normalize, NormalizeMode, Normalized, NormalizationParams};
pub use split::{load_split, random_split_per_class, render_split, save_split, Split};
pub use synth::{bundled_blobs, bundled_four_class, synth_blobs};

/// A finite `d × N` matrix of samples stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix(DMatrix<f64>);

impl DataMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Input(format!(
                "data matrix must be at least 1x1, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if let Some((idx, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            let (r, c) = (idx % values.nrows(), idx / values.nrows());
            return Err(Error::Input(format!(
                "non-finite value {v} at feature {r}, sample {c}"
            )));
        }
        Ok(DataMatrix(values))
    }

    /// Feature count `d`.
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Sample count `N`.
    pub fn n_samples(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Keeps the given sample columns, in the given order.
    pub fn select_samples(&self, idx: &[usize]) -> DataMatrix {
        DataMatrix(self.0.select_columns(idx))
    }
}

impl AsRef<DMatrix<f64>> for DataMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Samples plus optional 1-based class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DataMatrix,
    pub labels: Option<Vec<usize>>,
    pub n_classes: usize,
    pub split: Option<Split>,
}

impl Dataset {
    /// Builds a dataset, inferring the class count as the largest label.
    pub fn new(x: DataMatrix, labels: Option<Vec<usize>>) -> Result<Self> {
        let n_classes = match &labels {
            Some(l) => {
                if l.len() != x.n_samples() {
                    return Err(Error::Input(format!(
                        "{} labels for {} samples",
                        l.len(),
                        x.n_samples()
                    )));
                }
                if let Some(pos) = l.iter().position(|&c| c == 0) {
                    return Err(Error::Input(format!(
                        "label at sample {pos} is 0; labels are 1-based"
                    )));
                }
                l.iter().copied().max().unwrap_or(0)
            }
            None => 0,
        };
        Ok(Dataset {
            x,
            labels,
            n_classes,
            split: None,
        })
    }

    pub fn with_split(mut self, split: Split) -> Result<Self> {
        split.validate(self.data().n_samples())?;
        self.split = Some(split);
        Ok(self)
    }

    pub fn data(&self) -> &DataMatrix {
        &self.x
    }

    pub fn labels(&self) -> Result<&[usize]> {
        self.labels
            .as_deref()
            .ok_or_else(|| Error::Input("dataset has no labels".into()))
    }

    /// Restricts the dataset to the given samples. The class count is kept.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select_samples(idx),
            labels: self
                .labels
                .as_ref()
                .map(|l| idx.iter().map(|&i| l[i]).collect()),
            n_classes: self.n_classes,
            split: None,
        }
    }
}
