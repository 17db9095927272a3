// SPDX-License-Identifier: Apache-2.0

//! Label encoding, nearest-neighbor classification and accuracy.

mod grid;

use nalgebra::DMatrix;

use crate::error::{ensure_shape, Error, Result};

pub use grid::{grid_search, stratified_folds, GridCell, GridParam, GridResult, GridSpec, DEFAULT_GRID};

/// `L × N` one-hot label matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    pub y: DMatrix<f64>,
    pub class_names: Option<Vec<String>>,
}

impl LabelMatrix {
    /// Index of the 1 in each column, 1-based.
    pub fn decode(&self) -> Vec<usize> {
        self.y.column_iter().map(|c| c.argmax().0 + 1).collect()
    }
}

/// `Y_tk = 1` iff sample `k` belongs to class `t` (1-based labels).
pub fn one_hot(labels: &[usize], n_classes: usize) -> Result<LabelMatrix> {
    let mut y = DMatrix::zeros(n_classes, labels.len());
    for (k, &t) in labels.iter().enumerate() {
        if t == 0 || t > n_classes {
            return Err(Error::Input(format!(
                "label {t} at sample {k} outside 1..={n_classes}"
            )));
        }
        y[(t - 1, k)] = 1.0;
    }
    Ok(LabelMatrix { y, class_names: None })
}

/// Labels each test column with the label of its Euclidean-nearest training
/// column. Ties go to the lowest training index.
pub fn nn_classify(train: &DMatrix<f64>, train_labels: &[usize], test: &DMatrix<f64>) -> Result<Vec<usize>> {
    if train.ncols() == 0 {
        return Err(Error::Input("empty training set".into()));
    }
    ensure_shape!(
        train_labels.len() == train.ncols(),
        "{} labels for {} training samples",
        train_labels.len(),
        train.ncols()
    );
    ensure_shape!(
        train.nrows() == test.nrows(),
        "training features have {} dimensions, test features {}",
        train.nrows(),
        test.nrows()
    );
    Ok(test
        .column_iter()
        .map(|q| {
            let mut best = (f64::INFINITY, 0usize);
            for (j, c) in train.column_iter().enumerate() {
                let d: f64 = q.iter().zip(c.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best.0 {
                    best = (d, j);
                }
            }
            train_labels[best.1]
        })
        .collect())
}

pub fn overall_accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::Input(format!(
            "{} predictions for {} ground-truth labels",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Input("cannot score an empty prediction list".into()));
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / pred.len() as f64)
}
