// SPDX-License-Identifier: Apache-2.0

//! k-nearest-neighbor heat-kernel graphs and their Laplacians.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Heat-kernel bandwidth σ in `exp(-‖xᵢ - xⱼ‖² / 2σ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Bandwidth {
    /// Mean Euclidean length of the kept edges.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    pub k: usize,
    pub bandwidth: Bandwidth,
    /// Only connect neighbors that share a label.
    pub supervised: bool,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            k: 10,
            bandwidth: Bandwidth::Auto,
            supervised: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphLaplacian {
    pub adjacency: DMatrix<f64>,
    /// Diagonal of the degree matrix.
    pub degree: DVector<f64>,
    pub laplacian: DMatrix<f64>,
}

impl GraphLaplacian {
    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn degree_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.degree)
    }

    /// Nonzero upper-triangle edges as `(i, j, w)` triplets.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..j {
                let w = self.adjacency[(i, j)];
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }
}

pub(crate) fn pairwise_sq_distances(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.ncols();
    // (p - q)² == (q - p)² bitwise, so the result is exactly symmetric
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = x.column(i);
            (0..n)
                .map(|j| xi.iter().zip(x.column(j).iter()).map(|(p, q)| (p - q) * (p - q)).sum())
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Heat-kernel kNN adjacency with OR-symmetrization.
///
/// Every neighbor tied with the k-th nearest distance is kept. With
/// `labels`, candidate neighbors are restricted to samples of the same class.
pub fn knn_adjacency(
    x: &DataMatrix,
    k: usize,
    bandwidth: Bandwidth,
    labels: Option<&[usize]>,
) -> Result<DMatrix<f64>> {
    let n = x.n_samples();
    if n < 2 {
        return Err(Error::Input(format!("a graph needs at least 2 samples, got {n}")));
    }
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!("graph k must satisfy 0 < k < N = {n}, got {k}")));
    }
    if let Bandwidth::Fixed(s) = bandwidth {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Parameter(format!("bandwidth must be positive, got {s}")));
        }
    }
    if let Some(l) = labels {
        if l.len() != n {
            return Err(Error::Shape(format!("{} labels for {n} samples", l.len())));
        }
    }
    let dist = pairwise_sq_distances(x.matrix());

    let mut keep = vec![false; n * n];
    for i in 0..n {
        let mut cand: Vec<f64> = (0..n)
            .filter(|&j| j != i && labels.is_none_or(|l| l[j] == l[i]))
            .map(|j| dist[(i, j)])
            .collect();
        if cand.is_empty() {
            continue;
        }
        cand.sort_by(f64::total_cmp);
        let cutoff = cand[k.min(cand.len()) - 1];
        for j in 0..n {
            if j != i && labels.is_none_or(|l| l[j] == l[i]) && dist[(i, j)] <= cutoff {
                keep[i * n + j] = true;
                keep[j * n + i] = true;
            }
        }
    }

    let sigma = match bandwidth {
        Bandwidth::Fixed(s) => s,
        Bandwidth::Auto => {
            let (mut sum, mut count) = (0.0, 0usize);
            for j in 0..n {
                for i in 0..j {
                    if keep[i * n + j] {
                        sum += dist[(i, j)].sqrt();
                        count += 1;
                    }
                }
            }
            let mean = if count > 0 { sum / count as f64 } else { 0.0 };
            // all kept edges have zero length: any σ gives weight 1
            if mean > 0.0 {
                mean
            } else {
                1.0
            }
        }
    };
    let denom = 2.0 * sigma * sigma;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if keep[i * n + j] {
            (-dist[(i, j)] / denom).exp()
        } else {
            0.0
        }
    }))
}

/// `D = diag(W·1)`, `L = D − W`.
pub fn laplacian(w: &DMatrix<f64>) -> Result<GraphLaplacian> {
    let n = w.nrows();
    if w.ncols() != n {
        return Err(Error::Shape(format!("adjacency must be square, got {}x{}", n, w.ncols())));
    }
    for i in 0..n {
        if w[(i, i)] != 0.0 {
            return Err(Error::Input(format!("adjacency has nonzero diagonal at {i}")));
        }
        for j in 0..n {
            let v = w[(i, j)];
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Input(format!("adjacency entry ({i},{j}) = {v} is not a nonnegative weight")));
            }
            if v != w[(j, i)] {
                return Err(Error::Input(format!("adjacency is not symmetric at ({i},{j})")));
            }
        }
    }
    let degree = DVector::from_iterator(n, w.row_iter().map(|r| r.sum()));
    let mut lap = -w.clone();
    for i in 0..n {
        lap[(i, i)] += degree[i];
    }
    Ok(GraphLaplacian {
        adjacency: w.clone(),
        degree,
        laplacian: lap,
    })
}

/// Builds the graph for `x` under `cfg`.
pub fn build_graph(x: &DataMatrix, cfg: &GraphConfig, labels: Option<&[usize]>) -> Result<GraphLaplacian> {
    let labels = if cfg.supervised {
        Some(labels.ok_or_else(|| Error::Input("supervised graph requested without labels".into()))?)
    } else {
        None
    };
    laplacian(&knn_adjacency(x, cfg.k, cfg.bandwidth, labels)?)
}
