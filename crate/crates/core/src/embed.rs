// SPDX-License-Identifier: Apache-2.0

//! Linear embeddings: locality preserving projections and PCA.

use nalgebra::{DMatrix, DVector};

use crate::data::DataMatrix;
use crate::error::{ensure_shape, Error, Result};
use crate::graph::GraphLaplacian;
use crate::linalg::{normalize_row_signs, symmetrize};

/// A `d_out × d_in` linear map.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection(DMatrix<f64>);

impl Projection {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(Error::Input("projection has non-finite entries".into()));
        }
        Ok(Projection(m))
    }

    pub fn identity(d: usize) -> Self {
        Projection(DMatrix::identity(d, d))
    }

    pub fn d_in(&self) -> usize {
        self.0.ncols()
    }

    pub fn d_out(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

impl TryFrom<DMatrix<f64>> for Projection {
    type Error = Error;

    fn try_from(m: DMatrix<f64>) -> Result<Self> {
        Projection::new(m)
    }
}

impl From<Projection> for DMatrix<f64> {
    fn from(p: Projection) -> Self {
        p.0
    }
}

/// `M · X`.
pub fn apply(m: &Projection, x: &DataMatrix) -> Result<DataMatrix> {
    ensure_shape!(
        m.d_in() == x.dim(),
        "projection expects {} features, data has {}",
        m.d_in(),
        x.dim()
    );
    DataMatrix::new(m.matrix() * x.matrix())
}

#[derive(Debug, Clone)]
pub struct LppFit {
    pub projection: Projection,
    /// Generalized eigenvalues, ascending, one per projection row.
    pub eigenvalues: Vec<f64>,
    pub ridge: f64,
}

/// Default ridge for the LPP constraint matrix: `1e-6 · tr(XDXᵀ) / d`.
pub fn default_lpp_ridge(x: &DataMatrix, graph: &GraphLaplacian) -> f64 {
    let xm = x.matrix();
    let mut tr = 0.0;
    for (j, c) in xm.column_iter().enumerate() {
        tr += graph.degree[j] * c.norm_squared();
    }
    1e-6 * tr / xm.nrows() as f64
}

/// Solves `(X L Xᵀ) v = λ (X D Xᵀ + ridge·I) v` for the `d_out` smallest λ.
///
/// Rows of the returned projection are the eigenvectors, scaled so that
/// `vᵀ (X D Xᵀ + ridge·I) v = 1` and signed so their largest-magnitude entry
/// is positive. `ridge = None` uses [`default_lpp_ridge`].
pub fn fit_lpp(x: &DataMatrix, graph: &GraphLaplacian, d_out: usize, ridge: Option<f64>) -> Result<LppFit> {
    let xm = x.matrix();
    let d_in = xm.nrows();
    ensure_shape!(
        graph.n() == xm.ncols(),
        "graph has {} nodes but data has {} samples",
        graph.n(),
        xm.ncols()
    );
    if d_out == 0 {
        return Err(Error::Parameter("embedding dimension must be positive".into()));
    }
    if d_out > d_in {
        return Err(Error::Rank {
            requested: d_out,
            available: d_in,
        });
    }
    let ridge = ridge.unwrap_or_else(|| default_lpp_ridge(x, graph));
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::Parameter(format!("ridge must be nonnegative, got {ridge}")));
    }

    let mut a = xm * &graph.laplacian * xm.transpose();
    symmetrize(&mut a);
    let mut b = xm * graph.degree_matrix() * xm.transpose();
    symmetrize(&mut b);
    for i in 0..d_in {
        b[(i, i)] += ridge;
    }

    let singular = || {
        Error::Singular(format!(
            "LPP constraint matrix X·D·Xᵀ + {ridge:e}·I is numerically singular; increase the ridge"
        ))
    };
    let chol = b.clone().cholesky().ok_or_else(singular)?;
    let l = chol.l();
    let diag_max = l.diagonal().max();
    if l.diagonal().min() <= 1e-10 * diag_max || diag_max <= 0.0 {
        return Err(singular());
    }

    // C = L⁻¹ A L⁻ᵀ
    let linv_a = l.solve_lower_triangular(&a).ok_or_else(singular)?;
    let mut c = l
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or_else(singular)?;
    symmetrize(&mut c);

    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..d_in).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let order = &order[..d_out];

    let y = eig.eigenvectors.select_columns(order);
    let v = l.transpose().solve_upper_triangular(&y).ok_or_else(singular)?;
    let mut rows = v.transpose();
    normalize_row_signs(&mut rows);
    Ok(LppFit {
        projection: Projection::new(rows)?,
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        ridge,
    })
}

#[derive(Debug, Clone)]
pub struct PcaFit {
    /// Principal directions as rows, by descending variance.
    pub projection: Projection,
    /// Population variance (denominator N) along each direction.
    pub variances: Vec<f64>,
    pub mean: DVector<f64>,
}

impl PcaFit {
    /// Centers with the fitted mean, then projects.
    pub fn transform(&self, x: &DataMatrix) -> Result<DataMatrix> {
        ensure_shape!(
            self.mean.len() == x.dim(),
            "PCA fitted on {} features, data has {}",
            self.mean.len(),
            x.dim()
        );
        let mut centered = x.matrix().clone();
        for mut c in centered.column_iter_mut() {
            c -= &self.mean;
        }
        DataMatrix::new(self.projection.matrix() * centered)
    }
}

pub fn fit_pca(x: &DataMatrix, d_out: usize) -> Result<PcaFit> {
    let xm = x.matrix();
    let (d, n) = xm.shape();
    if d_out == 0 {
        return Err(Error::Parameter("PCA dimension must be positive".into()));
    }
    if d_out > d.min(n) {
        return Err(Error::Rank {
            requested: d_out,
            available: d.min(n),
        });
    }
    let mean = xm.column_mean();
    let mut centered = xm.clone();
    for mut c in centered.column_iter_mut() {
        c -= &mean;
    }
    let svd = centered.svd(true, false);
    let u = svd.u.as_ref().expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]).then(i.cmp(&j)));
    let s_max = svd.singular_values[order[0]];
    let tol = d.max(n) as f64 * f64::EPSILON * s_max;
    let rank = order.iter().filter(|&&i| svd.singular_values[i] > tol).count();
    if d_out > rank {
        return Err(Error::Rank {
            requested: d_out,
            available: rank,
        });
    }
    let order = &order[..d_out];
    let mut rows = u.select_columns(order).transpose();
    normalize_row_signs(&mut rows);
    Ok(PcaFit {
        projection: Projection::new(rows)?,
        variances: order
            .iter()
            .map(|&i| svd.singular_values[i].powi(2) / n as f64)
            .collect(),
        mean,
    })
}
