// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{JPlayConfig, TrainedModel};
use crate::error::{ensure_shape, Result};
use crate::graph::GraphLaplacian;

/// The four raw terms and the weighted total
/// `½·Σ recon + (α/2)·prediction + (β/2)·Σ manifold + (γ/2)·regularization`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub total: f64,
    /// `Σ_l ‖X_{l−1} − Θ_lᵀΘ_l X_{l−1}‖²`
    pub reconstruction: f64,
    /// `‖Y − P X_m‖²`
    pub prediction: f64,
    /// `Σ_l tr(Θ_l X_{l−1} L X_{l−1}ᵀ Θ_lᵀ)`
    pub manifold: f64,
    /// `‖P‖²`
    pub regularization: f64,
}

/// Objective with one Laplacian shared by every layer.
pub fn objective(
    model: &TrainedModel,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    graph: &GraphLaplacian,
    cfg: &JPlayConfig,
) -> Result<ObjectiveBreakdown> {
    objective_parts(&model.thetas_raw(), &model.p, x, y, std::slice::from_ref(graph), cfg)
}

/// `graphs` holds either one shared Laplacian or one per layer.
pub(crate) fn objective_parts(
    thetas: &[&DMatrix<f64>],
    p: &DMatrix<f64>,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    graphs: &[GraphLaplacian],
    cfg: &JPlayConfig,
) -> Result<ObjectiveBreakdown> {
    ensure_shape!(!thetas.is_empty(), "model has no layers");
    ensure_shape!(
        graphs.len() == 1 || graphs.len() == thetas.len(),
        "{} graphs for {} layers",
        graphs.len(),
        thetas.len()
    );
    ensure_shape!(y.ncols() == x.ncols(), "Y has {} columns, X has {}", y.ncols(), x.ncols());

    let mut reconstruction = 0.0;
    let mut manifold = 0.0;
    let mut cur = x.clone();
    for (l, theta) in thetas.iter().enumerate() {
        ensure_shape!(
            theta.ncols() == cur.nrows(),
            "layer {} expects {} inputs, got {}",
            l + 1,
            theta.ncols(),
            cur.nrows()
        );
        let lap = &graphs[if graphs.len() == 1 { 0 } else { l }].laplacian;
        ensure_shape!(lap.nrows() == cur.ncols(), "graph size does not match sample count");
        let next = *theta * &cur;
        reconstruction += (&cur - theta.transpose() * &next).norm_squared();
        // tr(Z L Zᵀ) = Σ_ij L_ij ⟨z_i, z_j⟩ = ⟨Z L, Z⟩
        manifold += (&next * lap).dot(&next);
        cur = next;
    }
    ensure_shape!(
        p.ncols() == cur.nrows() && p.nrows() == y.nrows(),
        "P is {:?}, expected {}x{}",
        p.shape(),
        y.nrows(),
        cur.nrows()
    );
    let prediction = (y - p * &cur).norm_squared();
    let regularization = p.norm_squared();
    Ok(ObjectiveBreakdown {
        total: 0.5 * reconstruction
            + 0.5 * cfg.alpha * prediction
            + 0.5 * cfg.beta * manifold
            + 0.5 * cfg.gamma * regularization,
        reconstruction,
        prediction,
        manifold,
        regularization,
    })
}
