// SPDX-License-Identifier: Apache-2.0

//! Joint and progressive subspace learning.
//!
//! A stack of linear projections `Θ_m ⋯ Θ_1` is learned together with a
//! regression map `P` onto one-hot labels. Every layer is initialized with
//! locality preserving projections, pre-trained by an ADMM solver with
//! non-negativity and unit-norm constraints on its output, then fine-tuned
//! jointly with `P`. The learned subspace is scored with a 1-NN classifier.
//!
//! Data matrices store one sample per column.

pub mod autorule;
pub mod classify;
pub mod data;
pub mod embed;
mod error;
pub mod graph;
pub mod jplay;
mod linalg;

pub use autorule::{fit_autorule, AdmmConfig, AdmmState, ConvergenceReport, ResidualMode};
pub use classify::{grid_search, nn_classify, one_hot, overall_accuracy, GridResult, GridSpec, LabelMatrix};
pub use data::{DataMatrix, Dataset, NormalizeMode};
pub use embed::{apply, fit_lpp, fit_pca, Projection};
pub use error::{Error, Result};
pub use graph::{build_graph, knn_adjacency, laplacian, Bandwidth, GraphConfig, GraphLaplacian};
pub use jplay::{fit, objective, transform, update_p, Depth, JPlayConfig, ObjectiveBreakdown, TrainedModel};

/// Re-exported so downstream crates share the matrix type.
pub use nalgebra;
