// SPDX-License-Identifier: Apache-2.0

//! Joint and progressive training of a projection stack `Θ_1..Θ_m` and a
//! label-regression map `P`.
//!
//! Training has two phases. Pre-training initializes each layer greedily
//! from LPP and refines it with the unsupervised ADMM solver. Fine-tuning
//! then alternates the closed-form `P` update with a supervised ADMM pass
//! over every layer until the relative objective change drops below `zeta`.

mod io;
mod objective;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::autorule::{run_admm, AdmmConfig, ConvergenceReport, LayerTerms, Supervision};
use crate::classify::one_hot;
use crate::data::{DataMatrix, NormalizationParams};
use crate::embed::{fit_lpp, Projection};
use crate::error::{ensure_shape, Error, Result};
use crate::graph::{build_graph, GraphConfig, GraphLaplacian};
use crate::linalg::{add_diagonal, solve_sym_right, symmetrize};

pub use io::{load_model, model_from_str, model_to_string, save_model, MODEL_FORMAT, MODEL_VERSION};
pub use objective::{objective, ObjectiveBreakdown};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JPlayConfig {
    /// Output dimension of each layer, `d_1..d_m`.
    pub layer_dims: Vec<usize>,
    /// Weight of the label-prediction term.
    pub alpha: f64,
    /// Weight of the manifold term during fine-tuning.
    pub beta: f64,
    /// Ridge weight on `P`.
    pub gamma: f64,
    /// ADMM settings; `admm.eta` is the manifold weight used in pre-training.
    pub admm: AdmmConfig,
    /// Relative objective change that stops fine-tuning.
    pub zeta: f64,
    pub outer_max_iter: usize,
    pub graph: GraphConfig,
    /// Rebuild the graph on each layer's input instead of sharing the input-space graph.
    pub per_layer_graph: bool,
    /// LPP ridge; `None` picks a trace-scaled default.
    pub lpp_ridge: Option<f64>,
    pub seed: u64,
}

impl Default for JPlayConfig {
    fn default() -> Self {
        JPlayConfig {
            layer_dims: vec![20],
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            admm: AdmmConfig::default(),
            zeta: 1e-4,
            outer_max_iter: 20,
            graph: GraphConfig::default(),
            per_layer_graph: false,
            lpp_ridge: None,
            seed: 0,
        }
    }
}

impl JPlayConfig {
    pub fn eta(&self) -> f64 {
        self.admm.eta
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if self.layer_dims.is_empty() {
            return bad("at least one layer is required".into());
        }
        if let Some(i) = self.layer_dims.iter().position(|&d| d == 0) {
            return bad(format!("layer {} has dimension 0", i + 1));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be a nonnegative finite number, got {v}"));
            }
        }
        if self.alpha == 0.0 && self.gamma == 0.0 {
            return bad("alpha and gamma cannot both be zero (P is undetermined)".into());
        }
        if !(self.zeta > 0.0) {
            return bad(format!("zeta must be positive, got {}", self.zeta));
        }
        if self.graph.k == 0 {
            return bad("graph k must be positive".into());
        }
        if let Some(r) = self.lpp_ridge {
            if !(r >= 0.0 && r.is_finite()) {
                return bad(format!("lpp ridge must be nonnegative, got {r}"));
            }
        }
        self.admm.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub pretrain: Vec<ConvergenceReport>,
    /// Entry 0 is the objective after pre-training and the first `P` solve;
    /// entry `t` follows outer iteration `t`.
    pub objective_trace: Vec<ObjectiveBreakdown>,
    /// Objective right after each outer iteration's `P` update.
    pub after_p_update: Vec<f64>,
    pub outer_iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub thetas: Vec<Projection>,
    /// `L × d_m` regression map.
    pub p: DMatrix<f64>,
    pub config: JPlayConfig,
    pub n_classes: usize,
    pub report: TrainingReport,
    /// Preprocessing applied to inputs before the first layer.
    pub normalization: Option<NormalizationParams>,
}

/// How far down the stack to map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    /// Output of layer `l` (1-based).
    Layer(usize),
    Top,
}

impl TrainedModel {
    pub fn n_layers(&self) -> usize {
        self.thetas.len()
    }

    pub fn input_dim(&self) -> usize {
        self.thetas[0].d_in()
    }

    /// `[d_0, d_1, …, d_m]`
    pub fn layer_dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.thetas.iter().map(Projection::d_out))
            .collect()
    }

    pub(crate) fn thetas_raw(&self) -> Vec<&DMatrix<f64>> {
        self.thetas.iter().map(Projection::matrix).collect()
    }

    /// `V = Θ_m ⋯ Θ_1`.
    pub fn composite(&self) -> DMatrix<f64> {
        let mut v = self.thetas[0].matrix().clone();
        for t in &self.thetas[1..] {
            v = t.matrix() * v;
        }
        v
    }

    fn check_chain(&self) -> Result<()> {
        ensure_shape!(!self.thetas.is_empty(), "model has no layers");
        for (l, w) in self.thetas.windows(2).enumerate() {
            ensure_shape!(
                w[1].d_in() == w[0].d_out(),
                "layer {} outputs {} features but layer {} expects {}",
                l + 1,
                w[0].d_out(),
                l + 2,
                w[1].d_in()
            );
        }
        let top = self.thetas.last().unwrap().d_out();
        ensure_shape!(
            self.p.ncols() == top && self.p.nrows() == self.n_classes,
            "P is {:?}, expected {}x{top}",
            self.p.shape(),
            self.n_classes
        );
        if !self.p.iter().all(|v| v.is_finite()) {
            return Err(Error::Input("P has non-finite entries".into()));
        }
        Ok(())
    }
}

/// Closed-form minimizer of `(α/2)‖Y − P X_top‖² + (γ/2)‖P‖²`:
/// `P = α Y X_topᵀ (α X_top X_topᵀ + γ I)⁻¹`.
pub fn update_p(y: &DMatrix<f64>, x_top: &DMatrix<f64>, alpha: f64, gamma: f64) -> Result<DMatrix<f64>> {
    if !(alpha >= 0.0 && gamma >= 0.0) || (alpha == 0.0 && gamma == 0.0) {
        return Err(Error::Parameter(format!(
            "update_p needs alpha, gamma >= 0 and not both zero (alpha={alpha}, gamma={gamma})"
        )));
    }
    ensure_shape!(y.ncols() == x_top.ncols(), "Y has {} samples, X has {}", y.ncols(), x_top.ncols());
    let mut system = x_top * x_top.transpose() * alpha;
    symmetrize(&mut system);
    add_diagonal(&mut system, gamma);
    let rhs = y * x_top.transpose() * alpha;
    solve_sym_right(&rhs, &system, "P update")
}

/// `P_l = P · Θ_m ⋯ Θ_{l+1}` (1-based `l`; `P_m = P`).
pub fn residual_map(model: &TrainedModel, l: usize) -> Result<DMatrix<f64>> {
    residual_map_raw(&model.p, &model.thetas_raw(), l)
}

fn residual_map_raw(p: &DMatrix<f64>, thetas: &[&DMatrix<f64>], l: usize) -> Result<DMatrix<f64>> {
    let m = thetas.len();
    if l == 0 || l > m {
        return Err(Error::Parameter(format!("layer index {l} out of range 1..={m}")));
    }
    let mut out = p.clone();
    for theta in thetas[l..].iter().rev() {
        out = &out * *theta;
    }
    Ok(out)
}

fn refs(t: &[DMatrix<f64>]) -> Vec<&DMatrix<f64>> {
    t.iter().collect()
}

/// `X_l = Θ_l ⋯ Θ_1 X` for `l = 0..=upto`.
fn forward(thetas: &[&DMatrix<f64>], x: &DMatrix<f64>, upto: usize) -> DMatrix<f64> {
    let mut cur = x.clone();
    for theta in &thetas[..upto] {
        cur = *theta * cur;
    }
    cur
}

/// Maps samples through the first `upto` layers.
pub fn transform(model: &TrainedModel, x: &DataMatrix, upto: Depth) -> Result<DataMatrix> {
    let l = match upto {
        Depth::Top => model.n_layers(),
        Depth::Layer(l) if (1..=model.n_layers()).contains(&l) => l,
        Depth::Layer(l) => {
            return Err(Error::Parameter(format!("layer {l} out of range 1..={}", model.n_layers())))
        }
    };
    ensure_shape!(
        x.dim() == model.input_dim(),
        "model expects {} features, data has {}",
        model.input_dim(),
        x.dim()
    );
    DataMatrix::new(forward(&model.thetas_raw(), x.matrix(), l))
}

/// Predicts 1-based labels as `argmax_t (P X_m)_t` for each sample.
pub fn predict_regression(model: &TrainedModel, x: &DataMatrix) -> Result<Vec<usize>> {
    let top = transform(model, x, Depth::Top)?;
    let scores = &model.p * top.matrix();
    Ok(scores.column_iter().map(|c| c.argmax().0 + 1).collect())
}

/// Supervised ADMM refinement of layer `l` (1-based) with every other
/// parameter held fixed. Manifold weight is `beta`.
pub fn finetune_theta(
    l: usize,
    model: &TrainedModel,
    x: &DataMatrix,
    y: &DMatrix<f64>,
    graph: &GraphLaplacian,
    cfg: &JPlayConfig,
) -> Result<(Projection, ConvergenceReport)> {
    model.check_chain()?;
    ensure_shape!(x.dim() == model.input_dim(), "model expects {} features, data has {}", model.input_dim(), x.dim());
    let thetas = model.thetas_raw();
    let p_l = residual_map_raw(&model.p, &thetas, l)?;
    let x_prev = forward(&thetas, x.matrix(), l - 1);
    finetune_layer(&x_prev, thetas[l - 1], &p_l, y, graph, cfg)
}

fn finetune_layer(
    x_prev: &DMatrix<f64>,
    theta: &DMatrix<f64>,
    p_l: &DMatrix<f64>,
    y: &DMatrix<f64>,
    graph: &GraphLaplacian,
    cfg: &JPlayConfig,
) -> Result<(Projection, ConvergenceReport)> {
    let terms = LayerTerms::new(x_prev, graph)?;
    let sup = Supervision {
        alpha: cfg.alpha,
        p_l,
        y,
    };
    let sup = (cfg.alpha != 0.0).then_some(&sup);
    let (theta, report) = run_admm(&terms, theta, cfg.beta, sup, &cfg.admm)?;
    Ok((Projection::new(theta)?, report))
}

fn check_labels(labels: &[usize], n: usize) -> Result<usize> {
    if labels.len() != n {
        return Err(Error::Input(format!("{} labels for {n} samples", labels.len())));
    }
    let n_classes = labels.iter().copied().max().unwrap_or(0);
    if labels.contains(&0) {
        return Err(Error::Input("labels are 1-based; found 0".into()));
    }
    let first = labels[0];
    if labels.iter().all(|&l| l == first) {
        return Err(Error::Input("all samples share one label; at least two classes are needed".into()));
    }
    Ok(n_classes)
}

fn divergence(what: String, trace: &[ObjectiveBreakdown]) -> Error {
    Error::Divergence {
        what,
        trace: trace.iter().map(|o| o.total).collect(),
    }
}

/// Full training: greedy pre-training, then alternating fine-tuning.
pub fn fit(x: &DataMatrix, labels: &[usize], cfg: &JPlayConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    let n = x.n_samples();
    let n_classes = check_labels(labels, n)?;
    if n < cfg.graph.k + 1 {
        return Err(Error::Input(format!("{n} samples are too few for a {}-NN graph", cfg.graph.k)));
    }
    let mut prev = x.dim();
    for (i, &d) in cfg.layer_dims.iter().enumerate() {
        if d > prev {
            return Err(Error::Parameter(format!(
                "layer {} dimension {d} exceeds its input dimension {prev}",
                i + 1
            )));
        }
        prev = d;
    }
    let y = one_hot(labels, n_classes)?.y;
    let graph_labels = cfg.graph.supervised.then_some(labels);

    // pre-training
    let mut graphs = vec![build_graph(x, &cfg.graph, graph_labels)?];
    let mut thetas: Vec<DMatrix<f64>> = Vec::with_capacity(cfg.layer_dims.len());
    let mut pretrain = Vec::with_capacity(cfg.layer_dims.len());
    let mut cur = x.clone();
    for (l, &d) in cfg.layer_dims.iter().enumerate() {
        if cfg.per_layer_graph && l > 0 {
            graphs.push(build_graph(&cur, &cfg.graph, graph_labels)?);
        }
        let graph = graphs.last().unwrap();
        let init = fit_lpp(&cur, graph, d, cfg.lpp_ridge)?;
        let (theta, report) = crate::autorule::fit_autorule(&cur, &init.projection, graph, &cfg.admm)
            .map_err(|e| match e {
                Error::Divergence { what, trace } => Error::Divergence {
                    what: format!("pre-training layer {}: {what}", l + 1),
                    trace,
                },
                other => other,
            })?;
        cur = DataMatrix::new(theta.matrix() * cur.matrix())
            .map_err(|_| divergence(format!("layer {} features are non-finite", l + 1), &[]))?;
        thetas.push(theta.into_matrix());
        pretrain.push(report);
    }
    let graph_for = |l: usize| if graphs.len() == 1 { &graphs[0] } else { &graphs[l] };

    let xm = x.matrix();
    let mut p = update_p(&y, cur.matrix(), cfg.alpha, cfg.gamma)?;
    let mut trace = vec![objective::objective_parts(&refs(&thetas), &p, xm, &y, &graphs, cfg)?];
    let mut after_p = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.outer_max_iter {
        let top = forward(&refs(&thetas), xm, thetas.len());
        p = update_p(&y, &top, cfg.alpha, cfg.gamma)?;
        after_p.push(objective::objective_parts(&refs(&thetas), &p, xm, &y, &graphs, cfg)?.total);

        for l in 0..thetas.len() {
            let r = refs(&thetas);
            let p_l = residual_map_raw(&p, &r, l + 1)?;
            let x_prev = forward(&r, xm, l);
            let (theta, _) = finetune_layer(&x_prev, &thetas[l], &p_l, &y, graph_for(l), cfg).map_err(|e| match e {
                Error::Divergence { what, .. } => {
                    divergence(format!("fine-tuning layer {} at outer iteration {}: {what}", l + 1, iterations + 1), &trace)
                }
                other => other,
            })?;
            thetas[l] = theta.into_matrix();
        }
        iterations += 1;

        let obj = objective::objective_parts(&refs(&thetas), &p, xm, &y, &graphs, cfg)?;
        if !obj.total.is_finite() {
            return Err(divergence(format!("objective became non-finite at outer iteration {iterations}"), &trace));
        }
        let prev = trace.last().unwrap().total;
        trace.push(obj);
        let change = (obj.total - prev).abs();
        if change < cfg.zeta * prev.abs() || (prev == 0.0 && obj.total == 0.0) {
            converged = true;
            break;
        }
    }

    let model = TrainedModel {
        thetas: thetas.into_iter().map(Projection::new).collect::<Result<_>>()?,
        p,
        config: cfg.clone(),
        n_classes,
        report: TrainingReport {
            pretrain,
            objective_trace: trace,
            after_p_update: after_p,
            outer_iterations: iterations,
            converged,
        },
        normalization: None,
    };
    model.check_chain()?;
    Ok(model)
}

/// Objective of `model` with explicit graphs (one shared, or one per layer).
pub fn objective_with_graphs(
    model: &TrainedModel,
    x: &DataMatrix,
    y: &DMatrix<f64>,
    graphs: &[GraphLaplacian],
) -> Result<ObjectiveBreakdown> {
    objective::objective_parts(&model.thetas_raw(), &model.p, x.matrix(), y, graphs, &model.config)
}
