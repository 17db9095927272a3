// SPDX-License-Identifier: Apache-2.0

//! Layer-wise ADMM pre-training.
//!
//! For one layer with input `X` (d_prev × N) the solver minimizes
//!
//! ```text
//! ½‖X − ΘᵀΘX‖² + (η/2)·tr(ΘXLXᵀΘᵀ)   s.t.  ΘX ⪰ 0,  ‖(ΘX)_k‖₂ ≤ 1
//! ```
//!
//! by splitting `ΘX` into copies `H`, `Q`, `S` and `Θ` into `G`, so the
//! reconstruction term becomes `½‖X − GᵀH‖²`, `Q` carries the sign
//! constraint and `S` the column-norm constraint. Each iteration updates
//! `Θ, H, G, Q, S`, then the multipliers, then grows the penalty
//! `μ ← min(ρμ, μ_max)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::embed::Projection;
use crate::error::{ensure_shape, Error, Result};
use crate::graph::GraphLaplacian;
use crate::linalg::{add_diagonal, all_finite, solve_sym_left, solve_sym_right, symmetrize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualMode {
    #[default]
    Absolute,
    /// Each residual divided by the norm of its target (`‖ΘX‖` or `‖Θ‖`).
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmmConfig {
    /// Manifold weight η.
    pub eta: f64,
    pub mu0: f64,
    pub mu_max: f64,
    pub rho: f64,
    pub eps: f64,
    pub max_iter: usize,
    #[serde(default)]
    pub residual_mode: ResidualMode,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig {
            eta: 1.0,
            mu0: 1e-3,
            mu_max: 1e6,
            rho: 2.0,
            eps: 1e-6,
            max_iter: 500,
            residual_mode: ResidualMode::Absolute,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be nonnegative, got {}", self.eta));
        }
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return bad(format!("mu0 must be positive, got {}", self.mu0));
        }
        if !(self.mu_max >= self.mu0 && self.mu_max.is_finite()) {
            return bad(format!("mu_max ({}) must be finite and >= mu0 ({})", self.mu_max, self.mu0));
        }
        if !(self.rho > 1.0 && self.rho.is_finite()) {
            return bad(format!("rho must exceed 1, got {}", self.rho));
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        Ok(())
    }
}

/// All ADMM iterates for one layer. `s` is the unit-column copy of `ΘX`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub theta: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub lam1: DMatrix<f64>,
    pub lam2: DMatrix<f64>,
    pub lam3: DMatrix<f64>,
    pub lam4: DMatrix<f64>,
    pub mu: f64,
    pub iter: usize,
}

impl AdmmState {
    /// `H = Θ₀X`, everything else zero, `μ = μ₀`.
    pub fn init(theta0: &DMatrix<f64>, x_prev: &DMatrix<f64>, mu0: f64) -> Self {
        let (d, _) = theta0.shape();
        let n = x_prev.ncols();
        let zeros_n = DMatrix::zeros(d, n);
        let zeros_t = DMatrix::zeros(theta0.nrows(), theta0.ncols());
        AdmmState {
            theta: theta0.clone(),
            h: theta0 * x_prev,
            g: zeros_t.clone(),
            q: zeros_n.clone(),
            s: zeros_n.clone(),
            lam1: zeros_n.clone(),
            lam2: zeros_t,
            lam3: zeros_n.clone(),
            lam4: zeros_n,
            mu: mu0,
            iter: 0,
        }
    }

    fn check_shapes(&self, x_prev: &DMatrix<f64>) -> Result<()> {
        let (d, dp) = self.theta.shape();
        let n = x_prev.ncols();
        ensure_shape!(x_prev.nrows() == dp, "Θ is {d}x{dp} but X has {} rows", x_prev.nrows());
        for (name, m) in [("H", &self.h), ("Q", &self.q), ("S", &self.s), ("Λ1", &self.lam1), ("Λ3", &self.lam3), ("Λ4", &self.lam4)] {
            ensure_shape!(m.shape() == (d, n), "{name} is {:?}, expected {:?}", m.shape(), (d, n));
        }
        for (name, m) in [("G", &self.g), ("Λ2", &self.lam2)] {
            ensure_shape!(m.shape() == (d, dp), "{name} is {:?}, expected {:?}", m.shape(), (d, dp));
        }
        Ok(())
    }

    fn finite_check(&self) -> Option<&'static str> {
        [
            ("Θ", &self.theta),
            ("H", &self.h),
            ("G", &self.g),
            ("Q", &self.q),
            ("S", &self.s),
            ("Λ1", &self.lam1),
            ("Λ2", &self.lam2),
            ("Λ3", &self.lam3),
            ("Λ4", &self.lam4),
        ]
        .into_iter()
        .find(|(_, m)| !all_finite(m))
        .map(|(n, _)| n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    /// `‖H−ΘX‖, ‖G−Θ‖, ‖Q−ΘX‖, ‖S−ΘX‖` after the last iteration.
    pub residuals: [f64; 4],
    pub converged: bool,
    pub final_mu: f64,
}

/// Entrywise `max(M, 0)`.
pub fn project_nonneg(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.map(|v| v.max(0.0))
}

/// Rescales every column with norm above 1 onto the unit sphere.
pub fn project_unit_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut c in out.column_iter_mut() {
        let norm = c.norm();
        if norm > 1.0 {
            c /= norm;
            // roundoff can leave the norm an ulp above 1; a second pass must be a no-op
            while c.norm() > 1.0 {
                c *= 1.0 - f64::EPSILON;
            }
        }
    }
    out
}

/// Input-dependent products reused across iterations of one layer.
pub(crate) struct LayerTerms<'a> {
    pub x: &'a DMatrix<f64>,
    pub xxt: DMatrix<f64>,
    pub xlxt: DMatrix<f64>,
}

impl<'a> LayerTerms<'a> {
    pub fn new(x: &'a DMatrix<f64>, graph: &GraphLaplacian) -> Result<Self> {
        ensure_shape!(
            graph.n() == x.ncols(),
            "graph has {} nodes but layer input has {} samples",
            graph.n(),
            x.ncols()
        );
        let mut xxt = x * x.transpose();
        symmetrize(&mut xxt);
        let mut xlxt = x * &graph.laplacian * x.transpose();
        symmetrize(&mut xlxt);
        Ok(LayerTerms { x, xxt, xlxt })
    }
}

/// Label-fitting term `(α/2)‖Y − P_l H‖²` added to the H subproblem during fine-tuning.
pub(crate) struct Supervision<'a> {
    pub alpha: f64,
    pub p_l: &'a DMatrix<f64>,
    pub y: &'a DMatrix<f64>,
}

pub(crate) fn theta_step(state: &AdmmState, t: &LayerTerms, manifold_weight: f64) -> Result<DMatrix<f64>> {
    let mu = state.mu;
    let xt = t.x.transpose();
    let combined = (&state.h * mu + &state.lam1 + &state.q * mu + &state.lam3 + &state.s * mu + &state.lam4) * &xt;
    let rhs = combined + &state.g * mu + &state.lam2;
    let mut system = &t.xlxt * manifold_weight + &t.xxt * (3.0 * mu);
    add_diagonal(&mut system, mu);
    solve_sym_right(&rhs, &system, "Θ update")
}

pub(crate) fn h_step(state: &AdmmState, x: &DMatrix<f64>, sup: Option<&Supervision>) -> Result<DMatrix<f64>> {
    let mu = state.mu;
    let mut system = &state.g * state.g.transpose();
    let mut rhs = &state.g * x + &state.theta * x * mu - &state.lam1;
    if let Some(sup) = sup {
        system += sup.p_l.transpose() * sup.p_l * sup.alpha;
        rhs += sup.p_l.transpose() * sup.y * sup.alpha;
    }
    symmetrize(&mut system);
    add_diagonal(&mut system, mu);
    solve_sym_left(&system, &rhs, "H update")
}

pub(crate) fn g_step(state: &AdmmState, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mu = state.mu;
    let mut system = &state.h * state.h.transpose();
    symmetrize(&mut system);
    add_diagonal(&mut system, mu);
    let rhs = &state.h * x.transpose() + &state.theta * mu - &state.lam2;
    solve_sym_left(&system, &rhs, "G update")
}

/// Closed-form Θ block minimizer of the augmented Lagrangian, with manifold weight `cfg.eta`.
pub fn theta_update(state: &AdmmState, x_prev: &DataMatrix, graph: &GraphLaplacian, cfg: &AdmmConfig) -> Result<DMatrix<f64>> {
    state.check_shapes(x_prev.matrix())?;
    let terms = LayerTerms::new(x_prev.matrix(), graph)?;
    theta_step(state, &terms, cfg.eta)
}

/// `H = (GGᵀ + μI)⁻¹ (G X + μ Θ X − Λ₁)`.
pub fn h_update(state: &AdmmState, x_prev: &DataMatrix, _cfg: &AdmmConfig) -> Result<DMatrix<f64>> {
    state.check_shapes(x_prev.matrix())?;
    h_step(state, x_prev.matrix(), None)
}

/// `H = (α P_lᵀP_l + GGᵀ + μI)⁻¹ (α P_lᵀY + G X + μ Θ X − Λ₁)`, the fine-tuning variant.
pub fn h_update_supervised(
    state: &AdmmState,
    x_prev: &DataMatrix,
    alpha: f64,
    p_l: &DMatrix<f64>,
    y: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    state.check_shapes(x_prev.matrix())?;
    ensure_shape!(
        p_l.ncols() == state.h.nrows() && p_l.nrows() == y.nrows() && y.ncols() == state.h.ncols(),
        "P_l {:?} and Y {:?} do not match H {:?}",
        p_l.shape(),
        y.shape(),
        state.h.shape()
    );
    h_step(state, x_prev.matrix(), Some(&Supervision { alpha, p_l, y }))
}

/// `G = (HHᵀ + μI)⁻¹ (H Xᵀ + μ Θ − Λ₂)`.
pub fn g_update(state: &AdmmState, x_prev: &DataMatrix, _cfg: &AdmmConfig) -> Result<DMatrix<f64>> {
    state.check_shapes(x_prev.matrix())?;
    g_step(state, x_prev.matrix())
}

fn residuals(state: &AdmmState, x: &DMatrix<f64>, mode: ResidualMode) -> [f64; 4] {
    let tx = &state.theta * x;
    let r = [
        (&state.h - &tx).norm(),
        (&state.g - &state.theta).norm(),
        (&state.q - &tx).norm(),
        (&state.s - &tx).norm(),
    ];
    match mode {
        ResidualMode::Absolute => r,
        ResidualMode::Relative => {
            let ntx = tx.norm().max(f64::MIN_POSITIVE);
            let nt = state.theta.norm().max(f64::MIN_POSITIVE);
            [r[0] / ntx, r[1] / nt, r[2] / ntx, r[3] / ntx]
        }
    }
}

/// Runs the full iteration from `theta0`. Shared by pre-training and fine-tuning.
pub(crate) fn run_admm(
    terms: &LayerTerms,
    theta0: &DMatrix<f64>,
    manifold_weight: f64,
    sup: Option<&Supervision>,
    cfg: &AdmmConfig,
) -> Result<(DMatrix<f64>, ConvergenceReport)> {
    cfg.validate()?;
    let x = terms.x;
    let mut st = AdmmState::init(theta0, x, cfg.mu0);
    st.check_shapes(x)?;
    let mut res = residuals(&st, x, cfg.residual_mode);
    let mut converged = false;

    while st.iter < cfg.max_iter {
        st.theta = theta_step(&st, terms, manifold_weight)?;
        st.h = h_step(&st, x, sup)?;
        st.g = g_step(&st, x)?;
        let tx = &st.theta * x;
        st.q = project_nonneg(&(&tx - &st.lam3 / st.mu));
        st.s = project_unit_columns(&(&tx - &st.lam4 / st.mu));

        let mu = st.mu;
        st.lam1 += (&st.h - &tx) * mu;
        st.lam2 += (&st.g - &st.theta) * mu;
        st.lam3 += (&st.q - &tx) * mu;
        st.lam4 += (&st.s - &tx) * mu;
        st.mu = (cfg.rho * mu).min(cfg.mu_max);
        st.iter += 1;

        if let Some(name) = st.finite_check() {
            return Err(Error::Divergence {
                what: format!("{name} became non-finite at ADMM iteration {}", st.iter),
                trace: Vec::new(),
            });
        }
        res = residuals(&st, x, cfg.residual_mode);
        if res.iter().all(|&r| r < cfg.eps) {
            converged = true;
            break;
        }
    }

    Ok((
        st.theta,
        ConvergenceReport {
            iterations: st.iter,
            residuals: res,
            converged,
            final_mu: st.mu,
        },
    ))
}

/// Pre-trains one layer starting from `theta0` (typically the LPP solution).
pub fn fit_autorule(
    x_prev: &DataMatrix,
    theta0: &Projection,
    graph: &GraphLaplacian,
    cfg: &AdmmConfig,
) -> Result<(Projection, ConvergenceReport)> {
    ensure_shape!(
        theta0.d_in() == x_prev.dim(),
        "initial projection expects {} features, layer input has {}",
        theta0.d_in(),
        x_prev.dim()
    );
    let terms = LayerTerms::new(x_prev.matrix(), graph)?;
    let (theta, report) = run_admm(&terms, theta0.matrix(), cfg.eta, None, cfg)?;
    Ok((Projection::new(theta)?, report))
}
