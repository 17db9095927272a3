// SPDX-License-Identifier: Apache-2.0

//! Seeded instances and measurement routines shared by the integration
//! suites and the acceptance harness. Each check runs the library once and
//! measures it against an oracle, returning the numbers for the caller to judge.

#![allow(dead_code)]

use jplay_core::autorule::{g_update, h_update, h_update_supervised, theta_update, AdmmConfig, AdmmState};
use jplay_core::data::{normalize, DataMatrix, NormalizeMode};
use jplay_core::embed::fit_lpp;
use jplay_core::graph::{build_graph, knn_adjacency, laplacian, Bandwidth, GraphConfig, GraphLaplacian};
use jplay_core::{one_hot, update_p, Projection};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::oracles::{fd_gradient, generalized_eigen, rand_mat, rng, subspace_distance, AlPoint};

pub fn state_of(p: &AlPoint) -> AdmmState {
    AdmmState {
        theta: p.theta.clone(),
        h: p.h.clone(),
        g: p.g.clone(),
        q: p.q.clone(),
        s: p.s.clone(),
        lam1: p.lam[0].clone(),
        lam2: p.lam[1].clone(),
        lam3: p.lam[2].clone(),
        lam4: p.lam[3].clone(),
        mu: p.mu,
        iter: 0,
    }
}

pub fn graph_of(p: &AlPoint) -> GraphLaplacian {
    let w = DMatrix::from_fn(p.lap.nrows(), p.lap.ncols(), |i, j| if i == j { 0.0 } else { -p.lap[(i, j)] });
    laplacian(&w).unwrap()
}

pub fn cfg_of(p: &AlPoint) -> AdmmConfig {
    AdmmConfig {
        eta: p.manifold_weight,
        ..Default::default()
    }
}

/// Random augmented-Lagrangian point with `d ≤ 6`, `N ≤ 12`.
pub fn al_instance(seed: u64) -> AlPoint {
    let mut r = rng(seed);
    let d_prev = r.random_range(2..=6);
    let d = r.random_range(1..=d_prev);
    let n = r.random_range(3..=12);
    AlPoint::random(&mut r, d_prev, d, n)
}

pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Theta,
    H,
    G,
    SupervisedH,
}

/// Finite-difference gradient of the augmented Lagrangian in the updated
/// block, relative to `1 + ‖block‖`.
pub fn block_gradient(block: Block, seed: u64) -> f64 {
    let mut p = al_instance(seed);
    let x = DataMatrix::new(p.x.clone()).unwrap();
    let (at, f): (DMatrix<f64>, Box<dyn Fn(&AlPoint, &DMatrix<f64>) -> AlPoint>) = match block {
        Block::Theta => (
            theta_update(&state_of(&p), &x, &graph_of(&p), &cfg_of(&p)).unwrap(),
            Box::new(|p, v| AlPoint { theta: v.clone(), ..p.clone() }),
        ),
        Block::H => (
            h_update(&state_of(&p), &x, &cfg_of(&p)).unwrap(),
            Box::new(|p, v| AlPoint { h: v.clone(), ..p.clone() }),
        ),
        Block::G => (
            g_update(&state_of(&p), &x, &cfg_of(&p)).unwrap(),
            Box::new(|p, v| AlPoint { g: v.clone(), ..p.clone() }),
        ),
        Block::SupervisedH => {
            let mut r = rng(seed + 7);
            let classes = r.random_range(2..=4);
            let p_l = rand_mat(&mut r, classes, p.h.nrows(), 0.7);
            let y = rand_mat(&mut r, classes, p.h.ncols(), 1.0).map(|v| if v > 0.0 { 1.0 } else { 0.0 });
            let alpha = 0.1 + r.random::<f64>();
            p.supervision = Some((alpha, p_l.clone(), y.clone()));
            (
                h_update_supervised(&state_of(&p), &x, alpha, &p_l, &y).unwrap(),
                Box::new(|p, v| AlPoint { h: v.clone(), ..p.clone() }),
            )
        }
    };
    let grad = fd_gradient(&at, FD_STEP, |v| f(&p, v).value());
    grad.norm() / (1.0 + at.norm())
}

/// Unit-normalized positive data, its kNN graph and the LPP starting point.
pub fn convergence_instance(seed: u64, d: usize, d_out: usize, n: usize, k: usize) -> (DataMatrix, GraphLaplacian, Projection) {
    let mut r = rng(seed);
    let raw = rand_mat(&mut r, d, n, 1.0).map(|v| v + 1.0);
    let x = normalize(&DataMatrix::new(raw).unwrap(), NormalizeMode::UnitColumns).data;
    let g = build_graph(&x, &GraphConfig { k, ..Default::default() }, None).unwrap();
    let init = fit_lpp(&x, &g, d_out, None).unwrap().projection;
    (x, g, init)
}

pub fn lpp_instance(seed: u64, d: usize, n: usize, k: usize) -> (DataMatrix, GraphLaplacian) {
    let mut r = rng(seed);
    let x = DataMatrix::new(rand_mat(&mut r, d, n, 1.0)).unwrap();
    let g = laplacian(&knn_adjacency(&x, k, Bandwidth::Auto, None).unwrap()).unwrap();
    (x, g)
}

#[derive(Debug, Clone, Copy)]
pub struct LppCheck {
    /// Worst `‖Av − λBv‖ / ‖v‖` over the returned pairs.
    pub residual: f64,
    /// Largest entry of `ΘBΘᵀ − I`.
    pub constraint: f64,
    /// Worst eigenvalue gap to the dense oracle, relative to `1 + |λ|`.
    pub eigenvalue: f64,
    /// Principal-angle distance to the oracle subspace, when its spectrum has a gap.
    pub subspace: Option<f64>,
}

/// One LPP fit measured against the `B^{-1/2}` dense oracle.
pub fn check_lpp(x: &DataMatrix, g: &GraphLaplacian, d_out: usize) -> LppCheck {
    let xm = x.matrix();
    let fit = fit_lpp(x, g, d_out, None).unwrap();
    let a = xm * &g.laplacian * xm.transpose();
    let b = xm * DMatrix::from_diagonal(&g.degree) * xm.transpose() + DMatrix::identity(xm.nrows(), xm.nrows()) * fit.ridge;
    let m = fit.projection.matrix();

    let mut residual: f64 = 0.0;
    for (i, row) in m.row_iter().enumerate() {
        let v = row.transpose();
        residual = residual.max((&a * &v - &b * &v * fit.eigenvalues[i]).norm() / v.norm());
    }
    let constraint = (m * &b * m.transpose() - DMatrix::identity(d_out, d_out)).abs().max();

    let (vals, vecs) = generalized_eigen(&a, &b);
    let mut eigenvalue: f64 = 0.0;
    for i in 0..d_out {
        eigenvalue = eigenvalue.max((vals[i] - fit.eigenvalues[i]).abs() / (1.0 + vals[i].abs()));
    }
    let subspace = (d_out < vals.len() && vals[d_out] - vals[d_out - 1] > 1e-6)
        .then(|| subspace_distance(&m.transpose(), &vecs.columns(0, d_out).into_owned()));
    LppCheck {
        residual,
        constraint,
        eigenvalue,
        subspace,
    }
}

pub fn random_labels(r: &mut ChaCha8Rng, n: usize, classes: usize) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n).map(|i| i % classes + 1).collect();
    for i in (1..n).rev() {
        labels.swap(i, r.random_range(0..=i));
    }
    labels
}

/// `α‖Y − PX‖² + γ‖P‖²` solved as one stacked least-squares problem by Householder QR.
pub fn stacked_least_squares(y: &DMatrix<f64>, x: &DMatrix<f64>, alpha: f64, gamma: f64) -> DMatrix<f64> {
    let (d, n) = x.shape();
    let l = y.nrows();
    let mut a = DMatrix::zeros(n + d, d);
    let mut b = DMatrix::zeros(n + d, l);
    a.view_mut((0, 0), (n, d)).copy_from(&(x.transpose() * alpha.sqrt()));
    b.view_mut((0, 0), (n, l)).copy_from(&(y.transpose() * alpha.sqrt()));
    for i in 0..d {
        a[(n + i, i)] = gamma.sqrt();
    }
    let qr = a.qr();
    let qtb = qr.q().transpose() * b;
    qr.r().solve_upper_triangular(&qtb).unwrap().transpose()
}

#[derive(Debug, Clone, Copy)]
pub struct UpdatePCheck {
    /// `‖P(αXXᵀ + γI) − αYXᵀ‖ / ‖αYXᵀ‖`
    pub normal_equations: f64,
    /// Distance to the QR least-squares solution, relative to `max(1, ‖P‖)`.
    pub least_squares: f64,
    /// Perturbations of norm 1e-3 that lowered the objective (out of 100).
    pub improving_perturbations: usize,
}

/// Random `L=3, d=4, N=12` instance with weights drawn from [1e-2, 1e2].
pub fn check_update_p(seed: u64) -> UpdatePCheck {
    let mut r = rng(500 + seed);
    let (l, d, n) = (3, 4, 12);
    let x = rand_mat(&mut r, d, n, 1.0);
    let y = one_hot(&random_labels(&mut r, n, l), l).unwrap().y;
    let alpha = 10f64.powf(r.random_range(-2.0..2.0));
    let gamma = 10f64.powf(r.random_range(-2.0..2.0));
    let p = update_p(&y, &x, alpha, gamma).unwrap();

    let lhs = &p * (&x * x.transpose() * alpha + DMatrix::identity(d, d) * gamma);
    let rhs = &y * x.transpose() * alpha;
    let normal_equations = (&lhs - &rhs).norm() / rhs.norm();

    let oracle = stacked_least_squares(&y, &x, alpha, gamma);
    let least_squares = (&p - &oracle).norm() / oracle.norm().max(1.0);

    let f = |q: &DMatrix<f64>| 0.5 * alpha * (&y - q * &x).norm_squared() + 0.5 * gamma * q.norm_squared();
    let best = f(&p);
    let improving_perturbations = (0..100)
        .filter(|_| {
            let dir = rand_mat(&mut r, l, d, 1.0);
            f(&(&p + &dir * (1e-3 / dir.norm()))) < best
        })
        .count();
    UpdatePCheck {
        normal_equations,
        least_squares,
        improving_perturbations,
    }
}
