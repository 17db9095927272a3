// SPDX-License-Identifier: Apache-2.0

mod checks;
mod oracles;

use jplay_core::autorule::{
    fit_autorule, g_update, h_update, project_nonneg, project_unit_columns, theta_update,
    AdmmConfig, AdmmState,
};
use jplay_core::data::DataMatrix;
use nalgebra::DMatrix;
use checks::{block_gradient, cfg_of, convergence_instance, graph_of, state_of, Block};
use oracles::{kron_left_solve, kron_right_solve, rand_mat, rng, AlPoint};

#[test]
fn block_updates_zero_their_gradients() {
    for (block, seeds) in [(Block::Theta, 0..20), (Block::H, 100..120), (Block::G, 200..220), (Block::SupervisedH, 300..320)] {
        for seed in seeds {
            let g = block_gradient(block, seed);
            assert!(g <= 1e-8, "{block:?} seed {seed}: relative gradient {g:e}");
        }
    }
}

#[test]
fn block_updates_match_dense_vectorized_solves() {
    let mut r = rng(4242);
    let p = AlPoint::random(&mut r, 4, 3, 6);
    let x = DataMatrix::new(p.x.clone()).unwrap();
    let st = state_of(&p);
    let cfg = cfg_of(&p);
    let xt = p.x.transpose();
    let mu = p.mu;

    let theta = theta_update(&st, &x, &graph_of(&p), &cfg).unwrap();
    let sys = &p.x * &p.lap * &xt * p.manifold_weight + &p.x * &xt * (3.0 * mu) + DMatrix::identity(4, 4) * mu;
    let rhs = (&p.h * mu + &p.lam[0] + &p.q * mu + &p.lam[2] + &p.s * mu + &p.lam[3]) * &xt + &p.g * mu + &p.lam[1];
    let oracle = kron_right_solve(&rhs, &sys);
    assert!((&theta - &oracle).abs().max() <= 1e-10, "Θ mismatch {:e}", (&theta - &oracle).abs().max());

    let h = h_update(&st, &x, &cfg).unwrap();
    let sys = &p.g * p.g.transpose() + DMatrix::identity(3, 3) * mu;
    let rhs = &p.g * &p.x + &p.theta * &p.x * mu - &p.lam[0];
    assert!((&h - kron_left_solve(&sys, &rhs)).abs().max() <= 1e-10);

    let g = g_update(&st, &x, &cfg).unwrap();
    let sys = &p.h * p.h.transpose() + DMatrix::identity(3, 3) * mu;
    let rhs = &p.h * &xt + &p.theta * mu - &p.lam[1];
    assert!((&g - kron_left_solve(&sys, &rhs)).abs().max() <= 1e-10);
}

#[test]
fn trivial_fixed_points() {
    let mut r = rng(9);
    let p = AlPoint::random(&mut r, 5, 3, 8);
    let x = DataMatrix::new(p.x.clone()).unwrap();
    let tx = &p.theta * &p.x;
    let zero_n = DMatrix::zeros(3, 8);
    let zero_t = DMatrix::zeros(3, 5);
    let st = AdmmState {
        theta: p.theta.clone(),
        h: tx.clone(),
        g: p.theta.clone(),
        q: tx.clone(),
        s: tx.clone(),
        lam1: zero_n.clone(),
        lam2: zero_t.clone(),
        lam3: zero_n.clone(),
        lam4: zero_n.clone(),
        mu: 0.7,
        iter: 0,
    };
    let cfg = AdmmConfig { eta: 0.0, ..Default::default() };
    let theta = theta_update(&st, &x, &graph_of(&p), &cfg).unwrap();
    assert!((&theta - &p.theta).abs().max() < 1e-12);

    let st0 = AdmmState { g: zero_t.clone(), ..st.clone() };
    let h = h_update(&st0, &x, &cfg).unwrap();
    assert!((&h - &tx).abs().max() < 1e-12);

    let st1 = AdmmState { h: zero_n, ..st };
    let g = g_update(&st1, &x, &cfg).unwrap();
    assert!((&g - &p.theta).abs().max() < 1e-12);
}

#[test]
fn projections_match_entrywise_loop() {
    let mut r = rng(5);
    let m = rand_mat(&mut r, 4, 4, 2.0);
    let clamp = project_nonneg(&m);
    for i in 0..4 {
        for j in 0..4 {
            let expect = if m[(i, j)] > 0.0 { m[(i, j)] } else { 0.0 };
            assert_eq!(clamp[(i, j)], expect);
        }
    }
    let u = project_unit_columns(&m);
    for j in 0..4 {
        let norm = m.column(j).norm();
        if norm <= 1.0 {
            assert_eq!(u.column(j), m.column(j));
        } else {
            assert!((u.column(j).norm() - 1.0).abs() < 1e-15);
        }
    }
}

#[test]
fn zero_budget_returns_initial_projection() {
    let (x, g, init) = convergence_instance(1, 6, 3, 20, 3);
    let (theta, rep) = fit_autorule(&x, &init, &g, &AdmmConfig { max_iter: 0, ..Default::default() }).unwrap();
    assert_eq!(theta, init);
    assert!(!rep.converged);
    assert_eq!(rep.iterations, 0);
}

#[test]
fn converges_with_constraints_satisfied() {
    let (x, g, init) = convergence_instance(42, 6, 3, 20, 3);
    let cfg = AdmmConfig { eta: 1.0, ..Default::default() };
    let (theta, rep) = fit_autorule(&x, &init, &g, &cfg).unwrap();
    println!("{rep:?}");
    assert!(rep.converged, "{rep:?}");
    assert!(rep.residuals.iter().all(|&r| r < 1e-6));
    let tx = theta.matrix() * x.matrix();
    let neg = tx.map(|v| v.min(0.0)).norm();
    assert!(neg <= cfg.eps, "negative part {neg:e}");
    let max_col = tx.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    assert!(max_col <= 1.0 + 2.0 * cfg.eps, "max column norm {max_col}");

    let (again, rep2) = fit_autorule(&x, &init, &g, &cfg).unwrap();
    assert_eq!(again, theta);
    assert_eq!(rep2, rep);
}
