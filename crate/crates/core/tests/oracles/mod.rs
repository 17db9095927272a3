// SPDX-License-Identifier: Apache-2.0

//! Independent reference computations for the test suites.
//!
//! Nothing here calls into the solver paths it is used to check: linear
//! systems go through a hand-written Gaussian elimination on the vectorized
//! (Kronecker) form, gradients come from central finite differences of a
//! directly evaluated augmented Lagrangian, and the generalized eigenproblem
//! is reduced with `B^{-1/2}` instead of a Cholesky factor.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_mat(rng: &mut ChaCha8Rng, r: usize, c: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| scale * (2.0 * rng.random::<f64>() - 1.0))
}

/// Symmetric nonnegative zero-diagonal adjacency with roughly `density` of the pairs connected.
pub fn rand_adjacency(rng: &mut ChaCha8Rng, n: usize, density: f64) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < density {
                let v = rng.random::<f64>();
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
    }
    w
}

pub fn laplacian_of(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (0..n).map(|k| w[(i, k)]).sum::<f64>() - w[(i, i)]
        } else {
            -w[(i, j)]
        }
    })
}

/// Gaussian elimination with partial pivoting on a dense row-major system.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        assert!(p.abs() > 1e-300, "oracle system is singular");
        for r in (col + 1)..n {
            let f = a[r][col] / p;
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Solves `X M = R` through `(Mᵀ ⊗ I) vec(X) = vec(R)`.
pub fn kron_right_solve(r: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, q) = r.shape();
    let n = p * q;
    // vec index of X[(i, k)] = k * p + i ; (XM)[(i, j)] = Σ_k X[(i,k)] M[(k,j)]
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for j in 0..q {
        for i in 0..p {
            let row = j * p + i;
            b[row] = r[(i, j)];
            for k in 0..q {
                a[row][k * p + i] = m[(k, j)];
            }
        }
    }
    let x = gauss_solve(a, b);
    DMatrix::from_column_slice(p, q, &x)
}

/// Solves `A X = R` through `(I ⊗ A) vec(X) = vec(R)`.
pub fn kron_left_solve(a_mat: &DMatrix<f64>, r: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, q) = r.shape();
    let n = p * q;
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for j in 0..q {
        for i in 0..p {
            let row = j * p + i;
            b[row] = r[(i, j)];
            for k in 0..p {
                a[row][j * p + k] = a_mat[(i, k)];
            }
        }
    }
    let x = gauss_solve(a, b);
    DMatrix::from_column_slice(p, q, &x)
}

pub fn naive_matmul(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut s = 0.0;
            for k in 0..a.ncols() {
                s += a[(i, k)] * b[(k, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

fn frob2(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum()
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Everything the augmented Lagrangian of one layer depends on.
#[derive(Clone)]
pub struct AlPoint {
    pub theta: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub lam: [DMatrix<f64>; 4],
    pub mu: f64,
    pub x: DMatrix<f64>,
    pub lap: DMatrix<f64>,
    pub manifold_weight: f64,
    /// `(α, P_l, Y)` adds `(α/2)‖Y − P_l H‖²`.
    pub supervision: Option<(f64, DMatrix<f64>, DMatrix<f64>)>,
}

impl AlPoint {
    pub fn random(rng: &mut ChaCha8Rng, d_prev: usize, d: usize, n: usize) -> Self {
        let x = rand_mat(rng, d_prev, n, 1.0);
        let w = rand_adjacency(rng, n, 0.4);
        let mu = 0.2 + rng.random::<f64>();
        AlPoint {
            theta: rand_mat(rng, d, d_prev, 0.5),
            h: rand_mat(rng, d, n, 0.5),
            g: rand_mat(rng, d, d_prev, 0.5),
            q: rand_mat(rng, d, n, 0.5).map(f64::abs),
            s: rand_mat(rng, d, n, 0.3),
            lam: [
                rand_mat(rng, d, n, 0.3),
                rand_mat(rng, d, d_prev, 0.3),
                rand_mat(rng, d, n, 0.3),
                rand_mat(rng, d, n, 0.3),
            ],
            mu,
            lap: laplacian_of(&w),
            x,
            manifold_weight: rng.random::<f64>(),
            supervision: None,
        }
    }

    /// Augmented Lagrangian, constraint indicators omitted (Q, S are never perturbed).
    pub fn value(&self) -> f64 {
        let tx = naive_matmul(&self.theta, &self.x);
        let recon = frob2(&(&self.x - naive_matmul(&self.g.transpose(), &self.h)));
        let txl = naive_matmul(&tx, &self.lap);
        let manifold = inner(&txl, &tx);
        let mut v = 0.5 * recon + 0.5 * self.manifold_weight * manifold;
        let diffs = [&self.h - &tx, &self.g - &self.theta, &self.q - &tx, &self.s - &tx];
        for (lam, d) in self.lam.iter().zip(&diffs) {
            v += inner(lam, d) + 0.5 * self.mu * frob2(d);
        }
        if let Some((alpha, p_l, y)) = &self.supervision {
            v += 0.5 * alpha * frob2(&(y - naive_matmul(p_l, &self.h)));
        }
        v
    }
}

/// Central finite differences of `f` at `at`.
pub fn fd_gradient(at: &DMatrix<f64>, step: f64, mut f: impl FnMut(&DMatrix<f64>) -> f64) -> DMatrix<f64> {
    let mut grad = DMatrix::zeros(at.nrows(), at.ncols());
    let mut probe = at.clone();
    for idx in 0..at.len() {
        let orig = probe[idx];
        probe[idx] = orig + step;
        let up = f(&probe);
        probe[idx] = orig - step;
        let down = f(&probe);
        probe[idx] = orig;
        grad[idx] = (up - down) / (2.0 * step);
    }
    grad
}

/// Generalized symmetric eigenproblem `A v = λ B v` via `B^{-1/2} A B^{-1/2}`.
/// Eigenvalues ascending; eigenvectors as columns with `vᵀBv = 1`.
pub fn generalized_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eb = b.clone().symmetric_eigen();
    let n = b.nrows();
    let inv_sqrt = DMatrix::from_diagonal(&eb.eigenvalues.map(|v| 1.0 / v.sqrt()));
    let b_is = &eb.eigenvectors * inv_sqrt * eb.eigenvectors.transpose();
    let mut c = &b_is * a * &b_is;
    c = (&c + c.transpose()) * 0.5;
    let ec = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| ec.eigenvalues[i].total_cmp(&ec.eigenvalues[j]));
    let vals = order.iter().map(|&i| ec.eigenvalues[i]).collect();
    let vecs = &b_is * ec.eigenvectors.select_columns(&order);
    (vals, vecs)
}

/// Largest sine of the principal angles between the column spans of `a` and `b`
/// (both orthonormalized first).
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let s = (qa.transpose() * qb).singular_values();
    let min_cos = s.iter().copied().fold(f64::INFINITY, f64::min).min(1.0);
    (1.0 - min_cos * min_cos).max(0.0).sqrt()
}

/// kNN membership by rank counting: `j` is a neighbor of `i` iff fewer than
/// `k` other samples are strictly closer to `i` than `j` is.
pub fn knn_mask_bruteforce(x: &DMatrix<f64>, k: usize) -> Vec<Vec<bool>> {
    let n = x.ncols();
    let dist = |i: usize, j: usize| -> f64 { (0..x.nrows()).map(|r| (x[(r, i)] - x[(r, j)]).powi(2)).sum() };
    let mut nb = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dij = dist(i, j);
            let closer = (0..n).filter(|&m| m != i && dist(i, m) < dij).count();
            if closer < k {
                nb[i][j] = true;
            }
        }
    }
    // OR-symmetrize
    let mut out = nb.clone();
    for i in 0..n {
        for j in 0..n {
            out[i][j] = nb[i][j] || nb[j][i];
        }
    }
    out
}

/// Exhaustive nearest-neighbor scan, lowest index on ties.
pub fn nn_bruteforce(train: &DMatrix<f64>, labels: &[usize], test: &DMatrix<f64>) -> Vec<usize> {
    (0..test.ncols())
        .map(|t| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for j in 0..train.ncols() {
                let d: f64 = (0..train.nrows()).map(|r| (train[(r, j)] - test[(r, t)]).powi(2)).sum();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            labels[best]
        })
        .collect()
}
