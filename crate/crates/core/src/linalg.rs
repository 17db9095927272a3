// SPDX-License-Identifier: Apache-2.0

//! Small dense helpers shared by the solvers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Solves `m * out = rhs` for a symmetric positive (semi)definite `m`.
///
/// Cholesky is tried first; LU is the fallback for matrices that are
/// symmetric but lose definiteness to roundoff.
pub(crate) fn solve_sym_left(m: &DMatrix<f64>, rhs: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    if let Some(chol) = m.clone().cholesky() {
        let out = chol.solve(rhs);
        if out.iter().all(|v| v.is_finite()) {
            return Ok(out);
        }
    }
    m.clone()
        .lu()
        .solve(rhs)
        .filter(|out| out.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Singular(format!("{what}: system matrix is not invertible")))
}

/// Solves `out * m = rhs` for a symmetric `m`, i.e. `out = rhs * m⁻¹`.
pub(crate) fn solve_sym_right(rhs: &DMatrix<f64>, m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    // m symmetric: (rhs m⁻¹)ᵀ = m⁻¹ rhsᵀ
    Ok(solve_sym_left(m, &rhs.transpose(), what)?.transpose())
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub(crate) fn add_diagonal(m: &mut DMatrix<f64>, value: f64) {
    for i in 0..m.nrows().min(m.ncols()) {
        m[(i, i)] += value;
    }
}

/// Flips the sign of each row so its largest-magnitude entry is positive.
/// The first index wins on magnitude ties.
pub(crate) fn normalize_row_signs(m: &mut DMatrix<f64>) {
    for mut row in m.row_iter_mut() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for v in row.iter() {
            if v.abs() > best {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            row.neg_mut();
        }
    }
}

pub(crate) fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}
