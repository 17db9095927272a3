// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{DataMatrix, Dataset};

/// Gaussian blobs around `classes` centers drawn uniformly from `[0, center_spread)^d`.
///
/// Samples are ordered class by class. Deterministic for a fixed seed.
pub fn synth_blobs(
    classes: usize,
    per_class: usize,
    d: usize,
    center_spread: f64,
    noise_sigma: f64,
    seed: u64,
) -> Dataset {
    assert!(classes >= 2 && per_class >= 1 && d >= 1, "degenerate blob request");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = DMatrix::from_fn(d, classes, |_, _| center_spread * rng.random::<f64>());
    let noise = Normal::new(0.0, noise_sigma.max(0.0)).expect("finite sigma");
    let n = classes * per_class;
    let mut x = DMatrix::zeros(d, n);
    let mut labels = Vec::with_capacity(n);
    for c in 0..classes {
        for k in 0..per_class {
            let j = c * per_class + k;
            for i in 0..d {
                let eps = if noise_sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                x[(i, j)] = centers[(i, c)] + eps;
            }
            labels.push(c + 1);
        }
    }
    Dataset::new(DataMatrix::new(x).expect("finite blobs"), Some(labels)).expect("consistent labels")
}

/// Two well separated classes in 10 dimensions (σ = 0.1, centers 10 apart), 50 per class.
pub fn bundled_blobs() -> Dataset {
    let d = 10;
    let per_class = 50;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut x = DMatrix::zeros(d, 2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    // centers at 5·(1,…,1) ± (10/(2√d))·(1,…,1): exactly 10 apart, both nonnegative
    let offset = 10.0 / (2.0 * (d as f64).sqrt());
    for c in 0..2 {
        let center = 5.0 + if c == 0 { -offset } else { offset };
        for k in 0..per_class {
            for i in 0..d {
                x[(i, c * per_class + k)] = center + noise.sample(&mut rng);
            }
            labels.push(c + 1);
        }
    }
    Dataset::new(DataMatrix::new(x).unwrap(), Some(labels)).unwrap()
}

/// Four classes in 30 dimensions, 100 samples each.
///
/// Class structure lives in a 4-dimensional subspace; the remaining 26
/// directions carry nuisance variation, which is what degrades raw-feature
/// nearest-neighbor classification.
pub fn bundled_four_class() -> Dataset {
    let d = 30;
    let informative = 4;
    let per_class = 100;
    let classes = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    let signal = Normal::new(0.0, 0.6).unwrap();
    let nuisance = Normal::new(0.0, 0.45).unwrap();
    let mut x = DMatrix::zeros(d, classes * per_class);
    let mut labels = Vec::with_capacity(classes * per_class);
    for c in 0..classes {
        for k in 0..per_class {
            let j = c * per_class + k;
            for i in 0..d {
                x[(i, j)] = if i < informative {
                    let center = if i == c { 3.0 } else { 1.0 };
                    center + signal.sample(&mut rng)
                } else {
                    2.0 + nuisance.sample(&mut rng)
                };
            }
            labels.push(c + 1);
        }
    }
    Dataset::new(DataMatrix::new(x).unwrap(), Some(labels)).unwrap()
}
