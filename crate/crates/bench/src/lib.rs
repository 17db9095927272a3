// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the criterion benches.

use jplay_core::data::{synth_blobs, Dataset};

/// Three-class blobs sized like a small hyperspectral training set.
pub fn bench_dataset(d: usize, per_class: usize) -> Dataset {
    synth_blobs(3, per_class, d, 4.0, 1.0, 7)
}
