// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Disjoint train/test sample indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &i in self.train.iter().chain(&self.test) {
            if i >= n {
                return Err(Error::Input(format!("split index {i} out of range for {n} samples")));
            }
            if seen[i] {
                return Err(Error::Input(format!("split index {i} appears twice")));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// Draws `per_class` training samples from every class; the rest become test samples.
///
/// Classes with no more than `per_class` samples contribute all but one sample to
/// training so every class is represented on both sides.
pub fn random_split_per_class(labels: &[usize], per_class: usize, seed: u64) -> Result<Split> {
    if per_class == 0 {
        return Err(Error::Parameter("per-class training count must be positive".into()));
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut idx) in by_class {
        if idx.len() < 2 {
            return Err(Error::Input(format!("class {class} has a single sample; cannot split")));
        }
        idx.shuffle(&mut rng);
        let take = per_class.min(idx.len() - 1);
        train.extend_from_slice(&idx[..take]);
        test.extend_from_slice(&idx[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

/// Reads a split file: one `index,role` line per sample where role is `train` or `test`.
pub fn load_split(path: impl AsRef<Path>) -> Result<Split> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut split = Split {
        train: Vec::new(),
        test: Vec::new(),
    };
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            path: path.to_path_buf(),
            line: no as u64 + 1,
            msg: msg.to_string(),
        };
        let (idx, role) = line.split_once(',').ok_or_else(|| err("expected `index,role`"))?;
        let idx: usize = idx.trim().parse().map_err(|_| err("index is not a non-negative integer"))?;
        match role.trim() {
            "train" => split.train.push(idx),
            "test" => split.test.push(idx),
            _ => return Err(err("role must be `train` or `test`")),
        }
    }
    Ok(split)
}

pub fn save_split(split: &Split, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_split(split)).map_err(|e| Error::io(path, e))
}

/// Split file text, sorted by sample index.
pub fn render_split(split: &Split) -> String {
    let mut rows: Vec<(usize, &str)> = split
        .train
        .iter()
        .map(|&i| (i, "train"))
        .chain(split.test.iter().map(|&i| (i, "test")))
        .collect();
    rows.sort_unstable();
    rows.iter().map(|(i, r)| format!("{i},{r}\n")).collect()
}
