// SPDX-License-Identifier: Apache-2.0

//! Stratified k-fold cross-validated grid search over the J-Play weights.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{nn_classify, overall_accuracy};
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::jplay::{fit, transform, Depth, JPlayConfig};

/// Candidate values used for every weight when no grid is given.
pub const DEFAULT_GRID: [f64; 5] = [1e-2, 1e-1, 1.0, 1e1, 1e2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GridParam {
    Alpha,
    Beta,
    Gamma,
    Eta,
}

impl GridParam {
    pub fn name(self) -> &'static str {
        match self {
            GridParam::Alpha => "alpha",
            GridParam::Beta => "beta",
            GridParam::Gamma => "gamma",
            GridParam::Eta => "eta",
        }
    }

    pub fn set(self, cfg: &mut JPlayConfig, v: f64) {
        match self {
            GridParam::Alpha => cfg.alpha = v,
            GridParam::Beta => cfg.beta = v,
            GridParam::Gamma => cfg.gamma = v,
            GridParam::Eta => cfg.admm.eta = v,
        }
    }
}

impl std::str::FromStr for GridParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(GridParam::Alpha),
            "beta" => Ok(GridParam::Beta),
            "gamma" => Ok(GridParam::Gamma),
            "eta" => Ok(GridParam::Eta),
            other => Err(Error::Parameter(format!(
                "unknown grid parameter {other:?} (expected alpha, beta, gamma or eta)"
            ))),
        }
    }
}

/// Ordered parameter axes; cells enumerate the cartesian product with the
/// last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridSpec {
    pub axes: Vec<(GridParam, Vec<f64>)>,
}

impl GridSpec {
    /// Parses `name=v1,v2,…`.
    pub fn push_entry(&mut self, entry: &str) -> Result<()> {
        let (name, values) = entry
            .split_once('=')
            .ok_or_else(|| Error::Parameter(format!("grid entry {entry:?} must look like name=v1,v2")))?;
        let param: GridParam = name.trim().parse()?;
        if self.axes.iter().any(|(p, _)| *p == param) {
            return Err(Error::Parameter(format!("grid parameter {} given twice", param.name())));
        }
        let values = values
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| Error::Parameter(format!("bad grid value {v:?} for {}", param.name())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.axes.push((param, values));
        Ok(())
    }

    pub fn standard(params: &[GridParam]) -> Self {
        GridSpec {
            axes: params.iter().map(|&p| (p, DEFAULT_GRID.to_vec())).collect(),
        }
    }

    pub fn cells(&self) -> Vec<Vec<(GridParam, f64)>> {
        let mut out = vec![Vec::new()];
        for (param, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut c = prefix.clone();
                        c.push((*param, v));
                        c
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub params: Vec<(GridParam, f64)>,
    pub mean_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub cells: Vec<GridCell>,
    pub best: usize,
    pub best_config: JPlayConfig,
}

impl GridResult {
    pub fn best_cell(&self) -> &GridCell {
        &self.cells[self.best]
    }

    /// One column per parameter, then `mean_accuracy`, then the
    /// semicolon-joined per-fold accuracies.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.cells[0].params.iter().map(|(p, _)| p.name()).collect();
        writeln!(out, "{},mean_accuracy,fold_accuracies", header.join(",")).unwrap();
        for c in &self.cells {
            let params: Vec<String> = c.params.iter().map(|(_, v)| format!("{v:?}")).collect();
            let folds: Vec<String> = c.fold_accuracies.iter().map(|v| format!("{v:?}")).collect();
            writeln!(out, "{},{:?},{}", params.join(","), c.mean_accuracy, folds.join(";")).unwrap();
        }
        out
    }
}

/// Fold index per sample: each class is shuffled with the seeded RNG and
/// dealt round-robin, continuing the deal across classes so fold sizes stay
/// balanced.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Parameter(format!("need at least 2 folds, got {folds}")));
    }
    if labels.len() < folds {
        return Err(Error::Parameter(format!("{} samples cannot fill {folds} folds", labels.len())));
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assign = vec![0; labels.len()];
    let mut next = 0;
    for (class, mut idx) in by_class {
        if idx.len() < folds {
            return Err(Error::Stratification {
                class,
                count: idx.len(),
                folds,
            });
        }
        idx.shuffle(&mut rng);
        for i in idx {
            assign[i] = next % folds;
            next += 1;
        }
    }
    Ok(assign)
}

fn lexicographic(a: &[(GridParam, f64)], b: &[(GridParam, f64)]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|((_, x), (_, y))| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn fold_accuracy(x: &DataMatrix, labels: &[usize], cfg: &JPlayConfig, assign: &[usize], fold: usize) -> Result<f64> {
    let train: Vec<usize> = (0..labels.len()).filter(|&i| assign[i] != fold).collect();
    let test: Vec<usize> = (0..labels.len()).filter(|&i| assign[i] == fold).collect();
    let x_train = x.select_samples(&train);
    let y_train: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
    let y_test: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
    let model = match fit(&x_train, &y_train, cfg) {
        Ok(m) => m,
        // a numerically failed cell scores zero on this fold rather than aborting the search
        Err(Error::Divergence { .. } | Error::Singular(_)) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let f_train = transform(&model, &x_train, Depth::Top)?;
    let f_test = transform(&model, &x.select_samples(&test), Depth::Top)?;
    let pred = nn_classify(f_train.matrix(), &y_train, f_test.matrix())?;
    overall_accuracy(&pred, &y_test)
}

/// Mean held-out 1-NN accuracy for every grid cell.
///
/// The best cell has the highest mean accuracy; ties go to the
/// lexicographically smallest parameter tuple. `jobs` bounds the worker
/// threads; results do not depend on it.
pub fn grid_search(
    x: &DataMatrix,
    labels: &[usize],
    template: &JPlayConfig,
    spec: &GridSpec,
    folds: usize,
    seed: u64,
    jobs: usize,
) -> Result<GridResult> {
    if spec.axes.is_empty() || spec.axes.iter().any(|(_, v)| v.is_empty()) {
        return Err(Error::Parameter("grid must have at least one value per parameter".into()));
    }
    if labels.len() != x.n_samples() {
        return Err(Error::Input(format!("{} labels for {} samples", labels.len(), x.n_samples())));
    }
    let assign = stratified_folds(labels, folds, seed)?;
    let cells = spec.cells();
    let configs: Vec<JPlayConfig> = cells
        .iter()
        .map(|c| {
            let mut cfg = template.clone();
            for &(p, v) in c {
                p.set(&mut cfg, v);
            }
            cfg
        })
        .collect();
    for cfg in &configs {
        cfg.validate()?;
    }

    let tasks: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..folds).map(move |f| (c, f))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start {jobs} worker threads: {e}")))?;
    let scores: Vec<Result<f64>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(c, f)| fold_accuracy(x, labels, &configs[c], &assign, f))
            .collect()
    });

    let mut out = Vec::with_capacity(cells.len());
    let mut scores = scores.into_iter();
    for params in cells {
        let fold_accuracies = (0..folds).map(|_| scores.next().unwrap()).collect::<Result<Vec<_>>>()?;
        let mean_accuracy = fold_accuracies.iter().sum::<f64>() / folds as f64;
        out.push(GridCell {
            params,
            mean_accuracy,
            fold_accuracies,
        });
    }
    let best = (0..out.len())
        .min_by(|&a, &b| {
            out[b]
                .mean_accuracy
                .total_cmp(&out[a].mean_accuracy)
                .then_with(|| lexicographic(&out[a].params, &out[b].params))
                .then(a.cmp(&b))
        })
        .unwrap();
    Ok(GridResult {
        best_config: configs[best].clone(),
        cells: out,
        best,
    })
}
