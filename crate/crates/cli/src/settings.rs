// SPDX-License-Identifier: Apache-2.0

//! Run configuration assembled from an optional `key = value` file and
//! command-line flags. Flags win.

use std::path::{Path, PathBuf};

use jplay_core::classify::GridSpec;
use jplay_core::{Bandwidth, JPlayConfig, NormalizeMode, ResidualMode};

use crate::error::{CliError, CliResult};

/// Every tunable, unset until a file or flag provides it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub layers: Option<Vec<usize>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub zeta: Option<f64>,
    pub outer_max_iter: Option<usize>,
    pub admm_eps: Option<f64>,
    pub admm_max_iter: Option<usize>,
    pub mu0: Option<f64>,
    pub mu_max: Option<f64>,
    pub rho: Option<f64>,
    pub residual_mode: Option<ResidualMode>,
    pub graph_k: Option<usize>,
    pub bandwidth: Option<Bandwidth>,
    pub supervised_graph: Option<bool>,
    pub per_layer_graph: Option<bool>,
    pub lpp_ridge: Option<f64>,
    pub normalize: Option<NormalizeMode>,
    pub seed: Option<u64>,
    pub folds: Option<usize>,
    pub jobs: Option<usize>,
    pub grid: Vec<String>,
    pub split: Option<PathBuf>,
    pub train_per_class: Option<usize>,
    pub label_column: Option<String>,
    pub columns: Option<bool>,
}

pub const KEYS: &[&str] = &[
    "layers",
    "alpha",
    "beta",
    "gamma",
    "eta",
    "zeta",
    "outer-max-iter",
    "admm-eps",
    "admm-max-iter",
    "mu0",
    "mu-max",
    "rho",
    "residual-mode",
    "graph-k",
    "bandwidth",
    "supervised-graph",
    "per-layer-graph",
    "lpp-ridge",
    "normalize",
    "seed",
    "folds",
    "jobs",
    "grid",
    "split",
    "train-per-class",
    "label-column",
    "column-major-data",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse()
        .map_err(|_| CliError::config(format!("{key}: cannot parse {v:?}")))
}

fn real(key: &str, v: &str) -> CliResult<f64> {
    let x: f64 = num(key, v)?;
    if !x.is_finite() {
        return Err(CliError::config(format!("{key}: {v:?} is not a finite number")));
    }
    Ok(x)
}

fn boolean(key: &str, v: &str) -> CliResult<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(CliError::config(format!("{key}: expected true or false, got {v:?}"))),
    }
}

pub fn parse_layers(v: &str) -> CliResult<Vec<usize>> {
    let dims = v
        .split(',')
        .map(|s| num::<usize>("layers", s.trim()))
        .collect::<CliResult<Vec<_>>>()?;
    if dims.is_empty() {
        return Err(CliError::config("layers: at least one dimension is required"));
    }
    if let Some(i) = dims.iter().position(|&d| d == 0) {
        return Err(CliError::config(format!("layers: dimension {} is 0", i + 1)));
    }
    Ok(dims)
}

pub fn parse_bandwidth(v: &str) -> CliResult<Bandwidth> {
    if v.eq_ignore_ascii_case("auto") {
        return Ok(Bandwidth::Auto);
    }
    let s = real("bandwidth", v)?;
    if s <= 0.0 {
        return Err(CliError::config(format!("bandwidth must be positive, got {v}")));
    }
    Ok(Bandwidth::Fixed(s))
}

pub fn parse_residual_mode(v: &str) -> CliResult<ResidualMode> {
    match v {
        "absolute" => Ok(ResidualMode::Absolute),
        "relative" => Ok(ResidualMode::Relative),
        _ => Err(CliError::config(format!(
            "residual-mode: expected absolute or relative, got {v:?}"
        ))),
    }
}

pub fn parse_normalize(v: &str) -> CliResult<NormalizeMode> {
    v.parse().map_err(|e: jplay_core::Error| CliError::config(e.to_string()))
}

impl Settings {
    /// Sets one key; keys accept `-` or `_` as separator.
    pub fn set(&mut self, key: &str, v: &str) -> CliResult<()> {
        let key = key.replace('_', "-");
        let k = key.as_str();
        match k {
            "layers" => self.layers = Some(parse_layers(v)?),
            "alpha" => self.alpha = Some(real(k, v)?),
            "beta" => self.beta = Some(real(k, v)?),
            "gamma" => self.gamma = Some(real(k, v)?),
            "eta" => self.eta = Some(real(k, v)?),
            "zeta" => self.zeta = Some(real(k, v)?),
            "outer-max-iter" => self.outer_max_iter = Some(num(k, v)?),
            "admm-eps" => self.admm_eps = Some(real(k, v)?),
            "admm-max-iter" => self.admm_max_iter = Some(num(k, v)?),
            "mu0" => self.mu0 = Some(real(k, v)?),
            "mu-max" => self.mu_max = Some(real(k, v)?),
            "rho" => self.rho = Some(real(k, v)?),
            "residual-mode" => self.residual_mode = Some(parse_residual_mode(v)?),
            "graph-k" => self.graph_k = Some(num(k, v)?),
            "bandwidth" => self.bandwidth = Some(parse_bandwidth(v)?),
            "supervised-graph" => self.supervised_graph = Some(boolean(k, v)?),
            "per-layer-graph" => self.per_layer_graph = Some(boolean(k, v)?),
            "lpp-ridge" => self.lpp_ridge = Some(real(k, v)?),
            "normalize" => self.normalize = Some(parse_normalize(v)?),
            "seed" => self.seed = Some(num(k, v)?),
            "folds" => self.folds = Some(num(k, v)?),
            "jobs" => self.jobs = Some(num(k, v)?),
            "grid" => self.grid.push(v.to_string()),
            "split" => self.split = Some(PathBuf::from(v)),
            "train-per-class" => self.train_per_class = Some(num(k, v)?),
            "label-column" => self.label_column = Some(v.to_string()),
            "column-major-data" => self.columns = Some(boolean(k, v)?),
            _ => {
                return Err(CliError::config(format!(
                    "unknown configuration key {key:?} (known keys: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str, origin: &Path) -> CliResult<Settings> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("{}:{}: expected `key = value`", origin.display(), i + 1))
            })?;
            s.set(k.trim(), v.trim())
                .map_err(|e| CliError::config(format!("{}:{}: {}", origin.display(), i + 1, e.message)))?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> CliResult<Settings> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config file {}: {e}", path.display())))?;
        Settings::parse(&text, path)
    }

    /// `self` takes precedence; grid entries from flags replace the file's.
    pub fn over(self, base: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => {
                Settings {
                    $($f: self.$f.or(base.$f),)*
                    grid: if self.grid.is_empty() { base.grid } else { self.grid },
                }
            };
        }
        pick!(
            layers, alpha, beta, gamma, eta, zeta, outer_max_iter, admm_eps, admm_max_iter, mu0, mu_max, rho,
            residual_mode, graph_k, bandwidth, supervised_graph, per_layer_graph, lpp_ridge, normalize, seed,
            folds, jobs, split, train_per_class, label_column, columns
        )
    }

    pub fn jplay_config(&self) -> CliResult<JPlayConfig> {
        let mut cfg = JPlayConfig::default();
        if let Some(l) = &self.layers {
            cfg.layer_dims = l.clone();
        }
        macro_rules! copy {
            ($($src:ident => $($dst:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$src { cfg.$($dst).+ = v; })*
            };
        }
        copy!(
            alpha => alpha,
            beta => beta,
            gamma => gamma,
            eta => admm.eta,
            zeta => zeta,
            outer_max_iter => outer_max_iter,
            admm_eps => admm.eps,
            admm_max_iter => admm.max_iter,
            mu0 => admm.mu0,
            mu_max => admm.mu_max,
            rho => admm.rho,
            residual_mode => admm.residual_mode,
            graph_k => graph.k,
            bandwidth => graph.bandwidth,
            supervised_graph => graph.supervised,
            per_layer_graph => per_layer_graph,
            seed => seed,
        );
        cfg.lpp_ridge = self.lpp_ridge.or(cfg.lpp_ridge);
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }

    pub fn normalize_mode(&self) -> NormalizeMode {
        self.normalize.unwrap_or(NormalizeMode::UnitColumns)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn folds(&self) -> CliResult<usize> {
        let f = self.folds.unwrap_or(10);
        if f < 2 {
            return Err(CliError::config(format!("folds must be at least 2, got {f}")));
        }
        Ok(f)
    }

    pub fn jobs(&self) -> CliResult<usize> {
        match self.jobs {
            Some(0) => Err(CliError::config("jobs must be positive")),
            Some(j) => Ok(j),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    /// Grid from the `grid` entries, or every standard value of alpha, beta and gamma.
    pub fn grid_spec(&self) -> CliResult<GridSpec> {
        use jplay_core::classify::GridParam;
        if self.grid.is_empty() {
            return Ok(GridSpec::standard(&[GridParam::Alpha, GridParam::Beta, GridParam::Gamma]));
        }
        let mut spec = GridSpec::default();
        for entry in &self.grid {
            spec.push_entry(entry).map_err(CliError::from)?;
        }
        Ok(spec)
    }
}
