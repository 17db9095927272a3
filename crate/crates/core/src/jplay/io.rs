// SPDX-License-Identifier: Apache-2.0

//! Text model format.
//!
//! A JSON document with format tag, version, config echo, layer dimensions,
//! the training report and every matrix as nested row arrays. Matrix entries
//! are written with 17 significant digits so a save/load cycle is exact.

use std::fmt::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use super::{JPlayConfig, TrainedModel, TrainingReport};
use crate::data::NormalizationParams;
use crate::embed::Projection;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "jplay-model";
pub const MODEL_VERSION: u32 = 1;

fn write_matrix(out: &mut String, m: &DMatrix<f64>, indent: &str) {
    out.push_str("[\n");
    for (i, row) in m.row_iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        let sep = if i + 1 < m.nrows() { "," } else { "" };
        writeln!(out, "{indent}  [{}]{sep}", cells.join(", ")).unwrap();
    }
    write!(out, "{indent}]").unwrap();
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("model metadata is serializable")
}

pub fn model_to_string(model: &TrainedModel) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    writeln!(out, "  \"format\": {},", json(&MODEL_FORMAT)).unwrap();
    writeln!(out, "  \"version\": {MODEL_VERSION},").unwrap();
    writeln!(out, "  \"layer_dims\": {},", json(&model.layer_dims())).unwrap();
    writeln!(out, "  \"n_classes\": {},", model.n_classes).unwrap();
    writeln!(out, "  \"config\": {},", json(&model.config)).unwrap();
    writeln!(out, "  \"normalization\": {},", json(&model.normalization)).unwrap();
    writeln!(out, "  \"report\": {},", json(&model.report)).unwrap();
    out.push_str("  \"thetas\": [\n");
    for (l, t) in model.thetas.iter().enumerate() {
        out.push_str("    ");
        write_matrix(&mut out, t.matrix(), "    ");
        out.push_str(if l + 1 < model.thetas.len() { ",\n" } else { "\n" });
    }
    out.push_str("  ],\n");
    out.push_str("  \"p\": ");
    write_matrix(&mut out, &model.p, "  ");
    out.push_str("\n}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format: String,
    version: u32,
    layer_dims: Vec<usize>,
    n_classes: usize,
    config: JPlayConfig,
    normalization: Option<NormalizationParams>,
    report: TrainingReport,
    thetas: Vec<Vec<Vec<f64>>>,
    p: Vec<Vec<f64>>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format {
        offset: 0,
        msg: msg.into(),
    }
}

fn to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(bad(format!("{what} is empty")));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(bad(format!("{what} has ragged rows")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn model_from_str(text: &str) -> Result<TrainedModel> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| Error::Format {
        offset: 0,
        msg: format!("line {} column {}: {e}", e.line(), e.column()),
    })?;
    if doc.format != MODEL_FORMAT {
        return Err(bad(format!("not a model file (format {:?})", doc.format)));
    }
    if doc.version != MODEL_VERSION {
        return Err(bad(format!("unsupported model version {}", doc.version)));
    }
    let thetas = doc
        .thetas
        .iter()
        .enumerate()
        .map(|(l, t)| Projection::new(to_matrix(t, &format!("theta {}", l + 1))?))
        .collect::<Result<Vec<_>>>()?;
    if thetas.is_empty() {
        return Err(bad("model has no layers"));
    }
    let model = TrainedModel {
        thetas,
        p: to_matrix(&doc.p, "P")?,
        config: doc.config,
        n_classes: doc.n_classes,
        report: doc.report,
        normalization: doc.normalization,
    };
    if model.layer_dims() != doc.layer_dims {
        return Err(bad(format!(
            "layer_dims {:?} disagree with matrix shapes {:?}",
            doc.layer_dims,
            model.layer_dims()
        )));
    }
    model.check_chain().map_err(|e| bad(e.to_string()))?;
    Ok(model)
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_string(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}
