// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;
use std::path::Path;

use jplay_core::data::{
    bundled_blobs, bundled_four_class, encode_binary, normalize, random_split_per_class, render_csv, render_split,
    synth_blobs, Orientation,
};
use jplay_core::jplay::{load_model, model_to_string, predict_regression, TrainedModel};
use jplay_core::{fit, grid_search, nn_classify, overall_accuracy, transform, DataMatrix, Dataset, Depth};

use crate::args::{resolve, Classifier, EvalArgs, ExportArgs, GridArgs, SynthArgs, SynthKind, TrainArgs};
use crate::error::{CliError, CliResult};
use crate::files::{atomic_write, read_dataset, require_labels, resolve_split, training_part};
use crate::pgm;
use crate::settings::Settings;

pub fn train(a: &TrainArgs, pretrain_only: bool, out: &mut String) -> CliResult<()> {
    let s = resolve(&a.data, &a.tuning, Settings::default())?;
    let mut cfg = s.jplay_config()?;
    if pretrain_only {
        cfg.outer_max_iter = 0;
    }
    let ds = read_dataset(&a.data.data, a.data.labels.as_deref(), &s)?;
    let tr = training_part(&ds, &s)?;
    let labels = require_labels(&tr)?;
    let norm = normalize(tr.data(), s.normalize_mode());
    if !norm.degenerate_features.is_empty() {
        writeln!(out, "warning: constant features mapped to 0: {:?}", norm.degenerate_features).unwrap();
    }
    let mut model = fit(&norm.data, labels, &cfg)?;
    model.normalization = Some(norm.params);

    let text = model_to_string(&model);
    atomic_write(&a.out, text.as_bytes())?;
    if let Some(path) = &a.trace_csv {
        atomic_write(path, trace_csv(&model).as_bytes())?;
    }
    report(&model, tr.x.n_samples(), out);
    writeln!(out, "model written to {}", a.out.display()).unwrap();
    Ok(())
}

fn report(model: &TrainedModel, n: usize, out: &mut String) {
    writeln!(
        out,
        "trained on {n} samples, {} classes, dimensions {:?}",
        model.n_classes,
        model.layer_dims()
    )
    .unwrap();
    for (l, r) in model.report.pretrain.iter().enumerate() {
        writeln!(
            out,
            "pre-training layer {}: {} ADMM iterations, {}, residuals {:.2e} {:.2e} {:.2e} {:.2e}",
            l + 1,
            r.iterations,
            if r.converged { "converged" } else { "iteration budget reached" },
            r.residuals[0],
            r.residuals[1],
            r.residuals[2],
            r.residuals[3]
        )
        .unwrap();
    }
    out.push_str(&trace_table(model));
    let rep = &model.report;
    if rep.converged {
        writeln!(out, "fine-tuning converged after {} outer iterations", rep.outer_iterations).unwrap();
    } else {
        writeln!(out, "fine-tuning stopped after {} outer iterations", rep.outer_iterations).unwrap();
    }
}

/// Objective per outer iteration as aligned columns; row 0 is the initialized model.
pub fn trace_table(model: &TrainedModel) -> String {
    let mut t = format!(
        "{:>5} {:>15} {:>15} {:>15} {:>15} {:>15}\n",
        "iter", "total", "reconstruction", "prediction", "manifold", "regularization"
    );
    for (i, o) in model.report.objective_trace.iter().enumerate() {
        writeln!(
            t,
            "{i:>5} {:>15.8e} {:>15.8e} {:>15.8e} {:>15.8e} {:>15.8e}",
            o.total, o.reconstruction, o.prediction, o.manifold, o.regularization
        )
        .unwrap();
    }
    t
}

pub fn trace_csv(model: &TrainedModel) -> String {
    let mut t = String::from("iteration,total,reconstruction,prediction,manifold,regularization\n");
    for (i, o) in model.report.objective_trace.iter().enumerate() {
        writeln!(
            t,
            "{i},{:?},{:?},{:?},{:?},{:?}",
            o.total, o.reconstruction, o.prediction, o.manifold, o.regularization
        )
        .unwrap();
    }
    t
}

fn prepare(model: &TrainedModel, x: &DataMatrix) -> CliResult<DataMatrix> {
    if x.dim() != model.input_dim() {
        return Err(CliError::data(format!(
            "model expects {} features but the data has {}",
            model.input_dim(),
            x.dim()
        )));
    }
    Ok(match &model.normalization {
        Some(p) => p.apply(x)?,
        None => x.clone(),
    })
}

pub fn eval(a: &EvalArgs, out: &mut String) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let s = Settings {
        split: a.data.split.clone(),
        train_per_class: a.data.train_per_class,
        label_column: a.data.label_column.clone(),
        columns: a.data.column_major_data.then_some(true),
        seed: a.seed,
        ..Default::default()
    };
    let ds = read_dataset(&a.data.data, a.data.labels.as_deref(), &s)?;
    let (reference, scored): (Dataset, Dataset) = match &a.train {
        Some(path) => {
            if s.split.is_some() || s.train_per_class.is_some() {
                return Err(CliError::config("--train cannot be combined with a split"));
            }
            (read_dataset(path, a.train_labels.as_deref(), &s)?, ds)
        }
        None => match resolve_split(&ds, &s)? {
            Some(split) => (ds.subset(&split.train), ds.subset(&split.test)),
            None => (ds.clone(), ds),
        },
    };
    let truth = require_labels(&scored)?;
    let x = prepare(&model, &scored.x)?;
    let pred = match a.classifier {
        Classifier::Nn => {
            let ref_labels = require_labels(&reference)?;
            let r = transform(&model, &prepare(&model, &reference.x)?, Depth::Top)?;
            let f = transform(&model, &x, Depth::Top)?;
            nn_classify(r.matrix(), ref_labels, f.matrix())?
        }
        Classifier::Regression => predict_regression(&model, &x)?,
    };
    let oa = overall_accuracy(&pred, truth)?;
    if let Some(path) = &a.predictions {
        let mut text = String::from("index,predicted,truth\n");
        for (i, (p, t)) in pred.iter().zip(truth).enumerate() {
            writeln!(text, "{i},{p},{t}").unwrap();
        }
        atomic_write(path, text.as_bytes())?;
    }
    writeln!(out, "OA: {oa:.4}").unwrap();
    Ok(())
}

pub fn gridsearch(a: &GridArgs, out: &mut String) -> CliResult<()> {
    let extra = Settings {
        grid: a.grid.clone(),
        folds: a.folds,
        jobs: a.jobs,
        ..Default::default()
    };
    let s = resolve(&a.data, &a.tuning, extra)?;
    let cfg = s.jplay_config()?;
    let spec = s.grid_spec()?;
    let folds = s.folds()?;
    let jobs = s.jobs()?;
    let ds = read_dataset(&a.data.data, a.data.labels.as_deref(), &s)?;
    let tr = training_part(&ds, &s)?;
    let labels = require_labels(&tr)?;
    let x = normalize(tr.data(), s.normalize_mode()).data;
    let res = grid_search(&x, labels, &cfg, &spec, folds, s.seed(), jobs)?;
    let table = res.to_csv();
    match &a.out {
        Some(path) => atomic_write(path, table.as_bytes())?,
        None => out.push_str(&table),
    }
    let best = res.best_cell();
    let params: Vec<String> = best.params.iter().map(|(p, v)| format!("{}={v}", p.name())).collect();
    writeln!(
        out,
        "best: {} mean_accuracy={:.4} ({} cells, {folds} folds)",
        params.join(" "),
        best.mean_accuracy,
        res.cells.len()
    )
    .unwrap();
    Ok(())
}

fn export_rows(m: &jplay_core::nalgebra::DMatrix<f64>, a: &ExportArgs, stem: &str) -> CliResult<usize> {
    let digits = m.nrows().to_string().len().max(3);
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        let pixels = pgm::raster(&pgm::scale_row(&row), a.height, a.width, a.column_major);
        let path = a.out.join(format!("{stem}_{i:0digits$}.pgm"));
        atomic_write(&path, &pgm::encode(a.width, a.height, &pixels))?;
    }
    Ok(m.nrows())
}

pub fn export_features(a: &ExportArgs, out: &mut String) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let d0 = model.input_dim();
    if a.height == 0 || a.width == 0 || a.height.checked_mul(a.width) != Some(d0) {
        return Err(CliError::config(format!(
            "image size {}x{} does not match the model's {d0} input features",
            a.height, a.width
        )));
    }
    std::fs::create_dir_all(&a.out)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", a.out.display())))?;
    let n = export_rows(&model.composite(), a, "composite")?;
    writeln!(out, "wrote {n} composite images to {}", a.out.display()).unwrap();
    if a.first_layer {
        let n = export_rows(model.thetas[0].matrix(), a, "layer1")?;
        writeln!(out, "wrote {n} first-layer images to {}", a.out.display()).unwrap();
    }
    Ok(())
}

fn is_csv(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn synth(a: &SynthArgs, out: &mut String) -> CliResult<()> {
    let ds = match a.kind {
        SynthKind::Blobs => bundled_blobs(),
        SynthKind::FourClass => bundled_four_class(),
        SynthKind::Custom => {
            if a.classes < 2 || a.per_class == 0 || a.dim == 0 {
                return Err(CliError::config("custom blobs need classes >= 2, per-class >= 1 and dim >= 1"));
            }
            if !(a.spread.is_finite() && a.sigma.is_finite() && a.sigma >= 0.0) {
                return Err(CliError::config("spread and sigma must be finite, sigma nonnegative"));
            }
            synth_blobs(a.classes, a.per_class, a.dim, a.spread, a.sigma, a.seed)
        }
    };
    let bytes = if is_csv(&a.out) {
        render_csv(&ds, Orientation::SamplesAsRows)?.into_bytes()
    } else {
        encode_binary(&ds)?
    };
    if let (Some(path), Some(n)) = (&a.split_out, a.train_per_class) {
        let split = random_split_per_class(require_labels(&ds)?, n, a.seed)?;
        atomic_write(path, render_split(&split).as_bytes())?;
    }
    atomic_write(&a.out, &bytes)?;
    writeln!(
        out,
        "wrote {} samples of dimension {} ({} classes) to {}",
        ds.x.n_samples(),
        ds.x.dim(),
        ds.n_classes,
        a.out.display()
    )
    .unwrap();
    Ok(())
}
