// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::Path;

use jplay_core::data::{
    decode_binary, load_csv, load_split, random_split_per_class, CsvOptions, LabelColumn, Orientation, Split,
};
use jplay_core::Dataset;

use crate::error::{CliError, CliResult};
use crate::settings::Settings;

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a truncated file behind.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| CliError::data(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn is_binary(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("jpld" | "bin")
    )
}

fn label_column(spec: &str) -> LabelColumn {
    if spec.eq_ignore_ascii_case("last") {
        LabelColumn::Last
    } else if let Ok(i) = spec.parse::<usize>() {
        LabelColumn::Index(i)
    } else {
        LabelColumn::Name(spec.to_string())
    }
}

/// Reads one positive integer label per line (`#` comments and blank lines skipped).
pub fn read_labels(path: &Path) -> CliResult<Vec<usize>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read labels {}: {e}", path.display())))?;
    let mut labels = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<usize>() {
            Ok(l) if l > 0 => labels.push(l),
            _ => {
                return Err(CliError::data(format!(
                    "{}:{}: label {line:?} is not a positive integer",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(labels)
}

/// Loads a `.jpld`/`.bin` binary or a CSV file; a separate label file replaces
/// any labels stored with the data.
pub fn read_dataset(data: &Path, labels: Option<&Path>, s: &Settings) -> CliResult<Dataset> {
    let mut ds = if is_binary(data) {
        let bytes =
            std::fs::read(data).map_err(|e| CliError::data(format!("cannot read {}: {e}", data.display())))?;
        decode_binary(&bytes).map_err(|e| CliError::data(format!("{}: {e}", data.display())))?
    } else {
        let opts = CsvOptions {
            orientation: if s.columns == Some(true) {
                Orientation::SamplesAsColumns
            } else {
                Orientation::SamplesAsRows
            },
            label_column: s.label_column.as_deref().map(label_column),
        };
        load_csv(data, &opts)?
    };
    if let Some(path) = labels {
        let l = read_labels(path)?;
        if l.len() != ds.x.n_samples() {
            return Err(CliError::data(format!(
                "{} has {} labels but the data has {} samples",
                path.display(),
                l.len(),
                ds.x.n_samples()
            )));
        }
        ds = Dataset::new(ds.x, Some(l))?;
    }
    Ok(ds)
}

pub fn require_labels(ds: &Dataset) -> CliResult<&[usize]> {
    ds.labels
        .as_deref()
        .ok_or_else(|| CliError::data("the data has no labels (use --labels or --label-column)"))
}

/// The split requested by `split` or `train-per-class`, if any.
pub fn resolve_split(ds: &Dataset, s: &Settings) -> CliResult<Option<Split>> {
    let split = match (&s.split, s.train_per_class) {
        (Some(_), Some(_)) => return Err(CliError::config("give either a split file or train-per-class, not both")),
        (Some(path), None) => load_split(path)?,
        (None, Some(n)) => random_split_per_class(require_labels(ds)?, n, s.seed())?,
        (None, None) => return Ok(ds.split.clone()),
    };
    split.validate(ds.x.n_samples())?;
    Ok(Some(split))
}

/// Training portion of the data under the requested split (everything when there is none).
pub fn training_part(ds: &Dataset, s: &Settings) -> CliResult<Dataset> {
    Ok(match resolve_split(ds, s)? {
        Some(split) => ds.subset(&split.train),
        None => ds.clone(),
    })
}
