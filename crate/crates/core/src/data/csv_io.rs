// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use nalgebra::DMatrix;

use super::{DataMatrix, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// One sample per CSV row.
    #[default]
    SamplesAsRows,
    /// One sample per CSV column.
    SamplesAsColumns,
}

/// Which CSV column holds the class labels (rows orientation only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
    Last,
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub orientation: Orientation,
    pub label_column: Option<LabelColumn>,
}

/// Reads a numeric CSV file.
///
/// A first line is treated as a header only when none of its cells parse as
/// numbers. Labels must be positive integers.
pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, path, opts)
}

fn parse_err(path: &Path, line: u64, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

pub(crate) fn parse_csv(text: &str, path: &Path, opts: &CsvOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut rows: Vec<(u64, Vec<String>)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(path, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        rows.push((line, rec.iter().map(str::to_owned).collect()));
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "empty file"));
    }

    let header = if rows[0].1.iter().all(|c| c.parse::<f64>().is_err()) {
        Some(rows.remove(0))
    } else {
        None
    };
    if rows.is_empty() {
        return Err(parse_err(path, 1, "file has a header but no data"));
    }

    let width = rows[0].1.len();
    for (line, r) in &rows {
        if r.len() != width {
            return Err(parse_err(
                path,
                *line,
                format!("ragged row: {} fields, expected {width}", r.len()),
            ));
        }
    }
    if let Some((line, h)) = &header {
        if h.len() != width {
            return Err(parse_err(path, *line, "header width differs from data width"));
        }
    }

    let label_idx = match (&opts.label_column, opts.orientation) {
        (None, _) => None,
        (Some(_), Orientation::SamplesAsColumns) => {
            return Err(Error::Parameter(
                "label columns are only supported for samples-as-rows CSV files".into(),
            ))
        }
        (Some(LabelColumn::Index(i)), _) => {
            if *i >= width {
                return Err(Error::Parameter(format!(
                    "label column {i} out of range for {width} columns"
                )));
            }
            Some(*i)
        }
        (Some(LabelColumn::Last), _) => Some(width - 1),
        (Some(LabelColumn::Name(name)), _) => {
            let (_, h) = header
                .as_ref()
                .ok_or_else(|| Error::Parameter(format!("label column {name:?} given but file has no header")))?;
            Some(h.iter().position(|c| c == name).ok_or_else(|| {
                Error::Parameter(format!("no column named {name:?}"))
            })?)
        }
    };

    let n_rows = rows.len();
    let n_value_cols = width - usize::from(label_idx.is_some());
    if n_value_cols == 0 {
        return Err(parse_err(path, rows[0].0, "no feature columns"));
    }
    let mut values = Vec::with_capacity(n_rows * n_value_cols);
    let mut labels = label_idx.map(|_| Vec::with_capacity(n_rows));
    for (line, r) in &rows {
        for (j, cell) in r.iter().enumerate() {
            if Some(j) == label_idx {
                let l: usize = cell
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.fract() == 0.0 && *v >= 1.0)
                    .map(|v| v as usize)
                    .ok_or_else(|| {
                        parse_err(path, *line, format!("label {cell:?} is not a positive integer"))
                    })?;
                labels.as_mut().unwrap().push(l);
            } else {
                let v: f64 = cell.parse().map_err(|_| {
                    parse_err(path, *line, format!("non-numeric cell {cell:?} in column {}", j + 1))
                })?;
                if !v.is_finite() {
                    return Err(parse_err(path, *line, format!("non-finite value {cell:?}")));
                }
                values.push(v);
            }
        }
    }

    // `values` is row-major over the file
    let file_matrix = DMatrix::from_row_slice(n_rows, n_value_cols, &values);
    let x = match opts.orientation {
        Orientation::SamplesAsRows => file_matrix.transpose(),
        Orientation::SamplesAsColumns => file_matrix,
    };
    Dataset::new(DataMatrix::new(x)?, labels)
}

/// Writes the dataset as CSV, with labels (when present) as a trailing `label` column.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>, orientation: Orientation) -> Result<()> {
    let path = path.as_ref();
    let text = render_csv(dataset, orientation)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn render_csv(dataset: &Dataset, orientation: Orientation) -> Result<String> {
    use std::fmt::Write;
    let x = dataset.data().matrix();
    let mut out = String::new();
    match orientation {
        Orientation::SamplesAsRows => {
            for j in 0..x.ncols() {
                let mut cells: Vec<String> = x.column(j).iter().map(|v| format!("{v:?}")).collect();
                if let Some(l) = &dataset.labels {
                    cells.push(l[j].to_string());
                }
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
        }
        Orientation::SamplesAsColumns => {
            if dataset.labels.is_some() {
                return Err(Error::Parameter(
                    "labels cannot be written in samples-as-columns orientation".into(),
                ));
            }
            for i in 0..x.nrows() {
                let cells: Vec<String> = x.row(i).iter().map(|v| format!("{v:?}")).collect();
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
        }
    }
    Ok(out)
}
