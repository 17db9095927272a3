// SPDX-License-Identifier: Apache-2.0

//! The "JPLD" binary container.
//!
//! Layout (all little-endian):
//!
//! | bytes     | content                                   |
//! |-----------|-------------------------------------------|
//! | 4         | magic `JPLD`                              |
//! | 1         | version (`1`)                             |
//! | 8         | `d` as u64                                |
//! | 8         | `N` as u64                                |
//! | 8·d·N     | f64 values, column-major (sample by sample) |
//! | 4·N       | u32 labels, `0` = unlabeled               |

use std::path::Path;

use nalgebra::DMatrix;

use super::{DataMatrix, Dataset};
use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"JPLD";
pub const BINARY_VERSION: u8 = 1;

const HEADER_LEN: usize = 4 + 1 + 8 + 8;

pub fn encode_binary(dataset: &Dataset) -> Result<Vec<u8>> {
    let x = dataset.data().matrix();
    let (d, n) = x.shape();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * d * n + 4 * n);
    out.extend_from_slice(BINARY_MAGIC);
    out.push(BINARY_VERSION);
    out.extend_from_slice(&(d as u64).to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    // nalgebra storage is column-major already
    for v in x.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    match &dataset.labels {
        Some(labels) => {
            for &l in labels {
                let l = u32::try_from(l)
                    .map_err(|_| Error::Input(format!("label {l} does not fit in u32")))?;
                out.extend_from_slice(&l.to_le_bytes());
            }
        }
        None => out.resize(out.len() + 4 * n, 0),
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(Error::Format {
                offset: self.pos as u64,
                msg: format!(
                    "truncated file: expected {len} bytes of {what}, found {}",
                    self.bytes.len() - self.pos
                ),
            });
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn decode_binary(bytes: &[u8]) -> Result<Dataset> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4, "magic")?;
    if magic != BINARY_MAGIC {
        return Err(Error::Format {
            offset: 0,
            msg: format!("bad magic {magic:?}, expected \"JPLD\""),
        });
    }
    let version = r.take(1, "version")?[0];
    if version != BINARY_VERSION {
        return Err(Error::Format {
            offset: 4,
            msg: format!("unsupported version {version}"),
        });
    }
    let d = r.u64("feature count")?;
    let n = r.u64("sample count")?;
    let total = d
        .checked_mul(n)
        .and_then(|v| v.checked_mul(8))
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| Error::Format {
            offset: 5,
            msg: format!("dimensions {d}x{n} overflow"),
        })?;
    let (d, n) = (d as usize, n as usize);
    let value_offset = r.pos;
    let raw = r.take(total, "matrix values")?;
    let values: Vec<f64> = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Format {
            offset: (value_offset + 8 * i) as u64,
            msg: "non-finite matrix value".into(),
        });
    }
    let label_offset = r.pos;
    let raw = r.take(4 * n, "labels")?;
    if r.pos != bytes.len() {
        return Err(Error::Format {
            offset: r.pos as u64,
            msg: format!("{} trailing bytes", bytes.len() - r.pos),
        });
    }
    let labels: Vec<usize> = raw
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();
    let unlabeled = labels.iter().filter(|&&l| l == 0).count();
    let labels = if unlabeled == n {
        None
    } else if unlabeled == 0 {
        Some(labels)
    } else {
        let i = labels.iter().position(|&l| l == 0).unwrap();
        return Err(Error::Format {
            offset: (label_offset + 4 * i) as u64,
            msg: "mixture of labeled and unlabeled samples".into(),
        });
    };
    let x = DataMatrix::new(DMatrix::from_vec(d, n, values)).map_err(|e| Error::Format {
        offset: value_offset as u64,
        msg: e.to_string(),
    })?;
    Dataset::new(x, labels)
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_binary(&bytes)
}

pub fn save_binary(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_binary(dataset)?).map_err(|e| Error::io(path, e))
}
