//! `FMAT` feature matrices.
//!
//! Layout (little-endian): 4-byte magic `FMAT`, `u32` rows, `u32` cols,
//! 4 reserved bytes (written as zero, ignored when reading), then
//! `rows * cols` `f32` values in row-major order.

use std::fs;
use std::path::Path;

use crate::{Error, Result};

pub const FMAT_MAGIC: &[u8; 4] = b"FMAT";
pub const FMAT_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub values: Vec<f32>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::validation("features", "rows and cols must be >= 1"));
        }
        if values.len() != rows * cols {
            return Err(Error::validation(
                "features",
                format!("{} values for a {rows}x{cols} matrix", values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(
                "features",
                format!("non-finite value at ({}, {})", i / cols, i % cols),
            ));
        }
        Ok(FeatureMatrix { rows, cols, values })
    }

    pub fn row(&self, r: usize) -> &[f32] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(FMAT_HEADER_LEN + 4 * self.values.len());
        buf.extend_from_slice(FMAT_MAGIC);
        buf.extend_from_slice(&(self.rows as u32).to_le_bytes());
        buf.extend_from_slice(&(self.cols as u32).to_le_bytes());
        buf.extend_from_slice(&[0u8; 4]);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, String> {
        if bytes.len() < FMAT_HEADER_LEN {
            return Err(format!("{} bytes is shorter than the header", bytes.len()));
        }
        if &bytes[..4] != FMAT_MAGIC {
            return Err("bad magic, expected FMAT".into());
        }
        let word = |o: usize| u32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as usize;
        let (rows, cols) = (word(4), word(8));
        if rows == 0 || cols == 0 {
            return Err(format!("empty matrix {rows}x{cols}"));
        }
        let payload = &bytes[FMAT_HEADER_LEN..];
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| format!("header {rows}x{cols} overflows"))?;
        if payload.len() != expected {
            return Err(format!(
                "size mismatch: header {rows}x{cols} needs {expected} payload bytes, found {}",
                payload.len()
            ));
        }
        let values: Vec<f32> = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(format!("non-finite value at ({}, {})", i / cols, i % cols));
        }
        Ok(FeatureMatrix { rows, cols, values })
    }
}

pub fn load_features(path: &Path) -> Result<FeatureMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    FeatureMatrix::decode(&bytes).map_err(|r| Error::format(path, r))
}

pub fn write_features(path: &Path, m: &FeatureMatrix) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, m.encode()).map_err(|e| Error::io(path, e))
}
