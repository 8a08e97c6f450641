//! Line-oriented text model format.
//!
//! ```text
//! SIGVERNET-MODEL v1
//! layout combined
//! dims 501 16 16 1
//! threshold 0
//! W 16 501
//! <16 rows of 501 floats>
//! b 16
//! <one row of 16 floats>
//! ...
//! ```
//!
//! Floats use the shortest representation that parses back to the same
//! value, so save → load is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{DenseLayer, MlpModel, FORMAT_VERSION};

pub const MODEL_MAGIC: &str = "SIGVERNET-MODEL";

/// Layout tag written for networks whose input width is not a feature layout.
const RAW_LAYOUT: &str = "raw";

pub fn encode_model<T: Scalar>(model: &MlpModel<T>) -> String {
    let mut out = String::new();
    let dims = model.layer_dims();
    let _ = writeln!(out, "{MODEL_MAGIC} v{}", model.format_version());
    let _ = writeln!(
        out,
        "layout {}",
        model.layout().map_or(RAW_LAYOUT, |l| l.tag())
    );
    let _ = writeln!(out, "dims {} {} {} {}", dims[0], dims[1], dims[2], dims[3]);
    let _ = writeln!(out, "threshold {}", model.decision_threshold());
    for layer in model.layers() {
        let _ = writeln!(out, "W {} {}", layer.rows(), layer.cols());
        for row in layer.weights().chunks(layer.cols()) {
            out.push_str(&join(row));
            out.push('\n');
        }
        let _ = writeln!(out, "b {}", layer.rows());
        out.push_str(&join(layer.biases()));
        out.push('\n');
    }
    out
}

fn join<T: Scalar>(vals: &[T]) -> String {
    vals.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptModel(msg.into())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l.trim()))
            .ok_or_else(|| corrupt(format!("file ends before {what}")))
    }

    /// Reads a `key v1 v2 ...` line.
    fn keyed(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (no, line) = self.next(key)?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(corrupt(format!(
                "line {no}: expected `{key}`, got {line:?}"
            )));
        }
        Ok((no, parts.collect()))
    }
}

fn parse_num<N: std::str::FromStr>(tok: &str, no: usize) -> Result<N> {
    tok.parse()
        .map_err(|_| corrupt(format!("line {no}: bad number {tok:?}")))
}

fn parse_row<T: Scalar>(line: &str, no: usize, len: usize) -> Result<Vec<T>> {
    let vals = line
        .split_whitespace()
        .map(|t| parse_num::<T>(t, no))
        .collect::<Result<Vec<T>>>()?;
    if vals.len() != len {
        return Err(corrupt(format!(
            "line {no}: expected {len} values, got {}",
            vals.len()
        )));
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(corrupt(format!("line {no}: non-finite value")));
    }
    Ok(vals)
}

pub fn decode_model<T: Scalar>(text: &str) -> Result<MlpModel<T>> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (_, header) = lines.next("header")?;
    let version = header
        .strip_prefix(MODEL_MAGIC)
        .map(str::trim)
        .ok_or_else(|| corrupt("missing model header"))?;
    if version != format!("v{FORMAT_VERSION}") {
        return Err(Error::VersionMismatch(version.to_string()));
    }

    let (no, layout) = lines.keyed("layout")?;
    let layout = match layout.as_slice() {
        [RAW_LAYOUT] => None,
        [tag] => Some(
            tag.parse()
                .map_err(|_| corrupt(format!("line {no}: unknown layout {tag}")))?,
        ),
        _ => return Err(corrupt(format!("line {no}: bad layout line"))),
    };
    let (no, dims) = lines.keyed("dims")?;
    let dims = dims
        .iter()
        .map(|t| parse_num::<usize>(t, no))
        .collect::<Result<Vec<_>>>()?;
    if dims.len() != 4 {
        return Err(corrupt(format!("line {no}: expected 4 dims")));
    }
    let (no, thr) = lines.keyed("threshold")?;
    let threshold: T = match thr.as_slice() {
        [t] => parse_num(t, no)?,
        _ => return Err(corrupt(format!("line {no}: bad threshold line"))),
    };

    let mut layers = Vec::with_capacity(3);
    for k in 0..3 {
        let (no, shape) = lines.keyed("W")?;
        let shape = shape
            .iter()
            .map(|t| parse_num::<usize>(t, no))
            .collect::<Result<Vec<_>>>()?;
        if shape != [dims[k + 1], dims[k]] {
            return Err(corrupt(format!(
                "line {no}: weight shape {shape:?} disagrees with dims"
            )));
        }
        let (rows, cols) = (shape[0], shape[1]);
        let mut weights = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (no, line) = lines.next("weight row")?;
            weights.extend(parse_row::<T>(line, no, cols)?);
        }
        let (no, blen) = lines.keyed("b")?;
        if blen.len() != 1 || parse_num::<usize>(blen[0], no)? != rows {
            return Err(corrupt(format!(
                "line {no}: bias length disagrees with dims"
            )));
        }
        let (no, line) = lines.next("bias row")?;
        let biases = parse_row::<T>(line, no, rows)?;
        layers.push(DenseLayer::from_parts(rows, cols, weights, biases)?);
    }

    let mut model = MlpModel::from_layers(layers).map_err(|e| corrupt(e.to_string()))?;
    if model.layout() != layout {
        return Err(corrupt("layout tag disagrees with input width"));
    }
    if !threshold.is_finite() {
        return Err(corrupt("non-finite threshold"));
    }
    model.set_decision_threshold(threshold);
    Ok(model)
}

pub fn save_model<T: Scalar>(model: &MlpModel<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<MlpModel<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    decode_model(&text)
}
