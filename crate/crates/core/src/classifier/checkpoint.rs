//! Checkpoint layout: one line of JSON header, a newline, then every weight matrix as
//! row-major little-endian `f64`, concatenated in declaration order.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::model::{ClassifierParams, Variant};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format: String,
    pub variant: Variant,
    pub shapes: Vec<(usize, usize)>,
    pub sgc_hops: usize,
    pub seed: u64,
    pub epoch: usize,
}

const FORMAT: &str = "graphss-checkpoint-v1";

pub fn write_checkpoint<W: Write>(
    mut out: W,
    params: &ClassifierParams,
    seed: u64,
    epoch: usize,
) -> Result<()> {
    let header = CheckpointHeader {
        format: FORMAT.to_owned(),
        variant: params.variant,
        shapes: params.weights.iter().map(|w| w.dim()).collect(),
        sgc_hops: params.sgc_hops,
        seed,
        epoch,
    };
    let mut buf = serde_json::to_vec(&header)?;
    buf.push(b'\n');
    for w in &params.weights {
        for v in w.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    out.write_all(&buf)
        .map_err(|e| Error::io("<checkpoint>", e))
}

pub fn read_checkpoint<R: BufRead>(mut input: R) -> Result<(CheckpointHeader, ClassifierParams)> {
    let mut line = Vec::new();
    input
        .read_until(b'\n', &mut line)
        .map_err(|e| Error::io("<checkpoint>", e))?;
    let header: CheckpointHeader = serde_json::from_slice(&line)?;
    if header.format != FORMAT {
        return Err(Error::invalid(format!("unknown checkpoint format {}", header.format)));
    }
    let mut weights = Vec::with_capacity(header.shapes.len());
    let mut bytes = [0u8; 8];
    for &(r, c) in &header.shapes {
        let mut data = Vec::with_capacity(r * c);
        for _ in 0..r * c {
            input
                .read_exact(&mut bytes)
                .map_err(|e| Error::io("<checkpoint>", e))?;
            data.push(f64::from_le_bytes(bytes));
        }
        weights.push(Array2::from_shape_vec((r, c), data).expect("shape matches length"));
    }
    let params = ClassifierParams {
        variant: header.variant,
        weights,
        sgc_hops: header.sgc_hops,
    };
    Ok((header, params))
}

pub fn save_checkpoint(path: &Path, params: &ClassifierParams, seed: u64, epoch: usize) -> Result<()> {
    let mut buf = Vec::new();
    write_checkpoint(&mut buf, params, seed, epoch)?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<(CheckpointHeader, ClassifierParams)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(&bytes[..])
}
