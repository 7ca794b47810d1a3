//! Feature matrices on disk.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! u32 magic ("UWFT")  u32 D  u32 N  f64 × N·D (row-major, one row per sample)
//! ```
//!
//! Files without the magic are read as CSV: one sample per line, `#` comments.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::image::LinearImage;

pub const FEATURE_MAGIC: [u8; 4] = *b"UWFT";

pub fn write_features(path: impl AsRef<Path>, features: &DMatrix<f64>) -> Result<()> {
    let path = path.as_ref();
    let (n, d) = features.shape();
    let mut buf = Vec::with_capacity(12 + n * d * 8);
    buf.extend_from_slice(&FEATURE_MAGIC);
    buf.extend_from_slice(&(d as u32).to_le_bytes());
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    for row in features.row_iter() {
        for v in row.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))
}

pub fn read_features(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    if bytes.starts_with(&FEATURE_MAGIC) {
        parse_features_binary(&bytes, &source)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| {
            Error::Format(format!("{source}: neither binary features nor UTF-8 CSV"))
        })?;
        parse_features_csv(&text, &source)
    }
}

fn parse_features_binary(bytes: &[u8], source: &str) -> Result<DMatrix<f64>> {
    let word = |i: usize| -> Result<usize> {
        bytes
            .get(i * 4..i * 4 + 4)
            .map(|b| u32::from_le_bytes(b.try_into().unwrap()) as usize)
            .ok_or_else(|| Error::Format(format!("{source}: truncated header")))
    };
    let d = word(1)?;
    let n = word(2)?;
    let payload = &bytes[12..];
    if payload.len() != n * d * 8 {
        return Err(Error::Format(format!(
            "{source}: header declares {n}x{d} features ({} bytes) but payload has {} bytes",
            n * d * 8,
            payload.len()
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DMatrix::from_row_slice(n, d, &values))
}

pub fn parse_features_csv(text: &str, source: &str) -> Result<DMatrix<f64>> {
    let mut values = Vec::new();
    let mut dim = None;
    let mut rows = 0;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .enumerate()
            .map(|(col, field)| {
                field.trim().parse::<f64>().map_err(|_| {
                    Error::parse(
                        source,
                        idx + 1,
                        format!("column {}", col + 1),
                        format!("`{}` is not a number", field.trim()),
                    )
                })
            })
            .collect::<Result<_>>()?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::parse(
                    source,
                    idx + 1,
                    "record",
                    format!("expected {d} columns, got {}", row.len()),
                ))
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    Ok(DMatrix::from_row_slice(rows, dim.unwrap_or(0), &values))
}

const TOY_GRID: usize = 4;

/// A small deterministic image descriptor for exercising the FID path without a
/// network: per-channel means over a 4×4 grid of cells followed by the per-channel
/// standard deviation (51 values).
///
/// This is not an Inception embedding and its distances are not comparable with
/// published FID scores.
pub fn toy_embedding(img: &LinearImage) -> Vec<f64> {
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::with_capacity(TOY_GRID * TOY_GRID * 3 + 3);
    for gy in 0..TOY_GRID {
        let (y0, y1) = (
            gy * h / TOY_GRID,
            ((gy + 1) * h / TOY_GRID).max(gy * h / TOY_GRID + 1).min(h),
        );
        for gx in 0..TOY_GRID {
            let (x0, x1) = (
                gx * w / TOY_GRID,
                ((gx + 1) * w / TOY_GRID).max(gx * w / TOY_GRID + 1).min(w),
            );
            let count = ((y1 - y0) * (x1 - x0)) as f64;
            for c in 0..3 {
                let mut sum = 0.0;
                for y in y0..y1 {
                    for x in x0..x1 {
                        sum += img.get(x, y, c);
                    }
                }
                out.push(sum / count);
            }
        }
    }
    for c in 0..3 {
        let mean = img.channel_mean(c);
        let var = img
            .data()
            .iter()
            .skip(c)
            .step_by(3)
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / img.pixel_count() as f64;
        out.push(var.sqrt());
    }
    out
}
