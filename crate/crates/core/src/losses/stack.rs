//! Multi-layer patch feature stacks and their file format.
//!
//! ```text
//! "UWFS"  u32 LE header length  JSON header  f64 LE payload
//! ```
//!
//! The header is `{"layers": [{"name", "locations", "channels"}, ...]}`; the payload
//! holds each layer in order, locations row by row, channels innermost.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const STACK_MAGIC: [u8; 4] = *b"UWFS";

/// Encoder tap points features are drawn from: the input pixels, both downsampling
/// convolutions, and the first and fifth residual blocks.
pub const TAP_LAYERS: [&str; 5] = [
    "rgb",
    "downsample1",
    "downsample2",
    "resblock1",
    "resblock5",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureLayer {
    pub name: String,
    pub locations: usize,
    pub channels: usize,
    /// `locations × channels`, row-major.
    pub data: Vec<f64>,
}

impl FeatureLayer {
    pub fn new(
        name: impl Into<String>,
        locations: usize,
        channels: usize,
        data: Vec<f64>,
    ) -> Result<Self> {
        let name = name.into();
        if locations == 0 || channels == 0 || data.len() != locations * channels {
            return Err(Error::Shape(format!(
                "layer `{name}`: {locations}x{channels} with {} values",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "layer `{name}` has non-finite features"
            )));
        }
        Ok(Self {
            name,
            locations,
            channels,
            data,
        })
    }

    pub fn location(&self, s: usize) -> &[f64] {
        &self.data[s * self.channels..(s + 1) * self.channels]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStack {
    layers: Vec<FeatureLayer>,
}

impl FeatureStack {
    pub fn new(layers: Vec<FeatureLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape(
                "feature stack needs at least one layer".into(),
            ));
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[FeatureLayer] {
        &self.layers
    }

    pub fn ensure_same_shape(&self, other: &FeatureStack) -> Result<()> {
        if self.layers.len() != other.layers.len() {
            return Err(Error::Shape(format!(
                "{} layers vs {}",
                self.layers.len(),
                other.layers.len()
            )));
        }
        for (l, (a, b)) in self.layers.iter().zip(&other.layers).enumerate() {
            if (a.locations, a.channels) != (b.locations, b.channels) {
                return Err(Error::Shape(format!(
                    "layer {l}: {}x{} vs {}x{}",
                    a.locations, a.channels, b.locations, b.channels
                )));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct LayerHeader {
    name: String,
    locations: usize,
    channels: usize,
}

#[derive(Serialize, Deserialize)]
struct StackHeader {
    layers: Vec<LayerHeader>,
}

pub fn write_stack(path: impl AsRef<Path>, stack: &FeatureStack) -> Result<()> {
    let path = path.as_ref();
    let header = StackHeader {
        layers: stack
            .layers
            .iter()
            .map(|l| LayerHeader {
                name: l.name.clone(),
                locations: l.locations,
                channels: l.channels,
            })
            .collect(),
    };
    let json = serde_json::to_vec(&header).expect("header serialises");
    let mut buf = Vec::new();
    buf.extend_from_slice(&STACK_MAGIC);
    buf.extend_from_slice(&(json.len() as u32).to_le_bytes());
    buf.extend_from_slice(&json);
    for layer in &stack.layers {
        for v in &layer.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn read_stack(path: impl AsRef<Path>) -> Result<FeatureStack> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let bad = |msg: &str| Error::Format(format!("{}: {msg}", path.display()));
    if bytes.len() < 8 || bytes[..4] != STACK_MAGIC {
        return Err(bad("missing feature stack magic"));
    }
    let header_len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let header_bytes = bytes
        .get(8..8 + header_len)
        .ok_or_else(|| bad("truncated header"))?;
    let header: StackHeader =
        serde_json::from_slice(header_bytes).map_err(|e| bad(&format!("header: {e}")))?;
    let mut payload = bytes[8 + header_len..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let expected: usize = header.layers.iter().map(|l| l.locations * l.channels).sum();
    if bytes.len() - 8 - header_len != expected * 8 {
        return Err(bad(&format!(
            "payload holds {} bytes, header declares {} values",
            bytes.len() - 8 - header_len,
            expected
        )));
    }
    let layers = header
        .layers
        .into_iter()
        .map(|h| {
            let data: Vec<f64> = payload.by_ref().take(h.locations * h.channels).collect();
            FeatureLayer::new(h.name, h.locations, h.channels, data)
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureStack::new(layers)
}
