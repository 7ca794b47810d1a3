//! Floating-point RGB images and PNG IO.

use std::path::Path;

use ::image::{imageops, DynamicImage, ImageBuffer, ImageReader, Rgb};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width and height of the native dataset frames.
pub const NATIVE_RESOLUTION: (u32, u32) = (1842, 980);
/// Resolution test images are loaded at for evaluation.
pub const EVALUATION_RESOLUTION: (u32, u32) = (1680, 892);

/// Sample width of the container the image was decoded from (and is written back to).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn max_value(self) -> f64 {
        match self {
            BitDepth::Eight => 255.0,
            BitDepth::Sixteen => 65535.0,
        }
    }
}

/// Interleaved RGB intensities in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
    bit_depth: BitDepth,
}

impl LinearImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>, bit_depth: BitDepth) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::Shape(format!(
                "{width}x{height}x3 image needs {} values, got {}",
                width * height * 3,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("intensity {v} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            data,
            bit_depth,
        })
    }

    /// Builds an 8-bit-tagged image from `f(x, y, channel)`; results are clamped to `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                for c in 0..3 {
                    data.push(f(x, y, c).clamp(0.0, 1.0));
                }
            }
        }
        Self {
            width,
            height,
            data,
            bit_depth: BitDepth::Eight,
        }
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        Self::from_fn(width, height, |_, _, c| rgb[c])
    }

    /// Values are clamped into `[0, 1]`; NaN becomes 0.
    pub(crate) fn from_clamped(
        width: usize,
        height: usize,
        mut data: Vec<f64>,
        bit_depth: BitDepth,
    ) -> Self {
        debug_assert_eq!(data.len(), width * height * 3);
        for v in &mut data {
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        }
        Self {
            width,
            height,
            data,
            bit_depth,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> BitDepth {
        self.bit_depth
    }

    pub fn with_bit_depth(mut self, bit_depth: BitDepth) -> Self {
        self.bit_depth = bit_depth;
        self
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * 3 + c]
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// One channel as a row-major plane.
    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.data.iter().skip(c).step_by(3).copied().collect()
    }

    pub fn channel_mean(&self, c: usize) -> f64 {
        let sum: f64 = self.data.iter().skip(c).step_by(3).sum();
        sum / self.pixel_count() as f64
    }

    pub fn ensure_same_shape(&self, other: &LinearImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }
}

/// Decodes a PNG into `[0, 1]` intensities, normalising by the container maximum.
///
/// 16-bit containers holding 10-bit sensor data therefore keep their raw scale.
/// `resize` applies a bilinear (triangle-filter) resample to `(width, height)`.
pub fn load_image(path: impl AsRef<Path>, resize: Option<(u32, u32)>) -> Result<LinearImage> {
    let path = path.as_ref();
    let decode_err = |message: String| Error::Decode {
        path: path.to_path_buf(),
        message,
    };
    let reader = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    let decoded = reader.decode().map_err(|e| decode_err(e.to_string()))?;

    match decoded {
        DynamicImage::ImageLuma8(_)
        | DynamicImage::ImageLumaA8(_)
        | DynamicImage::ImageRgb8(_)
        | DynamicImage::ImageRgba8(_) => {
            let mut buf = decoded.to_rgb8();
            if let Some((w, h)) = resize {
                buf = imageops::resize(&buf, w, h, imageops::FilterType::Triangle);
            }
            Ok(from_buffer(&buf, BitDepth::Eight))
        }
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => {
            let mut buf = decoded.to_rgb16();
            if let Some((w, h)) = resize {
                buf = imageops::resize(&buf, w, h, imageops::FilterType::Triangle);
            }
            Ok(from_buffer(&buf, BitDepth::Sixteen))
        }
        other => Err(Error::Format(format!(
            "{}: unsupported sample type {:?}",
            path.display(),
            other.color()
        ))),
    }
}

fn from_buffer<P>(buf: &ImageBuffer<Rgb<P>, Vec<P>>, bit_depth: BitDepth) -> LinearImage
where
    P: ::image::Primitive + Into<f64>,
    Rgb<P>: ::image::Pixel<Subpixel = P>,
{
    let scale = bit_depth.max_value();
    let data = buf.as_raw().iter().map(|&v| v.into() / scale).collect();
    LinearImage {
        width: buf.width() as usize,
        height: buf.height() as usize,
        data,
        bit_depth,
    }
}

/// Quantises to the image's bit depth and writes a PNG.
pub fn save_image(img: &LinearImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (img.width as u32, img.height as u32);
    let scale = img.bit_depth.max_value();
    let quantise = |v: f64| (v.clamp(0.0, 1.0) * scale).round();
    let result = match img.bit_depth {
        BitDepth::Eight => {
            let raw: Vec<u8> = img.data.iter().map(|&v| quantise(v) as u8).collect();
            ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, raw)
                .expect("buffer length matches dimensions")
                .save_with_format(path, ::image::ImageFormat::Png)
        }
        BitDepth::Sixteen => {
            let raw: Vec<u16> = img.data.iter().map(|&v| quantise(v) as u16).collect();
            ImageBuffer::<Rgb<u16>, _>::from_raw(w, h, raw)
                .expect("buffer length matches dimensions")
                .save_with_format(path, ::image::ImageFormat::Png)
        }
    };
    result.map_err(|e| match e {
        ::image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::Format(format!("{}: {other}", path.display())),
    })
}
