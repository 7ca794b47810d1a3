//! Image quality metrics.
//!
//! Full-reference metrics ([`mse`], [`psnr`], [`ssim`]) operate on the 0–255 scale so
//! their magnitudes are comparable with published 8-bit results. [`uiqm`] is the
//! non-reference underwater quality measure and [`fid`] compares Gaussian fits of two
//! feature sets.

mod features;
mod fid;
mod report;
mod ssim;
mod uiqm;

pub use features::{
    parse_features_csv, read_features, toy_embedding, write_features, FEATURE_MAGIC,
};
pub use fid::{fid, gaussian_stats, GaussianStats};
pub use report::{
    evaluate_pair, evaluate_pair_with, ImageMetrics, MetricReport, MetricSelection, SummaryRow,
};
pub use ssim::{ssim, ssim_with, SsimConfig};
pub use uiqm::{uiqm, uiqm_with, UiqmConfig, UiqmScores};

use crate::error::Result;
use crate::image::LinearImage;

/// Peak value of the 8-bit scale the full-reference metrics are reported on.
pub const PEAK: f64 = 255.0;

/// Mean squared error over all pixels and channels, on the 0–255 scale.
pub fn mse(a: &LinearImage, b: &LinearImage) -> Result<f64> {
    a.ensure_same_shape(b)?;
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| {
            let d = x * PEAK - y * PEAK;
            d * d
        })
        .sum();
    Ok(sum / a.data().len() as f64)
}

/// PSNR in dB for a given MSE; `f64::INFINITY` when the error is zero.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

/// Peak signal-to-noise ratio in dB; identical images give `f64::INFINITY`.
pub fn psnr(a: &LinearImage, b: &LinearImage) -> Result<f64> {
    mse(a, b).map(psnr_from_mse)
}
