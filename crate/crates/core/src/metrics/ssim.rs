use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::LinearImage;

/// SSIM constants. Defaults follow the original reference formulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsimConfig {
    pub k1: f64,
    pub k2: f64,
    pub data_range: f64,
    /// Side of the square Gaussian window; must be odd.
    pub window: usize,
    pub sigma: f64,
}

impl Default for SsimConfig {
    fn default() -> Self {
        Self {
            k1: 0.01,
            k2: 0.03,
            data_range: 255.0,
            window: 11,
            sigma: 1.5,
        }
    }
}

/// Mean SSIM of the luma planes with the default constants.
pub fn ssim(a: &LinearImage, b: &LinearImage) -> Result<f64> {
    ssim_with(a, b, &SsimConfig::default())
}

pub fn ssim_with(a: &LinearImage, b: &LinearImage, cfg: &SsimConfig) -> Result<f64> {
    a.ensure_same_shape(b)?;
    let (w, h) = (a.width(), a.height());
    if w < cfg.window || h < cfg.window {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            window: cfg.window,
        });
    }
    let x = luma(a, cfg.data_range);
    let y = luma(b, cfg.data_range);
    let kernel = gaussian_kernel(cfg.window, cfg.sigma);

    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();

    let mu_x = filter_valid(&x, w, h, &kernel);
    let mu_y = filter_valid(&y, w, h, &kernel);
    let e_xx = filter_valid(&xx, w, h, &kernel);
    let e_yy = filter_valid(&yy, w, h, &kernel);
    let e_xy = filter_valid(&xy, w, h, &kernel);

    let c1 = (cfg.k1 * cfg.data_range).powi(2);
    let c2 = (cfg.k2 * cfg.data_range).powi(2);
    let n = mu_x.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let var_x = e_xx[i] - mx * mx;
            let var_y = e_yy[i] - my * my;
            let cov = e_xy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                / ((mx * mx + my * my + c1) * (var_x + var_y + c2))
        })
        .sum();
    Ok(total / n as f64)
}

/// Rec. 601 luma scaled to `[0, data_range]`.
pub(crate) fn luma(img: &LinearImage, data_range: f64) -> Vec<f64> {
    img.data()
        .chunks_exact(3)
        .map(|px| (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) * data_range)
        .collect()
}

pub(crate) fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    let half = (size / 2) as f64;
    let raw: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - half;
            (-(d * d) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Separable correlation keeping only fully-covered positions.
pub(crate) fn filter_valid(plane: &[f64], w: usize, h: usize, kernel: &[f64]) -> Vec<f64> {
    let k = kernel.len();
    let ow = w - k + 1;
    let oh = h - k + 1;
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        let src = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = src[x..x + k].iter().zip(kernel).map(|(v, g)| v * g).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = kernel
                .iter()
                .enumerate()
                .map(|(j, g)| rows[(y + j) * ow + x] * g)
                .sum();
        }
    }
    out
}
