//! Underwater image quality measure.
//!
//! A weighted sum of colourfulness (UICM), sharpness (UISM) and contrast (UIConM),
//! all computed on the 0–255 scale.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image::LinearImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UiqmConfig {
    /// Fraction of the sorted opponent values trimmed from the low end.
    pub alpha_low: f64,
    /// Fraction trimmed from the high end.
    pub alpha_high: f64,
    /// Side of the square blocks used by EME and logAMEE.
    pub block: usize,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Channel weights combining per-channel EME into UISM.
    pub sharpness_weights: [f64; 3],
}

impl Default for UiqmConfig {
    fn default() -> Self {
        Self {
            alpha_low: 0.1,
            alpha_high: 0.1,
            block: 8,
            c1: 0.0282,
            c2: 0.2953,
            c3: 3.5753,
            sharpness_weights: [0.299, 0.587, 0.114],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UiqmScores {
    pub uicm: f64,
    pub uism: f64,
    pub uiconm: f64,
    pub uiqm: f64,
}

pub fn uiqm(img: &LinearImage) -> Result<UiqmScores> {
    uiqm_with(img, &UiqmConfig::default())
}

pub fn uiqm_with(img: &LinearImage, cfg: &UiqmConfig) -> Result<UiqmScores> {
    let planes: Vec<Vec<f64>> = (0..3)
        .map(|c| img.channel(c).into_iter().map(|v| v * 255.0).collect())
        .collect();
    let (w, h) = (img.width(), img.height());
    let uicm = colorfulness(&planes[0], &planes[1], &planes[2], cfg);
    let uism = sharpness(&planes, w, h, cfg);
    let uiconm = contrast(&planes, w, h, cfg.block);
    Ok(UiqmScores {
        uicm,
        uism,
        uiconm,
        uiqm: cfg.c1 * uicm + cfg.c2 * uism + cfg.c3 * uiconm,
    })
}

fn colorfulness(r: &[f64], g: &[f64], b: &[f64], cfg: &UiqmConfig) -> f64 {
    let rg: Vec<f64> = r.iter().zip(g).map(|(r, g)| r - g).collect();
    let yb: Vec<f64> = r
        .iter()
        .zip(g)
        .zip(b)
        .map(|((r, g), b)| 0.5 * (r + g) - b)
        .collect();
    let mu_rg = trimmed_mean(&rg, cfg.alpha_low, cfg.alpha_high);
    let mu_yb = trimmed_mean(&yb, cfg.alpha_low, cfg.alpha_high);
    let var_rg = spread(&rg, mu_rg);
    let var_yb = spread(&yb, mu_yb);
    -0.0268 * (mu_rg * mu_rg + mu_yb * mu_yb).sqrt() + 0.1586 * (var_rg + var_yb).sqrt()
}

/// Asymmetric alpha-trimmed mean: drops `ceil(αL·K)` lowest and `floor(αR·K)` highest values.
fn trimmed_mean(values: &[f64], alpha_low: f64, alpha_high: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let low = ((alpha_low * k as f64).ceil() as usize).min(k);
    let high = ((alpha_high * k as f64).floor() as usize).min(k - low);
    let kept = &sorted[low..k - high];
    if kept.is_empty() {
        return 0.0;
    }
    kept.iter().sum::<f64>() / kept.len() as f64
}

fn spread(values: &[f64], mu: f64) -> f64 {
    values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / values.len() as f64
}

fn sharpness(planes: &[Vec<f64>], w: usize, h: usize, cfg: &UiqmConfig) -> f64 {
    planes
        .iter()
        .zip(cfg.sharpness_weights)
        .map(|(plane, weight)| {
            let mag = sobel_magnitude(plane, w, h);
            let edges: Vec<f64> = mag.iter().zip(plane).map(|(m, v)| m * v).collect();
            weight * eme(&edges, w, h, cfg.block)
        })
        .fold(0.0, |a, b| a + b)
}

/// Index into a plane with half-sample symmetric reflection at the borders.
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - i - 1;
        } else {
            return i as usize;
        }
    }
}

pub(crate) fn sobel_magnitude(plane: &[f64], w: usize, h: usize) -> Vec<f64> {
    let at = |x: isize, y: isize| plane[reflect(y, h) * w + reflect(x, w)];
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            let gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            out.push(gx.hypot(gy));
        }
    }
    out
}

/// Visits each complete `block`×`block` tile (partial tiles at the edges are dropped),
/// yielding the tile's min and max across all given planes.
fn block_extrema<'a>(
    planes: &'a [&'a [f64]],
    w: usize,
    h: usize,
    block: usize,
) -> impl Iterator<Item = (f64, f64)> + 'a {
    let (bx, by) = (w / block, h / block);
    (0..by).flat_map(move |j| {
        (0..bx).map(move |i| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for plane in planes {
                for y in j * block..(j + 1) * block {
                    for &v in &plane[y * w + i * block..y * w + (i + 1) * block] {
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
            }
            (lo, hi)
        })
    })
}

fn block_count(w: usize, h: usize, block: usize) -> usize {
    (w / block) * (h / block)
}

/// Measure of enhancement: mean over blocks of `2·ln(max/min)`; blocks with a zero
/// extremum contribute nothing.
fn eme(plane: &[f64], w: usize, h: usize, block: usize) -> f64 {
    let n = block_count(w, h, block);
    if n == 0 {
        return 0.0;
    }
    let sum: f64 = block_extrema(&[plane], w, h, block)
        .filter(|&(lo, hi)| lo > 0.0 && hi > 0.0)
        .map(|(lo, hi)| (hi / lo).ln())
        .fold(0.0, |a, b| a + b);
    2.0 * sum / n as f64
}

/// logAMEE over joint RGB blocks: `−mean((max−min)/(max+min) · ln((max−min)/(max+min)))`.
fn contrast(planes: &[Vec<f64>], w: usize, h: usize, block: usize) -> f64 {
    let n = block_count(w, h, block);
    if n == 0 {
        return 0.0;
    }
    let refs: Vec<&[f64]> = planes.iter().map(Vec::as_slice).collect();
    let sum: f64 = block_extrema(&refs, w, h, block)
        .map(|(lo, hi)| {
            let top = hi - lo;
            let bot = hi + lo;
            if top == 0.0 || bot == 0.0 {
                0.0
            } else {
                let ratio = top / bot;
                ratio * ratio.ln()
            }
        })
        .sum();
    -sum / n as f64
}
