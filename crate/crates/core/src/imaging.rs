//! Simplified underwater imaging model.
//!
//! An observed pixel is the scene radiance attenuated along the camera-object
//! path plus background light filling in the lost fraction:
//!
//! ```text
//! I = J·t + A·(1 − t),   t = exp(−p·d),   A = exp(−p·z)
//! ```
//!
//! with `p` the per-channel attenuation, `d` the object distance and `z` the dive
//! depth. [`restore`] inverts this with a lower bound on `t`, an optional input
//! range map and a global contrast stretch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::LinearImage;
use crate::spectra::ChannelCoefficients;

pub const DEFAULT_T0: f64 = 0.1;
pub const DEFAULT_DISTANCE_M: f64 = 2.0;

/// Input window on the 8-bit scale that is stretched to the full range before inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeMap {
    pub lo: f64,
    pub hi: f64,
}

impl Default for RangeMap {
    fn default() -> Self {
        Self {
            lo: 13.0,
            hi: 255.0,
        }
    }
}

impl RangeMap {
    /// Maps an intensity in `[0, 1]` so that `lo/255 → 0` and `hi/255 → 1`, clamping outside.
    pub fn apply(&self, v: f64) -> f64 {
        let level = v * 255.0;
        ((level - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestorationParams {
    pub p: ChannelCoefficients,
    /// Camera-object distance `d` in metres.
    pub distance_m: f64,
    /// Dive depth `z` in metres.
    pub depth_m: f64,
    /// Lower bound on transmission during inversion.
    pub t0: f64,
    pub range_map: Option<RangeMap>,
    pub rescale_output: bool,
}

impl RestorationParams {
    /// Defaults: `d = 2 m`, `z = 0`, `t0 = 0.1`, range map 13..255, rescaling on.
    pub fn new(p: ChannelCoefficients) -> Self {
        Self {
            p,
            distance_m: DEFAULT_DISTANCE_M,
            depth_m: 0.0,
            t0: DEFAULT_T0,
            range_map: Some(RangeMap::default()),
            rescale_output: true,
        }
    }

    /// Plain model inversion: no range map, no rescaling.
    pub fn literal(p: ChannelCoefficients, distance_m: f64, depth_m: f64) -> Self {
        Self {
            distance_m,
            depth_m,
            range_map: None,
            rescale_output: false,
            ..Self::new(p)
        }
    }

    pub fn validate(&self) -> Result<()> {
        for v in self.p.to_array() {
            if !v.is_finite() {
                return Err(Error::Domain(format!("attenuation {v} is not finite")));
            }
        }
        if !(self.distance_m >= 0.0) {
            return Err(Error::Domain(format!(
                "distance {} m must be non-negative",
                self.distance_m
            )));
        }
        if !(self.depth_m >= 0.0) {
            return Err(Error::Domain(format!(
                "depth {} m must be non-negative",
                self.depth_m
            )));
        }
        if !(self.t0 > 0.0 && self.t0 <= 1.0) {
            return Err(Error::Domain(format!(
                "t0 = {} must lie in (0, 1]",
                self.t0
            )));
        }
        if let Some(rm) = self.range_map {
            if !(rm.lo < rm.hi) {
                return Err(Error::Domain(format!(
                    "range map bounds {} >= {}",
                    rm.lo, rm.hi
                )));
            }
        }
        Ok(())
    }
}

fn beer_lambert(p: ChannelCoefficients, length_m: f64, what: &str) -> Result<[f64; 3]> {
    if !(length_m >= 0.0) {
        return Err(Error::Domain(format!(
            "{what} {length_m} m must be non-negative"
        )));
    }
    Ok(p.to_array().map(|pc| (-pc * length_m).exp()))
}

/// Per-channel medium transmission `exp(−p·d)`.
pub fn transmission(p: ChannelCoefficients, distance_m: f64) -> Result<[f64; 3]> {
    beer_lambert(p, distance_m, "distance")
}

/// Per-channel background light `exp(−p·z)` at dive depth `z`.
pub fn airlight(p: ChannelCoefficients, depth_m: f64) -> Result<[f64; 3]> {
    beer_lambert(p, depth_m, "depth")
}

/// Forward model: attenuates `scene` and adds background light.
pub fn degrade(scene: &LinearImage, params: &RestorationParams) -> Result<LinearImage> {
    params.validate()?;
    let t = transmission(params.p, params.distance_m)?;
    let a = airlight(params.p, params.depth_m)?;
    let data = scene
        .data()
        .chunks_exact(3)
        .flat_map(|px| (0..3).map(move |c| px[c] * t[c] + a[c] * (1.0 - t[c])))
        .collect();
    Ok(LinearImage::from_clamped(
        scene.width(),
        scene.height(),
        data,
        scene.bit_depth(),
    ))
}

/// Diagnostics from one [`restore`] call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestoreReport {
    pub transmission: [f64; 3],
    pub airlight: [f64; 3],
    /// Channels whose transmission fell below `t0`.
    pub t0_clamped: [bool; 3],
    /// Samples outside `[0, 1]` after inversion, before rescaling or clamping.
    pub out_of_range: usize,
}

/// Inverts the imaging model.
pub fn restore(observed: &LinearImage, params: &RestorationParams) -> Result<LinearImage> {
    restore_with_report(observed, params).map(|(img, _)| img)
}

pub fn restore_with_report(
    observed: &LinearImage,
    params: &RestorationParams,
) -> Result<(LinearImage, RestoreReport)> {
    params.validate()?;
    let t = transmission(params.p, params.distance_m)?;
    let a = airlight(params.p, params.depth_m)?;
    let t_eff = t.map(|tc| tc.max(params.t0));

    let mut data: Vec<f64> = observed
        .data()
        .chunks_exact(3)
        .flat_map(|px| {
            (0..3).map(move |c| {
                let i = match params.range_map {
                    Some(rm) => rm.apply(px[c]),
                    None => px[c],
                };
                (i - a[c]) / t_eff[c] + a[c]
            })
        })
        .collect();

    let out_of_range = data.iter().filter(|v| !(0.0..=1.0).contains(*v)).count();
    if params.rescale_output {
        stretch_in_place(&mut data);
    }
    let report = RestoreReport {
        transmission: t,
        airlight: a,
        t0_clamped: [0, 1, 2].map(|c| t[c] < params.t0),
        out_of_range,
    };
    Ok((
        LinearImage::from_clamped(
            observed.width(),
            observed.height(),
            data,
            observed.bit_depth(),
        ),
        report,
    ))
}

fn stretch_in_place(data: &mut [f64]) {
    let (min, max) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = max - min;
    if !(range > 0.0) || !range.is_finite() {
        return;
    }
    for v in data {
        *v = (*v - min) / range;
    }
}

/// Affine stretch mapping the global minimum over all channels to 0 and the maximum to 1.
///
/// Constant images are returned unchanged.
pub fn contrast_rescale(img: &LinearImage) -> LinearImage {
    let mut data = img.data().to_vec();
    stretch_in_place(&mut data);
    LinearImage::from_clamped(img.width(), img.height(), data, img.bit_depth())
}
