//! Underwater image formation and restoration.
//!
//! The crate is organised by stage:
//!
//! - [`spectra`]: diffuse attenuation from irradiance profiles and per-channel
//!   attenuation coefficients from spectral curves weighted by a camera response.
//! - [`imaging`]: the simplified underwater imaging model (forward degradation and
//!   inverse restoration) with transmission clamping, range mapping and contrast
//!   rescaling.
//! - [`metrics`]: MSE, PSNR, SSIM, UIQM and Fréchet distance between Gaussian fits
//!   of feature sets.
//! - [`losses`]: forward-only numerical kernels for the adversarial, PatchNCE and
//!   identity terms of the contrastive restoration objective.
//! - [`dataset`]: the HICRD manifest, split construction and image loading.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod image;
pub mod imaging;
pub mod losses;
pub mod metrics;
pub mod spectra;

pub use error::{Error, Result};
pub use image::{BitDepth, LinearImage};
