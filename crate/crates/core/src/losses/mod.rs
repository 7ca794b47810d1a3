//! Forward-only kernels for the terms of the contrastive restoration objective.
//!
//! These operate on plain feature vectors and discriminator score maps so the loss
//! arithmetic can be checked without a training framework.

mod adversarial;
mod nce;
mod stack;

pub use adversarial::{gan_loss_d, gan_loss_g, gan_objective, GeneratorForm, ScoreMap, SCORE_EPS};
pub use nce::{
    cosine_similarity, info_nce, patch_nce, patch_nce_batch, DEFAULT_NEGATIVES, DEFAULT_TAU,
};
pub use stack::{read_stack, write_stack, FeatureLayer, FeatureStack, STACK_MAGIC, TAP_LAYERS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::LinearImage;

/// Mean absolute difference per element between a translated image and its input.
pub fn identity_l1(translated: &LinearImage, target: &LinearImage) -> Result<f64> {
    translated.ensure_same_shape(target)?;
    let sum: f64 = translated
        .data()
        .iter()
        .zip(target.data())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(sum / translated.data().len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    pub lambda_gan: f64,
    pub lambda_nce: f64,
    pub lambda_idt: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self {
            lambda_gan: 1.0,
            lambda_nce: 1.0,
            lambda_idt: 10.0,
        }
    }
}

impl ObjectiveWeights {
    pub fn new(lambda_gan: f64, lambda_nce: f64, lambda_idt: f64) -> Result<Self> {
        for (name, v) in [
            ("gan", lambda_gan),
            ("nce", lambda_nce),
            ("idt", lambda_idt),
        ] {
            if !(v >= 0.0) {
                return Err(Error::Domain(format!(
                    "weight lambda_{name} = {v} must be >= 0"
                )));
            }
        }
        Ok(Self {
            lambda_gan,
            lambda_nce,
            lambda_idt,
        })
    }
}

/// `λ_GAN·gan + λ_NCE·nce + λ_idt·idt`.
pub fn full_objective(gan: f64, nce: f64, idt: f64, w: &ObjectiveWeights) -> f64 {
    w.lambda_gan * gan + w.lambda_nce * nce + w.lambda_idt * idt
}
