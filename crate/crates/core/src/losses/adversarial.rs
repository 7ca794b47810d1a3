use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scores are clamped to `[SCORE_EPS, 1 − SCORE_EPS]` before taking logs.
pub const SCORE_EPS: f64 = 1e-7;

/// Patch discriminator output: one probability per receptive-field patch.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ScoreMap {
    /// Scores must be probabilities in `[0, 1]`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} score map with {} entries",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("score {v} is not a probability")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn scores(&self) -> &[f64] {
        &self.data
    }

    fn mean_log(&self, f: impl Fn(f64) -> f64) -> f64 {
        let sum: f64 = self
            .data
            .iter()
            .map(|&d| f(d.clamp(SCORE_EPS, 1.0 - SCORE_EPS)).ln())
            .sum();
        sum / self.data.len() as f64
    }
}

/// `mean log D(y) + mean log(1 − D(G(x)))`, the quantity the discriminator maximises.
pub fn gan_objective(real: &ScoreMap, fake: &ScoreMap) -> f64 {
    real.mean_log(|d| d) + fake.mean_log(|d| 1.0 - d)
}

/// Discriminator loss to minimise: the negated [`gan_objective`].
pub fn gan_loss_d(real: &ScoreMap, fake: &ScoreMap) -> f64 {
    -gan_objective(real, fake)
}

/// Which generator term to minimise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorForm {
    /// `−mean log D(G(x))`.
    #[default]
    NonSaturating,
    /// `mean log(1 − D(G(x)))`, as written in the minimax game.
    Minimax,
}

pub fn gan_loss_g(fake: &ScoreMap, form: GeneratorForm) -> f64 {
    match form {
        GeneratorForm::NonSaturating => -fake.mean_log(|d| d),
        GeneratorForm::Minimax => fake.mean_log(|d| 1.0 - d),
    }
}
