use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues at or above this are treated as zero; below it the matrix is rejected.
const PSD_TOLERANCE: f64 = 1e-6;

/// Mean and covariance of a feature set.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub count: usize,
}

impl GaussianStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Sample mean and unbiased covariance of an `N×D` feature matrix (one row per sample).
pub fn gaussian_stats(features: &DMatrix<f64>) -> Result<GaussianStats> {
    let n = features.nrows();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let mean = features.row_mean().transpose();
    let mut centred = features.clone();
    for mut row in centred.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = centred.transpose() * &centred / (n as f64 - 1.0);
    let covariance = (&cov + cov.transpose()) * 0.5;
    Ok(GaussianStats {
        mean,
        covariance,
        count: n,
    })
}

/// Eigenvalues of a symmetric matrix, clamped at zero within tolerance.
fn psd_eigen(m: DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let mut eig = m.symmetric_eigen();
    for v in eig.eigenvalues.iter_mut() {
        if *v < -PSD_TOLERANCE {
            return Err(Error::NotPsd(*v));
        }
        *v = v.max(0.0);
    }
    Ok(eig)
}

fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = psd_eigen(m.clone())?;
    let roots = eig.eigenvalues.map(f64::sqrt);
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&roots) * v.transpose())
}

/// Fréchet distance between two Gaussians:
/// `‖μr − μg‖² + Tr(Σr + Σg − 2(ΣrΣg)^½)`.
///
/// The trace of `(ΣrΣg)^½` is taken from the eigenvalues of the symmetric matrix
/// `Σr^½ Σg Σr^½`, which shares its spectrum with `ΣrΣg`.
pub fn fid(real: &GaussianStats, generated: &GaussianStats) -> Result<f64> {
    if real.dim() != generated.dim() {
        return Err(Error::Shape(format!(
            "feature dimensions {} and {}",
            real.dim(),
            generated.dim()
        )));
    }
    let mean_term = (&real.mean - &generated.mean).norm_squared();
    let root_r = psd_sqrt(&real.covariance)?;
    let inner = &root_r * &generated.covariance * &root_r;
    let inner = (&inner + inner.transpose()) * 0.5;
    let cross: f64 = psd_eigen(inner)?.eigenvalues.iter().map(|v| v.sqrt()).sum();
    Ok(mean_term + real.covariance.trace() + generated.covariance.trace() - 2.0 * cross)
}
