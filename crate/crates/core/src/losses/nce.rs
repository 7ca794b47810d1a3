use crate::error::{Error, Result};

use super::FeatureStack;

/// Softmax temperature.
pub const DEFAULT_TAU: f64 = 0.07;
/// Negatives per query.
pub const DEFAULT_NEGATIVES: usize = 255;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Shape(format!(
            "vector lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::DegenerateVector(
            "cosine similarity of a zero vector".into(),
        ));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    Ok(dot / (nu * nv))
}

/// Cross-entropy of picking index 0 from `logits`, via max-shifted log-sum-exp.
fn cross_entropy_first(logits: &[f64]) -> f64 {
    let (imax, &max) = logits
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one logit");
    let rest: f64 = logits
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != imax)
        .map(|(_, l)| (l - max).exp())
        .sum();
    (max - logits[0]) + rest.ln_1p()
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("temperature {tau} must be positive")));
    }
    Ok(())
}

/// InfoNCE loss of one query against a positive and `N` negatives, with cosine
/// similarities scaled by `1/tau`.
pub fn info_nce<V: AsRef<[f64]>>(
    query: &[f64],
    positive: &[f64],
    negatives: &[V],
    tau: f64,
) -> Result<f64> {
    check_tau(tau)?;
    let mut logits = Vec::with_capacity(negatives.len() + 1);
    logits.push(cosine_similarity(query, positive)? / tau);
    for neg in negatives {
        logits.push(cosine_similarity(query, neg.as_ref())? / tau);
    }
    Ok(cross_entropy_first(&logits))
}

fn unit_rows(data: &[f64], rows: usize, cols: usize, layer: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(rows * cols);
    for (s, row) in data.chunks_exact(cols).enumerate() {
        let n = norm(row);
        if n == 0.0 {
            return Err(Error::DegenerateVector(format!(
                "layer {layer}, location {s}"
            )));
        }
        out.extend(row.iter().map(|v| v / n));
    }
    Ok(out)
}

/// Multi-layer patchwise InfoNCE for one image.
///
/// Each location of `output` is a query; the same location of `input` is its
/// positive and every other location of that layer a negative. Terms are summed
/// layer-major, location-minor.
pub fn patch_nce(input: &FeatureStack, output: &FeatureStack, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    input.ensure_same_shape(output)?;
    let mut total = 0.0;
    for (l, (inp, out)) in input.layers().iter().zip(output.layers()).enumerate() {
        let (s_count, c) = (inp.locations, inp.channels);
        if s_count < 2 {
            return Err(Error::NoNegatives { layer: l });
        }
        let keys = unit_rows(&inp.data, s_count, c, l)?;
        let queries = unit_rows(&out.data, s_count, c, l)?;
        let mut logits = vec![0.0; s_count];
        for s in 0..s_count {
            let q = &queries[s * c..(s + 1) * c];
            let dot = |k: usize| -> f64 {
                q.iter()
                    .zip(&keys[k * c..(k + 1) * c])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / tau
            };
            // Positive first, then the remaining locations in order.
            logits[0] = dot(s);
            for (i, k) in (1..).zip((0..s_count).filter(|&k| k != s)) {
                logits[i] = dot(k);
            }
            total += cross_entropy_first(&logits);
        }
    }
    Ok(total)
}

/// Mean of [`patch_nce`] over `(input, output)` pairs.
pub fn patch_nce_batch(pairs: &[(FeatureStack, FeatureStack)], tau: f64) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mut sum = 0.0;
    for (input, output) in pairs {
        sum += patch_nce(input, output, tau)?;
    }
    Ok(sum / pairs.len() as f64)
}
