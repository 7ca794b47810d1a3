use std::path::{Path, PathBuf};

use serde_json::json;
use uwr_core::losses::{patch_nce_batch, read_stack, DEFAULT_TAU};
use uwr_core::metrics::{fid as frechet, gaussian_stats, read_features};

use super::{emit_result, Ctx};
use crate::InputError;

pub fn nce(
    ctx: &Ctx,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
    tau: Option<f64>,
    out: Option<&Path>,
) -> anyhow::Result<usize> {
    if inputs.len() != outputs.len() {
        return Err(InputError(format!(
            "{} --input stacks but {} --output stacks",
            inputs.len(),
            outputs.len()
        ))
        .into());
    }
    let tau = tau.or(ctx.config.tau).unwrap_or(DEFAULT_TAU);
    let pairs = inputs
        .iter()
        .zip(outputs)
        .map(|(i, o)| Ok((read_stack(i)?, read_stack(o)?)))
        .collect::<uwr_core::Result<Vec<_>>>()?;
    let loss = patch_nce_batch(&pairs, tau)?;
    emit_result(
        &json!({ "patch_nce": loss, "pairs": pairs.len(), "tau": tau }),
        out,
    )?;
    Ok(0)
}

pub fn fid(real: &Path, generated: &Path, out: Option<&Path>) -> anyhow::Result<usize> {
    let r = gaussian_stats(&read_features(real)?)?;
    let g = gaussian_stats(&read_features(generated)?)?;
    let value = frechet(&r, &g)?;
    emit_result(
        &json!({
            "fid": value,
            "dim": r.dim(),
            "real_count": r.count,
            "generated_count": g.count,
        }),
        out,
    )?;
    Ok(0)
}
