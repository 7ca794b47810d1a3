use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::json;
use uwr_core::spectra::{read_camera_response, read_curve, ChannelCoefficients, Normalization};

use super::{emit_result, Ctx};
use crate::{log, CoefficientArgs, CurveArgs, InputError};

/// Coefficient sidecar. Only `r`, `g`, `b` are read back.
#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    r: f64,
    g: f64,
    b: f64,
    #[serde(default, skip_deserializing)]
    band_nm: [f64; 2],
    #[serde(default, skip_deserializing)]
    normalization: Normalization,
    #[serde(default, skip_deserializing)]
    camera_response: String,
    #[serde(default, skip_deserializing)]
    attenuation: String,
}

fn existing(path: PathBuf) -> anyhow::Result<PathBuf> {
    if path.exists() {
        Ok(path)
    } else {
        Err(InputError(format!("{} does not exist", path.display())).into())
    }
}

fn from_curves(ctx: &Ctx, args: &CurveArgs) -> anyhow::Result<Sidecar> {
    let camera = args
        .camera_response
        .clone()
        .or_else(|| ctx.config.camera_response.clone())
        .ok_or_else(|| {
            InputError("no camera response: pass --camera-response or set camera_response".into())
        })?;
    let beta = args
        .attenuation
        .clone()
        .or_else(|| ctx.config.attenuation.clone())
        .ok_or_else(|| {
            InputError("no attenuation curve: pass --attenuation or set attenuation".into())
        })?;
    let camera = existing(camera)?;
    let beta = existing(beta)?;
    let (a, b) = args.band.unwrap_or_else(|| ctx.config.band());
    let normalization = if args.raw {
        Normalization::Raw
    } else {
        ctx.config.normalization.unwrap_or_default()
    };

    let response = read_camera_response(&camera)?;
    let curve = read_curve(&beta)?;
    let p = response
        .coefficients(&curve, a, b, normalization)
        .with_context(|| {
            format!(
                "integrating {} against {}",
                beta.display(),
                camera.display()
            )
        })?;
    Ok(Sidecar {
        r: p.r,
        g: p.g,
        b: p.b,
        band_nm: [a, b],
        normalization,
        camera_response: camera.display().to_string(),
        attenuation: beta.display().to_string(),
    })
}

pub fn run(ctx: &Ctx, args: &CurveArgs, out: Option<&Path>) -> anyhow::Result<usize> {
    let sidecar = from_curves(ctx, args)?;
    let out = match out {
        Some(p) => p.to_path_buf(),
        None => match &ctx.config.output_dir {
            Some(_) => ctx.config.output_dir(None)?.join("coefficients.json"),
            None => PathBuf::from("coefficients.json"),
        },
    };
    emit_result(&sidecar, Some(&out))?;
    log::info(
        "coefficients",
        json!({ "p": [sidecar.r, sidecar.g, sidecar.b], "sidecar": out.display().to_string() }),
    );
    Ok(0)
}

fn read_sidecar(path: &Path) -> anyhow::Result<ChannelCoefficients> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    let s: Sidecar =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(ChannelCoefficients::new(s.r, s.g, s.b)?)
}

/// Picks the coefficient source: explicit flags first, then the config file.
pub fn resolve_coefficients(
    ctx: &Ctx,
    args: &CoefficientArgs,
) -> anyhow::Result<ChannelCoefficients> {
    let curves_given = args.curves.camera_response.is_some() || args.curves.attenuation.is_some();
    let p = if let Some([r, g, b]) = args.p {
        ChannelCoefficients::new(r, g, b).map_err(|e| InputError(format!("--p: {e}")))?
    } else if let Some(path) = &args.coefficients {
        read_sidecar(path)?
    } else if curves_given {
        let s = from_curves(ctx, &args.curves)?;
        ChannelCoefficients::new(s.r, s.g, s.b)?
    } else if let Some([r, g, b]) = ctx.config.p {
        ChannelCoefficients::new(r, g, b).map_err(|e| InputError(format!("config p: {e}")))?
    } else if let Some(path) = &ctx.config.coefficients {
        read_sidecar(path)?
    } else if ctx.config.camera_response.is_some() || ctx.config.attenuation.is_some() {
        let s = from_curves(ctx, &args.curves)?;
        ChannelCoefficients::new(s.r, s.g, s.b)?
    } else {
        return Err(InputError(
            "no attenuation coefficients: pass --p, --coefficients or curve files".into(),
        )
        .into());
    };
    Ok(p)
}
