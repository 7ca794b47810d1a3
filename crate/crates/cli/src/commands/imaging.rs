use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::{json, Value};
use uwr_core::dataset::{load_image, load_manifest, save_image};
use uwr_core::imaging::{airlight, degrade, restore_with_report, transmission, RestorationParams};

use super::{resolve_coefficients, Ctx};
use crate::batch::{collect_inputs, output_paths, run_parallel, stem};
use crate::{log, CoefficientArgs, InputError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Degrade,
    Restore,
}

impl Mode {
    fn suffix(self) -> &'static str {
        match self {
            Mode::Degrade => "degraded",
            Mode::Restore => "restored",
        }
    }
}

/// File stem and id → distance for manifest entries that carry one.
fn manifest_distances(path: &Path) -> anyhow::Result<HashMap<String, f64>> {
    let m = load_manifest(path)?;
    let mut out = HashMap::new();
    for e in m.images {
        if let Some(d) = e.distance_m {
            out.insert(stem(Path::new(&e.path)), d);
            out.insert(e.id, d);
        }
    }
    Ok(out)
}

fn process(
    mode: Mode,
    input: &Path,
    output: &Path,
    params: &RestorationParams,
    resize: Option<(u32, u32)>,
) -> anyhow::Result<Value> {
    let img = load_image(input, resize)?;
    let mut record = json!({
        "input": input.display().to_string(),
        "output": output.display().to_string(),
        "distance_m": params.distance_m,
        "depth_m": params.depth_m,
    });
    let result = match mode {
        Mode::Degrade => {
            record["transmission"] = json!(transmission(params.p, params.distance_m)?);
            record["airlight"] = json!(airlight(params.p, params.depth_m)?);
            degrade(&img, params)?
        }
        Mode::Restore => {
            let (out, report) = restore_with_report(&img, params)?;
            record["transmission"] = json!(report.transmission);
            record["airlight"] = json!(report.airlight);
            record["t0_clamped"] = json!(report.t0_clamped);
            record["t0_clamped_channels"] = json!(report.t0_clamped.iter().filter(|&&c| c).count());
            record["out_of_range"] = json!(report.out_of_range);
            out
        }
    };
    save_image(&result, output)?;
    Ok(record)
}

pub fn run(
    ctx: &Ctx,
    mode: Mode,
    inputs: &[PathBuf],
    coefficients: &CoefficientArgs,
    manifest: Option<&Path>,
    out_dir: Option<&Path>,
) -> anyhow::Result<usize> {
    let p = resolve_coefficients(ctx, coefficients)?;
    let files = collect_inputs(inputs)?;
    if files.is_empty() {
        return Err(InputError("no PNG inputs found".into()).into());
    }
    let distances = manifest
        .map(manifest_distances)
        .transpose()?
        .unwrap_or_default();
    let out_dir = ctx.config.output_dir(out_dir)?;
    let outputs = output_paths(&files, &out_dir, mode.suffix())?;

    let g = &ctx.global;
    let base = RestorationParams {
        p,
        distance_m: ctx.config.distance_m(),
        depth_m: g.depth.unwrap_or_else(|| ctx.config.depth_m()),
        t0: g.t0.unwrap_or_else(|| ctx.config.t0()),
        range_map: if g.no_range_map {
            None
        } else {
            ctx.config.range_map()
        },
        rescale_output: !g.no_rescale && ctx.config.rescale.unwrap_or(true),
    };
    let params_for = |input: &Path| RestorationParams {
        distance_m: g
            .distance
            .or_else(|| distances.get(&stem(input)).copied())
            .unwrap_or(base.distance_m),
        ..base
    };
    for f in &files {
        params_for(f)
            .validate()
            .map_err(|e| InputError(format!("{}: {e}", f.display())))?;
    }

    let jobs: Vec<(PathBuf, PathBuf)> = files.into_iter().zip(outputs).collect();
    let resize = ctx.resize();
    let results = run_parallel(ctx.jobs(), &jobs, |(input, output)| {
        process(mode, input, output, &params_for(input), resize)
            .with_context(|| format!("processing {}", input.display()))
    })?;

    let log_path = out_dir.join(format!("{}_log.jsonl", mode.suffix()));
    let mut log_file = std::fs::File::create(&log_path)
        .with_context(|| format!("creating {}", log_path.display()))?;
    let mut failed = 0;
    for ((input, _), result) in jobs.iter().zip(results) {
        let record = match result {
            Ok(record) => {
                log::info(mode.suffix(), record.clone());
                record
            }
            Err(e) => {
                failed += 1;
                let record =
                    json!({ "input": input.display().to_string(), "error": format!("{e:#}") });
                log::error("failed", record.clone());
                record
            }
        };
        writeln!(log_file, "{record}")?;
    }
    log::info(
        "done",
        json!({ "processed": jobs.len() - failed, "failed": failed, "log": log_path.display().to_string() }),
    );
    Ok(failed)
}
