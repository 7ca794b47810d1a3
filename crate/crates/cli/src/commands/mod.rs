use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use crate::config::RunConfig;
use crate::{Cli, Command, GlobalArgs, ManifestCommand};

mod coefficients;
mod dataset;
mod evaluate;
mod imaging;
mod losses;

pub use coefficients::resolve_coefficients;

/// Flags and config merged; flags win.
pub struct Ctx {
    pub global: GlobalArgs,
    pub config: RunConfig,
}

impl Ctx {
    pub fn resize(&self) -> Option<(u32, u32)> {
        self.global
            .resize
            .or(self.config.resize.map(|[w, h]| (w, h)))
    }

    pub fn jobs(&self) -> Option<usize> {
        self.global.jobs.or(self.config.jobs)
    }

    pub fn seed(&self) -> u64 {
        self.global.seed.or(self.config.seed).unwrap_or(0)
    }
}

/// Runs one command and returns the number of per-file failures.
pub fn run(cli: Cli) -> anyhow::Result<usize> {
    let config = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx {
        global: cli.global,
        config,
    };
    match cli.command {
        Command::Coefficients { curves, out } => coefficients::run(&ctx, &curves, out.as_deref()),
        Command::Degrade {
            inputs,
            coefficients,
            manifest,
            out_dir,
        } => imaging::run(
            &ctx,
            imaging::Mode::Degrade,
            &inputs,
            &coefficients,
            manifest.as_deref(),
            out_dir.as_deref(),
        ),
        Command::Restore {
            inputs,
            coefficients,
            manifest,
            out_dir,
        } => imaging::run(
            &ctx,
            imaging::Mode::Restore,
            &inputs,
            &coefficients,
            manifest.as_deref(),
            out_dir.as_deref(),
        ),
        Command::Evaluate {
            pred_dir,
            ref_dir,
            out_dir,
            name,
            features_real,
            features_generated,
            no_ssim,
            no_uiqm,
        } => {
            let mut toggles = ctx.config.metrics.clone();
            toggles.ssim &= !no_ssim;
            toggles.uiqm &= !no_uiqm;
            let features = features_real.zip(features_generated);
            evaluate::run(
                &ctx,
                &pred_dir,
                &ref_dir,
                out_dir.as_deref(),
                &name,
                features,
                &toggles,
            )
        }
        Command::Nce {
            input,
            output,
            tau,
            out,
        } => losses::nce(&ctx, &input, &output, tau, out.as_deref()),
        Command::Fid {
            real,
            generated,
            out,
        } => losses::fid(&real, &generated, out.as_deref()),
        Command::Manifest(ManifestCommand::Validate { path, hicrd }) => {
            dataset::validate(&path, hicrd)
        }
        Command::Manifest(ManifestCommand::Split { path, out, full }) => {
            dataset::split(&path, ctx.seed(), &out, full)
        }
    }
}

/// Prints a result as one JSON line on stdout and optionally saves it.
fn emit_result<T: Serialize>(value: &T, out: Option<&Path>) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string(value)?);
    if let Some(path) = out {
        write_json(path, value)?;
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    let text = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
