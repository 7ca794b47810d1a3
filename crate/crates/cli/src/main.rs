use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

mod batch;
mod commands;
mod config;
mod log;

/// Bad invocation or missing input; exits with status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

#[derive(Parser, Debug)]
#[command(
    name = "uwr",
    version,
    about = "Underwater image formation, restoration and evaluation"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Camera-object distance in metres.
    #[arg(long, global = true)]
    pub distance: Option<f64>,
    /// Dive depth in metres.
    #[arg(long, global = true)]
    pub depth: Option<f64>,
    /// Lower bound on transmission.
    #[arg(long, global = true)]
    pub t0: Option<f64>,
    /// Skip the input intensity range map before inversion.
    #[arg(long, global = true)]
    pub no_range_map: bool,
    /// Skip the output contrast stretch.
    #[arg(long, global = true)]
    pub no_rescale: bool,
    /// Resample images on load, e.g. 1680x892.
    #[arg(long, global = true, value_parser = parse_size)]
    pub resize: Option<(u32, u32)>,
    /// Worker threads for batch commands.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct CurveArgs {
    /// CSV of wavelength_nm,qe_r,qe_g,qe_b.
    #[arg(long)]
    pub camera_response: Option<PathBuf>,
    /// CSV of wavelength_nm,value.
    #[arg(long)]
    pub attenuation: Option<PathBuf>,
    /// Integration band in nm, e.g. 400,750.
    #[arg(long, value_parser = parse_pair)]
    pub band: Option<(f64, f64)>,
    /// Integrate without dividing by the response integral.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Args, Debug, Default)]
pub struct CoefficientArgs {
    /// Per-channel attenuation r,g,b in 1/m.
    #[arg(long, value_parser = parse_triple)]
    pub p: Option<[f64; 3]>,
    /// JSON sidecar from `uwr coefficients`.
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    #[command(flatten)]
    pub curves: CurveArgs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate attenuation curves into per-channel coefficients.
    Coefficients {
        #[command(flatten)]
        curves: CurveArgs,
        /// Sidecar path [default: <output_dir>/coefficients.json, else ./coefficients.json].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the underwater imaging model to in-air images.
    Degrade {
        /// PNG files or directories.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        coefficients: CoefficientArgs,
        /// Manifest supplying per-image distances.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, short = 'o')]
        out_dir: Option<PathBuf>,
    },
    /// Invert the imaging model.
    Restore {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        coefficients: CoefficientArgs,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, short = 'o')]
        out_dir: Option<PathBuf>,
    },
    /// Score predictions against references with matching file names.
    Evaluate {
        pred_dir: PathBuf,
        ref_dir: PathBuf,
        #[arg(long, short = 'o')]
        out_dir: Option<PathBuf>,
        /// Report file stem.
        #[arg(long, default_value = "metrics")]
        name: String,
        /// Reference-set features for FID.
        #[arg(long, requires = "features_generated")]
        features_real: Option<PathBuf>,
        /// Prediction-set features for FID.
        #[arg(long, requires = "features_real")]
        features_generated: Option<PathBuf>,
        #[arg(long)]
        no_ssim: bool,
        #[arg(long)]
        no_uiqm: bool,
    },
    /// Patchwise contrastive loss between encoder feature stacks.
    Nce {
        /// Stack of the input image; repeat alongside --output for a batch.
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        /// Stack of the translated image.
        #[arg(long, required = true)]
        output: Vec<PathBuf>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frechet distance between two feature files.
    Fid {
        real: PathBuf,
        generated: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect dataset manifests.
    #[command(subcommand)]
    Manifest(ManifestCommand),
}

#[derive(Subcommand, Debug)]
pub enum ManifestCommand {
    /// Check a manifest's invariants.
    Validate {
        path: PathBuf,
        /// Also require the published column totals.
        #[arg(long)]
        hicrd: bool,
    },
    /// Build the seeded paired/test split.
    Split {
        path: PathBuf,
        #[arg(long, short = 'o')]
        out: PathBuf,
        /// Include the unpaired id lists.
        #[arg(long)]
        full: bool,
    },
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got `{s}`"))?;
    let w: u32 = w.trim().parse().map_err(|e| format!("width: {e}"))?;
    let h: u32 = h.trim().parse().map_err(|e| format!("height: {e}"))?;
    if w == 0 || h == 0 {
        return Err("size must be non-zero".into());
    }
    Ok((w, h))
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect()
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match parse_floats(s)?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(format!("expected two comma-separated numbers, got `{s}`")),
    }
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    match parse_floats(s)?[..] {
        [r, g, b] => Ok([r, g, b]),
        _ => Err(format!("expected r,g,b, got `{s}`")),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let missing = err.chain().any(|c| {
        c.is::<InputError>()
            || matches!(
                c.downcast_ref::<uwr_core::Error>(),
                Some(uwr_core::Error::Io { source, .. }) if source.kind() == std::io::ErrorKind::NotFound
            )
    });
    if missing {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failed) => {
            log::error("finished", json!({ "failed": failed }));
            ExitCode::from(1)
        }
        Err(e) => {
            log::error("fatal", json!({ "message": format!("{e:#}") }));
            ExitCode::from(exit_code(&e))
        }
    }
}
