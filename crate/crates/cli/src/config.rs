//! TOML run configuration. Command-line flags take precedence over every field.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;
use uwr_core::imaging::{RangeMap, DEFAULT_DISTANCE_M, DEFAULT_T0};
use uwr_core::metrics::MetricSelection;
use uwr_core::spectra::{Normalization, VISIBLE_END_NM, VISIBLE_START_NM};

use crate::InputError;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricToggles {
    pub ssim: bool,
    pub uiqm: bool,
    pub fid: bool,
}

impl Default for MetricToggles {
    fn default() -> Self {
        Self {
            ssim: true,
            uiqm: true,
            fid: true,
        }
    }
}

impl MetricToggles {
    pub fn selection(&self) -> MetricSelection {
        MetricSelection {
            ssim: self.ssim,
            uiqm: self.uiqm,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// CSV with `wavelength_nm,qe_r,qe_g,qe_b`.
    pub camera_response: Option<PathBuf>,
    /// CSV with `wavelength_nm,value`, attenuation in 1/m.
    pub attenuation: Option<PathBuf>,
    /// JSON sidecar written by `uwr coefficients`.
    pub coefficients: Option<PathBuf>,
    /// Per-channel attenuation `[r, g, b]`, used instead of curves.
    pub p: Option<[f64; 3]>,
    pub band_nm: Option<[f64; 2]>,
    /// `"response-weighted"` (default) or `"raw"`.
    pub normalization: Option<Normalization>,
    pub t0: Option<f64>,
    pub range_map: Option<[f64; 2]>,
    pub use_range_map: Option<bool>,
    pub rescale: Option<bool>,
    pub distance_m: Option<f64>,
    pub depth_m: Option<f64>,
    pub resize: Option<[u32; 2]>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub tau: Option<f64>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub metrics: MetricToggles,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg =
            Self::parse(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.check_paths()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// Makes relative paths relative to the config file's directory.
    fn resolve_paths(&mut self, base: &Path) {
        for p in [
            &mut self.camera_response,
            &mut self.attenuation,
            &mut self.coefficients,
            &mut self.output_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    fn check_paths(&self) -> anyhow::Result<()> {
        for p in [&self.camera_response, &self.attenuation, &self.coefficients]
            .into_iter()
            .flatten()
        {
            if !p.exists() {
                return Err(InputError(format!("{} does not exist", p.display())).into());
            }
        }
        Ok(())
    }

    pub fn band(&self) -> (f64, f64) {
        self.band_nm
            .map(|[a, b]| (a, b))
            .unwrap_or((VISIBLE_START_NM, VISIBLE_END_NM))
    }

    pub fn t0(&self) -> f64 {
        self.t0.unwrap_or(DEFAULT_T0)
    }

    pub fn distance_m(&self) -> f64 {
        self.distance_m.unwrap_or(DEFAULT_DISTANCE_M)
    }

    pub fn depth_m(&self) -> f64 {
        self.depth_m.unwrap_or(0.0)
    }

    pub fn range_map(&self) -> Option<RangeMap> {
        if self.use_range_map == Some(false) {
            return None;
        }
        Some(
            self.range_map
                .map(|[lo, hi]| RangeMap { lo, hi })
                .unwrap_or_default(),
        )
    }

    pub fn output_dir(&self, flag: Option<&Path>) -> anyhow::Result<PathBuf> {
        let dir = flag
            .map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .ok_or_else(|| {
                InputError("no output directory: pass --out-dir or set output_dir".into())
            })?;
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(dir)
    }
}
