//! Spectral attenuation and camera response handling.
//!
//! Attenuation spectra are reduced to one coefficient per colour channel by
//! weighting them with the camera's quantum efficiency and integrating over the
//! visible band. Diffuse attenuation is estimated from irradiance depth profiles.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default lower integration bound in nanometres.
pub const VISIBLE_START_NM: f64 = 400.0;
/// Default upper integration bound in nanometres.
pub const VISIBLE_END_NM: f64 = 750.0;

/// A function of wavelength sampled at strictly ascending points.
///
/// Between samples the curve is linear; outside `[first, last]` it is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    wavelengths_nm: Vec<f64>,
    values: Vec<f64>,
}

impl SpectralCurve {
    /// Builds a curve of arbitrary finite values (e.g. attenuation in m⁻¹).
    pub fn new(wavelengths_nm: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if wavelengths_nm.len() != values.len() {
            return Err(Error::InvalidCurve(format!(
                "{} wavelengths but {} values",
                wavelengths_nm.len(),
                values.len()
            )));
        }
        if wavelengths_nm.len() < 2 {
            return Err(Error::InvalidCurve(format!(
                "need at least 2 samples, got {}",
                wavelengths_nm.len()
            )));
        }
        check_ascending(&wavelengths_nm)?;
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve(format!("non-finite value {v}")));
        }
        Ok(Self {
            wavelengths_nm,
            values,
        })
    }

    /// Builds a response curve; values are quantum efficiencies and must lie in `[0, 1]`.
    pub fn response(wavelengths_nm: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let curve = Self::new(wavelengths_nm, values)?;
        if let Some(v) = curve.values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidCurve(format!(
                "response value {v} outside [0, 1]"
            )));
        }
        Ok(curve)
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths_nm
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Closed wavelength interval on which the curve is defined.
    pub fn support(&self) -> (f64, f64) {
        (
            self.wavelengths_nm[0],
            self.wavelengths_nm[self.wavelengths_nm.len() - 1],
        )
    }

    /// Linear interpolation at `wavelength_nm`. Sample points are returned exactly.
    pub fn value_at(&self, wavelength_nm: f64) -> Result<f64> {
        let (min_nm, max_nm) = self.support();
        if !(min_nm..=max_nm).contains(&wavelength_nm) {
            return Err(Error::Extrapolation {
                wavelength_nm,
                min_nm,
                max_nm,
            });
        }
        let wl = &self.wavelengths_nm;
        let idx = wl.partition_point(|&w| w < wavelength_nm);
        if wl[idx] == wavelength_nm {
            return Ok(self.values[idx]);
        }
        let (w0, w1) = (wl[idx - 1], wl[idx]);
        let (v0, v1) = (self.values[idx - 1], self.values[idx]);
        let frac = (wavelength_nm - w0) / (w1 - w0);
        Ok(v0 + (v1 - v0) * frac)
    }
}

fn check_ascending(xs: &[f64]) -> Result<()> {
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidCurve(format!("non-finite wavelength {x}")));
    }
    if let Some(w) = xs.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidCurve(format!(
            "wavelengths not strictly ascending at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Linearly interpolates `curve` onto `grid`.
///
/// `grid` must be non-empty, strictly ascending and inside the curve's support.
/// A single-point grid yields a one-sample curve.
pub fn resample_curve(curve: &SpectralCurve, grid: &[f64]) -> Result<SpectralCurve> {
    if grid.is_empty() {
        return Err(Error::InvalidCurve("empty resampling grid".into()));
    }
    check_ascending(grid)?;
    let values = grid
        .iter()
        .map(|&w| curve.value_at(w))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralCurve {
        wavelengths_nm: grid.to_vec(),
        values,
    })
}

/// Per-channel total attenuation coefficients in m⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelCoefficients {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl ChannelCoefficients {
    pub fn new(r: f64, g: f64, b: f64) -> Result<Self> {
        for (name, v) in [("r", r), ("g", g), ("b", b)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!(
                    "attenuation coefficient {name} = {v} must be finite and positive"
                )));
            }
        }
        Ok(Self { r, g, b })
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    pub fn from_array([r, g, b]: [f64; 3]) -> Self {
        Self { r, g, b }
    }
}

/// How the response-weighted integral is reported.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `∫βS dλ / ∫S dλ`: a response-weighted mean, in m⁻¹.
    #[default]
    ResponseWeighted,
    /// `∫βS dλ` with no division.
    Raw,
}

/// Reduces an attenuation spectrum to one channel coefficient.
///
/// The integrand is evaluated on the union of both curves' sample points and
/// integrated with the trapezoidal rule over `[a_nm, b_nm]` intersected with both
/// supports.
pub fn channel_attenuation(
    beta: &SpectralCurve,
    response: &SpectralCurve,
    a_nm: f64,
    b_nm: f64,
    normalization: Normalization,
) -> Result<f64> {
    if !(a_nm < b_nm) {
        return Err(Error::DegenerateInterval(format!(
            "integration bounds [{a_nm}, {b_nm}] nm"
        )));
    }
    let (beta_lo, beta_hi) = beta.support();
    let (resp_lo, resp_hi) = response.support();
    let lo = a_nm.max(beta_lo).max(resp_lo);
    let hi = b_nm.min(beta_hi).min(resp_hi);
    if !(lo < hi) {
        return Err(Error::Coverage(format!(
            "attenuation [{beta_lo}, {beta_hi}] nm, response [{resp_lo}, {resp_hi}] nm \
             and window [{a_nm}, {b_nm}] nm do not overlap"
        )));
    }

    let mut grid: Vec<f64> = beta
        .wavelengths()
        .iter()
        .chain(response.wavelengths())
        .copied()
        .filter(|&w| w > lo && w < hi)
        .chain([lo, hi])
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut weighted = 0.0;
    let mut weight = 0.0;
    let mut prev: Option<(f64, f64, f64)> = None;
    for &w in &grid {
        let s = response.value_at(w)?;
        let bs = beta.value_at(w)? * s;
        if let Some((pw, ps, pbs)) = prev {
            let h = w - pw;
            weighted += 0.5 * h * (pbs + bs);
            weight += 0.5 * h * (ps + s);
        }
        prev = Some((w, s, bs));
    }

    match normalization {
        Normalization::Raw => Ok(weighted),
        Normalization::ResponseWeighted => {
            if weight == 0.0 {
                Err(Error::ZeroResponse { a_nm, b_nm })
            } else {
                Ok(weighted / weight)
            }
        }
    }
}

/// Quantum efficiency curves for the three colour channels.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraResponse {
    pub r: SpectralCurve,
    pub g: SpectralCurve,
    pub b: SpectralCurve,
}

impl CameraResponse {
    /// Applies [`channel_attenuation`] to each channel.
    pub fn coefficients(
        &self,
        beta: &SpectralCurve,
        a_nm: f64,
        b_nm: f64,
        normalization: Normalization,
    ) -> Result<ChannelCoefficients> {
        let r = channel_attenuation(beta, &self.r, a_nm, b_nm, normalization)?;
        let g = channel_attenuation(beta, &self.g, a_nm, b_nm, normalization)?;
        let b = channel_attenuation(beta, &self.b, a_nm, b_nm, normalization)?;
        Ok(ChannelCoefficients { r, g, b })
    }
}

/// Downwelling irradiance sampled at increasing depth.
#[derive(Debug, Clone, PartialEq)]
pub struct IrradianceProfile {
    depths_m: Vec<f64>,
    irradiance: Vec<f64>,
}

impl IrradianceProfile {
    pub fn new(depths_m: Vec<f64>, irradiance: Vec<f64>) -> Result<Self> {
        if depths_m.len() != irradiance.len() {
            return Err(Error::InvalidProfile(format!(
                "{} depths but {} irradiance samples",
                depths_m.len(),
                irradiance.len()
            )));
        }
        if depths_m.len() < 2 {
            return Err(Error::InvalidProfile(format!(
                "need at least 2 samples, got {}",
                depths_m.len()
            )));
        }
        if let Some(w) = depths_m.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidProfile(format!(
                "depths not strictly ascending at {} -> {}",
                w[0], w[1]
            )));
        }
        if let Some(e) = irradiance.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::InvalidProfile(format!(
                "irradiance {e} must be finite and positive"
            )));
        }
        Ok(Self {
            depths_m,
            irradiance,
        })
    }

    pub fn depths(&self) -> &[f64] {
        &self.depths_m
    }

    pub fn irradiance(&self) -> &[f64] {
        &self.irradiance
    }

    pub fn len(&self) -> usize {
        self.depths_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depths_m.is_empty()
    }
}

/// Diffuse attenuation between two samples of a profile, `ln(E(z₀)/E(z)) / (z − z₀)`.
///
/// Positive for irradiance that decays with depth.
pub fn kd_from_profile(
    profile: &IrradianceProfile,
    z0_index: usize,
    z_index: usize,
) -> Result<f64> {
    let n = profile.len();
    if z0_index >= n || z_index >= n {
        return Err(Error::InvalidProfile(format!(
            "sample index out of range (z0 = {z0_index}, z = {z_index}, len = {n})"
        )));
    }
    if z_index <= z0_index {
        return Err(Error::DegenerateInterval(format!(
            "z index {z_index} must exceed z0 index {z0_index}"
        )));
    }
    let dz = profile.depths_m[z_index] - profile.depths_m[z0_index];
    let log_ratio = profile.irradiance[z0_index].ln() - profile.irradiance[z_index].ln();
    Ok(log_ratio / dz)
}

/// Mean of `Kd` over `[0, z]` from `(depth, Kd)` samples, trapezoidal rule.
///
/// Samples must be strictly ascending in depth and span `[0, z]`; the end points are
/// linearly interpolated when they fall between samples.
pub fn kd_depth_average(samples: &[(f64, f64)], z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::DegenerateInterval(format!(
            "averaging depth {z} must be positive"
        )));
    }
    if samples.len() < 2 {
        return Err(Error::Coverage(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if let Some(w) = samples.windows(2).find(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidProfile(format!(
            "depths not strictly ascending at {} -> {}",
            w[0].0, w[1].0
        )));
    }
    let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
    if first > 0.0 || last < z {
        return Err(Error::Coverage(format!(
            "samples span [{first}, {last}] m but [0, {z}] m is required"
        )));
    }

    let interp = |x: f64| -> f64 {
        let idx = samples.partition_point(|s| s.0 < x);
        if samples[idx].0 == x {
            return samples[idx].1;
        }
        let (d0, k0) = samples[idx - 1];
        let (d1, k1) = samples[idx];
        k0 + (k1 - k0) * (x - d0) / (d1 - d0)
    };

    let mut points = Vec::with_capacity(samples.len() + 2);
    points.push((0.0, interp(0.0)));
    points.extend(samples.iter().copied().filter(|s| s.0 > 0.0 && s.0 < z));
    points.push((z, interp(z)));

    let integral: f64 = points
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    Ok(integral / z)
}

fn csv_reader<R: Read>(rdr: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(rdr)
}

fn read_columns<R: Read>(rdr: R, source: &str, expected: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv_reader(rdr);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(source, 1, "header", e.to_string()))?
        .clone();
    let found: Vec<&str> = headers.iter().collect();
    if found != expected {
        return Err(Error::parse(
            source,
            1,
            "header",
            format!(
                "expected `{}`, found `{}`",
                expected.join(","),
                found.join(",")
            ),
        ));
    }
    let mut columns = vec![Vec::new(); expected.len()];
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(source, line, "record", e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != expected.len() {
            return Err(Error::parse(
                source,
                line,
                "record",
                format!("expected {} fields, got {}", expected.len(), record.len()),
            ));
        }
        for ((field, name), column) in record.iter().zip(expected).zip(columns.iter_mut()) {
            let value: f64 = field.parse().map_err(|_| {
                Error::parse(source, line, *name, format!("`{field}` is not a number"))
            })?;
            column.push(value);
        }
    }
    Ok(columns)
}

/// Parses a `wavelength_nm,value` CSV.
pub fn parse_curve<R: Read>(rdr: R, source: &str) -> Result<SpectralCurve> {
    let mut cols = read_columns(rdr, source, &["wavelength_nm", "value"])?;
    let values = cols.pop().unwrap();
    let wavelengths = cols.pop().unwrap();
    SpectralCurve::new(wavelengths, values)
}

/// Parses a `wavelength_nm,qe_r,qe_g,qe_b` CSV.
pub fn parse_camera_response<R: Read>(rdr: R, source: &str) -> Result<CameraResponse> {
    let cols = read_columns(rdr, source, &["wavelength_nm", "qe_r", "qe_g", "qe_b"])?;
    let [wl, r, g, b]: [Vec<f64>; 4] = cols.try_into().unwrap();
    Ok(CameraResponse {
        r: SpectralCurve::response(wl.clone(), r)?,
        g: SpectralCurve::response(wl.clone(), g)?,
        b: SpectralCurve::response(wl, b)?,
    })
}

pub fn read_curve(path: impl AsRef<Path>) -> Result<SpectralCurve> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_curve(file, &path.display().to_string())
}

pub fn read_camera_response(path: impl AsRef<Path>) -> Result<CameraResponse> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_camera_response(file, &path.display().to_string())
}
