use std::io::Write;
use std::path::Path;

use serde::{Serialize, Serializer};

use super::{mse, psnr_from_mse, ssim, uiqm_with, UiqmConfig, UiqmScores};
use crate::error::{Error, Result};
use crate::image::LinearImage;

/// Writes non-finite PSNR as the string `"inf"`.
fn psnr_json<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

/// CSV cell: `inf` for infinite PSNR, empty for skipped metrics.
fn cell(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".to_string()
    } else if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageMetrics {
    pub name: String,
    pub mse: f64,
    #[serde(serialize_with = "psnr_json")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub uicm: f64,
    pub uism: f64,
    pub uiconm: f64,
    pub uiqm: f64,
}

/// Optional metrics; MSE and PSNR are always computed. Skipped values are NaN in
/// memory, empty in CSV and `null` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSelection {
    pub ssim: bool,
    pub uiqm: bool,
}

impl Default for MetricSelection {
    fn default() -> Self {
        Self {
            ssim: true,
            uiqm: true,
        }
    }
}

/// Scores a restored image against its reference. UIQM is computed on `pred`.
pub fn evaluate_pair(
    name: impl Into<String>,
    pred: &LinearImage,
    reference: &LinearImage,
    uiqm_cfg: &UiqmConfig,
) -> Result<ImageMetrics> {
    evaluate_pair_with(name, pred, reference, uiqm_cfg, MetricSelection::default())
}

pub fn evaluate_pair_with(
    name: impl Into<String>,
    pred: &LinearImage,
    reference: &LinearImage,
    uiqm_cfg: &UiqmConfig,
    select: MetricSelection,
) -> Result<ImageMetrics> {
    let err = mse(pred, reference)?;
    let ssim_value = if select.ssim {
        ssim(pred, reference)?
    } else {
        f64::NAN
    };
    let q = if select.uiqm {
        uiqm_with(pred, uiqm_cfg)?
    } else {
        UiqmScores {
            uicm: f64::NAN,
            uism: f64::NAN,
            uiconm: f64::NAN,
            uiqm: f64::NAN,
        }
    };
    Ok(ImageMetrics {
        name: name.into(),
        mse: err,
        psnr_db: psnr_from_mse(err),
        ssim: ssim_value,
        uicm: q.uicm,
        uism: q.uism,
        uiconm: q.uiconm,
        uiqm: q.uiqm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub count: usize,
    pub mse: f64,
    #[serde(serialize_with = "psnr_json")]
    pub psnr_db: f64,
    pub ssim: f64,
    pub uicm: f64,
    pub uism: f64,
    pub uiconm: f64,
    pub uiqm: f64,
    pub fid: Option<f64>,
}

/// Per-image rows in the order they were added, plus an optional set-level FID.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricReport {
    pub rows: Vec<ImageMetrics>,
    pub fid: Option<f64>,
}

impl MetricReport {
    /// Arithmetic means over rows; a single infinite PSNR makes the mean infinite.
    pub fn summary(&self) -> SummaryRow {
        let n = self.rows.len();
        let mean = |f: fn(&ImageMetrics) -> f64| {
            if n == 0 {
                f64::NAN
            } else {
                self.rows.iter().map(f).sum::<f64>() / n as f64
            }
        };
        SummaryRow {
            count: n,
            mse: mean(|r| r.mse),
            psnr_db: mean(|r| r.psnr_db),
            ssim: mean(|r| r.ssim),
            uicm: mean(|r| r.uicm),
            uism: mean(|r| r.uism),
            uiconm: mean(|r| r.uiconm),
            uiqm: mean(|r| r.uiqm),
            fid: self.fid,
        }
    }

    /// Largest `|10·log10(255²/MSE) − PSNR|` over rows (zero when both are infinite).
    pub fn psnr_consistency(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let expected = psnr_from_mse(r.mse);
                if expected == r.psnr_db {
                    0.0
                } else {
                    (expected - r.psnr_db).abs()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,mse,psnr_db,ssim,uicm,uism,uiconm,uiqm,fid\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},\n",
                r.name,
                r.mse,
                cell(r.psnr_db),
                cell(r.ssim),
                cell(r.uicm),
                cell(r.uism),
                cell(r.uiconm),
                cell(r.uiqm)
            ));
        }
        let s = self.summary();
        out.push_str(&format!(
            "mean,{},{},{},{},{},{},{},{}\n",
            cell(s.mse),
            cell(s.psnr_db),
            cell(s.ssim),
            cell(s.uicm),
            cell(s.uism),
            cell(s.uiconm),
            cell(s.uiqm),
            s.fid.map(|f| f.to_string()).unwrap_or_default()
        ));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "images": self.rows,
            "summary": self.summary(),
        })
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        let csv_path = dir.join(format!("{stem}.csv"));
        std::fs::write(&csv_path, self.to_csv()).map_err(|e| Error::io(&csv_path, e))?;
        let json_path = dir.join(format!("{stem}.json"));
        let mut f = std::fs::File::create(&json_path).map_err(|e| Error::io(&json_path, e))?;
        let text = serde_json::to_string_pretty(&self.to_json()).expect("report serialises");
        writeln!(f, "{text}").map_err(|e| Error::io(&json_path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(name: &str, mse: f64) -> ImageMetrics {
        ImageMetrics {
            name: name.into(),
            mse,
            psnr_db: psnr_from_mse(mse),
            ssim: 0.9,
            uicm: 1.0,
            uism: 2.0,
            uiconm: 0.5,
            uiqm: 3.0,
        }
    }

    #[test]
    fn infinity_serialises_as_string() {
        let report = MetricReport {
            rows: vec![row("a.png", 0.0)],
            fid: None,
        };
        let json = report.to_json();
        assert_eq!(json["images"][0]["psnr_db"], "inf");
        assert_eq!(json["summary"]["psnr_db"], "inf");
        assert!(report.to_csv().contains("a.png,0,inf,"));
    }

    #[test]
    fn summary_is_mean() {
        let report = MetricReport {
            rows: vec![row("a", 100.0), row("b", 300.0)],
            fid: Some(1.5),
        };
        let s = report.summary();
        assert_eq!(s.count, 2);
        assert_eq!(s.mse, 200.0);
        assert_eq!(s.fid, Some(1.5));
        assert_eq!(report.psnr_consistency(), 0.0);
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().last().unwrap().starts_with("mean,200,"));
        assert!(csv.lines().last().unwrap().ends_with(",1.5"));
    }

    #[test]
    fn skipped_metrics_are_blank() {
        let img = LinearImage::filled(16, 16, [0.2, 0.4, 0.6]);
        let select = MetricSelection {
            ssim: false,
            uiqm: false,
        };
        let r = evaluate_pair_with("x", &img, &img, &UiqmConfig::default(), select).unwrap();
        assert!(r.ssim.is_nan() && r.uiqm.is_nan());
        let report = MetricReport {
            rows: vec![r],
            fid: None,
        };
        assert!(report.to_csv().contains("x,0,inf,,,,,,"));
        assert!(report.to_json()["images"][0]["ssim"].is_null());
    }
}
