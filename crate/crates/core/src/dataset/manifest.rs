use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::DEFAULT_DISTANCE_M;

pub const SCHEMA_VERSION: u32 = 1;

/// Column sums of the published site table.
pub const HICRD_TOTALS: Totals = Totals {
    low_quality: 6003,
    good_quality: 3673,
    reference: 2000,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteRecord {
    pub site_id: u8,
    pub low_quality_count: usize,
    pub good_quality_count: usize,
    pub reference_count: usize,
    /// Water type identifier; absent where no water parameters were measured.
    #[serde(default)]
    pub water_type: Option<String>,
    pub diver1_max_depth_m: f64,
    pub diver2_max_depth_m: f64,
}

impl SiteRecord {
    /// Deeper of the two divers' maximum depths.
    pub fn max_depth_m(&self) -> f64 {
        self.diver1_max_depth_m.max(self.diver2_max_depth_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quality {
    Low,
    Good,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub id: String,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEntry {
    pub id: String,
    pub site: u8,
    pub quality: Quality,
    pub path: String,
    /// Restored reference, only on good-quality images.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceEntry>,
    /// Manually assigned camera-object distance in metres.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
}

impl ImageEntry {
    pub fn distance_or_default(&self) -> f64 {
        self.distance_m.unwrap_or(DEFAULT_DISTANCE_M)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub low_quality: usize,
    pub good_quality: usize,
    pub reference: usize,
}

/// Per-site counts plus an optional per-image index.
///
/// When `images` is empty the manifest is counts-only and [`Manifest::image_index`]
/// synthesises stable ids and relative paths from the counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub sites: Vec<SiteRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub images: Vec<ImageEntry>,
}

fn invalid(scope: impl Into<String>, rule: impl Into<String>) -> Error {
    Error::Validation {
        scope: scope.into(),
        rule: rule.into(),
    }
}

impl Manifest {
    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        let manifest: Manifest = serde_json::from_str(text).map_err(|e| {
            Error::parse(
                source,
                e.line(),
                format!("column {}", e.column()),
                e.to_string(),
            )
        })?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises")
    }

    pub fn site(&self, site_id: u8) -> Option<&SiteRecord> {
        self.sites.iter().find(|s| s.site_id == site_id)
    }

    pub fn totals(&self) -> Totals {
        Totals {
            low_quality: self.sites.iter().map(|s| s.low_quality_count).sum(),
            good_quality: self.sites.iter().map(|s| s.good_quality_count).sum(),
            reference: self.sites.iter().map(|s| s.reference_count).sum(),
        }
    }

    /// Checks that column totals equal `expected`.
    pub fn check_totals(&self, expected: &Totals) -> Result<()> {
        let got = self.totals();
        if got != *expected {
            return Err(invalid(
                "manifest",
                format!(
                    "totals {}/{}/{} (low/good/reference) differ from expected {}/{}/{}",
                    got.low_quality,
                    got.good_quality,
                    got.reference,
                    expected.low_quality,
                    expected.good_quality,
                    expected.reference
                ),
            ));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "manifest",
                format!(
                    "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        let mut seen = HashSet::new();
        for s in &self.sites {
            let scope = format!("site {}", s.site_id);
            if !(1..=8).contains(&s.site_id) {
                return Err(invalid(scope, "site_id must be between 1 and 8"));
            }
            if !seen.insert(s.site_id) {
                return Err(invalid(scope, "duplicate site record"));
            }
            if s.reference_count > s.good_quality_count {
                return Err(invalid(
                    scope,
                    format!(
                        "reference_count {} exceeds good_quality_count {}",
                        s.reference_count, s.good_quality_count
                    ),
                ));
            }
            if s.water_type.is_none() && s.reference_count != 0 {
                return Err(invalid(
                    scope,
                    "references require a water type (no water parameters available)",
                ));
            }
            for d in [s.diver1_max_depth_m, s.diver2_max_depth_m] {
                if !(d.is_finite() && d >= 0.0) {
                    return Err(invalid(
                        scope,
                        format!("max depth {d} must be a non-negative number"),
                    ));
                }
            }
        }
        if !self.images.is_empty() {
            self.validate_index()?;
        }
        Ok(())
    }

    fn validate_index(&self) -> Result<()> {
        let mut ids = HashSet::new();
        let mut counts: BTreeMap<u8, (usize, usize, usize)> = BTreeMap::new();
        for img in &self.images {
            let scope = format!("site {}", img.site);
            if self.site(img.site).is_none() {
                return Err(invalid(
                    scope,
                    format!("image `{}` refers to an unknown site", img.id),
                ));
            }
            if !ids.insert(img.id.as_str()) {
                return Err(invalid(scope, format!("duplicate id `{}`", img.id)));
            }
            if let Some(d) = img.distance_m {
                if !(d.is_finite() && d > 0.0) {
                    return Err(invalid(
                        scope,
                        format!("image `{}` has distance {d}", img.id),
                    ));
                }
            }
            let entry = counts.entry(img.site).or_default();
            match img.quality {
                Quality::Low => {
                    entry.0 += 1;
                    if img.reference.is_some() {
                        return Err(invalid(
                            scope,
                            format!("low-quality image `{}` has a reference", img.id),
                        ));
                    }
                }
                Quality::Good => entry.1 += 1,
            }
            if let Some(r) = &img.reference {
                entry.2 += 1;
                if !ids.insert(r.id.as_str()) {
                    return Err(invalid(scope, format!("duplicate id `{}`", r.id)));
                }
            }
        }
        for s in &self.sites {
            let got = counts.get(&s.site_id).copied().unwrap_or_default();
            let want = (s.low_quality_count, s.good_quality_count, s.reference_count);
            if got != want {
                return Err(invalid(
                    format!("site {}", s.site_id),
                    format!(
                        "index holds {}/{}/{} low/good/reference images, record says {}/{}/{}",
                        got.0, got.1, got.2, want.0, want.1, want.2
                    ),
                ));
            }
        }
        Ok(())
    }

    /// The explicit image index, or one synthesised from the site counts.
    ///
    /// Synthesised ids look like `s5_good_0042` with paths `site5/good/0042.png`; the
    /// first `reference_count` good images of a site carry references
    /// `s5_ref_0042` / `site5/reference/0042.png`.
    pub fn image_index(&self) -> Vec<ImageEntry> {
        if !self.images.is_empty() {
            return self.images.clone();
        }
        let mut sites: Vec<&SiteRecord> = self.sites.iter().collect();
        sites.sort_by_key(|s| s.site_id);
        let mut out = Vec::new();
        for s in sites {
            let site = s.site_id;
            for i in 0..s.low_quality_count {
                out.push(ImageEntry {
                    id: format!("s{site}_low_{i:04}"),
                    site,
                    quality: Quality::Low,
                    path: format!("site{site}/low/{i:04}.png"),
                    reference: None,
                    distance_m: None,
                });
            }
            for i in 0..s.good_quality_count {
                out.push(ImageEntry {
                    id: format!("s{site}_good_{i:04}"),
                    site,
                    quality: Quality::Good,
                    path: format!("site{site}/good/{i:04}.png"),
                    reference: (i < s.reference_count).then(|| ReferenceEntry {
                        id: format!("s{site}_ref_{i:04}"),
                        path: format!("site{site}/reference/{i:04}.png"),
                    }),
                    distance_m: None,
                });
            }
        }
        out
    }
}

/// Reads and validates a manifest JSON file.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Manifest::from_json(&text, &path.display().to_string())
}
