//! HICRD manifest, split construction and image ingestion.

mod manifest;
mod split;

pub use manifest::{
    load_manifest, ImageEntry, Manifest, Quality, ReferenceEntry, SiteRecord, Totals, HICRD_TOTALS,
    SCHEMA_VERSION,
};
pub use split::{build_splits, build_splits_with, Pair, PairedSplit, SplitConfig, SplitSpec};

pub use crate::image::{load_image, save_image, EVALUATION_RESOLUTION, NATIVE_RESOLUTION};
