use std::path::Path;

use serde_json::json;
use uwr_core::dataset::{build_splits, load_manifest, HICRD_TOTALS};

use super::{emit_result, write_json};
use crate::log;

pub fn validate(path: &Path, hicrd: bool) -> anyhow::Result<usize> {
    let m = load_manifest(path)?;
    if hicrd {
        m.check_totals(&HICRD_TOTALS)?;
    }
    emit_result(
        &json!({
            "valid": true,
            "name": m.name,
            "sites": m.sites.len(),
            "totals": m.totals(),
            "indexed_images": m.images.len(),
        }),
        None,
    )?;
    Ok(0)
}

pub fn split(path: &Path, seed: u64, out: &Path, full: bool) -> anyhow::Result<usize> {
    let m = load_manifest(path)?;
    let spec = build_splits(&m, seed)?;
    if full {
        write_json(out, &spec)?;
    } else {
        write_json(out, &spec.paired_ids())?;
    }
    log::info(
        "split",
        json!({
            "seed": seed,
            "paired_train": spec.paired_train.len(),
            "test": spec.test.len(),
            "unpaired_low": spec.unpaired_low.len(),
            "unpaired_reference": spec.unpaired_reference.len(),
            "out": out.display().to_string(),
        }),
    );
    Ok(0)
}
