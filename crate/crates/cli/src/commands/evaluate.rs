use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::json;
use uwr_core::dataset::load_image;
use uwr_core::metrics::{
    evaluate_pair_with, fid, gaussian_stats, read_features, MetricReport, UiqmConfig,
};

use super::Ctx;
use crate::batch::{list_pngs, run_parallel, stem};
use crate::config::MetricToggles;
use crate::{log, InputError};

fn names(paths: &[PathBuf]) -> Vec<String> {
    paths
        .iter()
        .map(|p| {
            p.file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned()
        })
        .collect()
}

/// Report row name, prediction path, reference path.
type Matched = (String, PathBuf, PathBuf);

/// Pairs each reference with the prediction of the same stem, or the same stem
/// plus `_restored`. Returns the pairs and the unmatched files on each side.
fn match_files(preds: &[PathBuf], refs: &[PathBuf]) -> (Vec<Matched>, Vec<PathBuf>, Vec<PathBuf>) {
    let mut by_stem: BTreeMap<String, &PathBuf> = preds.iter().map(|p| (stem(p), p)).collect();
    let mut pairs = Vec::new();
    let mut missing_pred = Vec::new();
    for r in refs {
        let s = stem(r);
        let hit = by_stem
            .remove(&s)
            .or_else(|| by_stem.remove(&format!("{s}_restored")));
        match hit {
            Some(p) => pairs.push((
                names(std::slice::from_ref(r)).remove(0),
                p.clone(),
                r.clone(),
            )),
            None => missing_pred.push(r.clone()),
        }
    }
    let unused_pred = by_stem.into_values().cloned().collect();
    (pairs, missing_pred, unused_pred)
}

pub fn run(
    ctx: &Ctx,
    pred_dir: &Path,
    ref_dir: &Path,
    out_dir: Option<&Path>,
    name: &str,
    features: Option<(PathBuf, PathBuf)>,
    toggles: &MetricToggles,
) -> anyhow::Result<usize> {
    let preds = list_pngs(pred_dir)?;
    let refs = list_pngs(ref_dir)?;
    let out_dir = ctx.config.output_dir(out_dir)?;
    for path in features.iter().flat_map(|(a, b)| [a, b]) {
        if !path.exists() {
            return Err(InputError(format!("{} does not exist", path.display())).into());
        }
    }

    let (pairs, missing_pred, unused_pred) = match_files(&preds, &refs);
    let mut failed = 0;
    if !missing_pred.is_empty() {
        failed += missing_pred.len();
        log::warn(
            "unmatched",
            json!({ "side": "reference", "files": names(&missing_pred) }),
        );
    }
    if !unused_pred.is_empty() {
        failed += unused_pred.len();
        log::warn(
            "unmatched",
            json!({ "side": "prediction", "files": names(&unused_pred) }),
        );
    }

    let resize = ctx.resize();
    let uiqm_cfg = UiqmConfig::default();
    let select = toggles.selection();
    let results = run_parallel(ctx.jobs(), &pairs, |(name, pred, reference)| {
        let p = load_image(pred, resize)?;
        let r = load_image(reference, resize)?;
        evaluate_pair_with(name.clone(), &p, &r, &uiqm_cfg, select)
            .with_context(|| format!("scoring {}", pred.display()))
    })?;

    let mut report = MetricReport::default();
    for ((name, _, _), result) in pairs.iter().zip(results) {
        match result {
            Ok(row) => report.rows.push(row),
            Err(e) => {
                failed += 1;
                log::error("failed", json!({ "file": name, "error": format!("{e:#}") }));
            }
        }
    }

    if let Some((real, generated)) = features {
        if toggles.fid {
            let r = gaussian_stats(&read_features(&real)?)?;
            let g = gaussian_stats(&read_features(&generated)?)?;
            report.fid = Some(fid(&r, &g)?);
        } else {
            log::warn(
                "fid_disabled",
                json!({ "reason": "metrics.fid = false in config" }),
            );
        }
    }

    report.write(&out_dir, name)?;
    let summary = report.summary();
    log::info(
        "evaluated",
        json!({
            "pairs": report.rows.len(),
            "failed": failed,
            "summary": summary,
            "report": out_dir.join(format!("{name}.csv")).display().to_string(),
        }),
    );
    Ok(failed)
}
