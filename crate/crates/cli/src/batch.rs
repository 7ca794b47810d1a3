//! Input discovery and bounded parallel execution.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::InputError;

fn is_png(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// PNG files directly inside `dir`, sorted by name.
pub fn list_pngs(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| InputError(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.is_file() && is_png(&path) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Expands files and directories into a sorted, de-duplicated list of PNGs.
pub fn collect_inputs(inputs: &[PathBuf]) -> anyhow::Result<Vec<PathBuf>> {
    let mut out = BTreeSet::new();
    for input in inputs {
        if input.is_dir() {
            out.extend(list_pngs(input)?);
        } else if input.is_file() {
            out.insert(input.clone());
        } else {
            return Err(InputError(format!("{} does not exist", input.display())).into());
        }
    }
    Ok(out.into_iter().collect())
}

pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// `<out_dir>/<stem>_<suffix>.png` for each input; rejects clashing stems.
pub fn output_paths(
    inputs: &[PathBuf],
    out_dir: &Path,
    suffix: &str,
) -> anyhow::Result<Vec<PathBuf>> {
    let mut seen = BTreeSet::new();
    inputs
        .iter()
        .map(|p| {
            let s = stem(p);
            if !seen.insert(s.clone()) {
                return Err(InputError(format!("two inputs share the file stem `{s}`")).into());
            }
            Ok(out_dir.join(format!("{s}_{suffix}.png")))
        })
        .collect()
}

/// Applies `f` to every item on at most `jobs` threads; results keep input order.
pub fn run_parallel<T, R, F>(jobs: Option<usize>, items: &[T], f: F) -> anyhow::Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(InputError("--jobs must be at least 1".into()).into());
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}
