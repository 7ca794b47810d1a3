use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::manifest::{Manifest, Quality};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitConfig {
    /// Site the test pairs are drawn from.
    pub test_site: u8,
    pub test_size: usize,
    pub paired_size: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            test_site: 5,
            test_size: 300,
            paired_size: 1700,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub good: String,
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub seed: u64,
    pub unpaired_low: Vec<String>,
    pub unpaired_reference: Vec<String>,
    pub paired_train: Vec<Pair>,
    pub test: Vec<Pair>,
}

/// The seed-dependent part of a split, as shipped in fixture files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSplit {
    pub seed: u64,
    pub paired_train: Vec<Pair>,
    pub test: Vec<Pair>,
}

impl SplitSpec {
    pub fn paired_ids(&self) -> PairedSplit {
        PairedSplit {
            seed: self.seed,
            paired_train: self.paired_train.clone(),
            test: self.test.clone(),
        }
    }
}

pub fn build_splits(manifest: &Manifest, seed: u64) -> Result<SplitSpec> {
    build_splits_with(manifest, seed, &SplitConfig::default())
}

/// Builds the unpaired, paired and test splits.
///
/// The unpaired set is every low-quality image plus every reference. Test pairs are
/// sampled from the test site, then paired-training pairs from the remaining pairs
/// of all sites. Both lists keep manifest order. The result depends only on the
/// manifest and `seed`.
pub fn build_splits_with(manifest: &Manifest, seed: u64, cfg: &SplitConfig) -> Result<SplitSpec> {
    manifest.validate()?;
    let index = manifest.image_index();

    let unpaired_low = index
        .iter()
        .filter(|e| e.quality == Quality::Low)
        .map(|e| e.id.clone())
        .collect();
    let pairs: Vec<(u8, Pair)> = index
        .iter()
        .filter_map(|e| {
            e.reference.as_ref().map(|r| {
                (
                    e.site,
                    Pair {
                        good: e.id.clone(),
                        reference: r.id.clone(),
                    },
                )
            })
        })
        .collect();
    let unpaired_reference = pairs.iter().map(|(_, p)| p.reference.clone()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut candidates: Vec<usize> = (0..pairs.len())
        .filter(|&i| pairs[i].0 == cfg.test_site)
        .collect();
    if candidates.len() < cfg.test_size {
        return Err(Error::Split(format!(
            "site {} has {} reference pairs, {} needed for the test set",
            cfg.test_site,
            candidates.len(),
            cfg.test_size
        )));
    }
    candidates.shuffle(&mut rng);
    let mut test_idx = candidates[..cfg.test_size].to_vec();
    test_idx.sort_unstable();

    let in_test: HashSet<usize> = test_idx.iter().copied().collect();
    let mut rest: Vec<usize> = (0..pairs.len()).filter(|i| !in_test.contains(i)).collect();
    if rest.len() < cfg.paired_size {
        return Err(Error::Split(format!(
            "{} pairs remain after the test set, {} needed for paired training",
            rest.len(),
            cfg.paired_size
        )));
    }
    rest.shuffle(&mut rng);
    let mut paired_idx = rest[..cfg.paired_size].to_vec();
    paired_idx.sort_unstable();

    let pick = |idx: &[usize]| idx.iter().map(|&i| pairs[i].1.clone()).collect::<Vec<_>>();
    Ok(SplitSpec {
        seed,
        unpaired_low,
        unpaired_reference,
        paired_train: pick(&paired_idx),
        test: pick(&test_idx),
    })
}
