//! Flat one-vs-rest model and random re-sampling baselines.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Requirement;
use crate::hierarchy::HierarchyError;
use crate::sr4fs::FeatureSet;
use crate::svm::{GridSearchResult, MulticlassModel, SvmError};
use crate::training::{aligned_featuresets, fit_multiclass, TrainConfig, TrainingProvenance};
use crate::vectorizer::{build_vocabulary, vectorize, SparseVector, Vocabulary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatModel {
    pub vocab: Vocabulary,
    pub model: MulticlassModel,
    pub provenance: TrainingProvenance,
    pub tuning: Option<GridSearchResult>,
}

impl FlatModel {
    pub fn predict(&self, x: &SparseVector) -> Result<String, SvmError> {
        self.model.predict_label(x)
    }

    pub fn predict_features(&self, fs: &FeatureSet) -> Result<String, SvmError> {
        self.predict(&vectorize(fs, &self.vocab))
    }
}

/// One-vs-rest model over all classes at once.
pub fn train_flat(
    requirements: &[Requirement],
    featuresets: &[FeatureSet],
    config: &TrainConfig,
) -> Result<FlatModel, HierarchyError> {
    if requirements.is_empty() {
        return Err(HierarchyError::EmptyInput);
    }
    let train_fs = aligned_featuresets(requirements, featuresets)?;
    let vocab = build_vocabulary(&train_fs, config.min_df, config.weighting)?;
    let x: Vec<SparseVector> = train_fs.iter().map(|f| vectorize(f, &vocab)).collect();
    let y: Vec<String> = requirements.iter().map(|r| r.label.clone()).collect();
    let (model, tuning) = fit_multiclass(&x, &y, config)?;
    let ids: Vec<String> = requirements.iter().map(|r| r.req_id.clone()).collect();
    Ok(FlatModel {
        vocab,
        model,
        provenance: TrainingProvenance {
            vocabulary_docs: ids.clone(),
            grid_docs: if tuning.is_some() {
                ids.clone()
            } else {
                Vec::new()
            },
            model_docs: ids,
            ..Default::default()
        },
        tuning,
    })
}

/// A re-sampled training split. `provenance[i]` is the id that
/// `requirements[i]` was copied from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResampledTrainSet {
    pub requirements: Vec<Requirement>,
    pub provenance: Vec<String>,
    pub seed: u64,
}

impl ResampledTrainSet {
    pub fn class_counts(&self) -> BTreeMap<String, usize> {
        crate::corpus::class_counts(self.requirements.iter().map(|r| r.label.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UndersampleTarget {
    /// Smallest class size.
    #[default]
    Minimum,
    /// Lower median of the class sizes; smaller classes are kept whole.
    Median,
}

fn group_by_label(requirements: &[Requirement]) -> BTreeMap<&str, Vec<&Requirement>> {
    let mut groups: BTreeMap<&str, Vec<&Requirement>> = BTreeMap::new();
    for r in requirements {
        groups.entry(r.label.as_str()).or_default().push(r);
    }
    groups
}

fn finish(mut picked: Vec<&Requirement>, rng: &mut ChaCha8Rng, seed: u64) -> ResampledTrainSet {
    picked.shuffle(rng);
    ResampledTrainSet {
        provenance: picked.iter().map(|r| r.req_id.clone()).collect(),
        requirements: picked.into_iter().cloned().collect(),
        seed,
    }
}

/// Duplicates random members of each class (with replacement) until every
/// class matches the largest one. Originals are always kept.
pub fn oversample(requirements: &[Requirement], seed: u64) -> ResampledTrainSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = group_by_label(requirements);
    let target = groups.values().map(Vec::len).max().unwrap_or(0);
    let mut picked = Vec::with_capacity(target * groups.len());
    for members in groups.values() {
        picked.extend(members.iter().copied());
        for _ in members.len()..target {
            picked.push(*members.choose(&mut rng).expect("group is non-empty"));
        }
    }
    finish(picked, &mut rng, seed)
}

/// Keeps a random subset (without replacement) of each class larger than
/// the target size.
pub fn undersample(
    requirements: &[Requirement],
    target: UndersampleTarget,
    seed: u64,
) -> ResampledTrainSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = group_by_label(requirements);
    let mut sizes: Vec<usize> = groups.values().map(Vec::len).collect();
    sizes.sort_unstable();
    let target = match target {
        UndersampleTarget::Minimum => sizes.first().copied().unwrap_or(0),
        UndersampleTarget::Median => sizes
            .get(sizes.len().saturating_sub(1) / 2)
            .copied()
            .unwrap_or(0),
    };
    let mut picked = Vec::new();
    for members in groups.values() {
        if members.len() <= target {
            picked.extend(members.iter().copied());
        } else {
            picked.extend(members.choose_multiple(&mut rng, target).copied());
        }
    }
    finish(picked, &mut rng, seed)
}
