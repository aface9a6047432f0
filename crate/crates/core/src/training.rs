//! Configuration and bookkeeping shared by the hierarchical and flat models.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Requirement;
use crate::sr4fs::FeatureSet;
use crate::svm::{self, GridSearchResult, MulticlassModel, SvmConfig, SvmError};
use crate::vectorizer::{SparseVector, Weighting};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub values: Vec<f64>,
    pub inner_folds: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            values: vec![0.01, 0.1, 1.0, 10.0],
            inner_folds: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub svm: SvmConfig,
    pub min_df: usize,
    pub weighting: Weighting,
    /// Tune `C` per classifier by inner cross-validation when set.
    pub grid: Option<GridConfig>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            svm: SvmConfig::default(),
            min_df: 1,
            weighting: Weighting::TfIdf,
            grid: None,
        }
    }
}

/// Requirement ids that each fitted component actually consumed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingProvenance {
    pub vocabulary_docs: Vec<String>,
    pub plan_docs: Vec<String>,
    pub grid_docs: Vec<String>,
    pub resample_sources: Vec<String>,
    pub model_docs: Vec<String>,
}

impl TrainingProvenance {
    pub fn all_ids(&self) -> impl Iterator<Item = &String> {
        self.vocabulary_docs
            .iter()
            .chain(&self.plan_docs)
            .chain(&self.grid_docs)
            .chain(&self.resample_sources)
            .chain(&self.model_docs)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AlignmentError {
    #[error("no feature set for requirement `{0}`")]
    MissingFeatures(String),
}

/// Feature sets for `requirements`, looked up by id (duplicates allowed).
pub fn aligned_featuresets(
    requirements: &[Requirement],
    featuresets: &[FeatureSet],
) -> Result<Vec<FeatureSet>, AlignmentError> {
    let by_id: HashMap<&str, &FeatureSet> =
        featuresets.iter().map(|f| (f.req_id.as_str(), f)).collect();
    requirements
        .iter()
        .map(|r| {
            by_id
                .get(r.req_id.as_str())
                .map(|f| (*f).clone())
                .ok_or_else(|| AlignmentError::MissingFeatures(r.req_id.clone()))
        })
        .collect()
}

/// Chosen `C` (grid-searched when configured) for one classifier.
pub(crate) fn select_c(
    x: &[SparseVector],
    y: &[String],
    config: &TrainConfig,
) -> Result<(SvmConfig, Option<GridSearchResult>), SvmError> {
    match &config.grid {
        Some(grid) => {
            let result = svm::grid_search(
                x,
                y,
                &grid.values,
                grid.inner_folds,
                config.svm.seed,
                &config.svm,
            )?;
            Ok((config.svm.with_c(result.best_c), Some(result)))
        }
        None => Ok((config.svm, None)),
    }
}

pub(crate) fn fit_multiclass(
    x: &[SparseVector],
    y: &[String],
    config: &TrainConfig,
) -> Result<(MulticlassModel, Option<GridSearchResult>), SvmError> {
    let (svm_config, tuned) = select_c(x, y, config)?;
    Ok((svm::train_multiclass(x, y, &svm_config)?, tuned))
}
