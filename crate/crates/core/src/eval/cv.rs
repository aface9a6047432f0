use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::folds::FoldPlan;
use super::metrics::{
    confusion_matrix, macro_metrics, micro_metrics, per_class_prf, ConfusionMatrix, MacroMetrics,
    PerClassMetrics,
};
use super::EvalError;
use crate::baselines::{oversample, train_flat, undersample, UndersampleTarget};
use crate::corpus::{class_counts, Annotations, Dataset, Requirement};
use crate::hierarchy::{
    decompose, train_hierarchical, DecompositionPlan, HierarchyConfig, HierarchyError,
};
use crate::sr4fs::{FeatureExtractor, FeatureSet};
use crate::svm::{GridSearchResult, SvmError};
use crate::training::{TrainConfig, TrainingProvenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Hc4rc,
    Flat,
    FlatOversample,
    FlatUndersample,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Hc4rc,
        Strategy::Flat,
        Strategy::FlatOversample,
        Strategy::FlatUndersample,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Hc4rc => "hc4rc",
            Strategy::Flat => "flat",
            Strategy::FlatOversample => "flat-oversample",
            Strategy::FlatUndersample => "flat-undersample",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.replace('+', "-");
        Strategy::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum CvError {
    #[error("requirement `{0}` has no annotation")]
    MissingAnnotation(String),
    #[error("fold plan covers {plan} requirements but the dataset has {dataset}")]
    PlanMismatch { plan: usize, dataset: usize },
    #[error("fold {fold}: test requirement `{req_id}` reached {component}")]
    Leakage {
        fold: usize,
        req_id: String,
        component: String,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Svm(#[from] SvmError),
}

/// Feature sets for every dataset requirement, in dataset order.
pub fn build_featuresets(
    dataset: &Dataset,
    annotations: &Annotations,
    extractor: &FeatureExtractor,
) -> Result<Vec<FeatureSet>, CvError> {
    dataset
        .requirements
        .par_iter()
        .map(|r| {
            annotations
                .get(&r.req_id)
                .map(|sentences| extractor.extract(&r.req_id, sentences))
                .ok_or_else(|| CvError::MissingAnnotation(r.req_id.clone()))
        })
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct CvConfig {
    pub train: TrainConfig,
    /// Decompose once on the whole dataset instead of per training split.
    /// Test labels then shape the plan, which the audit reports.
    pub global_plan: bool,
    pub undersample_target: UndersampleTarget,
    /// Seed for re-sampling; fold `f` uses `resample_seed + f`.
    pub resample_seed: u64,
}

/// Ids of test requirements found in training-side inputs, per component.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeakageAudit {
    pub checked_ids: usize,
    pub violations: BTreeMap<String, Vec<String>>,
}

impl LeakageAudit {
    fn check(test_ids: &HashSet<&str>, provenance: &TrainingProvenance) -> Self {
        let mut audit = LeakageAudit {
            checked_ids: test_ids.len(),
            ..Default::default()
        };
        let parts: [(&str, &[String]); 5] = [
            ("vocabulary", &provenance.vocabulary_docs),
            ("decomposition", &provenance.plan_docs),
            ("grid-search", &provenance.grid_docs),
            ("re-sampling", &provenance.resample_sources),
            ("model", &provenance.model_docs),
        ];
        for (name, ids) in parts {
            let hits: BTreeSet<&String> = ids
                .iter()
                .filter(|id| test_ids.contains(id.as_str()))
                .collect();
            if !hits.is_empty() {
                audit
                    .violations
                    .insert(name.to_owned(), hits.into_iter().cloned().collect());
            }
        }
        audit
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub test_ids: Vec<String>,
    pub truth: Vec<String>,
    pub predicted: Vec<String>,
    pub confusion: ConfusionMatrix,
    /// Vocabulary size of the fold's model.
    pub dimension: usize,
    /// Classes with test instances but none in the training split.
    pub absent_classes: Vec<String>,
    pub plan: Option<DecompositionPlan>,
    pub warnings: Vec<String>,
    pub tuning: BTreeMap<String, GridSearchResult>,
    pub audit: LeakageAudit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub strategy: Strategy,
    pub folds: Vec<FoldResult>,
    /// Sum of all fold matrices.
    pub pooled: ConfusionMatrix,
}

impl CvResult {
    pub fn pooled_accuracy(&self) -> Result<f64, EvalError> {
        micro_metrics(&self.pooled)
    }
}

fn pick<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

/// Cross-validates one strategy over a fixed fold plan.
///
/// Everything fitted for a fold (vocabulary, decomposition, re-sampling,
/// grid search, models) sees only that fold's training split, which the
/// audit verifies from recorded provenance.
pub fn run_cv(
    dataset: &Dataset,
    featuresets: &[FeatureSet],
    strategy: Strategy,
    plan: &FoldPlan,
    config: &CvConfig,
) -> Result<CvResult, CvError> {
    let n = dataset.sample_size();
    if plan.req_ids.len() != n || featuresets.len() != n {
        return Err(CvError::PlanMismatch {
            plan: plan.req_ids.len(),
            dataset: n,
        });
    }
    let global = if config.global_plan {
        let plan = decompose(&dataset.class_counts())?;
        Some((plan, dataset.req_ids()))
    } else {
        None
    };

    let folds = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            run_fold(
                dataset,
                featuresets,
                strategy,
                plan,
                config,
                global.as_ref(),
                fold,
            )
        })
        .collect::<Result<Vec<_>, CvError>>()?;

    let mut pooled = ConfusionMatrix::zeros(&dataset.label_set);
    for f in &folds {
        pooled.add(&f.confusion);
    }
    Ok(CvResult {
        strategy,
        folds,
        pooled,
    })
}

fn run_fold(
    dataset: &Dataset,
    featuresets: &[FeatureSet],
    strategy: Strategy,
    plan: &FoldPlan,
    config: &CvConfig,
    global: Option<&(DecompositionPlan, Vec<String>)>,
    fold: usize,
) -> Result<FoldResult, CvError> {
    let train_idx = plan.train_indices(fold);
    let test_idx = plan.test_indices(fold);
    let train: Vec<Requirement> = pick(&dataset.requirements, &train_idx);
    let test: Vec<Requirement> = pick(&dataset.requirements, &test_idx);
    let test_fs: Vec<FeatureSet> = pick(featuresets, &test_idx);

    let train_classes = class_counts(train.iter().map(|r| r.label.as_str()));
    let absent_classes: Vec<String> = class_counts(test.iter().map(|r| r.label.as_str()))
        .into_keys()
        .filter(|l| !train_classes.contains_key(l))
        .collect();
    for l in &absent_classes {
        log::warn!("fold {fold}: class {l} has test instances but no training instances");
    }

    let (predicted, dimension, provenance, decomposition, warnings, tuning) = match strategy {
        Strategy::Hc4rc => {
            let cfg = HierarchyConfig {
                train: config.train.clone(),
                fixed_plan: global.cloned(),
            };
            let model = train_hierarchical(&train, featuresets, &cfg)?;
            let predicted = test_fs
                .iter()
                .map(|f| model.predict_features(f))
                .collect::<Result<Vec<_>, _>>()?;
            (
                predicted,
                model.dimension(),
                model.provenance,
                Some(model.plan),
                model.warnings,
                model.tuning,
            )
        }
        Strategy::Flat | Strategy::FlatOversample | Strategy::FlatUndersample => {
            let seed = config.resample_seed.wrapping_add(fold as u64);
            let (rows, sources) = match strategy {
                Strategy::FlatOversample => {
                    let set = oversample(&train, seed);
                    (set.requirements, set.provenance)
                }
                Strategy::FlatUndersample => {
                    let set = undersample(&train, config.undersample_target, seed);
                    (set.requirements, set.provenance)
                }
                _ => (train.clone(), Vec::new()),
            };
            let model = train_flat(&rows, featuresets, &config.train)?;
            let predicted = test_fs
                .iter()
                .map(|f| model.predict_features(f))
                .collect::<Result<Vec<_>, _>>()?;
            let mut provenance = model.provenance;
            provenance.resample_sources = sources;
            let tuning = model
                .tuning
                .map(|t| ("f_flat".to_owned(), t))
                .into_iter()
                .collect();
            (
                predicted,
                model.vocab.dimension(),
                provenance,
                None,
                Vec::new(),
                tuning,
            )
        }
    };

    let test_ids: Vec<String> = test.iter().map(|r| r.req_id.clone()).collect();
    let id_set: HashSet<&str> = test_ids.iter().map(String::as_str).collect();
    let audit = LeakageAudit::check(&id_set, &provenance);
    for (component, ids) in &audit.violations {
        if component == "decomposition" && global.is_some() {
            continue;
        }
        return Err(CvError::Leakage {
            fold,
            req_id: ids[0].clone(),
            component: component.clone(),
        });
    }

    let truth: Vec<String> = test.iter().map(|r| r.label.clone()).collect();
    let confusion = confusion_matrix(&truth, &predicted, &dataset.label_set)?;
    Ok(FoldResult {
        fold,
        train_size: train.len(),
        test_ids,
        truth,
        predicted,
        confusion,
        dimension,
        absent_classes,
        plan: decomposition,
        warnings,
        tuning,
        audit,
    })
}

/// Macro metrics over the classes that occur in the matrix as a true or a
/// predicted label; classes a fold never sees are left out.
pub(crate) fn observed_macro(cm: &ConfusionMatrix) -> MacroMetrics {
    let pcm = per_class_prf(cm);
    let classes = pcm
        .classes
        .into_iter()
        .enumerate()
        .filter(|(c, _)| cm.row_sum(*c) + cm.column_sum(*c) > 0)
        .map(|(_, m)| m)
        .collect();
    macro_metrics(&PerClassMetrics { classes })
}
