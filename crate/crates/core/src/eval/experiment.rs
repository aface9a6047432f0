use serde::{Deserialize, Serialize};

use super::cv::{build_featuresets, run_cv, CvConfig, CvError, CvResult, Strategy};
use super::folds::{plan_project_fold, plan_stratified_kfold, FoldKind, FoldPlan};
use super::report::ExperimentReport;
use crate::baselines::UndersampleTarget;
use crate::corpus::{coverage, Annotations, Coverage, Dataset};
use crate::sr4fs::{FeatureExtractor, FeatureMode};
use crate::training::TrainConfig;

/// Everything that determines an experiment's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub folds: FoldKind,
    pub k: usize,
    pub seed: u64,
    pub feature_mode: FeatureMode,
    pub train: TrainConfig,
    pub global_plan: bool,
    pub undersample_target: UndersampleTarget,
    pub strategies: Vec<Strategy>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            folds: FoldKind::Stratified,
            k: 10,
            seed: 0,
            feature_mode: FeatureMode::Plain,
            train: TrainConfig::default(),
            global_plan: false,
            undersample_target: UndersampleTarget::Minimum,
            strategies: vec![Strategy::Hc4rc],
        }
    }
}

impl ExperimentConfig {
    pub fn fold_plan(&self, dataset: &Dataset) -> Result<FoldPlan, CvError> {
        let ids = dataset.req_ids();
        Ok(match self.folds {
            FoldKind::Stratified => {
                plan_stratified_kfold(&ids, &dataset.labels(), self.k, self.seed)?
            }
            FoldKind::Project => {
                let projects: Vec<String> = dataset
                    .requirements
                    .iter()
                    .map(|r| r.project_id.clone())
                    .collect();
                plan_project_fold(&ids, &projects, self.k, self.seed)?
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub results: Vec<CvResult>,
    pub fold_plan: FoldPlan,
    pub coverage: Coverage,
}

/// Extracts features, plans folds and cross-validates every configured
/// strategy on the same folds.
pub fn run_experiment(
    dataset: &Dataset,
    annotations: &Annotations,
    config: &ExperimentConfig,
) -> Result<ExperimentOutput, CvError> {
    let coverage = coverage(dataset, annotations);
    if let Some(id) = coverage.missing.first() {
        return Err(CvError::MissingAnnotation(id.clone()));
    }
    let extractor = FeatureExtractor {
        mode: config.feature_mode,
        ..FeatureExtractor::default()
    };
    let featuresets = build_featuresets(dataset, annotations, &extractor)?;
    let fold_plan = config.fold_plan(dataset)?;
    let cv = CvConfig {
        train: config.train.clone(),
        global_plan: config.global_plan,
        undersample_target: config.undersample_target,
        resample_seed: config.seed,
    };
    let results = config
        .strategies
        .iter()
        .map(|&s| {
            log::info!("cross-validating {s} over {} folds", fold_plan.k);
            run_cv(dataset, &featuresets, s, &fold_plan, &cv)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = ExperimentReport::new(config, dataset, &fold_plan, &results)?;
    Ok(ExperimentOutput {
        report,
        results,
        fold_plan,
        coverage,
    })
}
