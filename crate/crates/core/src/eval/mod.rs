//! Metrics, fold planning, cross-validation and reporting.

mod cv;
mod experiment;
mod folds;
mod metrics;
mod report;

use thiserror::Error;

pub use cv::{
    build_featuresets, run_cv, CvConfig, CvError, CvResult, FoldResult, LeakageAudit, Strategy,
};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutput};
pub use folds::{
    plan_project_fold, plan_stratified_kfold, stratified_fold_indices, FoldKind, FoldPlan,
};
pub use metrics::{
    confusion_matrix, harmonic, macro_metrics, micro_metrics, per_class_prf, weighted_f1,
    ClassMetrics, ConfusionMatrix, MacroMetrics, PerClassMetrics,
};
pub use report::{
    render_text, ExperimentReport, FoldSummary, MetricsSummary, StrategyReport, SCHEMA_VERSION,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("{truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("label `{0}` is not in the label list")]
    UnknownLabel(String),
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("cannot make {k} folds from {n} items")]
    KTooLarge { k: usize, n: usize },
    #[error("{projects} projects cannot fill {k} folds")]
    TooFewProjects { projects: usize, k: usize },
}
