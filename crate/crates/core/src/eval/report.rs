use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::cv::{observed_macro, CvResult, Strategy};
use super::experiment::ExperimentConfig;
use super::folds::FoldPlan;
use super::metrics::{
    macro_metrics, micro_metrics, per_class_prf, weighted_f1, ClassMetrics, ConfusionMatrix,
};
use super::EvalError;
use crate::corpus::Dataset;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub mean_class_f1: f64,
    pub accuracy: f64,
    pub weighted_f1: f64,
}

impl MetricsSummary {
    fn pooled(cm: &ConfusionMatrix) -> Result<Self, EvalError> {
        let pcm = per_class_prf(cm);
        let m = macro_metrics(&pcm);
        Ok(Self {
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            mean_class_f1: m.mean_class_f1,
            accuracy: micro_metrics(cm)?,
            weighted_f1: weighted_f1(&pcm),
        })
    }

    fn fold(cm: &ConfusionMatrix) -> Result<Self, EvalError> {
        let m = observed_macro(cm);
        Ok(Self {
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            mean_class_f1: m.mean_class_f1,
            accuracy: micro_metrics(cm)?,
            weighted_f1: weighted_f1(&per_class_prf(cm)),
        })
    }

    fn mean(items: &[MetricsSummary]) -> Self {
        let k = items.len().max(1) as f64;
        let avg = |f: fn(&MetricsSummary) -> f64| items.iter().map(f).sum::<f64>() / k;
        Self {
            precision: avg(|m| m.precision),
            recall: avg(|m| m.recall),
            f1: avg(|m| m.f1),
            mean_class_f1: avg(|m| m.mean_class_f1),
            accuracy: avg(|m| m.accuracy),
            weighted_f1: avg(|m| m.weighted_f1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Feature dimension of the fold's vocabulary.
    pub dimension: usize,
    pub metrics: MetricsSummary,
    pub absent_classes: Vec<String>,
    pub maj_classes: Option<Vec<String>>,
    pub min_classes: Option<Vec<String>>,
    pub tuned_c: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    /// Components that saw test ids (only possible with a global plan).
    pub leakage: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub strategy: Strategy,
    /// Metrics of the summed confusion matrix.
    pub pooled: MetricsSummary,
    pub mean_over_folds: MetricsSummary,
    pub per_class: Vec<ClassMetrics>,
    pub folds: Vec<FoldSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub sample_size: usize,
    pub projects: usize,
    pub class_counts: BTreeMap<String, usize>,
}

/// Machine-readable experiment results. Contains no timing, so two runs
/// with the same inputs and seed serialize identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub fold_sizes: Vec<usize>,
    pub strategies: Vec<StrategyReport>,
}

impl ExperimentReport {
    pub fn new(
        config: &ExperimentConfig,
        dataset: &Dataset,
        plan: &FoldPlan,
        results: &[CvResult],
    ) -> Result<Self, EvalError> {
        let strategies = results
            .iter()
            .map(|r| {
                let folds = r
                    .folds
                    .iter()
                    .map(|f| {
                        Ok(FoldSummary {
                            fold: f.fold,
                            train_size: f.train_size,
                            test_size: f.test_ids.len(),
                            dimension: f.dimension,
                            metrics: MetricsSummary::fold(&f.confusion)?,
                            absent_classes: f.absent_classes.clone(),
                            maj_classes: f.plan.as_ref().map(|p| p.maj_classes.clone()),
                            min_classes: f.plan.as_ref().map(|p| p.min_classes.clone()),
                            tuned_c: f
                                .tuning
                                .iter()
                                .map(|(k, t)| (k.clone(), t.best_c))
                                .collect(),
                            warnings: f.warnings.clone(),
                            leakage: f.audit.violations.keys().cloned().collect(),
                        })
                    })
                    .collect::<Result<Vec<_>, EvalError>>()?;
                let per_fold: Vec<MetricsSummary> = folds.iter().map(|f| f.metrics).collect();
                Ok(StrategyReport {
                    strategy: r.strategy,
                    pooled: MetricsSummary::pooled(&r.pooled)?,
                    mean_over_folds: MetricsSummary::mean(&per_fold),
                    per_class: per_class_prf(&r.pooled).classes,
                    folds,
                })
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            dataset: DatasetSummary {
                sample_size: dataset.sample_size(),
                projects: dataset.project_set.len(),
                class_counts: dataset.class_counts(),
            },
            fold_sizes: plan.fold_sizes(),
            strategies,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Plain-text summary: one row per strategy, then per-class F1.
pub fn render_text(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let c = &report.config;
    let _ = writeln!(
        out,
        "n = {}, projects = {}, folds = {:?} x {}, seed = {}",
        report.dataset.sample_size, report.dataset.projects, c.folds, c.k, c.seed
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<18} {:>7} {:>7} {:>7} {:>7}   {:>7} {:>7}",
        "strategy", "P", "R", "F1", "Acc", "F1/fold", "d/fold"
    );
    for s in &report.strategies {
        let d =
            s.folds.iter().map(|f| f.dimension).sum::<usize>() as f64 / s.folds.len().max(1) as f64;
        let _ = writeln!(
            out,
            "{:<18} {:>7.4} {:>7.4} {:>7.4} {:>7.4}   {:>7.4} {:>7.0}",
            s.strategy.as_str(),
            s.pooled.precision,
            s.pooled.recall,
            s.pooled.f1,
            s.pooled.accuracy,
            s.mean_over_folds.f1,
            d
        );
    }
    let _ = writeln!(out);
    let _ = write!(out, "{:<8} {:>7}", "class", "support");
    for s in &report.strategies {
        let _ = write!(out, " {:>18}", s.strategy.as_str());
    }
    let _ = writeln!(out);
    for (label, n) in &report.dataset.class_counts {
        let _ = write!(out, "{label:<8} {n:>7}");
        for s in &report.strategies {
            let f1 = s
                .per_class
                .iter()
                .find(|m| &m.label == label)
                .map_or(0.0, |m| m.f1);
            let _ = write!(out, " {f1:>18.4}");
        }
        let _ = writeln!(out);
    }
    out
}
