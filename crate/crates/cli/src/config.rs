//! Flag and config-file resolution. Flags override the file, the file
//! overrides built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use hc4rc_core::{
    ExperimentConfig, FeatureMode, FoldKind, GridConfig, Strategy, UndersampleTarget, Weighting,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldsArg {
    Ten,
    Project,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureModeArg {
    Plain,
    RolePrefixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetArg {
    Min,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingArg {
    Tfidf,
    Tf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Labeled requirements CSV (ProjectID,RequirementText,Class).
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// CoNLL-U annotations keyed by `# req_id`.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// hc4rc, flat, flat+oversample, flat+undersample or all.
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long, value_enum)]
    pub folds: Option<FoldsArg>,
    /// Required here or in the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub feature_mode: Option<FeatureModeArg>,
    #[arg(long)]
    pub svm_c: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// Tune C per classifier by inner cross-validation.
    #[arg(long)]
    pub grid_search: bool,
    /// Comma-separated C values for --grid-search.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub min_df: Option<usize>,
    #[arg(long, value_enum)]
    pub weighting: Option<WeightingArg>,
    /// Decompose once over the whole dataset (leaks test labels; ablation only).
    #[arg(long)]
    pub global_plan: bool,
    #[arg(long, value_enum)]
    pub undersample_target: Option<TargetArg>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long)]
    pub threads: Option<usize>,
    /// TOML file with any of the options above (snake_case keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dataset: Option<PathBuf>,
    annotations: Option<PathBuf>,
    strategy: Option<String>,
    folds: Option<FoldsArg>,
    seed: Option<u64>,
    feature_mode: Option<FeatureModeArg>,
    svm_c: Option<f64>,
    tolerance: Option<f64>,
    max_epochs: Option<usize>,
    grid_search: Option<bool>,
    grid: Option<Vec<f64>>,
    inner_folds: Option<usize>,
    min_df: Option<usize>,
    weighting: Option<WeightingArg>,
    global_plan: Option<bool>,
    undersample_target: Option<TargetArg>,
    out: Option<PathBuf>,
    threads: Option<usize>,
}

#[derive(Debug)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub annotations: PathBuf,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub experiment: ExperimentConfig,
}

pub fn parse_strategies(s: &str) -> Result<Vec<Strategy>, CliError> {
    if s == "all" {
        return Ok(Strategy::ALL.to_vec());
    }
    s.split(',')
        .map(|part| part.trim().parse::<Strategy>().map_err(CliError::Config))
        .collect()
}

fn existing(path: Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    let path = path.ok_or_else(|| CliError::Config(format!("--{flag} is required")))?;
    if !path.exists() {
        return Err(CliError::Config(format!(
            "--{flag}: {} does not exist",
            path.display()
        )));
    }
    Ok(path)
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

impl ExperimentArgs {
    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let mut exp = ExperimentConfig::default();

        let seed = self
            .seed
            .or(file.seed)
            .ok_or_else(|| CliError::Config("--seed is required".into()))?;
        exp.seed = seed;
        exp.train.svm.seed = seed;

        let strategy = self
            .strategy
            .or(file.strategy)
            .unwrap_or_else(|| "hc4rc".into());
        exp.strategies = parse_strategies(&strategy)?;

        match self.folds.or(file.folds).unwrap_or(FoldsArg::Ten) {
            FoldsArg::Ten => {
                exp.folds = FoldKind::Stratified;
                exp.k = 10;
            }
            FoldsArg::Project => {
                exp.folds = FoldKind::Project;
                exp.k = 10;
            }
        }
        exp.feature_mode = match self.feature_mode.or(file.feature_mode) {
            Some(FeatureModeArg::RolePrefixed) => FeatureMode::RolePrefixed,
            _ => FeatureMode::Plain,
        };
        if let Some(c) = self.svm_c.or(file.svm_c) {
            if !(c.is_finite() && c > 0.0) {
                return Err(CliError::Config(format!(
                    "--svm-c must be positive, got {c}"
                )));
            }
            exp.train.svm.c = c;
        }
        if let Some(t) = self.tolerance.or(file.tolerance) {
            exp.train.svm.tolerance = t;
        }
        if let Some(m) = self.max_epochs.or(file.max_epochs) {
            exp.train.svm.max_epochs = m;
        }
        if self.grid_search || file.grid_search.unwrap_or(false) {
            let mut grid = GridConfig::default();
            if let Some(values) = self.grid.or(file.grid) {
                if values.is_empty() || values.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
                    return Err(CliError::Config("grid values must be positive".into()));
                }
                grid.values = values;
            }
            if let Some(k) = file.inner_folds {
                grid.inner_folds = k;
            }
            exp.train.grid = Some(grid);
        }
        if let Some(m) = self.min_df.or(file.min_df) {
            exp.train.min_df = m;
        }
        exp.train.weighting = match self.weighting.or(file.weighting) {
            Some(WeightingArg::Tf) => Weighting::Tf,
            _ => Weighting::TfIdf,
        };
        exp.global_plan = self.global_plan || file.global_plan.unwrap_or(false);
        exp.undersample_target = match self.undersample_target.or(file.undersample_target) {
            Some(TargetArg::Median) => UndersampleTarget::Median,
            _ => UndersampleTarget::Minimum,
        };

        Ok(RunConfig {
            dataset: existing(self.dataset.or(file.dataset), "dataset")?,
            annotations: existing(self.annotations.or(file.annotations), "annotations")?,
            out: self
                .out
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("hc4rc-out")),
            threads: self.threads.or(file.threads),
            experiment: exp,
        })
    }
}
