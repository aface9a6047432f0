//! `hc4rc`: run requirement-classification experiments and inspect datasets.

mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hc4rc_core::corpus::{class_counts, coverage};
use hc4rc_core::eval::{build_featuresets, render_text, CvError};
use hc4rc_core::synthetic::{self, SyntheticSpec};
use hc4rc_core::{
    build_vocabulary, decompose, load_annotations, load_dataset, run_experiment, CorpusError,
    EvalError, FeatureExtractor, HierarchyError, Weighting,
};
use thiserror::Error;

use config::ExperimentArgs;

#[derive(Debug, Parser)]
#[command(
    name = "hc4rc",
    version,
    about = "Hierarchical requirements classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross-validate one or more strategies and write reports.
    Experiment(ExperimentArgs),
    /// Print class counts, the decomposition trace, dimensions and coverage.
    Inspect {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        annotations: Option<PathBuf>,
    },
    /// Write a seeded synthetic dataset and matching annotations.
    Synth {
        /// Output directory for dataset.csv and annotations.conllu.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Small four-class corpus instead of the twelve-class one.
        #[arg(long)]
        small: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("degenerate run: {0}")]
    Degenerate(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Data(_) => 3,
            CliError::Degenerate(_) => 4,
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CvError> for CliError {
    fn from(e: CvError) -> Self {
        match e {
            CvError::MissingAnnotation(_) | CvError::PlanMismatch { .. } => {
                CliError::Data(e.to_string())
            }
            CvError::Eval(EvalError::KTooLarge { .. } | EvalError::TooFewProjects { .. })
            | CvError::Hierarchy(HierarchyError::Vectorizer(_) | HierarchyError::EmptyInput) => {
                CliError::Degenerate(e.to_string())
            }
            other => CliError::Degenerate(other.to_string()),
        }
    }
}

/// Writes `bytes` next to `path` and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<(), CliError> {
    let run = args.resolve()?;
    if let Some(n) = run.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let dataset = load_dataset(&run.dataset)?;
    let annotations = load_annotations(&run.annotations)?;

    let started = Instant::now();
    let output = run_experiment(&dataset, &annotations, &run.experiment)?;
    let elapsed = started.elapsed().as_secs_f64();
    log::info!("cross-validation finished in {elapsed:.2} s");

    fs::create_dir_all(&run.out)?;
    for result in &output.results {
        for fold in &result.folds {
            let name = format!("confusion_{}_{}.csv", result.strategy, fold.fold);
            write_atomic(&run.out.join(name), fold.confusion.to_csv().as_bytes())?;
        }
        let name = format!("confusion_{}_pooled.csv", result.strategy);
        write_atomic(&run.out.join(name), result.pooled.to_csv().as_bytes())?;
    }
    let mut text = render_text(&output.report);
    text.push_str(&format!(
        "\nwall-clock: {elapsed:.2} s (excluding annotation)\n"
    ));
    write_atomic(&run.out.join("report.txt"), text.as_bytes())?;
    write_atomic(
        &run.out.join("report.json"),
        output.report.to_json().as_bytes(),
    )?;
    print!("{text}");
    Ok(())
}

fn inspect(dataset: &Path, annotations: Option<&Path>) -> Result<(), CliError> {
    let ds = load_dataset(dataset)?;
    println!("requirements: {}", ds.sample_size());
    println!("projects: {}", ds.project_set.len());
    println!("class counts:");
    for (label, n) in ds.class_counts() {
        println!("  {label:<8} {n}");
    }
    println!();
    let plan = decompose(&ds.class_counts()).map_err(|e| CliError::Data(e.to_string()))?;
    if plan.is_degenerate() {
        eprintln!("warning: one class holds the whole dataset; no minority subset");
    }
    print!("{}", plan.trace());

    if let Some(path) = annotations {
        let ann = load_annotations(path)?;
        let cov = coverage(&ds, &ann);
        println!();
        println!(
            "annotation coverage: {}/{} ({} unknown ids ignored)",
            cov.annotated,
            ds.sample_size(),
            cov.unknown.len()
        );
        if !cov.missing.is_empty() {
            println!("missing annotations: {}", cov.missing.join(", "));
        }
        let annotated: Vec<_> = ds
            .requirements
            .iter()
            .filter(|r| ann.contains_key(&r.req_id))
            .cloned()
            .collect();
        if !annotated.is_empty() {
            let sub = hc4rc_core::Dataset::from_requirements(annotated)?;
            let fs = build_featuresets(&sub, &ann, &FeatureExtractor::default())?;
            let d = build_vocabulary(&fs, 1, Weighting::TfIdf).map_or(0, |v| v.dimension());
            let labels = class_counts(sub.requirements.iter().map(|r| r.label.as_str()));
            println!(
                "n = {}, d = {} ({}), {} classes",
                sub.sample_size(),
                d,
                if d > sub.sample_size() {
                    "d > n"
                } else {
                    "d <= n"
                },
                labels.len()
            );
        }
    }
    Ok(())
}

fn synth(out: &Path, seed: u64, small: bool) -> Result<(), CliError> {
    let spec = if small {
        SyntheticSpec::small(seed)
    } else {
        SyntheticSpec::promise_like(seed)
    };
    let (ds, ann) = synthetic::generate(&spec)?;
    fs::create_dir_all(out)?;
    write_atomic(
        &out.join("dataset.csv"),
        synthetic::dataset_csv(&ds).as_bytes(),
    )?;
    write_atomic(
        &out.join("annotations.conllu"),
        synthetic::annotations_conllu(&ds, &ann).as_bytes(),
    )?;
    println!(
        "wrote {} synthetic requirements to {}",
        ds.sample_size(),
        out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Experiment(args) => experiment(args),
        Command::Inspect {
            dataset,
            annotations,
        } => inspect(&dataset, annotations.as_deref()),
        Command::Synth { out, seed, small } => synth(&out, seed, small),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hc4rc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
