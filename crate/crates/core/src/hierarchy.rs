//! Dataset decomposition and the two-level hierarchical classifier.
//!
//! Classes are ranked by size and the largest ones are moved into a
//! majority subset until it holds at least half of the training data; the
//! rest form the minority subset. A binary router decides between the two
//! subsets and a multiclass model inside each subset picks the final label.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{class_counts, Requirement};
use crate::sr4fs::FeatureSet;
use crate::svm::{self, GridSearchResult, LinearModel, MulticlassModel, StoredModel, SvmError};
use crate::training::{
    aligned_featuresets, fit_multiclass, select_c, AlignmentError, TrainConfig, TrainingProvenance,
};
use crate::vectorizer::{build_vocabulary, vectorize, SparseVector, VectorizerError, Vocabulary};

pub const MAJ: &str = "maj";
pub const MIN: &str = "min";

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error("no class has any instances")]
    EmptyInput,
    #[error(transparent)]
    Alignment(#[from] AlignmentError),
    #[error(transparent)]
    Vectorizer(#[from] VectorizerError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error("model container: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionPlan {
    /// In rank order (count descending, label ascending).
    pub maj_classes: Vec<String>,
    pub min_classes: Vec<String>,
    pub maj_count: usize,
    pub min_count: usize,
    pub total: usize,
    /// Every class with its count, in rank order.
    pub ranked: Vec<(String, usize)>,
}

impl DecompositionPlan {
    pub fn is_maj(&self, label: &str) -> bool {
        self.maj_classes.iter().any(|c| c == label)
    }

    pub fn is_degenerate(&self) -> bool {
        self.min_classes.is_empty()
    }

    /// Human-readable ranking with cumulative counts and the cut point.
    pub fn trace(&self) -> String {
        let mut out = format!(
            "total = {}, half = {}\n",
            self.total,
            self.total as f64 / 2.0
        );
        let mut cum = 0;
        for (i, (label, n)) in self.ranked.iter().enumerate() {
            cum += n;
            let side = if i < self.maj_classes.len() { MAJ } else { MIN };
            out.push_str(&format!(
                "{:>3}. {label:<8} {n:>6} cumulative {cum:>6}  {side}\n",
                i + 1
            ));
            if i + 1 == self.maj_classes.len() {
                out.push_str(&format!(
                    "     -- cut: {cum} >= {} --\n",
                    self.total as f64 / 2.0
                ));
            }
        }
        let min = if self.min_classes.is_empty() {
            "min = ∅ (degenerate: no minority subset)".to_owned()
        } else {
            format!(
                "min = {} classes ({})",
                self.min_classes.len(),
                self.min_count
            )
        };
        out.push_str(&format!(
            "maj = {{{}}} ({}), {min}\n",
            self.maj_classes.join(", "),
            self.maj_count
        ));
        out
    }
}

/// Splits classes into majority and minority subsets.
///
/// Classes are added to the majority subset in rank order until its size
/// reaches half of the total (`2 * maj_count >= total`).
pub fn decompose(counts: &BTreeMap<String, usize>) -> Result<DecompositionPlan, HierarchyError> {
    let total: usize = counts.values().sum();
    if total == 0 {
        return Err(HierarchyError::EmptyInput);
    }
    let mut ranked: Vec<(String, usize)> = counts.iter().map(|(l, n)| (l.clone(), *n)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut maj_count = 0;
    let mut cut = 0;
    while 2 * maj_count < total {
        maj_count += ranked[cut].1;
        cut += 1;
    }
    Ok(DecompositionPlan {
        maj_classes: ranked[..cut].iter().map(|c| c.0.clone()).collect(),
        min_classes: ranked[cut..].iter().map(|c| c.0.clone()).collect(),
        maj_count,
        min_count: total - maj_count,
        total,
        ranked,
    })
}

#[derive(Debug, Clone, Default)]
pub struct HierarchyConfig {
    pub train: TrainConfig,
    /// Use this plan instead of decomposing the training split; the ids are
    /// the requirements whose labels produced it.
    pub fixed_plan: Option<(DecompositionPlan, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalModel {
    pub plan: DecompositionPlan,
    pub vocab: Vocabulary,
    /// Router: positive = majority subset. Absent when the plan is degenerate.
    pub f_super: Option<LinearModel>,
    pub f_maj: MulticlassModel,
    pub f_min: Option<MulticlassModel>,
    pub warnings: Vec<String>,
    pub provenance: TrainingProvenance,
    /// Grid-search outcome per classifier, when tuning was enabled.
    pub tuning: BTreeMap<String, GridSearchResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Majority,
    Minority,
    /// Degenerate model without a router.
    Flat,
}

impl HierarchicalModel {
    pub fn dimension(&self) -> usize {
        self.vocab.dimension()
    }

    pub fn route(&self, x: &SparseVector) -> Result<Route, SvmError> {
        match (&self.f_super, &self.f_min) {
            (Some(router), Some(_)) => Ok(if router.decision(x)? >= 0.0 {
                Route::Majority
            } else {
                Route::Minority
            }),
            _ => {
                if x.dimension() != self.dimension() {
                    return Err(SvmError::DimensionMismatch {
                        expected: self.dimension(),
                        found: x.dimension(),
                    });
                }
                Ok(Route::Flat)
            }
        }
    }

    pub fn predict_routed(&self, x: &SparseVector) -> Result<(Route, String), SvmError> {
        let route = self.route(x)?;
        let label = match (route, &self.f_min) {
            (Route::Minority, Some(f_min)) => f_min.predict_label(x)?,
            _ => self.f_maj.predict_label(x)?,
        };
        Ok((route, label))
    }

    pub fn predict_features(&self, fs: &FeatureSet) -> Result<String, SvmError> {
        predict_hierarchical(self, &vectorize(fs, &self.vocab))
    }
}

pub fn predict_hierarchical(
    model: &HierarchicalModel,
    x: &SparseVector,
) -> Result<String, SvmError> {
    model.predict_routed(x).map(|(_, label)| label)
}

fn pick<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

pub fn train_hierarchical(
    requirements: &[Requirement],
    featuresets: &[FeatureSet],
    config: &HierarchyConfig,
) -> Result<HierarchicalModel, HierarchyError> {
    if requirements.is_empty() {
        return Err(HierarchyError::EmptyInput);
    }
    let train_fs = aligned_featuresets(requirements, featuresets)?;
    let ids: Vec<String> = requirements.iter().map(|r| r.req_id.clone()).collect();
    let labels: Vec<String> = requirements.iter().map(|r| r.label.clone()).collect();

    let (plan, plan_docs) = match &config.fixed_plan {
        Some((plan, source)) => (plan.clone(), source.clone()),
        None => (
            decompose(&class_counts(labels.iter().map(String::as_str)))?,
            ids.clone(),
        ),
    };
    let vocab = build_vocabulary(&train_fs, config.train.min_df, config.train.weighting)?;
    let x: Vec<SparseVector> = train_fs.iter().map(|f| vectorize(f, &vocab)).collect();

    let mut warnings = Vec::new();
    let mut tuning = BTreeMap::new();
    let mut provenance = TrainingProvenance {
        vocabulary_docs: ids.clone(),
        plan_docs,
        model_docs: ids.clone(),
        ..Default::default()
    };
    if config.train.grid.is_some() {
        provenance.grid_docs = ids.clone();
    }

    let (maj_idx, min_idx): (Vec<usize>, Vec<usize>) =
        (0..labels.len()).partition(|&i| plan.is_maj(&labels[i]));

    if min_idx.is_empty() || maj_idx.is_empty() {
        let msg = format!(
            "decomposition has an empty {} subset; falling back to a flat model",
            if min_idx.is_empty() { MIN } else { MAJ }
        );
        log::warn!("{msg}");
        warnings.push(msg);
        let (f_maj, tuned) = fit_multiclass(&x, &labels, &config.train)?;
        if let Some(t) = tuned {
            tuning.insert("f_flat".to_owned(), t);
        }
        return Ok(HierarchicalModel {
            plan,
            vocab,
            f_super: None,
            f_maj,
            f_min: None,
            warnings,
            provenance,
            tuning,
        });
    }

    let min_labels = pick(&labels, &min_idx);
    let distinct_min = class_counts(min_labels.iter().map(String::as_str)).len();
    if distinct_min <= 1 {
        let msg = format!("minority subset has {distinct_min} class; its classifier is constant");
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let route_labels: Vec<String> = labels
        .iter()
        .map(|l| if plan.is_maj(l) { MAJ } else { MIN }.to_owned())
        .collect();
    let targets: Vec<i8> = route_labels
        .iter()
        .map(|l| if l == MAJ { 1 } else { -1 })
        .collect();

    let (router_cfg, router_tuned) = select_c(&x, &route_labels, &config.train)?;
    let (f_super, (f_maj, maj_tuned), (f_min, min_tuned)) = {
        let x_maj = pick(&x, &maj_idx);
        let x_min = pick(&x, &min_idx);
        let y_maj = pick(&labels, &maj_idx);
        let (a, (b, c)) = rayon::join(
            || svm::train_binary(&x, &targets, &router_cfg),
            || {
                rayon::join(
                    || fit_multiclass(&x_maj, &y_maj, &config.train),
                    || fit_multiclass(&x_min, &min_labels, &config.train),
                )
            },
        );
        (a?, b?, c?)
    };
    for (name, t) in [
        ("f_super", router_tuned),
        ("f_maj", maj_tuned),
        ("f_min", min_tuned),
    ] {
        if let Some(t) = t {
            tuning.insert(name.to_owned(), t);
        }
    }

    Ok(HierarchicalModel {
        plan,
        vocab,
        f_super: Some(f_super.with_labels(MAJ, MIN)),
        f_maj,
        f_min: Some(f_min),
        warnings,
        provenance,
        tuning,
    })
}

const CONTAINER_MAGIC: &[u8; 8] = b"HC4RHIE\0";
const CONTAINER_VERSION: u32 = 1;

/// Everything except the classifier weights, stored as JSON in the container.
#[derive(Serialize, Deserialize)]
struct Manifest {
    plan: DecompositionPlan,
    vocab: Vocabulary,
    warnings: Vec<String>,
    provenance: TrainingProvenance,
    tuning: BTreeMap<String, GridSearchResult>,
    /// Byte length of the f_super, f_maj and f_min sections; 0 = absent.
    sections: [u64; 3],
}

/// Writes one container file: magic, version, manifest length and JSON
/// manifest, then the three classifiers in the svm model format.
pub fn save_hierarchical(
    model: &HierarchicalModel,
    mut w: impl Write,
) -> Result<(), HierarchyError> {
    let encode = |m: Option<StoredModel>| -> Result<Vec<u8>, SvmError> {
        let mut buf = Vec::new();
        if let Some(m) = m {
            svm::write_model(&m, &mut buf)?;
        }
        Ok(buf)
    };
    let parts = [
        encode(model.f_super.clone().map(StoredModel::Binary))?,
        encode(Some(StoredModel::Multiclass(model.f_maj.clone())))?,
        encode(model.f_min.clone().map(StoredModel::Multiclass))?,
    ];
    let manifest = Manifest {
        plan: model.plan.clone(),
        vocab: model.vocab.clone(),
        warnings: model.warnings.clone(),
        provenance: model.provenance.clone(),
        tuning: model.tuning.clone(),
        sections: [
            parts[0].len() as u64,
            parts[1].len() as u64,
            parts[2].len() as u64,
        ],
    };
    let json = serde_json::to_vec(&manifest).map_err(|e| HierarchyError::Format(e.to_string()))?;
    w.write_all(CONTAINER_MAGIC)?;
    w.write_all(&CONTAINER_VERSION.to_le_bytes())?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    for p in &parts {
        w.write_all(p)?;
    }
    Ok(())
}

pub fn load_hierarchical(mut r: impl Read) -> Result<HierarchicalModel, HierarchyError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CONTAINER_MAGIC {
        return Err(HierarchyError::Format("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != CONTAINER_VERSION {
        return Err(HierarchyError::Format(format!(
            "unsupported version {version}"
        )));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let mut json = vec![0u8; u64::from_le_bytes(b8) as usize];
    r.read_exact(&mut json)?;
    let manifest: Manifest =
        serde_json::from_slice(&json).map_err(|e| HierarchyError::Format(e.to_string()))?;

    let mut section = |len: u64| -> Result<Option<StoredModel>, HierarchyError> {
        if len == 0 {
            return Ok(None);
        }
        let mut buf = vec![0u8; len as usize];
        r.read_exact(&mut buf)?;
        Ok(Some(svm::read_model(buf.as_slice())?))
    };
    let [s_super, s_maj, s_min] = manifest.sections;
    let f_super = match section(s_super)? {
        None => None,
        Some(StoredModel::Binary(m)) => Some(m),
        Some(_) => {
            return Err(HierarchyError::Format(
                "router is not a binary model".into(),
            ))
        }
    };
    let f_maj = match section(s_maj)? {
        Some(StoredModel::Multiclass(m)) => m,
        _ => return Err(HierarchyError::Format("missing majority model".into())),
    };
    let f_min = match section(s_min)? {
        None => None,
        Some(StoredModel::Multiclass(m)) => Some(m),
        Some(_) => {
            return Err(HierarchyError::Format(
                "minority model is not multiclass".into(),
            ))
        }
    };
    Ok(HierarchicalModel {
        plan: manifest.plan,
        vocab: manifest.vocab,
        f_super,
        f_maj,
        f_min,
        warnings: manifest.warnings,
        provenance: manifest.provenance,
        tuning: manifest.tuning,
    })
}
