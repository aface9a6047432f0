use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldKind {
    /// Class-stratified folds over requirements.
    Stratified,
    /// Folds made of whole projects.
    Project,
}

/// Assignment of every requirement to one test fold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub kind: FoldKind,
    pub k: usize,
    pub seed: u64,
    pub req_ids: Vec<String>,
    /// Fold index per requirement, aligned with `req_ids`.
    pub folds: Vec<usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, req_id: &str) -> Option<usize> {
        self.req_ids
            .iter()
            .position(|r| r == req_id)
            .map(|i| self.folds[i])
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len())
            .filter(|&i| self.folds[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len())
            .filter(|&i| self.folds[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.folds {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Stratified fold index per item: each class is shuffled with the seed and
/// dealt round-robin, continuing the deal where the previous class stopped.
pub fn stratified_fold_indices(
    labels: &[String],
    k: usize,
    seed: u64,
) -> Result<Vec<usize>, EvalError> {
    let n = labels.len();
    if k == 0 || k > n {
        return Err(EvalError::KTooLarge { k, n });
    }
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(l.as_str()).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0; n];
    let mut next = 0;
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(folds)
}

pub fn plan_stratified_kfold(
    req_ids: &[String],
    labels: &[String],
    k: usize,
    seed: u64,
) -> Result<FoldPlan, EvalError> {
    assert_eq!(req_ids.len(), labels.len(), "ids and labels must align");
    Ok(FoldPlan {
        kind: FoldKind::Stratified,
        k,
        seed,
        req_ids: req_ids.to_vec(),
        folds: stratified_fold_indices(labels, k, seed)?,
    })
}

/// Project-grouped folds.
///
/// Projects are taken largest first (ties by id) and each goes to the fold
/// with the fewest requirements (ties by index) among folds that still have
/// room. Room is a project quota: `P mod k` folds take `ceil(P/k)` projects
/// and the rest `floor(P/k)`, so every fold ends up with one of those two
/// project counts.
pub fn plan_project_fold(
    req_ids: &[String],
    projects: &[String],
    k: usize,
    seed: u64,
) -> Result<FoldPlan, EvalError> {
    assert_eq!(req_ids.len(), projects.len(), "ids and projects must align");
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for p in projects {
        *sizes.entry(p.as_str()).or_insert(0) += 1;
    }
    let p = sizes.len();
    if k == 0 || p < k {
        return Err(EvalError::TooFewProjects { projects: p, k });
    }
    let mut order: Vec<(&str, usize)> = sizes.into_iter().collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

    let (lo, extra) = (p / k, p % k);
    let mut load = vec![0usize; k];
    let mut members = vec![0usize; k];
    let mut full_large = 0;
    let mut assignment: BTreeMap<&str, usize> = BTreeMap::new();
    for (project, size) in order {
        let fold = (0..k)
            .filter(|&f| members[f] < lo || (members[f] == lo && full_large < extra))
            .min_by_key(|&f| (load[f], f))
            .expect("quota leaves room for every project");
        if members[fold] == lo {
            full_large += 1;
        }
        members[fold] += 1;
        load[fold] += size;
        assignment.insert(project, fold);
    }
    Ok(FoldPlan {
        kind: FoldKind::Project,
        k,
        seed,
        req_ids: req_ids.to_vec(),
        folds: projects.iter().map(|p| assignment[p.as_str()]).collect(),
    })
}
