//! L2-regularized linear SVM with hinge loss.
//!
//! Binary problems are solved in the dual,
//!
//! ```text
//! min_a  1/2 a'Qa - e'a    s.t.  0 <= a_i <= C,  y'a = 0,   Q_ij = y_i y_j <x_i, x_j>
//! ```
//!
//! by sequential minimal optimization with second-order working-set
//! selection. The equality constraint keeps the bias unregularized, so the
//! returned `(w, b)` minimizes `1/2 |w|^2 + C sum_i max(0, 1 - y_i (w.x_i + b))`
//! exactly (up to tolerance). The solver is deterministic; no shuffling.

use std::collections::HashMap;
use std::io::{self, Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval;
use crate::vectorizer::SparseVector;

const TAU: f64 = 1e-12;
/// Above this many rows the Gram matrix is computed on demand.
const DENSE_GRAM_LIMIT: usize = 4096;
/// Pair updates per epoch: one per training row, but never so few that the
/// relative-decrease test sees only a handful of updates.
const MIN_EPOCH_LEN: usize = 1000;

#[derive(Debug, Error)]
pub enum SvmError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in input row {row}")]
    NonFiniteInput { row: usize },
    #[error("{inputs} inputs but {targets} targets")]
    LengthMismatch { inputs: usize, targets: usize },
    #[error("target {value} at row {row} is not +1 or -1")]
    InvalidTarget { row: usize, value: i8 },
    #[error("training set is empty")]
    EmptyInput,
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("invalid model file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    /// Regularization constant `C`.
    pub c: f64,
    pub tolerance: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            tolerance: 1e-4,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub positive_label: String,
    pub negative_label: String,
    pub config: SvmConfig,
    /// Primal objective at the returned `(w, b)`.
    pub objective: f64,
    /// Dual objective `1/2 |w|^2 - sum(a)` after each epoch, starting at 0.
    pub objective_trace: Vec<f64>,
    pub epochs: usize,
    pub converged: bool,
    /// All training targets had the same sign; the model is constant.
    pub single_class: bool,
}

impl LinearModel {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn decision(&self, x: &SparseVector) -> Result<f64, SvmError> {
        check_dim(self.dimension(), x)?;
        Ok(x.dot_dense(&self.weights) + self.bias)
    }

    pub fn predict_sign(&self, x: &SparseVector) -> Result<i8, SvmError> {
        Ok(if self.decision(x)? >= 0.0 { 1 } else { -1 })
    }

    pub fn with_labels(mut self, positive: &str, negative: &str) -> Self {
        self.positive_label = positive.to_owned();
        self.negative_label = negative.to_owned();
        self
    }
}

fn check_dim(expected: usize, x: &SparseVector) -> Result<(), SvmError> {
    if x.dimension() != expected {
        return Err(SvmError::DimensionMismatch {
            expected,
            found: x.dimension(),
        });
    }
    Ok(())
}

/// `1/2 |w|^2 + C sum max(0, 1 - y (w.x + b))`.
pub fn primal_objective(weights: &[f64], bias: f64, x: &[SparseVector], y: &[i8], c: f64) -> f64 {
    let reg = 0.5 * weights.iter().map(|w| w * w).sum::<f64>();
    let loss: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| (1.0 - f64::from(yi) * (xi.dot_dense(weights) + bias)).max(0.0))
        .sum();
    reg + c * loss
}

/// Inner products between training rows.
///
/// Identical rows (as produced by re-sampling) share one slot, and the
/// dense block of slot products is shared by every subset view.
pub(crate) struct Gram<'a> {
    rows: Vec<&'a SparseVector>,
    /// Slot of each row in the dense block.
    slot: Vec<usize>,
    dense: Option<Arc<DenseBlock>>,
}

struct DenseBlock {
    m: usize,
    k: Vec<f64>,
}

impl<'a> Gram<'a> {
    pub(crate) fn new(x: &'a [SparseVector]) -> Self {
        let rows: Vec<&SparseVector> = x.iter().collect();
        let mut seen: HashMap<Vec<(usize, u64)>, usize> = HashMap::new();
        let mut unique: Vec<&SparseVector> = Vec::new();
        let slot: Vec<usize> = rows
            .iter()
            .map(|r| {
                let key: Vec<(usize, u64)> =
                    r.entries().iter().map(|&(c, v)| (c, v.to_bits())).collect();
                *seen.entry(key).or_insert_with(|| {
                    unique.push(r);
                    unique.len() - 1
                })
            })
            .collect();
        let m = unique.len();
        let dense = (m <= DENSE_GRAM_LIMIT).then(|| {
            let mut k = vec![0.0; m * m];
            for i in 0..m {
                for j in i..m {
                    let v = unique[i].dot(unique[j]);
                    k[i * m + j] = v;
                    k[j * m + i] = v;
                }
            }
            Arc::new(DenseBlock { m, k })
        });
        Self { rows, slot, dense }
    }

    /// View of the selected rows; no products are recomputed.
    pub(crate) fn subset(&self, idx: &[usize]) -> Gram<'a> {
        Gram {
            rows: idx.iter().map(|&i| self.rows[i]).collect(),
            slot: idx.iter().map(|&i| self.slot[i]).collect(),
            dense: self.dense.clone(),
        }
    }

    fn diag(&self, i: usize) -> f64 {
        match &self.dense {
            Some(d) => d.k[self.slot[i] * d.m + self.slot[i]],
            None => self.rows[i].dot(self.rows[i]),
        }
    }

    fn row_into(&self, i: usize, out: &mut [f64]) {
        match &self.dense {
            Some(d) => {
                let row = &d.k[self.slot[i] * d.m..(self.slot[i] + 1) * d.m];
                for (o, &s) in out.iter_mut().zip(&self.slot) {
                    *o = row[s];
                }
            }
            None => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = self.rows[i].dot(self.rows[j]);
                }
            }
        }
    }
}

struct DualSolution {
    alpha: Vec<f64>,
    bias: f64,
    trace: Vec<f64>,
    epochs: usize,
    converged: bool,
}

fn dual_objective(alpha: &[f64], grad: &[f64]) -> f64 {
    0.5 * alpha
        .iter()
        .zip(grad)
        .map(|(a, g)| a * (g - 1.0))
        .sum::<f64>()
}

fn solve_dual(
    gram: &Gram<'_>,
    y: &[f64],
    c: f64,
    tolerance: f64,
    max_epochs: usize,
) -> DualSolution {
    let n = y.len();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let qd: Vec<f64> = (0..n).map(|i| gram.diag(i)).collect();
    let mut ki = vec![0.0; n];
    let mut kj = vec![0.0; n];
    let mut trace = vec![0.0];
    let epoch_len = n.max(MIN_EPOCH_LEN);
    let max_iter = epoch_len.saturating_mul(max_epochs.max(1));
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    let mut converged = false;
    let mut iter = 0;
    while iter < max_iter {
        // Maximal violating index from I_up.
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 {
                !upper(alpha[t])
            } else {
                !lower(alpha[t])
            };
            if in_up && v >= gmax {
                gmax = v;
                i = t;
            }
        }
        if i == usize::MAX {
            converged = true;
            break;
        }
        gram.row_into(i, &mut ki);

        // Second-order choice from I_low.
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            let in_low = if y[t] > 0.0 {
                !lower(alpha[t])
            } else {
                !upper(alpha[t])
            };
            if !in_low {
                continue;
            }
            let v = -y[t] * grad[t];
            gmax2 = gmax2.max(-v);
            let diff = gmax - v;
            if diff > 0.0 {
                let quad = qd[i] + qd[t] - 2.0 * ki[t];
                let quad = if quad > 0.0 { quad } else { TAU };
                let obj = -(diff * diff) / quad;
                if obj <= best {
                    best = obj;
                    j = t;
                }
            }
        }
        if gmax + gmax2 < tolerance || j == usize::MAX {
            converged = true;
            break;
        }
        gram.row_into(j, &mut kj);

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let q_ij = y[i] * y[j] * ki[j];
        if y[i] != y[j] {
            let quad = (qd[i] + qd[j] + 2.0 * q_ij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qd[i] + qd[j] - 2.0 * q_ij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }

        iter += 1;
        if iter % epoch_len == 0 {
            let prev = *trace.last().unwrap();
            let cur = dual_objective(&alpha, &grad);
            trace.push(cur);
            let scale = prev.abs().max(cur.abs()).max(f64::MIN_POSITIVE);
            if (prev - cur) / scale < tolerance {
                converged = true;
                break;
            }
        }
    }
    if iter % epoch_len != 0 || trace.len() == 1 {
        trace.push(dual_objective(&alpha, &grad));
    }

    DualSolution {
        bias: -offset(&alpha, &grad, y, c),
        alpha,
        trace,
        epochs: iter.div_ceil(epoch_len),
        converged,
    }
}

/// Threshold `rho` with decision `w.x - rho`, from the KKT conditions.
fn offset(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum) = (0usize, 0.0);
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}

fn validate(x: &[SparseVector], n_targets: usize) -> Result<usize, SvmError> {
    if x.len() != n_targets {
        return Err(SvmError::LengthMismatch {
            inputs: x.len(),
            targets: n_targets,
        });
    }
    let first = x.first().ok_or(SvmError::EmptyInput)?;
    let dim = first.dimension();
    for (row, xi) in x.iter().enumerate() {
        check_dim(dim, xi)?;
        if xi.entries().iter().any(|e| !e.1.is_finite()) {
            return Err(SvmError::NonFiniteInput { row });
        }
    }
    Ok(dim)
}

/// Trains a binary classifier on targets in `{+1, -1}`.
pub fn train_binary(
    x: &[SparseVector],
    y: &[i8],
    config: &SvmConfig,
) -> Result<LinearModel, SvmError> {
    validate(x, y.len())?;
    train_binary_with(&Gram::new(x), x, y, config)
}

fn train_binary_with(
    gram: &Gram<'_>,
    x: &[SparseVector],
    y: &[i8],
    config: &SvmConfig,
) -> Result<LinearModel, SvmError> {
    let dim = validate(x, y.len())?;
    if let Some((row, &value)) = y.iter().enumerate().find(|(_, v)| **v != 1 && **v != -1) {
        return Err(SvmError::InvalidTarget { row, value });
    }
    let mk = |weights, bias, objective, trace, epochs, converged, single_class| LinearModel {
        weights,
        bias,
        positive_label: "+1".into(),
        negative_label: "-1".into(),
        config: *config,
        objective,
        objective_trace: trace,
        epochs,
        converged,
        single_class,
    };
    if y.iter().all(|&v| v == y[0]) {
        // w = 0 and b = y0 attains zero loss, which is optimal.
        return Ok(mk(
            vec![0.0; dim],
            f64::from(y[0]),
            0.0,
            vec![0.0],
            0,
            true,
            true,
        ));
    }

    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    let sol = solve_dual(gram, &yf, config.c, config.tolerance, config.max_epochs);
    let mut weights = vec![0.0; dim];
    for ((xi, &a), &yi) in x.iter().zip(&sol.alpha).zip(&yf) {
        if a != 0.0 {
            for &(col, v) in xi.entries() {
                weights[col] += a * yi * v;
            }
        }
    }
    let objective = primal_objective(&weights, sol.bias, x, y, config.c);
    Ok(mk(
        weights,
        sol.bias,
        objective,
        sol.trace,
        sol.epochs,
        sol.converged,
        false,
    ))
}

/// One-vs-rest composition over sorted class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassModel {
    pub class_labels: Vec<String>,
    pub per_class_models: Vec<LinearModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    /// Decision value per class, aligned with `class_labels`.
    pub scores: Vec<(String, f64)>,
}

impl MulticlassModel {
    pub fn dimension(&self) -> usize {
        self.per_class_models
            .first()
            .map_or(0, LinearModel::dimension)
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Prediction, SvmError> {
        check_dim(self.dimension(), x)?;
        let scores: Vec<(String, f64)> = self
            .class_labels
            .iter()
            .zip(&self.per_class_models)
            .map(|(l, m)| Ok((l.clone(), m.decision(x)?)))
            .collect::<Result<_, SvmError>>()?;
        Ok(Prediction {
            label: argmax_label(&scores).to_owned(),
            scores,
        })
    }

    pub fn predict_label(&self, x: &SparseVector) -> Result<String, SvmError> {
        Ok(self.predict(x)?.label)
    }
}

/// Highest score; ties go to the earliest entry.
pub fn argmax_label(scores: &[(String, f64)]) -> &str {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if s.1 > scores[best].1 {
            best = i;
        }
    }
    &scores[best].0
}

pub fn train_multiclass(
    x: &[SparseVector],
    y: &[String],
    config: &SvmConfig,
) -> Result<MulticlassModel, SvmError> {
    validate(x, y.len())?;
    train_multiclass_with(&Gram::new(x), x, y, config)
}

fn train_multiclass_with(
    gram: &Gram<'_>,
    x: &[SparseVector],
    y: &[String],
    config: &SvmConfig,
) -> Result<MulticlassModel, SvmError> {
    validate(x, y.len())?;
    let mut labels: Vec<String> = y.to_vec();
    labels.sort();
    labels.dedup();
    let per_class_models = labels
        .par_iter()
        .enumerate()
        .map(|(k, label)| {
            let targets: Vec<i8> = y.iter().map(|l| if l == label { 1 } else { -1 }).collect();
            let cfg = SvmConfig {
                seed: config.seed.wrapping_add(k as u64),
                ..*config
            };
            train_binary_with(gram, x, &targets, &cfg).map(|m| m.with_labels(label, "rest"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MulticlassModel {
        class_labels: labels,
        per_class_models,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best_c: f64,
    /// `(C, mean inner-fold macro-F1)` in grid order.
    pub scores: Vec<(f64, f64)>,
    pub inner_folds: usize,
}

/// Selects `C` by stratified inner cross-validation scored with macro-F1.
///
/// Ties go to the smallest `C`. With fewer than two usable folds the smallest
/// grid value is returned unscored.
pub fn grid_search(
    x: &[SparseVector],
    y: &[String],
    grid: &[f64],
    inner_folds: usize,
    seed: u64,
    base: &SvmConfig,
) -> Result<GridSearchResult, SvmError> {
    validate(x, y.len())?;
    let mut grid: Vec<f64> = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let smallest = *grid.first().ok_or(SvmError::EmptyGrid)?;
    let k = inner_folds.min(x.len());
    if grid.len() == 1 || k < 2 {
        return Ok(GridSearchResult {
            best_c: smallest,
            scores: Vec::new(),
            inner_folds: k,
        });
    }

    let folds = eval::stratified_fold_indices(y, k, seed)?;
    let gram = Gram::new(x);
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..x.len()).partition(|&i| folds[i] == f);
            (train, test)
        })
        .filter(|(train, test)| !train.is_empty() && !test.is_empty())
        .collect();

    let mut labels: Vec<String> = y.to_vec();
    labels.sort();
    labels.dedup();

    let mut scores = Vec::with_capacity(grid.len());
    for &c in &grid {
        let cfg = base.with_c(c);
        let per_fold = splits
            .par_iter()
            .map(|(train, test)| {
                let sub = gram.subset(train);
                let xt: Vec<SparseVector> = train.iter().map(|&i| x[i].clone()).collect();
                let yt: Vec<String> = train.iter().map(|&i| y[i].clone()).collect();
                let model = train_multiclass_with(&sub, &xt, &yt, &cfg)?;
                let truth: Vec<String> = test.iter().map(|&i| y[i].clone()).collect();
                let pred = test
                    .iter()
                    .map(|&i| model.predict_label(&x[i]))
                    .collect::<Result<Vec<_>, _>>()?;
                let cm = eval::confusion_matrix(&truth, &pred, &labels)?;
                Ok(eval::macro_metrics(&eval::per_class_prf(&cm)).f1)
            })
            .collect::<Result<Vec<f64>, SvmError>>()?;
        let mean = per_fold.iter().sum::<f64>() / per_fold.len().max(1) as f64;
        scores.push((c, mean));
    }
    let mut best = scores[0];
    for &s in &scores[1..] {
        if s.1 > best.1 {
            best = s;
        }
    }
    Ok(GridSearchResult {
        best_c: best.0,
        scores,
        inner_folds: k,
    })
}

const MAGIC: &[u8; 8] = b"HC4RSVM\0";
const FORMAT_VERSION: u32 = 1;
const KIND_OVR: u8 = 0;
const KIND_BINARY: u8 = 1;

/// A serialized model: either a one-vs-rest multiclass model or a binary one.
#[derive(Debug, Clone, PartialEq)]
pub enum StoredModel {
    Multiclass(MulticlassModel),
    Binary(LinearModel),
}

/// Writes the versioned flat model format (all numbers little-endian):
/// magic, version, kind, dimension, config, label list, then per model a
/// single-class flag, bias, objective and the weight array as `f64`s.
pub fn write_model(model: &StoredModel, mut w: impl Write) -> Result<(), SvmError> {
    let (kind, labels, models): (u8, Vec<&str>, Vec<&LinearModel>) = match model {
        StoredModel::Multiclass(m) => (
            KIND_OVR,
            m.class_labels.iter().map(String::as_str).collect(),
            m.per_class_models.iter().collect(),
        ),
        StoredModel::Binary(m) => (
            KIND_BINARY,
            vec![m.positive_label.as_str(), m.negative_label.as_str()],
            vec![m],
        ),
    };
    let config = models.first().map(|m| m.config).unwrap_or_default();
    let dim = models.first().map_or(0, |m| m.dimension());
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&[kind])?;
    w.write_all(&(dim as u64).to_le_bytes())?;
    w.write_all(&config.c.to_le_bytes())?;
    w.write_all(&config.tolerance.to_le_bytes())?;
    w.write_all(&(config.max_epochs as u64).to_le_bytes())?;
    w.write_all(&config.seed.to_le_bytes())?;
    w.write_all(&(labels.len() as u32).to_le_bytes())?;
    for l in &labels {
        w.write_all(&(l.len() as u32).to_le_bytes())?;
        w.write_all(l.as_bytes())?;
    }
    w.write_all(&(models.len() as u32).to_le_bytes())?;
    for m in models {
        w.write_all(&[u8::from(m.single_class)])?;
        w.write_all(&m.bias.to_le_bytes())?;
        w.write_all(&m.objective.to_le_bytes())?;
        for v in &m.weights {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_model(mut r: impl Read) -> Result<StoredModel, SvmError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SvmError::Format("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(SvmError::Format(format!("unsupported version {version}")));
    }
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    let dim = read_u64(&mut r)? as usize;
    let config = SvmConfig {
        c: read_f64(&mut r)?,
        tolerance: read_f64(&mut r)?,
        max_epochs: read_u64(&mut r)? as usize,
        seed: read_u64(&mut r)?,
    };
    let n_labels = read_u32(&mut r)? as usize;
    let mut labels = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        let len = read_u32(&mut r)? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf)?;
        labels.push(String::from_utf8(buf).map_err(|e| SvmError::Format(e.to_string()))?);
    }
    let n_models = read_u32(&mut r)? as usize;
    let mut models = Vec::with_capacity(n_models);
    for _ in 0..n_models {
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let bias = read_f64(&mut r)?;
        let objective = read_f64(&mut r)?;
        let weights = (0..dim)
            .map(|_| read_f64(&mut r))
            .collect::<Result<Vec<_>, _>>()?;
        models.push(LinearModel {
            weights,
            bias,
            positive_label: String::new(),
            negative_label: String::new(),
            config,
            objective,
            objective_trace: Vec::new(),
            epochs: 0,
            converged: true,
            single_class: flag[0] != 0,
        });
    }
    match kind[0] {
        KIND_OVR => {
            if models.len() != labels.len() {
                return Err(SvmError::Format("label/model count mismatch".into()));
            }
            let per_class_models = models
                .into_iter()
                .zip(&labels)
                .map(|(m, l)| m.with_labels(l, "rest"))
                .collect();
            Ok(StoredModel::Multiclass(MulticlassModel {
                class_labels: labels,
                per_class_models,
            }))
        }
        KIND_BINARY => {
            if models.len() != 1 || labels.len() != 2 {
                return Err(SvmError::Format(
                    "binary model needs 2 labels and 1 weight array".into(),
                ));
            }
            let m = models.into_iter().next().expect("one model");
            Ok(StoredModel::Binary(m.with_labels(&labels[0], &labels[1])))
        }
        k => Err(SvmError::Format(format!("unknown model kind {k}"))),
    }
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> io::Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}
