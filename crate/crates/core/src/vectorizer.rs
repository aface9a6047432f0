//! Vocabulary construction and sparse TF-IDF vectors.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sr4fs::FeatureSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VectorizerError {
    #[error("no term reaches document frequency {min_df} in {documents} training documents")]
    EmptyVocabulary { min_df: usize, documents: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Raw count times smoothed idf.
    #[default]
    TfIdf,
    /// Raw count only.
    Tf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    document_frequency: Vec<usize>,
    corpus_size: usize,
    weighting: Weighting,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    terms: Vec<String>,
    document_frequency: Vec<usize>,
    corpus_size: usize,
    weighting: Weighting,
}

impl From<VocabularyRepr> for Vocabulary {
    fn from(r: VocabularyRepr) -> Self {
        Vocabulary::from_parts(r.terms, r.document_frequency, r.corpus_size, r.weighting)
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr {
            terms: v.terms,
            document_frequency: v.document_frequency,
            corpus_size: v.corpus_size,
            weighting: v.weighting,
        }
    }
}

impl Vocabulary {
    pub fn from_parts(
        terms: Vec<String>,
        document_frequency: Vec<usize>,
        corpus_size: usize,
        weighting: Weighting,
    ) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Self {
            terms,
            index,
            document_frequency,
            corpus_size,
            weighting,
        }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn dimension(&self) -> usize {
        self.terms.len()
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.column(term).map(|c| self.document_frequency[c])
    }

    /// `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, column: usize) -> f64 {
        let n = self.corpus_size as f64;
        let df = self.document_frequency[column] as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }
}

/// Vocabulary over `featuresets` (which must all come from the training split).
pub fn build_vocabulary(
    featuresets: &[FeatureSet],
    min_df: usize,
    weighting: Weighting,
) -> Result<Vocabulary, VectorizerError> {
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for fs in featuresets {
        let distinct: BTreeSet<&str> = fs.features.iter().map(String::as_str).collect();
        for t in distinct {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let (terms, dfs): (Vec<String>, Vec<usize>) = df
        .into_iter()
        .filter(|(_, d)| *d >= min_df.max(1))
        .map(|(t, d)| (t.to_owned(), d))
        .unzip();
    if terms.is_empty() {
        return Err(VectorizerError::EmptyVocabulary {
            min_df,
            documents: featuresets.len(),
        });
    }
    Ok(Vocabulary::from_parts(
        terms,
        dfs,
        featuresets.len(),
        weighting,
    ))
}

/// Sparse row vector with strictly increasing columns.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
    dimension: usize,
}

impl SparseVector {
    /// Sorts and merges duplicate columns; drops explicit zeros.
    ///
    /// Panics if a column is out of range or a weight is not finite.
    pub fn new(dimension: usize, mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (c, w) in entries {
            assert!(c < dimension, "column {c} out of range {dimension}");
            assert!(w.is_finite(), "non-finite weight at column {c}");
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += w,
                _ => merged.push((c, w)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        Self {
            entries: merged,
            dimension,
        }
    }

    pub fn from_dense(values: &[f64]) -> Self {
        Self::new(
            values.len(),
            values
                .iter()
                .copied()
                .enumerate()
                .filter(|e| e.1 != 0.0)
                .collect(),
        )
    }

    pub fn zeros(dimension: usize) -> Self {
        Self {
            entries: Vec::new(),
            dimension,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt()
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(c, w)| w * dense[c]).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dimension];
        for &(c, w) in &self.entries {
            v[c] = w;
        }
        v
    }

    fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for e in &mut self.entries {
                e.1 /= n;
            }
        }
        self
    }
}

/// Weighted, L2-normalized vector for `featureset`. Unknown terms are ignored.
pub fn vectorize(featureset: &FeatureSet, vocab: &Vocabulary) -> SparseVector {
    let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
    for term in &featureset.features {
        if let Some(c) = vocab.column(term) {
            *tf.entry(c).or_insert(0.0) += 1.0;
        }
    }
    let entries = tf
        .into_iter()
        .map(|(c, n)| {
            let w = match vocab.weighting {
                Weighting::TfIdf => n * vocab.idf(c),
                Weighting::Tf => n,
            };
            (c, w)
        })
        .collect();
    SparseVector::new(vocab.dimension(), entries).normalized()
}
