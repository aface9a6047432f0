//! Hierarchical classification of software requirements.
//!
//! Requirements come in as labeled CSV rows plus dependency-parsed
//! CoNLL-U annotations. Semantic roles pick the words that become features,
//! TF-IDF turns them into sparse vectors, and linear SVMs classify them,
//! either flat or through a two-level majority/minority hierarchy.

pub mod baselines;
pub mod corpus;
pub mod eval;
pub mod hierarchy;
pub mod sr4fs;
pub mod svm;
pub mod synthetic;
pub mod training;
pub mod vectorizer;

pub use baselines::{
    oversample, train_flat, undersample, FlatModel, ResampledTrainSet, UndersampleTarget,
};
pub use corpus::{
    load_annotations, load_dataset, AnnotatedSentence, AnnotatedToken, Annotations, CorpusError,
    Dataset, Requirement, StopWords,
};
pub use eval::{
    run_cv, run_experiment, ConfusionMatrix, CvError, EvalError, ExperimentConfig,
    ExperimentReport, FoldKind, FoldPlan, Strategy,
};
pub use hierarchy::{
    decompose, predict_hierarchical, train_hierarchical, DecompositionPlan, HierarchicalModel,
    HierarchyConfig, HierarchyError,
};
pub use sr4fs::{FeatureExtractor, FeatureMode, FeatureSet, RoleAssignment, SemanticRole};
pub use svm::{LinearModel, MulticlassModel, SvmConfig, SvmError};
pub use training::{GridConfig, TrainConfig, TrainingProvenance};
pub use vectorizer::{build_vocabulary, vectorize, SparseVector, Vocabulary, Weighting};
