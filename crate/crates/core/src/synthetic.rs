//! Seeded synthetic corpora with parsed annotations.
//!
//! Each requirement is a short parsed clause whose verb, object and goal
//! words are usually drawn from a class-specific pool, so the classes are
//! learnable but overlap through a shared pool.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    AnnotatedSentence, AnnotatedToken, Annotations, CorpusError, Dataset, Requirement,
};

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    /// Label and number of requirements.
    pub classes: Vec<(String, usize)>,
    pub projects: usize,
    /// Probability that a content word comes from the shared pool.
    pub noise: f64,
    /// Distinct words per class pool.
    pub pool_size: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Class sizes with the same skew as the twelve-class requirements corpus
    /// (969 items), spread over 47 projects.
    pub fn promise_like(seed: u64) -> Self {
        let classes = [
            ("F", 444),
            ("SE", 125),
            ("US", 85),
            ("O", 77),
            ("PE", 67),
            ("LF", 49),
            ("A", 31),
            ("MN", 24),
            ("SC", 22),
            ("FT", 18),
            ("L", 15),
            ("PO", 12),
        ];
        Self {
            classes: classes.iter().map(|(l, n)| (l.to_string(), *n)).collect(),
            projects: 47,
            noise: 0.35,
            pool_size: 12,
            seed,
        }
    }

    pub fn small(seed: u64) -> Self {
        Self {
            classes: vec![
                ("F".into(), 30),
                ("NF".into(), 16),
                ("SE".into(), 8),
                ("US".into(), 6),
            ],
            projects: 6,
            noise: 0.2,
            pool_size: 5,
            seed,
        }
    }
}

fn token(index: usize, word: &str, upos: &str, head: usize, deprel: &str) -> AnnotatedToken {
    AnnotatedToken {
        index,
        form: word.to_owned(),
        lemma: word.to_lowercase(),
        upos: upos.to_owned(),
        head,
        deprel: deprel.to_owned(),
        entity: None,
    }
}

/// "The system shall VERB the [ADJ] OBJECT to the GOAL ."
fn sentence(
    req_id: &str,
    verb: &str,
    adj: Option<&str>,
    object: &str,
    goal: &str,
) -> AnnotatedSentence {
    let mut t = vec![
        token(1, "The", "DET", 2, "det"),
        token(2, "system", "NOUN", 4, "nsubj"),
        token(3, "shall", "AUX", 4, "aux"),
        token(4, verb, "VERB", 0, "root"),
        token(5, "the", "DET", 0, "det"),
    ];
    let obj = if adj.is_some() { 7 } else { 6 };
    t[4].head = obj;
    if let Some(a) = adj {
        t.push(token(6, a, "ADJ", 7, "amod"));
    }
    let o = obj;
    t.push(token(o, object, "NOUN", 4, "obj"));
    t.push(token(o + 1, "to", "ADP", o + 3, "case"));
    t.push(token(o + 2, "the", "DET", o + 3, "det"));
    t.push(token(o + 3, goal, "NOUN", 4, "obl"));
    t.push(token(o + 4, ".", "PUNCT", 4, "punct"));
    AnnotatedSentence {
        req_id: req_id.to_owned(),
        tokens: t,
    }
}

fn pool(prefix: &str, kind: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{kind}{i}")).collect()
}

/// Dataset and annotations; ids follow the `<project>-<row>` scheme so the
/// pair survives a CSV round trip unchanged.
pub fn generate(spec: &SyntheticSpec) -> Result<(Dataset, Annotations), CorpusError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shared: BTreeMap<&str, Vec<String>> = ["verb", "obj", "goal", "adj"]
        .into_iter()
        .map(|k| (k, pool("common", k, spec.pool_size)))
        .collect();

    let mut labels: Vec<&str> = spec
        .classes
        .iter()
        .flat_map(|(l, n)| std::iter::repeat_n(l.as_str(), *n))
        .collect();
    labels.sort_unstable();
    rand::seq::SliceRandom::shuffle(labels.as_mut_slice(), &mut rng);

    let projects = spec.projects.max(1);
    let mut requirements = Vec::with_capacity(labels.len());
    let mut annotations = Annotations::new();
    for (row, label) in labels.into_iter().enumerate() {
        // Skewed project sizes: low project numbers are picked more often.
        let project = if row < projects {
            row
        } else {
            let u: f64 = rng.random();
            ((u * u) * projects as f64) as usize % projects
        };
        let project_id = format!("P{:02}", project + 1);
        let req_id = format!("{project_id}-{}", row + 1);
        let own = label.to_lowercase();
        let word = |kind: &str, rng: &mut ChaCha8Rng| -> String {
            if rng.random_bool(spec.noise) {
                shared[kind].choose(rng).expect("pool").clone()
            } else {
                format!("{own}{kind}{}", rng.random_range(0..spec.pool_size.max(1)))
            }
        };
        let verb = word("verb", &mut rng);
        let object = word("obj", &mut rng);
        let goal = word("goal", &mut rng);
        let adj = rng.random_bool(0.5).then(|| word("adj", &mut rng));
        let s = sentence(&req_id, &verb, adj.as_deref(), &object, &goal);
        let text = s
            .tokens
            .iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        requirements.push(Requirement {
            req_id: req_id.clone(),
            project_id,
            text,
            label: label.to_owned(),
        });
        annotations.insert(req_id, vec![s]);
    }
    Ok((Dataset::from_requirements(requirements)?, annotations))
}

/// CSV text with the `ProjectID,RequirementText,Class` header.
pub fn dataset_csv(dataset: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["ProjectID", "RequirementText", "Class"])
        .expect("in-memory write");
    for r in &dataset.requirements {
        w.write_record([&r.project_id, &r.text, &r.label])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// CoNLL-U text for the annotations, in dataset order.
pub fn annotations_conllu(dataset: &Dataset, annotations: &Annotations) -> String {
    dataset
        .requirements
        .iter()
        .filter_map(|r| annotations.get(&r.req_id))
        .flatten()
        .map(AnnotatedSentence::to_conllu)
        .collect()
}
