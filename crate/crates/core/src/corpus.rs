//! Labeled requirement datasets, their dependency annotations, and the
//! lemma-level pre-processing filters shared by feature extraction.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const COL_PROJECT: &str = "ProjectID";
const COL_TEXT: &str = "RequirementText";
const COL_CLASS: &str = "Class";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("missing column `{0}` in header row")]
    MissingColumn(&'static str),
    #[error("dataset has no data rows")]
    EmptyDataset,
    #[error("row {row}: duplicate requirement id `{req_id}`")]
    DuplicateReqId { row: u64, req_id: String },
    #[error("row {row}: {reason}")]
    MalformedRow { row: u64, reason: String },
    #[error("line {line}: malformed CoNLL-U: {reason}")]
    MalformedConllu { line: usize, reason: String },
    #[error("line {line}: sentence block has no `# req_id = ...` comment")]
    MissingReqId { line: usize },
    #[error("line {line}: dependency graph of `{req_id}` contains a cycle")]
    CyclicDependency { req_id: String, line: usize },
}

/// One labeled requirement statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub req_id: String,
    pub project_id: String,
    pub text: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub requirements: Vec<Requirement>,
    /// Sorted distinct class labels.
    pub label_set: Vec<String>,
    /// Sorted distinct project ids.
    pub project_set: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from already-constructed requirements, deriving the
    /// label and project sets.
    pub fn from_requirements(requirements: Vec<Requirement>) -> Result<Self, CorpusError> {
        if requirements.is_empty() {
            return Err(CorpusError::EmptyDataset);
        }
        let mut seen = HashSet::new();
        for (i, r) in requirements.iter().enumerate() {
            if !seen.insert(r.req_id.as_str()) {
                return Err(CorpusError::DuplicateReqId {
                    row: i as u64 + 1,
                    req_id: r.req_id.clone(),
                });
            }
        }
        let label_set: BTreeSet<&str> = requirements.iter().map(|r| r.label.as_str()).collect();
        let project_set: BTreeSet<&str> =
            requirements.iter().map(|r| r.project_id.as_str()).collect();
        let label_set = label_set.into_iter().map(str::to_owned).collect();
        let project_set = project_set.into_iter().map(str::to_owned).collect();
        Ok(Self {
            requirements,
            label_set,
            project_set,
        })
    }

    pub fn sample_size(&self) -> usize {
        self.requirements.len()
    }

    pub fn class_counts(&self) -> BTreeMap<String, usize> {
        class_counts(self.requirements.iter().map(|r| r.label.as_str()))
    }

    pub fn project_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.requirements {
            *counts.entry(r.project_id.clone()).or_insert(0) += 1;
        }
        counts
    }

    pub fn req_ids(&self) -> Vec<String> {
        self.requirements.iter().map(|r| r.req_id.clone()).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.requirements.iter().map(|r| r.label.clone()).collect()
    }
}

pub fn class_counts<'a>(labels: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for l in labels {
        *counts.entry(l.to_owned()).or_insert(0) += 1;
    }
    counts
}

/// Loads a requirements CSV with header `ProjectID,RequirementText,Class`.
///
/// Requirement ids are synthesized as `<ProjectID>-<row ordinal>`, where the
/// ordinal is the 1-based data-row number within the file.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_dataset(file)
}

pub fn read_dataset(reader: impl Read) -> Result<Dataset, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| CorpusError::MalformedRow {
        row: 0,
        reason: e.to_string(),
    })?;
    let find = |name: &'static str| {
        headers
            .iter()
            .position(|h| h.trim().trim_start_matches('\u{feff}') == name)
            .ok_or(CorpusError::MissingColumn(name))
    };
    let (project_col, text_col, class_col) =
        (find(COL_PROJECT)?, find(COL_TEXT)?, find(COL_CLASS)?);
    let width = headers.len();

    let mut requirements = Vec::new();
    let mut seen = HashSet::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i as u64 + 1;
        let record = record.map_err(|e| CorpusError::MalformedRow {
            row,
            reason: e.to_string(),
        })?;
        if record.len() != width {
            return Err(CorpusError::MalformedRow {
                row,
                reason: format!("expected {width} fields, found {}", record.len()),
            });
        }
        let project_id = record[project_col].trim().to_owned();
        let text = record[text_col].trim().to_owned();
        let label = record[class_col].trim().to_uppercase();
        if project_id.is_empty() {
            return Err(CorpusError::MalformedRow {
                row,
                reason: "empty ProjectID".into(),
            });
        }
        if text.is_empty() {
            return Err(CorpusError::MalformedRow {
                row,
                reason: "empty RequirementText".into(),
            });
        }
        if label.is_empty() {
            return Err(CorpusError::MalformedRow {
                row,
                reason: "empty Class".into(),
            });
        }
        let req_id = format!("{project_id}-{row}");
        if !seen.insert(req_id.clone()) {
            return Err(CorpusError::DuplicateReqId { row, req_id });
        }
        requirements.push(Requirement {
            req_id,
            project_id,
            text,
            label,
        });
    }
    Dataset::from_requirements(requirements)
}

/// B/I position of a token inside a named-entity span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpanPosition {
    Begin,
    Inside,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityTag {
    pub position: SpanPosition,
    pub label: String,
}

impl fmt::Display for EntityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.position {
            SpanPosition::Begin => 'B',
            SpanPosition::Inside => 'I',
        };
        write!(f, "{p}-{}", self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedToken {
    /// 1-based position within the sentence.
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    /// Index of the governing token; 0 for the root.
    pub head: usize,
    pub deprel: String,
    pub entity: Option<EntityTag>,
}

impl AnnotatedToken {
    /// Dependency relation without its subtype (`nsubj:pass` -> `nsubj`).
    pub fn base_deprel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub req_id: String,
    pub tokens: Vec<AnnotatedToken>,
}

impl AnnotatedSentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token at a 1-based index.
    pub fn token(&self, index: usize) -> Option<&AnnotatedToken> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn head_of(&self, index: usize) -> Option<&AnnotatedToken> {
        self.token(index).and_then(|t| self.token(t.head))
    }

    /// Indices of the immediate dependents of `index`, in order.
    pub fn dependents(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        self.tokens
            .iter()
            .filter(move |t| t.head == index)
            .map(|t| t.index)
    }

    /// Transitive dependents of `index` (excluding `index` itself).
    pub fn descendants(&self, index: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.dependents(index).collect();
        while let Some(i) = stack.pop() {
            out.push(i);
            stack.extend(self.dependents(i));
        }
        out.sort_unstable();
        out
    }

    /// Checks contiguous indices, head ranges, a single root and acyclicity.
    pub fn validate(&self) -> Result<(), TreeError> {
        let n = self.tokens.len();
        for (i, t) in self.tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(TreeError::NonContiguous { index: t.index });
            }
            if t.head > n || t.head == t.index {
                return Err(TreeError::BadHead {
                    index: t.index,
                    head: t.head,
                });
            }
        }
        let roots = self.tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(TreeError::RootCount(roots));
        }
        for t in &self.tokens {
            let mut cur = t.head;
            let mut steps = 0;
            while cur != 0 {
                steps += 1;
                if steps > n {
                    return Err(TreeError::Cycle);
                }
                cur = self.tokens[cur - 1].head;
            }
        }
        Ok(())
    }

    /// Renders the sentence as a CoNLL-U block (with trailing blank line).
    pub fn to_conllu(&self) -> String {
        let mut out = format!("# req_id = {}\n", self.req_id);
        for t in &self.tokens {
            let misc = t
                .entity
                .as_ref()
                .map_or_else(|| "_".to_owned(), |e| format!("NER={e}"));
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t{}\n",
                t.index, t.form, t.lemma, t.upos, t.head, t.deprel, misc
            ));
        }
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("token index {index} breaks 1..n numbering")]
    NonContiguous { index: usize },
    #[error("token {index} has invalid head {head}")]
    BadHead { index: usize, head: usize },
    #[error("expected exactly one root, found {0}")]
    RootCount(usize),
    #[error("cycle")]
    Cycle,
}

/// Parsed annotations: every requirement id maps to its sentences in file order.
pub type Annotations = BTreeMap<String, Vec<AnnotatedSentence>>;

pub fn load_annotations(path: impl AsRef<Path>) -> Result<Annotations, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_annotations(BufReader::new(file))
}

pub fn read_annotations(reader: impl BufRead) -> Result<Annotations, CorpusError> {
    let mut out = Annotations::new();
    let mut block = Block::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::MalformedConllu {
            line: line_no,
            reason: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            block.finish(&mut out)?;
            continue;
        }
        if block.start_line == 0 {
            block.start_line = line_no;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "req_id" {
                    block.req_id = Some(value.trim().to_owned());
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(CorpusError::MalformedConllu {
                line: line_no,
                reason: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        // Multiword-token ranges and empty nodes carry no tree structure.
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        block.tokens.push(parse_token(&cols, line_no)?);
    }
    block.finish(&mut out)?;
    Ok(out)
}

#[derive(Default)]
struct Block {
    start_line: usize,
    req_id: Option<String>,
    tokens: Vec<AnnotatedToken>,
}

impl Block {
    fn finish(&mut self, out: &mut Annotations) -> Result<(), CorpusError> {
        let block = std::mem::take(self);
        if block.start_line == 0 {
            return Ok(());
        }
        if block.tokens.is_empty() {
            return Err(CorpusError::MalformedConllu {
                line: block.start_line,
                reason: "sentence block has no tokens".into(),
            });
        }
        let req_id = block.req_id.ok_or(CorpusError::MissingReqId {
            line: block.start_line,
        })?;
        let sentence = AnnotatedSentence {
            req_id: req_id.clone(),
            tokens: block.tokens,
        };
        match sentence.validate() {
            Ok(()) => {}
            Err(TreeError::Cycle) => {
                return Err(CorpusError::CyclicDependency {
                    req_id,
                    line: block.start_line,
                })
            }
            Err(e) => {
                return Err(CorpusError::MalformedConllu {
                    line: block.start_line,
                    reason: e.to_string(),
                })
            }
        }
        out.entry(req_id).or_default().push(sentence);
        Ok(())
    }
}

fn parse_token(cols: &[&str], line: usize) -> Result<AnnotatedToken, CorpusError> {
    let bad = |reason: String| CorpusError::MalformedConllu { line, reason };
    let index = cols[0]
        .parse::<usize>()
        .map_err(|_| bad(format!("bad token id `{}`", cols[0])))?;
    let head = cols[6]
        .parse::<usize>()
        .map_err(|_| bad(format!("bad head `{}`", cols[6])))?;
    let mut entity = None;
    for item in cols[9].split('|') {
        if let Some(tag) = item.strip_prefix("NER=") {
            entity = Some(parse_entity(tag).ok_or_else(|| bad(format!("bad NER tag `{tag}`")))?);
        }
    }
    let lemma = if cols[2] == "_" && cols[1] != "_" {
        cols[1]
    } else {
        cols[2]
    };
    Ok(AnnotatedToken {
        index,
        form: cols[1].to_owned(),
        lemma: lemma.to_owned(),
        upos: cols[3].to_owned(),
        head,
        deprel: cols[7].to_owned(),
        entity,
    })
}

fn parse_entity(tag: &str) -> Option<EntityTag> {
    let (pos, label) = tag.split_once('-')?;
    let position = match pos {
        "B" => SpanPosition::Begin,
        "I" => SpanPosition::Inside,
        _ => return None,
    };
    if label.is_empty() {
        return None;
    }
    Some(EntityTag {
        position,
        label: label.to_owned(),
    })
}

/// Join report between a dataset and its annotations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub annotated: usize,
    /// Dataset requirements with no annotation.
    pub missing: Vec<String>,
    /// Annotated ids that do not occur in the dataset.
    pub unknown: Vec<String>,
}

pub fn coverage(dataset: &Dataset, annotations: &Annotations) -> Coverage {
    let ids: HashSet<&str> = dataset
        .requirements
        .iter()
        .map(|r| r.req_id.as_str())
        .collect();
    let missing: Vec<String> = dataset
        .requirements
        .iter()
        .filter(|r| !annotations.contains_key(&r.req_id))
        .map(|r| r.req_id.clone())
        .collect();
    let unknown: Vec<String> = annotations
        .keys()
        .filter(|k| !ids.contains(k.as_str()))
        .cloned()
        .collect();
    for id in &unknown {
        log::warn!("annotation for unknown requirement id `{id}` ignored");
    }
    Coverage {
        annotated: dataset.sample_size() - missing.len(),
        missing,
        unknown,
    }
}

/// Lowercase word set used to drop function words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

static ENGLISH_STOPWORDS: &str = include_str!("stopwords_en.txt");

impl StopWords {
    /// The shipped English list.
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    /// One word per line; `#` starts a comment line.
    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Self(HashSet::new())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for StopWords {
    fn default() -> Self {
        Self::english()
    }
}

pub const MIN_TERM_CHARS: usize = 3;

/// Lowercases a lemma and applies the stopword, short-word and punctuation
/// filters. `None` means the lemma is dropped.
pub fn normalize_lemma(lemma: &str, stopwords: &StopWords) -> Option<String> {
    let lower = lemma.trim().to_lowercase();
    if lower.chars().count() < MIN_TERM_CHARS
        || !lower.chars().any(char::is_alphanumeric)
        || stopwords.contains(&lower)
    {
        return None;
    }
    Some(lower)
}

/// Normalized lemmas of `tokens`, in order, after filtering.
pub fn preprocess(tokens: &[AnnotatedToken], stopwords: &StopWords) -> Vec<String> {
    tokens
        .iter()
        .filter_map(|t| normalize_lemma(&t.lemma, stopwords))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(index: usize, lemma: &str, head: usize) -> AnnotatedToken {
        AnnotatedToken {
            index,
            form: lemma.to_owned(),
            lemma: lemma.to_owned(),
            upos: "X".into(),
            head,
            deprel: "dep".into(),
            entity: None,
        }
    }

    #[test]
    fn three_row_fixture() {
        let csv = "ProjectID,RequirementText,Class\n\
                   P1,The system shall log in users.,F\n\
                   P1,\"Pages load in 2 seconds, always.\",pe\n\
                   P2,The UI shall be simple.,F\n";
        let ds = read_dataset(csv.as_bytes()).unwrap();
        assert_eq!(ds.sample_size(), 3);
        assert_eq!(ds.project_set, vec!["P1", "P2"]);
        assert_eq!(ds.label_set, vec!["F", "PE"]);
        assert_eq!(ds.requirements[1].req_id, "P1-2");
        assert_eq!(ds.requirements[1].text, "Pages load in 2 seconds, always.");
        assert_eq!(ds.requirements[2].req_id, "P2-3");
        let counts = ds.class_counts();
        assert_eq!(counts.values().sum::<usize>(), ds.sample_size());
    }

    #[test]
    fn header_only_is_empty() {
        let err = read_dataset("ProjectID,RequirementText,Class\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyDataset));
    }

    #[test]
    fn missing_column() {
        let err = read_dataset("ProjectID,Text,Class\nP1,a,F\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::MissingColumn("RequirementText")));
    }

    #[test]
    fn malformed_row_reports_row_number() {
        let csv = "ProjectID,RequirementText,Class\nP1,ok,F\nP1,too,many,F\n";
        match read_dataset(csv.as_bytes()).unwrap_err() {
            CorpusError::MalformedRow { row, .. } => assert_eq!(row, 2),
            e => panic!("unexpected {e:?}"),
        }
        let csv = "ProjectID,RequirementText,Class\nP1,   ,F\n";
        assert!(matches!(
            read_dataset(csv.as_bytes()).unwrap_err(),
            CorpusError::MalformedRow { row: 1, .. }
        ));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let reqs = vec![
            Requirement {
                req_id: "a".into(),
                project_id: "p".into(),
                text: "x".into(),
                label: "F".into(),
            };
            2
        ];
        assert!(matches!(
            Dataset::from_requirements(reqs),
            Err(CorpusError::DuplicateReqId { row: 2, .. })
        ));
    }

    #[test]
    fn single_token_sentence() {
        let text = "# req_id = P1-1\n1\tLogin\tlogin\tNOUN\tNN\t_\t0\troot\t_\t_\n\n";
        let ann = read_annotations(text.as_bytes()).unwrap();
        let sents = &ann["P1-1"];
        assert_eq!(sents.len(), 1);
        assert_eq!(sents[0].tokens[0].index, 1);
        assert_eq!(sents[0].tokens[0].head, 0);
    }

    #[test]
    fn sentences_grouped_by_req_id() {
        let text = "# req_id = P1-1\n1\tLogin\tlogin\tNOUN\t_\t_\t0\troot\t_\t_\n\n\
                    # req_id = P1-1\n1\tGo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n\
                    2\tnow\tnow\tADV\t_\t_\t1\tadvmod\t_\tNER=B-DATE\n";
        let ann = read_annotations(text.as_bytes()).unwrap();
        assert_eq!(ann.len(), 1);
        let sents = &ann["P1-1"];
        assert_eq!(sents.len(), 2);
        assert_eq!(sents[1].tokens[1].index, 2);
        let e = sents[1].tokens[1].entity.as_ref().unwrap();
        assert_eq!(e.label, "DATE");
        assert_eq!(e.position, SpanPosition::Begin);
    }

    #[test]
    fn conllu_errors() {
        let short = "# req_id = a\n1\tx\tx\tX\t_\t_\t0\troot\t_\n\n";
        assert!(matches!(
            read_annotations(short.as_bytes()).unwrap_err(),
            CorpusError::MalformedConllu { line: 2, .. }
        ));
        let no_id = "1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n\n";
        assert!(matches!(
            read_annotations(no_id.as_bytes()).unwrap_err(),
            CorpusError::MissingReqId { line: 1 }
        ));
        let cyclic = "# req_id = a\n1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n\
                      2\ty\ty\tX\t_\t_\t3\tdep\t_\t_\n3\tz\tz\tX\t_\t_\t2\tdep\t_\t_\n";
        assert!(matches!(
            read_annotations(cyclic.as_bytes()).unwrap_err(),
            CorpusError::CyclicDependency { .. }
        ));
        let two_roots = "# req_id = a\n1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n\
                         2\ty\ty\tX\t_\t_\t0\troot\t_\t_\n";
        assert!(matches!(
            read_annotations(two_roots.as_bytes()).unwrap_err(),
            CorpusError::MalformedConllu { .. }
        ));
    }

    #[test]
    fn skips_multiword_ranges() {
        let text = "# req_id = a\n1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
                    1\tdo\tdo\tAUX\t_\t_\t0\troot\t_\t_\n2\tn't\tnot\tPART\t_\t_\t1\tadvmod\t_\t_\n";
        let ann = read_annotations(text.as_bytes()).unwrap();
        assert_eq!(ann["a"][0].len(), 2);
    }

    #[test]
    fn conllu_writer_round_trips() {
        let s = AnnotatedSentence {
            req_id: "P9-3".into(),
            tokens: vec![
                tok(1, "Login", 0),
                AnnotatedToken {
                    entity: Some(EntityTag {
                        position: SpanPosition::Inside,
                        label: "TIME".into(),
                    }),
                    ..tok(2, "fast", 1)
                },
            ],
        };
        let parsed = read_annotations(s.to_conllu().as_bytes()).unwrap();
        assert_eq!(parsed["P9-3"], vec![s]);
    }

    #[test]
    fn coverage_lists_missing_and_unknown() {
        let ds =
            read_dataset("ProjectID,RequirementText,Class\nP,a,F\nP,b,F\n".as_bytes()).unwrap();
        let mut ann = Annotations::new();
        ann.insert("P-1".into(), vec![]);
        ann.insert("Q-9".into(), vec![]);
        let c = coverage(&ds, &ann);
        assert_eq!(c.annotated, 1);
        assert_eq!(c.missing, vec!["P-2"]);
        assert_eq!(c.unknown, vec!["Q-9"]);
    }

    #[test]
    fn preprocess_filters() {
        let sw = StopWords::english();
        assert!(preprocess(&[], &sw).is_empty());
        let toks: Vec<_> = [
            "The",
            "system",
            "shall",
            "send",
            "a",
            "verification",
            "email",
            "to",
            "the",
            "user",
        ]
        .iter()
        .enumerate()
        .map(|(i, w)| tok(i + 1, w, 0))
        .collect();
        // "shall" is not in the shipped list.
        assert_eq!(
            preprocess(&toks, &sw),
            vec!["system", "shall", "send", "verification", "email", "user"]
        );
        assert_eq!(normalize_lemma("to", &StopWords::empty()), None);
        assert_eq!(normalize_lemma("...", &StopWords::empty()), None);
        assert_eq!(
            normalize_lemma("99%", &StopWords::empty()).as_deref(),
            Some("99%")
        );
        assert_eq!(normalize_lemma("Email", &sw).as_deref(), Some("email"));
    }

    #[test]
    fn shipped_stopword_list() {
        let sw = StopWords::english();
        assert_eq!(sw.len(), 179);
        assert!(sw.contains("the") && sw.contains("they") && !sw.contains("shall"));
    }
}
