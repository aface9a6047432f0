//! Semantic-role feature selection.
//!
//! Each token of a dependency-annotated requirement is mapped onto at most one
//! of six semantic roles by a fixed rule table. Rules are evaluated in the
//! precedence order Measure, Agent, Action, Theme, Goal, Manner and the first
//! rule that claims a token wins. Only role-bearing lemmas become features.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{normalize_lemma, AnnotatedSentence, StopWords};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticRole {
    Agent,
    Action,
    Theme,
    Goal,
    Manner,
    Measure,
}

impl SemanticRole {
    pub const ALL: [SemanticRole; 6] = [
        SemanticRole::Agent,
        SemanticRole::Action,
        SemanticRole::Theme,
        SemanticRole::Goal,
        SemanticRole::Manner,
        SemanticRole::Measure,
    ];

    /// Rule evaluation order; earlier roles win.
    pub const PRECEDENCE: [SemanticRole; 6] = [
        SemanticRole::Measure,
        SemanticRole::Agent,
        SemanticRole::Action,
        SemanticRole::Theme,
        SemanticRole::Goal,
        SemanticRole::Manner,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SemanticRole::Agent => "agent",
            SemanticRole::Action => "action",
            SemanticRole::Theme => "theme",
            SemanticRole::Goal => "goal",
            SemanticRole::Manner => "manner",
            SemanticRole::Measure => "measure",
        }
    }
}

impl fmt::Display for SemanticRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Word lists and tag sets the rule table is parameterized by.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleRules {
    pub measure_entities: Vec<String>,
    pub dative_prepositions: Vec<String>,
    pub manner_prepositions: Vec<String>,
}

impl Default for RoleRules {
    fn default() -> Self {
        let owned = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self {
            measure_entities: owned(&["DATE", "TIME", "PERCENT", "MONEY", "CARDINAL", "QUANTITY"]),
            dative_prepositions: owned(&["to", "for"]),
            manner_prepositions: owned(&["from", "with", "without", "after"]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RoleTag {
    pub sentence: usize,
    /// 1-based token index within the sentence.
    pub token: usize,
    pub role: SemanticRole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleAssignment {
    pub req_id: String,
    /// Sorted by (sentence, token); at most one entry per token.
    pub assignments: Vec<RoleTag>,
}

impl RoleAssignment {
    pub fn role_of(&self, sentence: usize, token: usize) -> Option<SemanticRole> {
        self.assignments
            .iter()
            .find(|a| a.sentence == sentence && a.token == token)
            .map(|a| a.role)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureMode {
    #[default]
    Plain,
    RolePrefixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub req_id: String,
    /// Feature terms in token order; repeats encode multiplicity.
    pub features: Vec<String>,
}

impl FeatureSet {
    pub fn counts(&self) -> BTreeMap<&str, usize> {
        let mut c = BTreeMap::new();
        for f in &self.features {
            *c.entry(f.as_str()).or_insert(0) += 1;
        }
        c
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Sr4fsError {
    #[error("{req_id}: role assignment references sentence {sentence} token {token}, which does not exist")]
    IndexOutOfRange {
        req_id: String,
        sentence: usize,
        token: usize,
    },
}

fn is_verb(s: &AnnotatedSentence, index: usize) -> bool {
    s.token(index).is_some_and(|t| t.upos == "VERB")
}

/// Roles for a single sentence as `(token index, role)` pairs in token order.
pub fn sentence_roles(
    sentence: &AnnotatedSentence,
    rules: &RoleRules,
) -> Vec<(usize, SemanticRole)> {
    let n = sentence.len();
    let mut claims: Vec<Vec<SemanticRole>> = vec![Vec::new(); n + 1];
    let mut claim = |i: usize, role: SemanticRole| {
        if (1..=n).contains(&i) {
            claims[i].push(role);
        }
    };
    let lower = |s: &str| s.to_lowercase();
    let in_list = |list: &[String], w: &str| list.iter().any(|x| x.eq_ignore_ascii_case(w));

    // Measure: quantity/time entities and their subtrees, then adverbs that
    // modify a measure token.
    let mut measure = vec![false; n + 1];
    for t in &sentence.tokens {
        if t.entity
            .as_ref()
            .is_some_and(|e| in_list(&rules.measure_entities, &e.label))
        {
            measure[t.index] = true;
            for d in sentence.descendants(t.index) {
                measure[d] = true;
            }
        }
    }
    for t in &sentence.tokens {
        if t.upos == "ADV" && t.head != 0 && measure[t.head] {
            measure[t.index] = true;
        }
    }
    for (i, m) in measure.iter().enumerate() {
        if *m {
            claim(i, SemanticRole::Measure);
        }
    }

    for t in &sentence.tokens {
        let rel = t.deprel.as_str();
        let base = t.base_deprel();

        if matches!(rel, "nsubj" | "nsubj:pass" | "nsubjpass") && is_verb(sentence, t.head) {
            claim(t.index, SemanticRole::Agent);
        }

        if t.upos == "VERB" && (t.head == 0 || is_verb(sentence, t.head)) {
            claim(t.index, SemanticRole::Action);
            // Particles of phrasal verbs ("log on") belong to the action.
            for d in sentence.dependents(t.index) {
                if sentence
                    .token(d)
                    .is_some_and(|p| p.deprel == "compound:prt" || p.deprel == "prt")
                {
                    claim(d, SemanticRole::Action);
                }
            }
        }

        if matches!(rel, "obj" | "dobj") && is_verb(sentence, t.head) {
            claim(t.index, SemanticRole::Theme);
        }

        if base == "iobj" {
            claim(t.index, SemanticRole::Goal);
        } else if base == "pobj" {
            // Preposition-headed scheme: the object hangs off the preposition.
            if sentence
                .token(t.head)
                .is_some_and(|p| in_list(&rules.dative_prepositions, &lower(&p.lemma)))
            {
                claim(t.index, SemanticRole::Goal);
            }
        } else if base == "obl" {
            // Case-marking scheme: the preposition is a `case` dependent.
            let dative = sentence.dependents(t.index).any(|d| {
                sentence.token(d).is_some_and(|c| {
                    c.deprel == "case" && in_list(&rules.dative_prepositions, &lower(&c.lemma))
                })
            });
            if dative {
                claim(t.index, SemanticRole::Goal);
            }
        }

        if matches!(t.upos.as_str(), "ADJ" | "ADV" | "DET") {
            claim(t.index, SemanticRole::Manner);
            claim(t.head, SemanticRole::Manner);
            if t.upos != "DET" {
                // The complement of an adjective or adverb completes its phrase
                // ("easy to use").
                for d in sentence.dependents(t.index) {
                    if sentence
                        .token(d)
                        .is_some_and(|c| c.base_deprel() == "xcomp")
                    {
                        claim(d, SemanticRole::Manner);
                        for dd in sentence.descendants(d) {
                            claim(dd, SemanticRole::Manner);
                        }
                    }
                }
            }
        }
        if matches!(t.upos.as_str(), "ADP" | "SCONJ")
            && in_list(&rules.manner_prepositions, &lower(&t.lemma))
        {
            claim(t.index, SemanticRole::Manner);
            let phrase_root = if t.deprel == "case" || t.deprel == "mark" {
                // Case-marking scheme: the phrase is the marked nominal's subtree.
                t.head
            } else {
                t.index
            };
            if phrase_root != 0 {
                claim(phrase_root, SemanticRole::Manner);
                for d in sentence.descendants(phrase_root) {
                    claim(d, SemanticRole::Manner);
                }
            }
        }
    }

    (1..=n)
        .filter_map(|i| {
            SemanticRole::PRECEDENCE
                .iter()
                .find(|r| claims[i].contains(r))
                .map(|r| (i, *r))
        })
        .collect()
}

/// Role assignment over every sentence of one requirement.
pub fn extract_roles(
    req_id: &str,
    sentences: &[AnnotatedSentence],
    rules: &RoleRules,
) -> RoleAssignment {
    let assignments = sentences
        .iter()
        .enumerate()
        .flat_map(|(si, s)| {
            sentence_roles(s, rules)
                .into_iter()
                .map(move |(token, role)| RoleTag {
                    sentence: si,
                    token,
                    role,
                })
        })
        .collect();
    RoleAssignment {
        req_id: req_id.to_owned(),
        assignments,
    }
}

/// Turns role-bearing tokens into filtered feature terms.
pub fn roles_to_features(
    assignment: &RoleAssignment,
    sentences: &[AnnotatedSentence],
    mode: FeatureMode,
    stopwords: &StopWords,
) -> Result<FeatureSet, Sr4fsError> {
    let mut features = Vec::with_capacity(assignment.assignments.len());
    for a in &assignment.assignments {
        let token = sentences
            .get(a.sentence)
            .and_then(|s| s.token(a.token))
            .ok_or_else(|| Sr4fsError::IndexOutOfRange {
                req_id: assignment.req_id.clone(),
                sentence: a.sentence,
                token: a.token,
            })?;
        if let Some(lemma) = normalize_lemma(&token.lemma, stopwords) {
            features.push(match mode {
                FeatureMode::Plain => lemma,
                FeatureMode::RolePrefixed => format!("{}:{lemma}", a.role),
            });
        }
    }
    Ok(FeatureSet {
        req_id: assignment.req_id.clone(),
        features,
    })
}

#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    pub rules: RoleRules,
    pub mode: FeatureMode,
    pub stopwords: StopWords,
}

impl Default for FeatureExtractor {
    fn default() -> Self {
        Self {
            rules: RoleRules::default(),
            mode: FeatureMode::Plain,
            stopwords: StopWords::english(),
        }
    }
}

impl FeatureExtractor {
    pub fn extract(&self, req_id: &str, sentences: &[AnnotatedSentence]) -> FeatureSet {
        let assignment = extract_roles(req_id, sentences, &self.rules);
        roles_to_features(&assignment, sentences, self.mode, &self.stopwords)
            .expect("assignment derived from the same sentences")
    }

    /// One JSON line with the requirement's roles and features, for debugging.
    pub fn debug_line(&self, req_id: &str, sentences: &[AnnotatedSentence]) -> String {
        let assignment = extract_roles(req_id, sentences, &self.rules);
        let roles: Vec<(String, SemanticRole)> = assignment
            .assignments
            .iter()
            .filter_map(|a| {
                sentences
                    .get(a.sentence)
                    .and_then(|s| s.token(a.token))
                    .map(|t| (t.form.clone(), a.role))
            })
            .collect();
        let features = self.extract(req_id, sentences).features;
        serde_json::json!({ "req_id": req_id, "roles": roles, "features": features }).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::AnnotatedToken;

    fn sentence(rows: &[(&str, &str, usize, &str)]) -> AnnotatedSentence {
        AnnotatedSentence {
            req_id: "t".into(),
            tokens: rows
                .iter()
                .enumerate()
                .map(|(i, (lemma, upos, head, deprel))| AnnotatedToken {
                    index: i + 1,
                    form: lemma.to_string(),
                    lemma: lemma.to_string(),
                    upos: upos.to_string(),
                    head: *head,
                    deprel: deprel.to_string(),
                    entity: None,
                })
                .collect(),
        }
    }

    #[test]
    fn lone_noun_gets_no_role() {
        let s = sentence(&[("login", "NOUN", 0, "root")]);
        assert!(sentence_roles(&s, &RoleRules::default()).is_empty());
    }

    #[test]
    fn subject_of_adjective_is_not_agent() {
        let s = sentence(&[
            ("system", "NOUN", 3, "nsubj"),
            ("be", "AUX", 3, "cop"),
            ("fast", "ADJ", 0, "root"),
        ]);
        let roles = sentence_roles(&s, &RoleRules::default());
        assert_eq!(roles, vec![(3, SemanticRole::Manner)]);
    }

    #[test]
    fn iobj_is_goal_and_pobj_needs_dative() {
        let s = sentence(&[
            ("send", "VERB", 0, "ROOT"),
            ("user", "NOUN", 1, "iobj"),
            ("mail", "NOUN", 1, "dobj"),
            ("to", "ADP", 1, "prep"),
            ("admin", "NOUN", 4, "pobj"),
            ("by", "ADP", 1, "prep"),
            ("post", "NOUN", 6, "pobj"),
        ]);
        let roles: BTreeMap<_, _> = sentence_roles(&s, &RoleRules::default())
            .into_iter()
            .collect();
        assert_eq!(roles[&1], SemanticRole::Action);
        assert_eq!(roles[&2], SemanticRole::Goal);
        assert_eq!(roles[&3], SemanticRole::Theme);
        assert_eq!(roles[&5], SemanticRole::Goal);
        assert!(!roles.contains_key(&7));
    }

    #[test]
    fn prefix_mode_and_multiplicity() {
        let s = sentence(&[("backup", "VERB", 0, "root"), ("backup", "NOUN", 1, "obj")]);
        let a = extract_roles("r", std::slice::from_ref(&s), &RoleRules::default());
        let plain = roles_to_features(
            &a,
            std::slice::from_ref(&s),
            FeatureMode::Plain,
            &StopWords::english(),
        )
        .unwrap();
        assert_eq!(plain.counts()["backup"], 2);
        let pre =
            roles_to_features(&a, &[s], FeatureMode::RolePrefixed, &StopWords::english()).unwrap();
        assert_eq!(pre.features, vec!["action:backup", "theme:backup"]);
    }

    #[test]
    fn empty_assignment_gives_empty_features() {
        let a = RoleAssignment {
            req_id: "x".into(),
            assignments: vec![],
        };
        let fs = roles_to_features(&a, &[], FeatureMode::Plain, &StopWords::english()).unwrap();
        assert!(fs.features.is_empty());
    }

    #[test]
    fn out_of_range_reference() {
        let a = RoleAssignment {
            req_id: "x".into(),
            assignments: vec![RoleTag {
                sentence: 0,
                token: 4,
                role: SemanticRole::Agent,
            }],
        };
        let s = sentence(&[("go", "VERB", 0, "root")]);
        assert_eq!(
            roles_to_features(&a, &[s], FeatureMode::Plain, &StopWords::english()).unwrap_err(),
            Sr4fsError::IndexOutOfRange {
                req_id: "x".into(),
                sentence: 0,
                token: 4
            }
        );
    }
}
