mod common;

use hc4rc_core::corpus::AnnotatedSentence;
use hc4rc_core::sr4fs::{extract_roles, FeatureExtractor, FeatureMode, RoleRules, SemanticRole};
use SemanticRole::*;

/// (form, role) for every token that receives a role.
fn roles(s: &AnnotatedSentence) -> Vec<(String, SemanticRole)> {
    let a = extract_roles(&s.req_id, std::slice::from_ref(s), &RoleRules::default());
    a.assignments
        .iter()
        .map(|t| (s.token(t.token).unwrap().form.clone(), t.role))
        .collect()
}

fn role_of(s: &AnnotatedSentence, form: &str) -> Option<SemanticRole> {
    roles(s)
        .into_iter()
        .find(|(f, _)| f == form)
        .map(|(_, r)| r)
}

fn sentence(id: &str) -> AnnotatedSentence {
    let ann = common::role_fixture();
    let mut v = ann[id].clone();
    assert_eq!(v.len(), 1);
    v.remove(0)
}

#[test]
fn fixture_trees_are_valid() {
    for s in common::role_fixture().values().flatten() {
        s.validate().unwrap();
    }
}

#[test]
fn send_email_full_assignment() {
    let s = sentence("DEMO-1");
    let expected = [
        ("The", Manner),
        ("system", Agent),
        ("send", Action),
        ("a", Manner),
        ("email", Theme),
        ("the", Manner),
        ("user", Goal),
        ("when", Manner),
        ("they", Agent),
        ("log", Action),
        ("on", Action),
        ("account", Goal),
        ("from", Manner),
        ("an", Manner),
        ("unfamiliar", Manner),
        ("computer", Manner),
    ];
    let want: Vec<(String, SemanticRole)> =
        expected.iter().map(|(f, r)| (f.to_string(), *r)).collect();
    assert_eq!(roles(&s), want);
}

#[test]
fn send_message_theme_and_plural_goal() {
    let s = sentence("DEMO-2");
    assert_eq!(role_of(&s, "message"), Some(Theme));
    assert_eq!(role_of(&s, "users"), Some(Goal));
    assert_eq!(role_of(&s, "verification"), None);
}

#[test]
fn easy_to_use_is_manner() {
    let s = sentence("DEMO-3");
    for w in ["easy", "to", "use"] {
        assert_eq!(role_of(&s, w), Some(Manner), "{w}");
    }
    // Subject of a copular adjective is not an agent, and `use` is not an action.
    assert_ne!(role_of(&s, "system"), Some(Agent));
    assert_ne!(role_of(&s, "use"), Some(Action));
}

#[test]
fn percentage_is_measure() {
    let s = sentence("DEMO-4");
    assert_eq!(role_of(&s, "98"), Some(Measure));
    assert_eq!(role_of(&s, "%"), Some(Measure));
    assert_eq!(role_of(&s, "users"), Some(Goal));
    for w in ["every", "month", "time"] {
        assert_eq!(role_of(&s, w), Some(Measure), "{w}");
    }
}

#[test]
fn plain_features() {
    let ann = common::role_fixture();
    let fx = FeatureExtractor::default();
    assert_eq!(
        fx.extract("DEMO-1", &ann["DEMO-1"]).features,
        common::strings(&[
            "system",
            "send",
            "email",
            "user",
            "log",
            "account",
            "unfamiliar",
            "computer"
        ])
    );
    assert_eq!(
        fx.extract("DEMO-3", &ann["DEMO-3"]).features,
        common::strings(&["system", "easy", "use"])
    );
}

#[test]
fn role_prefixed_features() {
    let ann = common::role_fixture();
    let fx = FeatureExtractor {
        mode: FeatureMode::RolePrefixed,
        ..Default::default()
    };
    let f = fx.extract("DEMO-2", &ann["DEMO-2"]).features;
    assert_eq!(
        &f[..4],
        &common::strings(&["agent:system", "action:send", "theme:message", "goal:user"])[..]
    );
}

#[test]
fn debug_line_is_json() {
    let ann = common::role_fixture();
    let line = FeatureExtractor::default().debug_line("DEMO-3", &ann["DEMO-3"]);
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(v["req_id"], "DEMO-3");
}
