#![allow(dead_code)]

use std::path::PathBuf;

use hc4rc_core::corpus::{load_annotations, Annotations};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn role_fixture() -> Annotations {
    load_annotations(fixture("roles.conllu")).expect("fixture parses")
}

pub fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}
