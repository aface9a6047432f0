use hc4rc_core::sr4fs::FeatureSet;
use hc4rc_core::vectorizer::{build_vocabulary, vectorize, Weighting};
use proptest::prelude::*;

fn docs() -> impl Strategy<Value = Vec<FeatureSet>> {
    proptest::collection::vec(proptest::collection::vec("[a-f]{3}", 0..8), 1..20).prop_map(|ds| {
        ds.into_iter()
            .enumerate()
            .map(|(i, features)| FeatureSet {
                req_id: format!("r{i}"),
                features,
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn unit_norm_or_zero(ds in docs()) {
        prop_assume!(ds.iter().any(|d| !d.features.is_empty()));
        let vocab = build_vocabulary(&ds, 1, Weighting::TfIdf).unwrap();
        let terms = vocab.terms().to_vec();
        let mut sorted = terms.clone();
        sorted.sort();
        prop_assert_eq!(terms, sorted);
        for d in &ds {
            let v = vectorize(d, &vocab);
            prop_assert_eq!(v.dimension(), vocab.dimension());
            let n = v.norm();
            prop_assert!(v.nnz() == 0 && n == 0.0 || (n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn repeating_a_document_keeps_its_vector(ds in docs()) {
        prop_assume!(ds.iter().any(|d| !d.features.is_empty()));
        let vocab = build_vocabulary(&ds, 1, Weighting::TfIdf).unwrap();
        for d in &ds {
            let doubled = FeatureSet {
                req_id: d.req_id.clone(),
                features: d.features.iter().chain(&d.features).cloned().collect(),
            };
            let (a, b) = (vectorize(d, &vocab), vectorize(&doubled, &vocab));
            for ((ca, va), (cb, vb)) in a.entries().iter().zip(b.entries()) {
                prop_assert_eq!(ca, cb);
                prop_assert!((va - vb).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unseen_terms_are_ignored(ds in docs()) {
        prop_assume!(ds.iter().any(|d| !d.features.is_empty()));
        let vocab = build_vocabulary(&ds, 1, Weighting::TfIdf).unwrap();
        let novel = FeatureSet { req_id: "x".into(), features: vec!["zzzz".into(), "qqqq".into()] };
        prop_assert_eq!(vectorize(&novel, &vocab).nnz(), 0);
    }
}
