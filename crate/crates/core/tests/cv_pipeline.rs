use hc4rc_core::eval::{
    build_featuresets, run_cv, run_experiment, CvConfig, CvError, ExperimentConfig,
};
use hc4rc_core::synthetic::{generate, SyntheticSpec};
use hc4rc_core::{FeatureExtractor, FoldKind, GridConfig, Strategy, TrainConfig};

fn config(strategies: Vec<Strategy>) -> ExperimentConfig {
    ExperimentConfig {
        k: 5,
        seed: 3,
        strategies,
        ..Default::default()
    }
}

#[test]
fn every_strategy_passes_the_audit() {
    let (ds, ann) = generate(&SyntheticSpec::small(2)).unwrap();
    let out = run_experiment(&ds, &ann, &config(Strategy::ALL.to_vec())).unwrap();
    assert_eq!(out.results.len(), 4);
    for r in &out.results {
        assert_eq!(r.pooled.total() as usize, ds.sample_size());
        let mut seen: Vec<&String> = r.folds.iter().flat_map(|f| &f.test_ids).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), ds.sample_size(), "each requirement tested once");
        for f in &r.folds {
            assert!(f.audit.is_clean(), "{}: {:?}", r.strategy, f.audit);
            assert!(f.audit.checked_ids > 0);
        }
    }
    let ids0: Vec<_> = out.results[0]
        .folds
        .iter()
        .map(|f| f.test_ids.clone())
        .collect();
    for r in &out.results[1..] {
        let ids: Vec<_> = r.folds.iter().map(|f| f.test_ids.clone()).collect();
        assert_eq!(ids, ids0, "strategies share folds");
    }
}

#[test]
fn report_json_is_reproducible() {
    let (ds, ann) = generate(&SyntheticSpec::small(4)).unwrap();
    let cfg = config(vec![Strategy::Hc4rc, Strategy::FlatOversample]);
    let a = run_experiment(&ds, &ann, &cfg).unwrap().report.to_json();
    let b = run_experiment(&ds, &ann, &cfg).unwrap().report.to_json();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert!(v["strategies"][0]["pooled"]["f1"].is_f64());
}

#[test]
fn grid_search_stays_inside_the_training_split() {
    let (ds, ann) = generate(&SyntheticSpec::small(6)).unwrap();
    let mut cfg = config(vec![Strategy::Hc4rc, Strategy::Flat]);
    cfg.train = TrainConfig {
        grid: Some(GridConfig {
            values: vec![0.1, 1.0],
            inner_folds: 3,
        }),
        ..Default::default()
    };
    let out = run_experiment(&ds, &ann, &cfg).unwrap();
    for r in &out.results {
        for f in &r.folds {
            assert!(f.audit.is_clean());
            assert!(!f.tuning.is_empty());
        }
    }
}

#[test]
fn global_plan_is_reported_as_leakage() {
    let (ds, ann) = generate(&SyntheticSpec::small(8)).unwrap();
    let fs = build_featuresets(&ds, &ann, &FeatureExtractor::default()).unwrap();
    let plan = config(vec![]).fold_plan(&ds).unwrap();
    let cv = CvConfig {
        global_plan: true,
        ..Default::default()
    };
    let r = run_cv(&ds, &fs, Strategy::Hc4rc, &plan, &cv).unwrap();
    for f in &r.folds {
        assert_eq!(
            f.audit.violations.keys().collect::<Vec<_>>(),
            vec!["decomposition"]
        );
    }
}

#[test]
fn project_folds_keep_projects_together() {
    let mut spec = SyntheticSpec::small(9);
    spec.projects = 12;
    let (ds, ann) = generate(&spec).unwrap();
    let mut cfg = config(vec![Strategy::Hc4rc]);
    cfg.folds = FoldKind::Project;
    cfg.k = 4;
    let out = run_experiment(&ds, &ann, &cfg).unwrap();
    for f in &out.results[0].folds {
        let test_projects: std::collections::BTreeSet<&str> = f
            .test_ids
            .iter()
            .map(|id| id.split('-').next().unwrap())
            .collect();
        for other in out.results[0].folds.iter().filter(|g| g.fold != f.fold) {
            assert!(other
                .test_ids
                .iter()
                .all(|id| !test_projects.contains(id.split('-').next().unwrap())));
        }
    }
}

#[test]
fn absent_training_class_is_recorded() {
    let mut spec = SyntheticSpec::small(10);
    spec.classes.push(("RARE".into(), 1));
    let (ds, ann) = generate(&spec).unwrap();
    let out = run_experiment(&ds, &ann, &config(vec![Strategy::Flat])).unwrap();
    let flagged: Vec<_> = out.results[0]
        .folds
        .iter()
        .filter(|f| f.absent_classes.contains(&"RARE".to_string()))
        .collect();
    assert_eq!(flagged.len(), 1);
}

#[test]
fn missing_annotation_is_reported() {
    let (ds, mut ann) = generate(&SyntheticSpec::small(1)).unwrap();
    let id = ds.requirements[5].req_id.clone();
    ann.remove(&id);
    match run_experiment(&ds, &ann, &config(vec![Strategy::Flat])) {
        Err(CvError::MissingAnnotation(m)) => assert_eq!(m, id),
        other => panic!("unexpected {other:?}"),
    }
}
