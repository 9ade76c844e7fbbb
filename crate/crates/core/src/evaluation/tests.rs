use super::*;
use crate::classifiers::Classifier;
use crate::dataio::make_folds;
use crate::features::DwtLayout;
use crate::stats::published_table;
use crate::synthetic::{concentric_circles, cross_planes, gaussian_blobs, mid_band_universum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn clusters_1d() -> LabeledDataset {
    let x1 = Matrix::from_fn(25, 1, |i, _| -5.0 + 0.02 * i as f64);
    let x2 = Matrix::from_fn(25, 1, |i, _| 5.0 + 0.03 * i as f64);
    let u = Matrix::from_fn(10, 1, |i, _| -0.5 + 0.1 * i as f64);
    LabeledDataset::new(x1, x2, u).unwrap()
}

fn every_spec() -> Vec<TrainSpec> {
    vec![
        TrainSpec::gepsvm(1e-3),
        TrainSpec::igepsvm(1e-3, 0.5),
        TrainSpec::ugepsvm(1e-3),
        TrainSpec::iugepsvm(1e-3, 0.5, 0.1),
    ]
}

#[test]
fn separable_clusters_score_100() {
    let data = clusters_1d();
    let plan = make_folds(&data, 5, 3).unwrap();
    for spec in every_spec() {
        let rep = run_cv(&data, &plan, &spec).unwrap();
        assert_eq!(rep.mean_accuracy, 100.0, "{}", spec.classifier);
        assert_eq!(rep.fold_accuracies.len(), 5);
        assert_eq!(rep.predictions, 50);
    }
}

#[test]
fn cross_planes_cv() {
    let mut data = cross_planes(50, 0.05, 0);
    data.u = mid_band_universum(20, 0.05, 1);
    let plan = make_folds(&data, 5, 0).unwrap();
    for spec in [
        TrainSpec::gepsvm(1e-4),
        TrainSpec::igepsvm(1e-5, 0.01),
        TrainSpec::ugepsvm(1e-4),
        TrainSpec::iugepsvm(1e-5, 0.001, 1e-5),
    ] {
        let r = run_cv(&data, &plan, &spec).unwrap();
        assert!(r.mean_accuracy >= 98.0, "{} {:?}", spec.classifier, r.fold_accuracies);
    }
}

#[test]
fn random_labels_stay_near_chance() {
    let mut means = Vec::new();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut noise = |r| Matrix::from_fn(r, 3, |_, _| rng.random_range(-1.0..1.0));
        let data = LabeledDataset::new(noise(100), noise(100), noise(20)).unwrap();
        let plan = make_folds(&data, 5, seed).unwrap();
        means.push(run_cv(&data, &plan, &TrainSpec::gepsvm(1e-2)).unwrap().mean_accuracy);
    }
    let avg = means.iter().sum::<f64>() / means.len() as f64;
    assert!((35.0..=65.0).contains(&avg), "{avg}");
    assert!(means.iter().all(|m| (25.0..=75.0).contains(m)));
}

#[test]
fn cv_is_deterministic_except_timing() {
    let data = gaussian_blobs(30, 10, 4, 0.7, 5);
    let plan = make_folds(&data, 5, 11).unwrap();
    let spec = TrainSpec::iugepsvm(1e-2, 0.3, 0.01);
    let mut a = run_cv(&data, &plan, &spec).unwrap();
    let mut b = run_cv(&data, &plan, &spec).unwrap();
    a.test_time_seconds = 0.0;
    b.test_time_seconds = 0.0;
    assert_eq!(a, b);
    let mean = a.fold_accuracies.iter().sum::<f64>() / 5.0;
    assert!((a.mean_accuracy - mean).abs() <= 1e-12);
}

#[test]
fn fold_failures_name_the_fold() {
    let data = gaussian_blobs(10, 0, 2, 1.0, 1);
    let plan = make_folds(&data, 5, 0).unwrap();
    match run_cv(&data, &plan, &TrainSpec::ugepsvm(1e-3)) {
        Err(Error::Fold { fold: 0, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn universum_never_tested_and_coverage_is_complete() {
    let data = gaussian_blobs(23, 7, 3, 1.0, 2);
    let plan = make_folds(&data, 5, 4).unwrap();
    let prepared = prepare_folds(&data, &plan).unwrap();
    let tested: usize = prepared
        .folds
        .iter()
        .map(|f| f.test_x1.nrows() + f.test_x2.nrows())
        .sum();
    assert_eq!(tested, data.m1() + data.m2());
    assert!(prepared.folds.iter().all(|f| f.train.p() == 7));
}

fn raw_signals(per_class: usize, len: usize, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sig =
        |r: usize, f: f64| Matrix::from_fn(r, len, |_, t| (f * t as f64).sin() + 0.3 * rng.random_range(-1.0..1.0));
    let x1 = sig(per_class, 0.05);
    let x2 = sig(per_class, 0.4);
    let u = sig(6, 0.2);
    LabeledDataset::new(x1, x2, u).unwrap()
}

#[test]
fn fitted_features_see_training_rows_only() {
    let raw = raw_signals(15, 64, 3);
    let plan = make_folds(&raw, 5, 1).unwrap();
    for cfg in [
        FeatureConfig::pca().with_components(6, Some(3)),
        FeatureConfig::ica(2).with_components(4, Some(2)),
    ] {
        let prepared = prepare_folds_raw(&raw, &plan, &cfg).unwrap();
        assert_eq!(prepared.audit.test_rows_in_fit, 0);
        for (f, fold) in prepared.folds.iter().enumerate() {
            let (te1, te2) = plan.test_indices(f);
            assert_eq!(prepared.audit.fit_rows[f], 30 - te1.len() - te2.len());
            assert_eq!(fold.train.n(), fold.test_x1.ncols());
        }
        let rep = run_prepared(&prepared, &TrainSpec::gepsvm(1e-3), 0).unwrap();
        assert!(rep.mean_accuracy > 80.0, "{}: {}", cfg, rep.mean_accuracy);
    }
    let dwt = FeatureConfig::dwt(crate::features::Wavelet::Haar).with_layout(DwtLayout::SubbandStats);
    let p = prepare_folds_raw(&raw, &plan, &dwt).unwrap();
    assert_eq!(p.audit.fit_rows, vec![0; 5]);
}

#[test]
fn grid_points_are_lexicographic() {
    let grid = GridSpec {
        delta: vec![1.0, 0.1, 1.0],
        gamma: Some(vec![2.0, 1.0]),
        psi: Some(vec![0.5]),
        universum_size: Some(vec![20, 10]),
        ..GridSpec::default()
    };
    grid.validate_for(Classifier::Iugepsvm).unwrap();
    let pts = grid.points();
    assert_eq!(pts.len(), grid.cardinality());
    assert_eq!(pts.len(), 8);
    assert_eq!(
        (pts[0].delta, pts[0].gamma, pts[0].universum_size),
        (0.1, Some(1.0), Some(10))
    );
    assert_eq!(
        (pts[1].delta, pts[1].gamma, pts[1].universum_size),
        (0.1, Some(1.0), Some(20))
    );
    assert_eq!(pts[7].delta, 1.0);
}

#[test]
fn grid_validation() {
    let g = GridSpec {
        delta: vec![1.0],
        nu: Some(vec![1.0]),
        ..GridSpec::default()
    };
    assert!(g.validate_for(Classifier::Gepsvm).is_err());
    assert!(g.validate_for(Classifier::Igepsvm).is_ok());
    assert!(matches!(
        GridSpec::default().validate_for(Classifier::Gepsvm),
        Err(Error::EmptyGrid)
    ));
    let empty_nu = GridSpec {
        delta: vec![1.0],
        nu: Some(vec![]),
        ..GridSpec::default()
    };
    assert!(matches!(
        empty_nu.validate_for(Classifier::Igepsvm),
        Err(Error::EmptyGrid)
    ));
    assert!(GridSpec {
        delta: vec![1.0],
        ..GridSpec::default()
    }
    .validate_for(Classifier::Ugepsvm)
    .is_err());
    assert_eq!(
        GridSpec::full(Classifier::Iugepsvm, true).cardinality(),
        11 * 11 * 11 * 11 * 10
    );
    assert_eq!(GridSpec::full(Classifier::Gepsvm, false).cardinality(), 11);
}

#[test]
fn single_point_grid_matches_run_cv() {
    let data = gaussian_blobs(20, 10, 3, 0.8, 9);
    let plan = make_folds(&data, 5, 2).unwrap();
    let spec = TrainSpec::iugepsvm(0.01, 0.1, 0.001);
    let point = GridPoint {
        delta: 0.01,
        nu: None,
        gamma: Some(0.1),
        psi: Some(0.001),
        sigma: None,
        universum_size: Some(10),
    };
    let g = grid_search(&data, &plan, Classifier::Iugepsvm, &GridSpec::single(point)).unwrap();
    let direct = run_cv(&data, &plan, &spec).unwrap();
    assert_eq!(g.cv_runs, 1);
    assert_eq!(g.best, spec);
    assert_eq!(g.report.fold_accuracies, direct.fold_accuracies);
}

#[test]
fn grid_counts_every_cell() {
    let data = gaussian_blobs(15, 10, 2, 1.0, 3);
    let plan = make_folds(&data, 5, 0).unwrap();
    let grid = GridSpec {
        delta: decades(-5, 5),
        universum_size: Some((1..=10).collect()),
        ..GridSpec::default()
    };
    let g = grid_search(&data, &plan, Classifier::Ugepsvm, &grid).unwrap();
    assert_eq!(g.cv_runs, 110);
    assert_eq!(g.evaluated.len(), 110);
    let best = g.evaluated.iter().filter_map(|(_, a)| *a).fold(f64::MIN, f64::max);
    assert_eq!(g.report.mean_accuracy, best);
    // ties resolve to the earliest cell
    let first = g.evaluated.iter().position(|(_, a)| *a == Some(best)).unwrap();
    assert_eq!(g.best_point, g.evaluated[first].0);
}

#[test]
fn grid_prefers_separating_width() {
    let data = concentric_circles(30, 1.0, 3.0, 0.05, 7);
    let plan = make_folds(&data, 5, 1).unwrap();
    let grid = GridSpec {
        delta: vec![1e-3],
        sigma: Some(vec![1.0, 1e4]),
        ..GridSpec::default()
    };
    let g = grid_search(&data, &plan, Classifier::Gepsvm, &grid).unwrap();
    assert_eq!(g.best_point.sigma, Some(1.0));
    let accs: Vec<f64> = g.evaluated.iter().map(|(_, a)| a.unwrap()).collect();
    assert!(accs[0] >= 95.0 && accs[0] > accs[1], "{accs:?}");
}

#[test]
fn grid_rejects_oversized_universum() {
    let data = gaussian_blobs(10, 5, 2, 1.0, 3);
    let plan = make_folds(&data, 5, 0).unwrap();
    let grid = GridSpec {
        delta: vec![1.0],
        universum_size: Some(vec![6]),
        ..GridSpec::default()
    };
    assert!(grid_search(&data, &plan, Classifier::Ugepsvm, &grid).is_err());
}

#[test]
fn published_ranks() {
    let t1 = published_table("o_vs_s").unwrap();
    let r = rank_models(&t1.values).unwrap();
    for (got, want) in r.iter().zip([5.57, 4.43, 3.71, 2.29, 3.43, 1.57]) {
        assert!((got - want).abs() < 0.01);
    }
    let t2 = published_table("z_vs_s").unwrap();
    let r = rank_models(&t2.values).unwrap();
    for (got, want) in r.iter().zip([5.14, 3.00, 4.57, 2.21, 3.86, 2.21]) {
        assert!((got - want).abs() < 0.01);
    }
}

#[test]
fn rank_edge_cases() {
    assert_eq!(rank_models(&[vec![70.0; 6], vec![50.0; 6]]).unwrap(), vec![3.5; 6]);
    let dec = vec![vec![90.0, 80.0, 70.0, 60.0, 50.0, 40.0]; 3];
    assert_eq!(rank_models(&dec).unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    assert!(rank_models(&[]).is_err());
    assert!(rank_models(&[vec![1.0, f64::INFINITY]]).is_err());
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn ranks_conserve_row_sum(rows in proptest::collection::vec(proptest::collection::vec(0u8..6, 6), 1..9)) {
            let m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| 50.0 + v as f64).collect()).collect();
            let r = rank_models(&m).unwrap();
            prop_assert!((r.iter().sum::<f64>() - 21.0).abs() < 1e-12);
        }
    }
}

fn smoke_manifest(workers: usize) -> BenchmarkManifest {
    let json = serde_json::json!({
        "tasks": ["o_vs_s"],
        "features": ["db1", "pca"],
        "classifiers": ["gepsvm", "I-GEPSVM", "ugepsvm", "IU-GEPSVM"],
        "grids": {
            "GEPSVM": {"delta": [1e-3, 1e-1]},
            "I-GEPSVM": {"delta": [1e-3], "nu": [0.1, 1.0]},
            "U-GEPSVM": {"delta": [1e-3], "universum_size": [5, 10]},
            "IU-GEPSVM": {"delta": [1e-3], "gamma": [0.1, 1.0], "psi": [1e-3], "universum_size": [10]}
        },
        "synthetic": {"per_set": 12, "samples": 4097, "seed": 5},
        "seed": 3,
        "workers": workers,
        "folds": 3,
        "feature_options": {"dwt_layout": "subband_stats", "n_components": 8, "top_k": 4}
    });
    BenchmarkManifest::from_json(&json.to_string()).unwrap()
}

#[test]
fn benchmark_is_worker_independent() {
    let a = run_benchmark(&smoke_manifest(1)).unwrap();
    let b = run_benchmark(&smoke_manifest(4)).unwrap();
    assert_eq!(a.rows.len(), 8);
    assert_eq!(a.failed_cells(), 0, "{:?}", a.rows);
    assert_eq!(a.to_csv(false).unwrap(), b.to_csv(false).unwrap());
    assert_eq!(a.summary.cv_runs, 2 * (2 + 2 + 2 + 2));
    let s = &a.summary.tasks[0];
    assert_eq!(s.features, vec!["db1", "pca"]);
    assert!((s.average_rank.iter().sum::<f64>() - 10.0).abs() < 1e-12);

    let csv = a.to_csv(true).unwrap();
    let rows = read_results_csv(&csv).unwrap();
    assert_eq!(rows.len(), 8);
    for (r, orig) in rows.iter().zip(&a.rows) {
        assert_eq!(r.mean_acc, orig.mean_acc);
        assert_eq!(r.fold_accs, orig.fold_accs);
        assert_eq!(r.params, orig.params);
    }
}

#[test]
fn benchmark_records_cell_failures() {
    let mut m = smoke_manifest(2);
    m.classifiers = vec![Classifier::Ugepsvm, Classifier::Gepsvm];
    m.features = vec!["haar".into()];
    m.grids.insert(
        "U-GEPSVM".into(),
        GridSpec {
            delta: vec![1e-3],
            universum_size: Some(vec![50]),
            ..GridSpec::default()
        },
    );
    let r = run_benchmark(&m).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert!(r.rows[0].error.is_some() && r.rows[0].mean_acc.is_none());
    assert!(r.rows[1].error.is_none());
    assert_eq!(r.summary.failed_cells, 1);
    assert_eq!(r.summary.tasks[0].incomplete_features, vec!["haar"]);
    let back = read_results_csv(&r.to_csv(true).unwrap()).unwrap();
    assert!(back[0].error.as_deref().unwrap().contains("Universum"));
}

#[test]
fn manifest_validation_and_filters() {
    let m = smoke_manifest(1);
    let one = m
        .filtered(None, Some(&["dwt_db1".to_string()]), Some(&[Classifier::Iugepsvm]))
        .unwrap();
    assert_eq!((one.features.len(), one.classifiers.len()), (1, 1));
    assert!(m.filtered(None, Some(&["db6".to_string()]), None).is_err());
    let mut bad = m.clone();
    bad.workers = 0;
    assert!(bad.validate().is_err());
    assert!(BenchmarkManifest::from_json(r#"{"tasks": []}"#).is_err());
    assert!(read_results_csv("task,feature\n").is_err());
    assert!(read_results_csv(&RESULTS_COLUMNS.join(",")).is_err());
}
