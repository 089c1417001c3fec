//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! The real literature-mined corpora are not distributable, so the criteria
//! combine one exact published-value cross-check with oracle- and
//! property-based checks on the synthetic corpora.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use formbench::baselines::{fit_knn, fit_mlr, fit_plsr, fit_rf, RfConfig};
use formbench::data::{apply_scaling, encode_categoricals, fit_scaling, Dataset};
use formbench::deepnet::{
    self, forward, gradient, loss_mse, NetworkParams, NetworkSpec, PresetName, TrainConfig,
};
use formbench::metrics::{accuracy_cdrc_from_f2, evaluate, f2_similarity, DissolutionProfile};
use formbench::split::{
    max_dissim_select, mdfis_select_with_initial, mdfis_three_way, mdfis_three_way_sized,
    random_split, DistanceTable, MdfisConfig, SplitAssignment,
};
use formbench::synth::{
    brute_force_max_dissim, generate_ofdf_like, generate_srmt_like, SynthConfig,
};
use formbench::{derive_seed, Matrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criterion 1 — feeding the 20 published f2 values of the reference DNN
/// test-set evaluation through the release-curve accuracy gives exactly
/// 0.80.
#[test]
fn criterion_1_reference_f2_batch_scores_exactly_80_percent() {
    let f2_values = [
        77.42, 63.35, 64.84, 67.21, 59.75, 50.85, 77.77, 30.39, 44.56, 74.47, 65.72, 90.05,
        57.05, 41.91, 55.06, 65.84, 51.08, 49.57, 64.42, 59.35,
    ];
    let accuracy = accuracy_cdrc_from_f2(&f2_values).unwrap();
    assert_eq!(accuracy, 0.80, "expected exactly 0.80, got {accuracy}");
    println!("[PASS] criterion 1 — reference f2 batch scores exactly 0.80");
}

/// Criterion 2 — f2 identities: self-similarity is exactly 100 on 1000
/// random profiles, a constant 10-point gap gives 49.89 ± 0.01, and
/// symmetry holds to 1e-12.
#[test]
fn criterion_2_f2_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf2);
    for _ in 0..1000 {
        let values: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..=100.0)).collect();
        let p = DissolutionProfile::from_values(&values).unwrap();
        assert_eq!(f2_similarity(&p, &p).unwrap(), 100.0);

        let other: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..=100.0)).collect();
        let q = DissolutionProfile::from_values(&other).unwrap();
        let ab = f2_similarity(&p, &q).unwrap();
        let ba = f2_similarity(&q, &p).unwrap();
        assert!((ab - ba).abs() <= 1e-12);
    }
    let r = DissolutionProfile::from_values(&[20.0, 40.0, 60.0, 80.0]).unwrap();
    let t = DissolutionProfile::from_values(&[30.0, 50.0, 70.0, 90.0]).unwrap();
    let gap10 = f2_similarity(&r, &t).unwrap();
    assert!((gap10 - 49.89).abs() <= 0.01, "10-point gap f2 = {gap10}");
    println!("[PASS] criterion 2 — f2 identities (self=100 exact, 10-gap 49.89, symmetric)");
}

/// Criterion 3 — on 50 random small networks every analytic gradient entry
/// matches central finite differences (step 1e-5) within 1e-5 relative
/// error.
#[test]
fn criterion_3_gradient_matches_finite_differences() {
    const STEP: f64 = 1e-5;
    const REL_TOL: f64 = 1e-5;

    fn fd(
        params: &NetworkParams,
        x: &Matrix,
        y: &Matrix,
        bump: impl Fn(&mut NetworkParams, f64),
    ) -> f64 {
        let mut plus = params.clone();
        bump(&mut plus, STEP);
        let mut minus = params.clone();
        bump(&mut minus, -STEP);
        (loss_mse(&plus, x, y).unwrap() - loss_mse(&minus, x, y).unwrap()) / (2.0 * STEP)
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x67ad);
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let hidden = rng.gen_range(1..=3);
        let input = rng.gen_range(1..=8);
        let output = rng.gen_range(1..=3);
        let mut widths = vec![input];
        for _ in 0..hidden {
            widths.push(rng.gen_range(1..=8));
        }
        widths.push(output);
        let spec = NetworkSpec::new(widths, rng.gen()).unwrap();
        let params = deepnet::init(&spec);
        let batch = rng.gen_range(1..=10);
        let x = Matrix::from_rows(
            &(0..batch)
                .map(|_| (0..input).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect::<Vec<_>>(),
        );
        let y = Matrix::from_rows(
            &(0..batch)
                .map(|_| (0..output).map(|_| rng.gen_range(0.1..0.9)).collect())
                .collect::<Vec<_>>(),
        );
        let analytic = gradient(&params, &x, &y).unwrap();
        for l in 0..params.layers.len() {
            for j in 0..params.layers[l].bias.len() {
                for i in 0..params.layers[l].weights[j].len() {
                    let numeric = fd(&params, &x, &y, |p, h| p.layers[l].weights[j][i] += h);
                    let a = analytic[l].weights[j][i];
                    let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
                    assert!(rel <= REL_TOL, "weight [{l}][{j}][{i}]: rel {rel:e}");
                    worst = worst.max(rel);
                    checked += 1;
                }
                let numeric = fd(&params, &x, &y, |p, h| p.layers[l].bias[j] += h);
                let a = analytic[l].bias[j];
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
                assert!(rel <= REL_TOL, "bias [{l}][{j}]: rel {rel:e}");
                worst = worst.max(rel);
                checked += 1;
            }
        }
    }
    println!(
        "[PASS] criterion 3 — {checked} gradient entries within 1e-5 of finite differences (worst {worst:.2e})"
    );
}

/// Criterion 4 — on 100 random instances with |pool| ≤ 12, MD-FIS with
/// α = 0 and a forced initial set, the production maximum-dissimilarity
/// selector, and the brute-force oracle produce identical index sequences.
#[test]
fn criterion_4_splitter_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c41);
    for round in 0..100 {
        let pool_size = rng.gen_range(2..=12);
        let initial_size = rng.gen_range(1..=3);
        let n = pool_size + initial_size;
        let points: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
            .collect();
        let k = rng.gen_range(1..=pool_size);

        let rows: Vec<Vec<f64>> = points.iter().map(|&(x, y)| vec![x, y]).collect();
        let dt = DistanceTable::from_matrix(&Matrix::from_rows(&rows));
        let initial: Vec<usize> = (0..initial_size).collect();
        let pool: Vec<usize> = (initial_size..n).collect();

        let fast = max_dissim_select(&dt, &initial, &pool, k).unwrap();
        let brute = brute_force_max_dissim(&dt, &initial, &pool, k).unwrap();
        assert_eq!(fast, brute, "round {round}: selector vs brute force");

        let ds = one_group_point_dataset(&points);
        let cfg = MdfisConfig {
            selection_size: k,
            alpha: 0.0,
            min_group_size: 1,
            ..MdfisConfig::default()
        };
        let mdfis = mdfis_select_with_initial(&ds, &dt, &cfg, &initial).unwrap();
        assert_eq!(mdfis, fast, "round {round}: mdfis(α=0) vs selector");
    }
    println!("[PASS] criterion 4 — selector ≡ mdfis(α=0) ≡ brute force on 100 instances");
}

fn one_group_point_dataset(points: &[(f64, f64)]) -> Dataset {
    use formbench::data::{DatasetSchema, FeatureColumn, FormulationRecord, TaskKind};
    let schema = DatasetSchema {
        id: "record_id".into(),
        features: vec![FeatureColumn::numeric("x"), FeatureColumn::numeric("y")],
        targets: vec!["dt_s".into()],
        group: "api".into(),
        task_kind: TaskKind::Ofdf,
    };
    let records: Vec<FormulationRecord> = points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| FormulationRecord {
            record_id: format!("r{i}"),
            group_id: "G".into(),
            categoricals: BTreeMap::new(),
            numerics: BTreeMap::from([("x".to_string(), x), ("y".to_string(), y)]),
            targets: vec![10.0],
        })
        .collect();
    Dataset::new(schema, records).unwrap()
}

/// Criterion 5 — MD-FIS structural guarantees on the 131-record synthetic
/// corpus: 20/20 selection sizes, no record from a group below four members,
/// training representation for every selected group, and identical output
/// across five re-runs.
#[test]
fn criterion_5_mdfis_structural_guarantees() {
    let cfg = SynthConfig::ofdf_default(2024);
    let ds = generate_ofdf_like(&cfg).unwrap();
    assert_eq!(ds.n_records(), 131);
    assert_eq!(ds.group_index().len(), 13);

    let mdfis = MdfisConfig::default();
    let split = mdfis_three_way(&ds, &mdfis, 7).unwrap();
    split.assert_partition(131).unwrap();
    assert_eq!(split.train.len(), 91);
    assert_eq!(split.validation.len(), 20);
    assert_eq!(split.test.len(), 20);

    for &i in split.validation.iter().chain(&split.test) {
        let group = ds.group_of(i);
        assert!(
            ds.group_index()[group].len() >= 4,
            "record {i} comes from small group {group}"
        );
    }
    for (group, members) in ds.group_index() {
        let selected = members
            .iter()
            .any(|m| split.validation.contains(m) || split.test.contains(m));
        if selected {
            assert!(
                members.iter().any(|m| split.train.contains(m)),
                "group {group} lost all members to validation/test"
            );
        }
    }
    for _ in 0..4 {
        assert_eq!(mdfis_three_way(&ds, &mdfis, 7).unwrap(), split);
    }
    println!("[PASS] criterion 5 — MD-FIS 91/20/20 with group guarantees, 5 identical re-runs");
}

fn shrunk_dnn_validation_accuracy(ds: &Dataset, split: &SplitAssignment, net_seed: u64) -> f64 {
    let encoded = encode_categoricals(ds).unwrap();
    let scaling = fit_scaling(&encoded, &split.train).unwrap();
    let scaled = apply_scaling(&encoded, &scaling).unwrap();
    let x = scaled.matrix().unwrap();
    let x_train = x.select_rows(&split.train);
    let y_rows: Vec<Vec<f64>> = split
        .train
        .iter()
        .map(|&i| scaling.scale_targets(&ds.record(i).targets).unwrap())
        .collect();
    let y_train = Matrix::from_rows(&y_rows);
    // the reference network shrunk to 3 hidden layers and 200 epochs
    let spec = NetworkSpec::new(vec![x.cols(), 50, 50, 50, 1], net_seed).unwrap();
    let cfg = TrainConfig::new(0.01, 0.8, 200).unwrap();
    let outcome = deepnet::train(&spec, &cfg, &x_train, &y_train).unwrap();
    let predictions: BTreeMap<usize, Vec<f64>> = (0..ds.n_records())
        .map(|i| (i, forward(&outcome.params, x.row(i)).unwrap()))
        .collect();
    evaluate(ds, split, &predictions, &scaling)
        .unwrap()
        .validation
        .accuracy
}

fn standard_deviation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Criterion 6 — over 50 seeds, the spread of validation accuracy under
/// MD-FIS 20-record selections is strictly smaller than under random
/// 20-record holdouts. The network seed is held fixed so the spread
/// measures the splits, not the initialization.
#[test]
fn criterion_6_mdfis_reduces_validation_variance() {
    let ds = generate_ofdf_like(&SynthConfig::ofdf_default(2024)).unwrap();
    let net_seed = derive_seed(2024, 7);
    let mut mdfis_acc = Vec::with_capacity(50);
    let mut random_acc = Vec::with_capacity(50);
    for seed in 0..50u64 {
        let m = mdfis_three_way_sized(&ds, &MdfisConfig::default(), 20, 0, seed).unwrap();
        assert_eq!(m.validation.len(), 20);
        mdfis_acc.push(shrunk_dnn_validation_accuracy(&ds, &m, net_seed));
        let r = &random_split(&ds, 20.0 / 131.0, 1, seed).unwrap()[0];
        assert_eq!(r.validation.len(), 20);
        random_acc.push(shrunk_dnn_validation_accuracy(&ds, r, net_seed));
    }
    let sd_mdfis = standard_deviation(&mdfis_acc);
    let sd_random = standard_deviation(&random_acc);
    assert!(
        sd_mdfis < sd_random,
        "sd under MD-FIS {sd_mdfis:.4} is not below sd under random splits {sd_random:.4}"
    );
    println!(
        "[PASS] criterion 6 — validation accuracy sd {sd_mdfis:.4} (MD-FIS) < {sd_random:.4} (random), 50 seeds"
    );
}

fn preset_test_accuracy(task: formbench::data::TaskKind, seed: u64) -> f64 {
    let (ds, preset) = match task {
        formbench::data::TaskKind::Ofdf => (
            generate_ofdf_like(&SynthConfig::ofdf_default(seed)).unwrap(),
            PresetName::OfdfDnn,
        ),
        formbench::data::TaskKind::Srmt => (
            generate_srmt_like(&SynthConfig::srmt_default(seed)).unwrap(),
            PresetName::SrmtDnn,
        ),
    };
    let split = mdfis_three_way(&ds, &MdfisConfig::default(), seed).unwrap();
    assert_eq!(split.validation.len(), 20);
    assert_eq!(split.test.len(), 20);

    let encoded = encode_categoricals(&ds).unwrap();
    let scaling = fit_scaling(&encoded, &split.train).unwrap();
    let scaled = apply_scaling(&encoded, &scaling).unwrap();
    let x = scaled.matrix().unwrap();
    let x_train = x.select_rows(&split.train);
    let y_rows: Vec<Vec<f64>> = split
        .train
        .iter()
        .map(|&i| scaling.scale_targets(&ds.record(i).targets).unwrap())
        .collect();
    let y_train = Matrix::from_rows(&y_rows);

    let (spec, cfg) = deepnet::preset(preset, x.cols(), ds.schema().targets.len());
    let spec = spec.with_seed(derive_seed(seed, 100));
    let outcome = deepnet::train(&spec, &cfg, &x_train, &y_train).unwrap();
    let predictions: BTreeMap<usize, Vec<f64>> = (0..ds.n_records())
        .map(|i| (i, forward(&outcome.params, x.row(i)).unwrap()))
        .collect();
    let report = evaluate(&ds, &split, &predictions, &scaling).unwrap();
    report.test.expect("three-way split").accuracy
}

/// Criterion 7 — the full reference networks reach at least 80% test
/// accuracy on the synthetic corpora under an MD-FIS 91/20/20 (OFDF) and
/// 105/20/20 (SRMT) split.
#[test]
fn criterion_7_preset_networks_reach_80_percent_test_accuracy() {
    let ofdf = preset_test_accuracy(formbench::data::TaskKind::Ofdf, 1);
    assert!(ofdf >= 0.80, "disintegration-time test accuracy {ofdf}");
    let srmt = preset_test_accuracy(formbench::data::TaskKind::Srmt, 1);
    assert!(srmt >= 0.80, "release-curve test accuracy {srmt}");
    println!(
        "[PASS] criterion 7 — preset test accuracy {ofdf:.2} (disintegration) / {srmt:.2} (release) ≥ 0.80"
    );
}

/// Criterion 8 — baseline oracles: PLSR with full components matches MLR
/// within 1e-6; MLR recovers planted coefficients within 1e-8; k-NN with
/// k = 1 has zero training error; RF predictions stay within the training
/// target range on 100 random datasets.
#[test]
fn criterion_8_baseline_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xba5e);

    // MLR coefficient recovery
    for _ in 0..10 {
        let p = rng.gen_range(2..=6);
        let n = rng.gen_range(p + 3..=40);
        let w: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let b: f64 = rng.gen_range(-1.0..1.0);
        let x = Matrix::from_rows(
            &(0..n)
                .map(|_| (0..p).map(|_| rng.gen_range(-3.0..3.0)).collect())
                .collect::<Vec<_>>(),
        );
        let y: Vec<f64> = (0..n)
            .map(|i| x.row(i).iter().zip(&w).map(|(v, c)| v * c).sum::<f64>() + b)
            .collect();
        match fit_mlr(&x, &y).unwrap() {
            formbench::baselines::TrainedRegressor::Mlr { coef, intercept } => {
                for (c, e) in coef.iter().zip(&w) {
                    assert!((c - e).abs() < 1e-8);
                }
                assert!((intercept - b).abs() < 1e-8);
            }
            _ => unreachable!(),
        }
    }

    // PLSR with all components reproduces least squares
    for _ in 0..10 {
        let p = rng.gen_range(2..=5);
        let n = rng.gen_range(p + 5..=40);
        let x = Matrix::from_rows(
            &(0..n)
                .map(|_| (0..p).map(|_| rng.gen_range(-3.0..3.0)).collect())
                .collect::<Vec<_>>(),
        );
        let y: Vec<f64> = (0..n)
            .map(|i| x.row(i).iter().sum::<f64>() + rng.gen_range(-0.5..0.5))
            .collect();
        let pls = fit_plsr(&x, &y, p).unwrap();
        let ols = fit_mlr(&x, &y).unwrap();
        for i in 0..n {
            let d = (pls.predict(x.row(i))[0] - ols.predict(x.row(i))[0]).abs();
            assert!(d < 1e-6, "PLSR-MLR gap {d}");
        }
    }

    // k-NN with k = 1 memorizes the training set
    let x = Matrix::from_rows(
        &(0..30)
            .map(|_| (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect())
            .collect::<Vec<_>>(),
    );
    let y: Vec<f64> = (0..30).map(|_| rng.gen_range(0.0..90.0)).collect();
    let knn = fit_knn(&x, &y, 1).unwrap();
    for i in 0..30 {
        assert_eq!(knn.predict(x.row(i))[0], y[i]);
    }

    // RF stays inside the training target range
    for round in 0..100 {
        let n = rng.gen_range(5..=20);
        let p = rng.gen_range(1..=4);
        let x = Matrix::from_rows(
            &(0..n)
                .map(|_| (0..p).map(|_| rng.gen_range(-5.0..5.0)).collect())
                .collect::<Vec<_>>(),
        );
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-20.0..20.0)).collect();
        let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let rf = fit_rf(&x, &y, &RfConfig::new(10, 3, round).unwrap()).unwrap();
        for _ in 0..5 {
            let q: Vec<f64> = (0..p).map(|_| rng.gen_range(-8.0..8.0)).collect();
            let pred = rf.predict(&q)[0];
            assert!(pred >= lo - 1e-12 && pred <= hi + 1e-12);
        }
    }
    println!("[PASS] criterion 8 — baseline oracles (MLR, PLSR≡MLR, kNN, RF bounds)");
}

/// Criterion 9 — two pipeline runs with an identical configuration produce
/// byte-identical split, model and report JSON files.
#[test]
fn criterion_9_pipeline_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.json");
    std::fs::write(
        &config_path,
        serde_json::json!({
            "task": "ofdf",
            "synth": {"records": 131, "groups": 13, "noise_sd": 3.0},
            "split": {"strategy": "mdfis", "validation": 20, "test": 20},
            "models": [
                {"name": "mlr"},
                {"name": "knn"},
                {"name": "dnn"}
            ],
            "seed": 77
        })
        .to_string(),
    )
    .unwrap();

    let run = |out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_formbench"))
            .args([
                "pipeline",
                "--config",
                config_path.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .expect("pipeline run");
        assert!(status.success(), "pipeline exited with {status}");
    };
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    run(&out1);
    run(&out2);

    let compared = [
        "split.json",
        "model_mlr.json",
        "model_knn.json",
        "model_dnn.json",
        "report_mlr.json",
        "report_knn.json",
        "report_dnn.json",
    ];
    for name in compared {
        let a = std::fs::read(out1.join(name)).unwrap_or_else(|_| panic!("missing {name}"));
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    println!(
        "[PASS] criterion 9 — {} artifacts byte-identical across two pipeline runs",
        compared.len()
    );
}
