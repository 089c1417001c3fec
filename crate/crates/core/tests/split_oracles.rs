//! Cross-checks between the three routes to a greedy dissimilarity
//! selection: the production selector, the MD-FIS greedy with α = 0 and a
//! forced initial set, and the naive brute-force oracle.

use std::collections::BTreeMap;

use formbench::data::{Dataset, DatasetSchema, FeatureColumn, FormulationRecord, TaskKind};
use formbench::split::{
    max_dissim_select, mdfis_select_with_initial, DistanceTable, MdfisConfig, SplitAssignment,
};
use formbench::synth::brute_force_max_dissim;
use formbench::Matrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Dataset of 2-D points in one API group (so the last-member rule never
/// engages and MD-FIS with α = 0 must equal plain maximum dissimilarity).
fn point_dataset(points: &[(f64, f64)]) -> Dataset {
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

fn point_table(points: &[(f64, f64)]) -> DistanceTable {
    let rows: Vec<Vec<f64>> = points.iter().map(|&(x, y)| vec![x, y]).collect();
    DistanceTable::from_matrix(&Matrix::from_rows(&rows))
}

#[test]
fn three_routes_agree_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1ec7);
    for round in 0..100 {
        let pool_size = rng.gen_range(2..=12);
        let initial_size = rng.gen_range(1..=3);
        let n = pool_size + initial_size;
        let points: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
            .collect();
        let k = rng.gen_range(1..=pool_size);

        let dt = point_table(&points);
        let initial: Vec<usize> = (0..initial_size).collect();
        let pool: Vec<usize> = (initial_size..n).collect();

        let fast = max_dissim_select(&dt, &initial, &pool, k).unwrap();
        let brute = brute_force_max_dissim(&dt, &initial, &pool, k).unwrap();
        assert_eq!(fast, brute, "round {round}: selector vs brute force");

        let ds = point_dataset(&points);
        let cfg = MdfisConfig {
            selection_size: k,
            alpha: 0.0,
            min_group_size: 1,
            ..MdfisConfig::default()
        };
        let mdfis = mdfis_select_with_initial(&ds, &dt, &cfg, &initial).unwrap();
        assert_eq!(mdfis, fast, "round {round}: mdfis(α=0) vs selector");
    }
}

#[test]
fn selection_is_permutation_covariant() {
    // relabeling the rows must relabel the selection, nothing more
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0c0);
    for _ in 0..30 {
        let n = rng.gen_range(5..=12);
        let points: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
            .collect();
        let k = rng.gen_range(1..=n - 1);

        // permutation: perm[old] = new
        let mut perm: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let j = rng.gen_range(i..n);
            perm.swap(i, j);
        }
        let mut permuted = vec![(0.0, 0.0); n];
        for (old, &(x, y)) in points.iter().enumerate() {
            permuted[perm[old]] = (x, y);
        }

        let base = max_dissim_select(&point_table(&points), &[0], &(1..n).collect::<Vec<_>>(), k)
            .unwrap();
        let moved_initial = [perm[0]];
        let moved_pool: Vec<usize> = (1..n).map(|i| perm[i]).collect();
        let moved =
            max_dissim_select(&point_table(&permuted), &moved_initial, &moved_pool, k).unwrap();
        let mapped: Vec<usize> = base.iter().map(|&i| perm[i]).collect();
        assert_eq!(moved, mapped);
    }
}

#[test]
fn every_strategy_partitions_the_dataset() {
    use formbench::split::{manual_split, mdfis_three_way, random_split};
    use formbench::synth::{generate_srmt_like, SynthConfig};

    let ds = generate_srmt_like(&SynthConfig::imbalanced(60, 8, 2.0, 5).unwrap()).unwrap();
    let n = ds.n_records();

    for s in random_split(&ds, 0.25, 20, 3).unwrap() {
        s.assert_partition(n).unwrap();
    }

    let ids: Vec<String> = (0..6).map(|i| ds.record(i).record_id.clone()).collect();
    let s = manual_split(&ds, &ids[..3], &ids[3..]).unwrap();
    s.assert_partition(n).unwrap();

    let cfg = MdfisConfig {
        selection_size: 6,
        n_initial_candidates: 300,
        initial_set_size: 3,
        ..MdfisConfig::default()
    };
    let s = mdfis_three_way(&ds, &cfg, 9).unwrap();
    s.assert_partition(n).unwrap();
    assert_eq!(s.validation.len(), 6);
    assert_eq!(s.test.len(), 6);

    // explicit holdouts reject overlaps
    assert!(SplitAssignment::from_holdouts(10, &[1, 2], &[2, 3]).is_err());
}
