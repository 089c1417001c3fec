//! Train/validation/test selection strategies for small imbalanced datasets.
//!
//! Four strategies are provided: plain random holdout, manual (expert) id
//! lists, greedy maximum dissimilarity, and MD-FIS — maximum dissimilarity
//! extended with a small-API-group filter and a representative initial set,
//! selecting by the cost
//!
//! ```text
//! cost = originalDistance − α · subMeanDistance
//! ```
//!
//! where `originalDistance` is the candidate's minimum distance to the
//! initial-plus-selected set and `subMeanDistance` its mean distance to the
//! still-unselected members of its own API group. The subtraction steers the
//! selection away from boundary points and group stragglers.
//!
//! Every operation is a pure function of (inputs, seed); identical seeds give
//! identical selections across runs and platforms.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::matrix::{euclidean, Matrix};

/// Disjoint train/validation/test row-index sets covering a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitAssignment {
    /// Builds a split from validation/test index sets; every other row goes
    /// to training. Index sets are stored sorted.
    pub fn from_holdouts(n: usize, validation: &[usize], test: &[usize]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &i in validation.iter().chain(test) {
            if i >= n {
                return Err(Error::Argument(format!(
                    "index {i} out of bounds for {n} records"
                )));
            }
            if !seen.insert(i) {
                return Err(Error::Argument(format!(
                    "index {i} assigned to more than one subset"
                )));
            }
        }
        let mut validation: Vec<usize> = validation.to_vec();
        let mut test: Vec<usize> = test.to_vec();
        validation.sort_unstable();
        test.sort_unstable();
        let train: Vec<usize> = (0..n).filter(|i| !seen.contains(i)).collect();
        Ok(SplitAssignment {
            train,
            validation,
            test,
        })
    }

    /// Checks that the three sets are pairwise disjoint and cover `0..n`.
    pub fn assert_partition(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &i in self
            .train
            .iter()
            .chain(&self.validation)
            .chain(&self.test)
        {
            if i >= n {
                return Err(Error::Argument(format!("index {i} out of bounds")));
            }
            if seen[i] {
                return Err(Error::Argument(format!("index {i} appears twice")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Argument("split does not cover all records".into()));
        }
        Ok(())
    }

    /// Serializable form carrying record ids rather than row numbers, so a
    /// split can be reused across runs and shipped as a manual split.
    pub fn to_file(&self, ds: &Dataset) -> SplitFile {
        let ids = |idx: &[usize]| {
            idx.iter()
                .map(|&i| ds.record(i).record_id.clone())
                .collect()
        };
        SplitFile {
            validation: ids(&self.validation),
            test: ids(&self.test),
        }
    }
}

/// On-disk split format: `{"validation": [ids], "test": [ids]}`. Training is
/// implicit (every record not listed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitFile {
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

impl SplitFile {
    /// Resolves ids back to row indices against a dataset.
    pub fn resolve(&self, ds: &Dataset) -> Result<SplitAssignment> {
        manual_split(ds, &self.validation, &self.test)
    }
}

/// Symmetric Euclidean distance table over encoded, scaled feature rows
/// (targets excluded).
#[derive(Debug, Clone)]
pub struct DistanceTable {
    n: usize,
    d: Vec<f64>,
}

impl DistanceTable {
    pub fn from_matrix(m: &Matrix) -> Self {
        let n = m.rows();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dist = euclidean(m.row(i), m.row(j));
                d[i * n + j] = dist;
                d[j * n + i] = dist;
            }
        }
        DistanceTable { n, d }
    }

    /// Builds the table from a dataset's encoded matrix as-is. Encode and
    /// scale first (see [`Dataset::encoded_scaled_for_distance`]).
    pub fn from_dataset(ds: &Dataset) -> Result<Self> {
        Ok(Self::from_matrix(ds.matrix()?))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

/// MD-FIS parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdfisConfig {
    /// Number of records to select (validation or test size).
    pub selection_size: usize,
    /// Weight of the within-group mean distance in the cost.
    pub alpha: f64,
    /// API groups smaller than this never contribute candidates; their
    /// records always stay in training.
    pub min_group_size: usize,
    /// Number of random initial sets scored in the representative
    /// initial-set search.
    pub n_initial_candidates: usize,
    pub initial_set_size: usize,
    pub seed: u64,
}

impl Default for MdfisConfig {
    fn default() -> Self {
        MdfisConfig {
            selection_size: 20,
            alpha: 0.5,
            min_group_size: 4,
            n_initial_candidates: 10_000,
            initial_set_size: 5,
            seed: 0,
        }
    }
}

impl MdfisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.selection_size < 1 {
            return Err(Error::Argument("selection_size must be >= 1".into()));
        }
        if self.n_initial_candidates < 1 {
            return Err(Error::Argument("n_initial_candidates must be >= 1".into()));
        }
        if self.initial_set_size < 1 {
            return Err(Error::Argument("initial_set_size must be >= 1".into()));
        }
        if self.min_group_size < 1 {
            return Err(Error::Argument("min_group_size must be >= 1".into()));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::Argument("alpha must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Draws `k` distinct values from `items` by partial Fisher-Yates.
fn sample_without_replacement<R: Rng>(items: &[usize], k: usize, rng: &mut R) -> Vec<usize> {
    let mut scratch = items.to_vec();
    for i in 0..k {
        let j = rng.gen_range(i..scratch.len());
        scratch.swap(i, j);
    }
    scratch.truncate(k);
    scratch
}

/// Random two-way holdout, repeated. Each repeat draws `floor(n·fraction)`
/// records without replacement into the validation set; the rest train.
pub fn random_split(
    ds: &Dataset,
    fraction: f64,
    repeats: usize,
    seed: u64,
) -> Result<Vec<SplitAssignment>> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Argument(format!(
            "fraction must be inside (0, 1), got {fraction}"
        )));
    }
    let n = ds.n_records();
    let held = (n as f64 * fraction).floor() as usize;
    if held < 1 {
        return Err(Error::Argument(format!(
            "fraction {fraction} holds out no records from {n}"
        )));
    }
    let all: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..repeats)
        .map(|_| {
            let validation = sample_without_replacement(&all, held, &mut rng);
            SplitAssignment::from_holdouts(n, &validation, &[])
        })
        .collect()
}

/// Builds a split from explicit record-id lists (the expert-picked strategy).
pub fn manual_split(
    ds: &Dataset,
    validation_ids: &[String],
    test_ids: &[String],
) -> Result<SplitAssignment> {
    let index: BTreeMap<&str, usize> = ds
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| (r.record_id.as_str(), i))
        .collect();
    let resolve = |ids: &[String]| -> Result<Vec<usize>> {
        ids.iter()
            .map(|id| {
                index
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| Error::UnknownId(id.clone()))
            })
            .collect()
    };
    let validation = resolve(validation_ids)?;
    let test = resolve(test_ids)?;
    for id in validation_ids {
        if test_ids.contains(id) {
            return Err(Error::Argument(format!(
                "record id {id:?} appears in both validation and test lists"
            )));
        }
    }
    SplitAssignment::from_holdouts(ds.n_records(), &validation, &test)
}

/// Greedy maximum dissimilarity: repeatedly moves the pool element with the
/// greatest minimum distance to (initial ∪ already-selected) into the
/// selection. Ties break toward the lowest row index.
pub fn max_dissim_select(
    dt: &DistanceTable,
    initial: &[usize],
    pool: &[usize],
    k: usize,
) -> Result<Vec<usize>> {
    if initial.is_empty() {
        return Err(Error::Argument("initial set must be non-empty".into()));
    }
    if k > pool.len() {
        return Err(Error::Argument(format!(
            "cannot select {k} from a pool of {}",
            pool.len()
        )));
    }
    for &i in initial.iter().chain(pool) {
        if i >= dt.size() {
            return Err(Error::Argument(format!("index {i} outside distance table")));
        }
    }
    if initial.iter().any(|i| pool.contains(i)) {
        return Err(Error::Argument(
            "pool must be disjoint from the initial set".into(),
        ));
    }

    let mut pool: Vec<usize> = pool.to_vec();
    pool.sort_unstable();
    // min distance from each pool element to the growing reference set
    let mut min_dist: BTreeMap<usize, f64> = pool
        .iter()
        .map(|&p| {
            let d = initial
                .iter()
                .map(|&i| dt.get(p, i))
                .fold(f64::INFINITY, f64::min);
            (p, d)
        })
        .collect();

    let mut selection = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for (&p, &d) in &min_dist {
            match best {
                Some((_, bd)) if d <= bd => {}
                _ => best = Some((p, d)),
            }
        }
        let (chosen, _) = best.expect("pool exhausted before k selections");
        min_dist.remove(&chosen);
        for (&p, d) in min_dist.iter_mut() {
            *d = d.min(dt.get(p, chosen));
        }
        selection.push(chosen);
    }
    Ok(selection)
}

/// Step 1 of MD-FIS: indices whose API group has at least `min_group_size`
/// members. Filtered records are candidates for nothing and stay in training.
pub fn small_group_filter(ds: &Dataset, min_group_size: usize) -> Vec<usize> {
    let mut out: Vec<usize> = ds
        .group_index()
        .values()
        .filter(|members| members.len() >= min_group_size)
        .flatten()
        .copied()
        .collect();
    out.sort_unstable();
    out
}

/// Step 2 of MD-FIS: scores `n_initial_candidates` random subsets of the
/// candidates and keeps the one with the best coverage, defined as the
/// negated mean distance from each remaining candidate to its nearest subset
/// member. Ties keep the first subset drawn.
pub fn select_initial_set(
    dt: &DistanceTable,
    candidates: &[usize],
    cfg: &MdfisConfig,
) -> Result<Vec<usize>> {
    cfg.validate()?;
    let mut candidates: Vec<usize> = candidates.to_vec();
    candidates.sort_unstable();
    if candidates.len() < cfg.initial_set_size {
        return Err(Error::Argument(format!(
            "need at least {} candidates for the initial set, got {}",
            cfg.initial_set_size,
            candidates.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..cfg.n_initial_candidates {
        let subset = sample_without_replacement(&candidates, cfg.initial_set_size, &mut rng);
        let similarity = coverage_similarity(dt, &candidates, &subset);
        match &best {
            Some((s, _)) if similarity <= *s => {}
            _ => best = Some((similarity, subset)),
        }
    }
    let (_, mut subset) = best.expect("n_initial_candidates >= 1");
    subset.sort_unstable();
    Ok(subset)
}

/// Similarity of a subset to the remaining candidates: the negated mean
/// nearest-member distance (higher = more representative).
fn coverage_similarity(dt: &DistanceTable, candidates: &[usize], subset: &[usize]) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for &c in candidates {
        if subset.contains(&c) {
            continue;
        }
        let nearest = subset
            .iter()
            .map(|&s| dt.get(c, s))
            .fold(f64::INFINITY, f64::min);
        total += nearest;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        -(total / count as f64)
    }
}

/// The MD-FIS selection cost.
pub fn mdfis_cost(original_distance: f64, sub_mean_distance: f64, alpha: f64) -> f64 {
    original_distance - alpha * sub_mean_distance
}

/// Full MD-FIS selection over all rows of a dataset: small-group filter,
/// representative initial set, then greedy cost maximization.
pub fn mdfis_select(ds: &Dataset, dt: &DistanceTable, cfg: &MdfisConfig) -> Result<Vec<usize>> {
    let available: Vec<usize> = (0..ds.n_records()).collect();
    mdfis_select_among(ds, dt, cfg, &available)
}

/// MD-FIS with the initial set forced rather than searched, exposed for
/// equivalence checks against plain maximum dissimilarity.
pub fn mdfis_select_with_initial(
    ds: &Dataset,
    dt: &DistanceTable,
    cfg: &MdfisConfig,
    initial: &[usize],
) -> Result<Vec<usize>> {
    cfg.validate()?;
    let available: Vec<usize> = (0..ds.n_records()).collect();
    let candidates = filter_available(ds, cfg.min_group_size, &available);
    mdfis_greedy(ds, dt, cfg, &available, &candidates, initial)
}

/// MD-FIS restricted to a subset of rows (used by the second pass of the
/// three-way split, where already-selected validation rows are gone).
fn mdfis_select_among(
    ds: &Dataset,
    dt: &DistanceTable,
    cfg: &MdfisConfig,
    available: &[usize],
) -> Result<Vec<usize>> {
    cfg.validate()?;
    let candidates = filter_available(ds, cfg.min_group_size, available);
    if candidates.len() < cfg.selection_size + cfg.initial_set_size {
        return Err(Error::InsufficientData(format!(
            "{} candidates after the small-group filter, need at least {}",
            candidates.len(),
            cfg.selection_size + cfg.initial_set_size
        )));
    }
    let initial = select_initial_set(dt, &candidates, cfg)?;
    mdfis_greedy(ds, dt, cfg, available, &candidates, &initial)
}

/// Group-size filter computed within an `available` row subset.
fn filter_available(ds: &Dataset, min_group_size: usize, available: &[usize]) -> Vec<usize> {
    let mut group_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for &i in available {
        *group_counts.entry(ds.group_of(i)).or_default() += 1;
    }
    available
        .iter()
        .copied()
        .filter(|&i| group_counts[ds.group_of(i)] >= min_group_size)
        .collect()
}

/// Step 3 of MD-FIS: greedy selection maximizing
/// `originalDistance − α · subMeanDistance`. A candidate that is the last
/// unselected member of its group is never taken, so every group that loses
/// members to the selection keeps at least one in training.
fn mdfis_greedy(
    ds: &Dataset,
    dt: &DistanceTable,
    cfg: &MdfisConfig,
    available: &[usize],
    candidates: &[usize],
    initial: &[usize],
) -> Result<Vec<usize>> {
    let initial_set: BTreeSet<usize> = initial.iter().copied().collect();
    let mut pool: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|i| !initial_set.contains(i))
        .collect();
    pool.sort_unstable();
    if pool.len() < cfg.selection_size {
        return Err(Error::InsufficientData(format!(
            "pool of {} after removing the initial set, need {}",
            pool.len(),
            cfg.selection_size
        )));
    }

    // unselected members per group, over all available rows
    let mut group_unselected: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for &i in available {
        group_unselected.entry(ds.group_of(i)).or_default().push(i);
    }

    let mut min_dist: BTreeMap<usize, f64> = pool
        .iter()
        .map(|&p| {
            let d = initial
                .iter()
                .map(|&i| dt.get(p, i))
                .fold(f64::INFINITY, f64::min);
            (p, d)
        })
        .collect();

    let mut selection = Vec::with_capacity(cfg.selection_size);
    for _ in 0..cfg.selection_size {
        let mut best: Option<(usize, f64)> = None;
        for (&p, &orig) in &min_dist {
            let peers = &group_unselected[ds.group_of(p)];
            // mean distance to the other unselected members of p's group;
            // none left means p is the group's last record: cost −∞, skip
            let others: Vec<usize> = peers.iter().copied().filter(|&q| q != p).collect();
            if others.is_empty() {
                continue;
            }
            let sub_mean =
                others.iter().map(|&q| dt.get(p, q)).sum::<f64>() / others.len() as f64;
            let cost = mdfis_cost(orig, sub_mean, cfg.alpha);
            match best {
                Some((_, bc)) if cost <= bc => {}
                _ => best = Some((p, cost)),
            }
        }
        let (chosen, _) = best.ok_or_else(|| {
            Error::InsufficientData(
                "every remaining candidate is the last unselected member of its group".into(),
            )
        })?;
        min_dist.remove(&chosen);
        for (&p, d) in min_dist.iter_mut() {
            *d = d.min(dt.get(p, chosen));
        }
        group_unselected
            .get_mut(ds.group_of(chosen))
            .expect("chosen row belongs to an indexed group")
            .retain(|&q| q != chosen);
        selection.push(chosen);
    }
    Ok(selection)
}

/// Three-way split by running MD-FIS twice: the first selection becomes the
/// validation set, the second (over the remaining rows, with re-counted
/// group sizes) the test set, and everything else trains.
///
/// `seed` overrides `cfg.seed`; the two selections use derived, independent
/// streams.
pub fn mdfis_three_way(ds: &Dataset, cfg: &MdfisConfig, seed: u64) -> Result<SplitAssignment> {
    mdfis_three_way_sized(ds, cfg, cfg.selection_size, cfg.selection_size, seed)
}

/// As [`mdfis_three_way`] with distinct validation/test sizes.
pub fn mdfis_three_way_sized(
    ds: &Dataset,
    cfg: &MdfisConfig,
    validation_size: usize,
    test_size: usize,
    seed: u64,
) -> Result<SplitAssignment> {
    let prepared = ds.encoded_scaled_for_distance()?;
    let dt = DistanceTable::from_dataset(&prepared)?;

    let mut first = cfg.clone();
    first.selection_size = validation_size;
    first.seed = derive_seed(seed, 0);
    let all: Vec<usize> = (0..ds.n_records()).collect();
    let validation = mdfis_select_among(ds, &dt, &first, &all)?;

    if test_size == 0 {
        return SplitAssignment::from_holdouts(ds.n_records(), &validation, &[]);
    }

    let taken: BTreeSet<usize> = validation.iter().copied().collect();
    let remainder: Vec<usize> = (0..ds.n_records()).filter(|i| !taken.contains(i)).collect();
    let mut second = cfg.clone();
    second.selection_size = test_size;
    second.seed = derive_seed(seed, 1);
    let test = mdfis_select_among(ds, &dt, &second, &remainder)?;

    SplitAssignment::from_holdouts(ds.n_records(), &validation, &test)
}
