//! Deterministic synthetic dataset generators shaped like the two supported
//! dosage-form corpora, plus a brute-force selection oracle for verifying the
//! splitters.
//!
//! The real literature-mined corpora are not distributable, so these
//! generators stand in: they reproduce the *shape* of the data (feature
//! schema, target ranges, API-group imbalance with roughly half the groups
//! below four members) without claiming pharmaceutical realism.
//!
//! Targets come from fixed, versioned closed forms so that acceptance
//! thresholds stay stable across releases:
//!
//! - Disintegration time (seconds):
//!   `dt = 50 + 44·tanh(z) + noise`, clamped to [0, 100], with
//!   `z = −1.2 + 1.2·u(weight) + 1.0·u(thickness) + 0.7·u(mw)
//!        − 0.9·u(log_s) − 0.5·u(tpsa) + 0.4·u(tensile) + 0.06·(polymer − 3)`
//!   where `u(·)` rescales each raw feature to [0, 1] over its generation
//!   range and `polymer` is the 1-based code of the label in sorted order.
//!
//! - Release profile (% at 2/4/6/8 h): first-order release
//!   `R(t) = 100·(1 − exp(−k·t))` with `ln k = −1.75 − 0.85·u(hpmc) −
//!   0.3·u(hardness) − 0.2·u(diameter) + 0.5·u(log_s) + 0.25·u(tpsa) +
//!   0.05·(granulation − 2)`, per-point noise, then monotone rectification
//!   and clamping to [0, 100].
//!
//! Both forms are invertible (atanh, log), so a linear model on the
//! transformed noise-free targets recovers them exactly — a sanity anchor
//! used by the test suite.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    Dataset, DatasetSchema, DescriptorSet, FeatureColumn, FormulationRecord, TaskKind,
};
use crate::error::{Error, Result};
use crate::split::DistanceTable;

/// Generator version recorded in manifests; bump when a closed form changes.
pub const GENERATOR_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_records: usize,
    /// Explicit group sizes; their sum must equal `n_records`.
    pub group_sizes: Vec<usize>,
    /// Target noise: seconds for disintegration time, percentage points for
    /// release profiles.
    pub noise_sd: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn new(group_sizes: Vec<usize>, noise_sd: f64, seed: u64) -> Result<Self> {
        if group_sizes.is_empty() || group_sizes.contains(&0) {
            return Err(Error::Argument(
                "group sizes must be non-empty and positive".into(),
            ));
        }
        if !(noise_sd.is_finite() && noise_sd >= 0.0) {
            return Err(Error::Argument("noise_sd must be finite and >= 0".into()));
        }
        Ok(SynthConfig {
            n_records: group_sizes.iter().sum(),
            group_sizes,
            noise_sd,
            seed,
        })
    }

    /// Builds the corpus-shaped imbalance profile: about half the groups stay
    /// below four members (sizes cycling 1,2,2,3), the rest share the
    /// remaining records as evenly as possible.
    pub fn imbalanced(n_records: usize, n_groups: usize, noise_sd: f64, seed: u64) -> Result<Self> {
        if n_groups == 0 {
            return Err(Error::Argument("need at least one group".into()));
        }
        let small_cycle = [1usize, 2, 2, 3];
        let n_small = n_groups / 2;
        let n_big = n_groups - n_small;
        let mut sizes: Vec<usize> = (0..n_small).map(|i| small_cycle[i % 4]).collect();
        let small_total: usize = sizes.iter().sum();
        let remainder = n_records.checked_sub(small_total).ok_or_else(|| {
            Error::Argument(format!(
                "{n_records} records cannot fill {n_groups} groups with the default imbalance"
            ))
        })?;
        if remainder < 4 * n_big {
            return Err(Error::Argument(format!(
                "{n_records} records leave the {n_big} large groups below four members each"
            )));
        }
        let base = remainder / n_big;
        let extra = remainder % n_big;
        for i in 0..n_big {
            sizes.push(base + usize::from(i < extra));
        }
        SynthConfig::new(sizes, noise_sd, seed)
    }

    /// 131 records over 13 groups, 3 s target noise.
    pub fn ofdf_default(seed: u64) -> Self {
        SynthConfig::imbalanced(131, 13, 3.0, seed).expect("static profile is valid")
    }

    /// 145 records over 29 groups, 2 percentage-point target noise.
    pub fn srmt_default(seed: u64) -> Self {
        SynthConfig::imbalanced(145, 29, 2.0, seed).expect("static profile is valid")
    }
}

// Generation ranges. u(x) below rescales a raw value back to [0, 1] over the
// same range, so the closed forms are affine in the raw features.
const MW: (f64, f64) = (150.0, 500.0);
const XLOGP3: (f64, f64) = (-2.0, 5.0);
const TPSA: (f64, f64) = (20.0, 140.0);
const COMPLEXITY: (f64, f64) = (100.0, 800.0);
const LOG_S: (f64, f64) = (-6.0, 0.0);

const FILM_WEIGHT: (f64, f64) = (20.0, 200.0);
const FILM_THICKNESS: (f64, f64) = (50.0, 300.0);
const TENSILE: (f64, f64) = (1.0, 10.0);
const ELONGATION: (f64, f64) = (5.0, 50.0);
const FOLDING: (f64, f64) = (50.0, 300.0);
const DRUG_CONTENT: (f64, f64) = (1.0, 30.0);

const HPMC_CONTENT: (f64, f64) = (20.0, 60.0);
const FILLER_CONTENT: (f64, f64) = (10.0, 40.0);
const HARDNESS: (f64, f64) = (4.0, 12.0);
const DIAMETER: (f64, f64) = (6.0, 12.0);
const TABLET_WEIGHT: (f64, f64) = (100.0, 500.0);

/// Film-forming polymers, in the sorted order the encoder will assign codes.
const POLYMERS: [&str; 5] = ["Gelatin", "HPMC", "PVA", "Pullulan", "Starch"];
/// Plasticizers; the empty label exercises the reserved code 0.
const PLASTICIZERS: [&str; 4] = ["", "Glycerol", "PEG400", "Sorbitol"];
/// Granulation processes, in sorted order.
const GRANULATIONS: [&str; 3] = ["direct_compression", "dry_granulation", "wet_granulation"];

fn u(x: f64, range: (f64, f64)) -> f64 {
    (x - range.0) / (range.1 - range.0)
}

fn draw(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    rng.gen_range(range.0..range.1)
}

/// Standard normal deviate by Box-Muller.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn draw_descriptors(rng: &mut ChaCha8Rng) -> DescriptorSet {
    DescriptorSet {
        molecular_weight: draw(rng, MW),
        xlogp3: draw(rng, XLOGP3),
        h_bond_donors: rng.gen_range(0..=5),
        h_bond_acceptors: rng.gen_range(0..=10),
        rotatable_bonds: rng.gen_range(0..=10),
        topological_polar_surface_area: draw(rng, TPSA),
        heavy_atom_count: rng.gen_range(10..=35),
        complexity: draw(rng, COMPLEXITY),
        log_s: draw(rng, LOG_S),
    }
}

/// Example schema for disintegration-time datasets: nine API descriptors,
/// six film process parameters, two categorical excipient columns.
pub fn ofdf_schema() -> DatasetSchema {
    let mut features: Vec<FeatureColumn> = DescriptorSet::COLUMN_NAMES
        .iter()
        .map(|n| FeatureColumn::numeric(n))
        .collect();
    features.extend([
        FeatureColumn::numeric("film_weight_mg"),
        FeatureColumn::numeric("film_thickness_um"),
        FeatureColumn::numeric("tensile_strength_mpa"),
        FeatureColumn::numeric("elongation_pct"),
        FeatureColumn::numeric("folding_endurance"),
        FeatureColumn::numeric("drug_content_pct"),
        FeatureColumn::categorical("polymer"),
        FeatureColumn::categorical("plasticizer"),
    ]);
    DatasetSchema {
        id: "record_id".into(),
        features,
        targets: vec!["disintegration_time_s".into()],
        group: "api".into(),
        task_kind: TaskKind::Ofdf,
    }
}

/// Example schema for release-profile datasets: nine API descriptors, five
/// tablet process parameters, one categorical process column, four targets.
pub fn srmt_schema() -> DatasetSchema {
    let mut features: Vec<FeatureColumn> = DescriptorSet::COLUMN_NAMES
        .iter()
        .map(|n| FeatureColumn::numeric(n))
        .collect();
    features.extend([
        FeatureColumn::numeric("hpmc_content_pct"),
        FeatureColumn::numeric("filler_content_pct"),
        FeatureColumn::numeric("hardness_kp"),
        FeatureColumn::numeric("diameter_mm"),
        FeatureColumn::numeric("tablet_weight_mg"),
        FeatureColumn::categorical("granulation"),
    ]);
    DatasetSchema {
        id: "record_id".into(),
        features,
        targets: vec![
            "release_2h_pct".into(),
            "release_4h_pct".into(),
            "release_6h_pct".into(),
            "release_8h_pct".into(),
        ],
        group: "api".into(),
        task_kind: TaskKind::Srmt,
    }
}

/// Noise-free latent index for disintegration time.
pub fn ofdf_latent_index(
    weight: f64,
    thickness: f64,
    tensile: f64,
    descriptors: &DescriptorSet,
    polymer_code: usize,
) -> f64 {
    -1.2 + 1.2 * u(weight, FILM_WEIGHT)
        + 1.0 * u(thickness, FILM_THICKNESS)
        + 0.7 * u(descriptors.molecular_weight, MW)
        - 0.9 * u(descriptors.log_s, LOG_S)
        - 0.5 * u(descriptors.topological_polar_surface_area, TPSA)
        + 0.4 * u(tensile, TENSILE)
        + 0.06 * (polymer_code as f64 - 3.0)
}

/// Noise-free log release constant.
pub fn srmt_latent_log_k(
    hpmc: f64,
    hardness: f64,
    diameter: f64,
    descriptors: &DescriptorSet,
    granulation_code: usize,
) -> f64 {
    -1.75 - 0.85 * u(hpmc, HPMC_CONTENT)
        - 0.3 * u(hardness, HARDNESS)
        - 0.2 * u(diameter, DIAMETER)
        + 0.5 * u(descriptors.log_s, LOG_S)
        + 0.25 * u(descriptors.topological_polar_surface_area, TPSA)
        + 0.05 * (granulation_code as f64 - 2.0)
}

/// Release profile time grid, hours.
pub const RELEASE_TIMES_H: [f64; 4] = [2.0, 4.0, 6.0, 8.0];

fn group_ids(cfg: &SynthConfig) -> Vec<String> {
    (1..=cfg.group_sizes.len())
        .map(|g| format!("API{g:02}"))
        .collect()
}

/// Generates a disintegration-time dataset. Descriptors are drawn once per
/// API group; process parameters vary per record. Deterministic given seed.
pub fn generate_ofdf_like(cfg: &SynthConfig) -> Result<Dataset> {
    let schema = ofdf_schema();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let groups = group_ids(cfg);
    let mut records = Vec::with_capacity(cfg.n_records);
    let mut record_no = 0usize;

    for (gi, &size) in cfg.group_sizes.iter().enumerate() {
        let descriptors = draw_descriptors(&mut rng);
        for _ in 0..size {
            record_no += 1;
            let weight = draw(&mut rng, FILM_WEIGHT);
            let thickness = draw(&mut rng, FILM_THICKNESS);
            let tensile = draw(&mut rng, TENSILE);
            let elongation = draw(&mut rng, ELONGATION);
            let folding = draw(&mut rng, FOLDING).round();
            let content = draw(&mut rng, DRUG_CONTENT);
            let polymer_idx = rng.gen_range(0..POLYMERS.len());
            let plasticizer_idx = rng.gen_range(0..PLASTICIZERS.len());

            let z = ofdf_latent_index(weight, thickness, tensile, &descriptors, polymer_idx + 1);
            let clean = 50.0 + 44.0 * z.tanh();
            let dt = (clean + cfg.noise_sd * gaussian(&mut rng)).clamp(0.0, 100.0);

            let mut numerics: BTreeMap<String, f64> = DescriptorSet::COLUMN_NAMES
                .iter()
                .zip(descriptors.to_row())
                .map(|(n, v)| (n.to_string(), v))
                .collect();
            numerics.insert("film_weight_mg".into(), weight);
            numerics.insert("film_thickness_um".into(), thickness);
            numerics.insert("tensile_strength_mpa".into(), tensile);
            numerics.insert("elongation_pct".into(), elongation);
            numerics.insert("folding_endurance".into(), folding);
            numerics.insert("drug_content_pct".into(), content);

            records.push(FormulationRecord {
                record_id: format!("OFDF-{record_no:03}"),
                group_id: groups[gi].clone(),
                categoricals: BTreeMap::from([
                    ("polymer".to_string(), POLYMERS[polymer_idx].to_string()),
                    (
                        "plasticizer".to_string(),
                        PLASTICIZERS[plasticizer_idx].to_string(),
                    ),
                ]),
                numerics,
                targets: vec![dt],
            });
        }
    }
    Dataset::new(schema, records)
}

/// Generates a release-profile dataset with non-decreasing 2/4/6/8 h
/// profiles. Deterministic given seed.
pub fn generate_srmt_like(cfg: &SynthConfig) -> Result<Dataset> {
    let schema = srmt_schema();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let groups = group_ids(cfg);
    let mut records = Vec::with_capacity(cfg.n_records);
    let mut record_no = 0usize;

    for (gi, &size) in cfg.group_sizes.iter().enumerate() {
        let descriptors = draw_descriptors(&mut rng);
        for _ in 0..size {
            record_no += 1;
            let hpmc = draw(&mut rng, HPMC_CONTENT);
            let filler = draw(&mut rng, FILLER_CONTENT);
            let hardness = draw(&mut rng, HARDNESS);
            let diameter = draw(&mut rng, DIAMETER);
            let weight = draw(&mut rng, TABLET_WEIGHT);
            let gran_idx = rng.gen_range(0..GRANULATIONS.len());

            let log_k = srmt_latent_log_k(hpmc, hardness, diameter, &descriptors, gran_idx + 1);
            let k = log_k.exp();
            let mut profile: Vec<f64> = RELEASE_TIMES_H
                .iter()
                .map(|&t| {
                    let clean = 100.0 * (1.0 - (-k * t).exp());
                    (clean + cfg.noise_sd * gaussian(&mut rng)).clamp(0.0, 100.0)
                })
                .collect();
            for i in 1..profile.len() {
                profile[i] = profile[i].max(profile[i - 1]);
            }

            let mut numerics: BTreeMap<String, f64> = DescriptorSet::COLUMN_NAMES
                .iter()
                .zip(descriptors.to_row())
                .map(|(n, v)| (n.to_string(), v))
                .collect();
            numerics.insert("hpmc_content_pct".into(), hpmc);
            numerics.insert("filler_content_pct".into(), filler);
            numerics.insert("hardness_kp".into(), hardness);
            numerics.insert("diameter_mm".into(), diameter);
            numerics.insert("tablet_weight_mg".into(), weight);

            records.push(FormulationRecord {
                record_id: format!("SRMT-{record_no:03}"),
                group_id: groups[gi].clone(),
                categoricals: BTreeMap::from([(
                    "granulation".to_string(),
                    GRANULATIONS[gran_idx].to_string(),
                )]),
                numerics,
                targets: profile,
            });
        }
    }
    Dataset::new(schema, records)
}

/// Generates whichever corpus shape the task calls for.
pub fn generate(task: TaskKind, cfg: &SynthConfig) -> Result<Dataset> {
    match task {
        TaskKind::Ofdf => generate_ofdf_like(cfg),
        TaskKind::Srmt => generate_srmt_like(cfg),
    }
}

/// Reference greedy maximum-dissimilarity selection by naive full scans.
///
/// Test oracle only: shares no code with [`crate::split::max_dissim_select`]
/// and recomputes every minimum from scratch each round. The pool is capped
/// at 12 to keep it honest about its purpose.
pub fn brute_force_max_dissim(
    dt: &DistanceTable,
    initial: &[usize],
    pool: &[usize],
    k: usize,
) -> Result<Vec<usize>> {
    if pool.len() > 12 {
        return Err(Error::Argument(format!(
            "oracle pool is capped at 12 elements, got {}",
            pool.len()
        )));
    }
    if initial.is_empty() {
        return Err(Error::Argument("initial set must be non-empty".into()));
    }
    if k > pool.len() {
        return Err(Error::Argument(format!(
            "cannot select {k} from a pool of {}",
            pool.len()
        )));
    }
    let mut reference: Vec<usize> = initial.to_vec();
    let mut remaining: Vec<usize> = pool.to_vec();
    remaining.sort_unstable();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for &p in &remaining {
            let mut nearest = f64::INFINITY;
            for &r in &reference {
                let d = dt.get(p, r);
                if d < nearest {
                    nearest = d;
                }
            }
            match best {
                Some((_, bd)) if nearest <= bd => {}
                _ => best = Some((p, nearest)),
            }
        }
        let (chosen, _) = best.expect("remaining pool is non-empty");
        remaining.retain(|&p| p != chosen);
        reference.push(chosen);
        out.push(chosen);
    }
    Ok(out)
}
