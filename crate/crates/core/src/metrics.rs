//! Pharmacopeial evaluation criteria and standard error metrics.
//!
//! Release-profile predictions are judged by the FDA similarity factor
//!
//! ```text
//! f2 = 50 · log10( 100 / sqrt(1 + (1/n)·Σ (R_t − T_t)²) )
//! ```
//!
//! with f2 ≥ 50 counting as a successful prediction; disintegration-time
//! predictions succeed when within ±10 s of the experimental value. RMSE and
//! MAE are reported on the normalized (0–1) target scale while accuracies use
//! original units.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ScalingParams, TaskKind};
use crate::error::{Error, Result};
use crate::split::SplitAssignment;

/// Cumulative dissolution profile: ordered (time h, released %) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissolutionProfile {
    points: Vec<(f64, f64)>,
}

impl DissolutionProfile {
    /// Standard sampling grid, hours.
    pub const DEFAULT_GRID: [f64; 4] = [2.0, 4.0, 6.0, 8.0];

    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Argument("profile needs at least one point".into()));
        }
        for &(t, v) in &points {
            if !t.is_finite() {
                return Err(Error::Argument(format!("non-finite profile time {t}")));
            }
            if !v.is_finite() || !(0.0..=100.0).contains(&v) {
                return Err(Error::Argument(format!(
                    "released fraction {v} at {t} h outside [0, 100]"
                )));
            }
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Argument(format!(
                    "profile times must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(DissolutionProfile { points })
    }

    /// Profile from bare values: four values land on the default 2/4/6/8 h
    /// grid, any other count on 1..=n hours.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let times: Vec<f64> = if values.len() == Self::DEFAULT_GRID.len() {
            Self::DEFAULT_GRID.to_vec()
        } else {
            (1..=values.len()).map(|t| t as f64).collect()
        };
        Self::new(times.into_iter().zip(values.iter().copied()).collect())
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Similarity factor between two profiles on the same time grid. Identical
/// profiles give exactly 100; 50 is the conventional similarity threshold.
pub fn f2_similarity(reference: &DissolutionProfile, test: &DissolutionProfile) -> Result<f64> {
    if reference.len() != test.len()
        || reference
            .times()
            .zip(test.times())
            .any(|(a, b)| a != b)
    {
        return Err(Error::Argument(
            "profiles must share the same time grid".into(),
        ));
    }
    let n = reference.len() as f64;
    let sum_sq: f64 = reference
        .values()
        .zip(test.values())
        .map(|(r, t)| (r - t) * (r - t))
        .sum();
    Ok(50.0 * (100.0 / (1.0 + sum_sq / n).sqrt()).log10())
}

/// Fraction of profile pairs predicted similarly (f2 ≥ 50, boundary counts).
pub fn accuracy_cdrc(pairs: &[(DissolutionProfile, DissolutionProfile)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Argument("no profile pairs to evaluate".into()));
    }
    let f2s = pairs
        .iter()
        .map(|(r, t)| f2_similarity(r, t))
        .collect::<Result<Vec<f64>>>()?;
    accuracy_cdrc_from_f2(&f2s)
}

/// As [`accuracy_cdrc`], starting from already-computed f2 values.
pub fn accuracy_cdrc_from_f2(f2_values: &[f64]) -> Result<f64> {
    if f2_values.is_empty() {
        return Err(Error::Argument("no f2 values to evaluate".into()));
    }
    let hits = f2_values.iter().filter(|&&f2| f2 >= 50.0).count();
    Ok(hits as f64 / f2_values.len() as f64)
}

/// Fraction of (experimental, predicted) second pairs within ±10 s
/// (boundary counts). Values are in original seconds.
pub fn accuracy_dt(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Argument("no time pairs to evaluate".into()));
    }
    let hits = pairs
        .iter()
        .filter(|(exp, pred)| (pred - exp).abs() <= 10.0)
        .count();
    Ok(hits as f64 / pairs.len() as f64)
}

pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_lengths(y, yhat)?;
    let n = y.len() as f64;
    let ss: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((ss / n).sqrt())
}

pub fn mae(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_lengths(y, yhat)?;
    let n = y.len() as f64;
    let sa: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).abs()).sum();
    Ok(sa / n)
}

fn check_lengths(y: &[f64], yhat: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::Argument("empty vectors".into()));
    }
    if y.len() != yhat.len() {
        return Err(Error::Argument(format!(
            "length mismatch: {} vs {}",
            y.len(),
            yhat.len()
        )));
    }
    Ok(())
}

/// Per-record evaluation detail. `score` is the f2 value for release
/// profiles and the absolute error in seconds for disintegration time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordDetail {
    pub record_id: String,
    pub experimental: Vec<f64>,
    pub predicted: Vec<f64>,
    pub score: f64,
    pub pass: bool,
}

/// Metrics for one subset: accuracy in original units, RMSE/MAE on the
/// normalized target scale, plus per-record detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub accuracy: f64,
    pub rmse: f64,
    pub mae: f64,
    pub records: Vec<RecordDetail>,
}

/// Reports for the three subsets. `test` is absent for two-way splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub train: SplitReport,
    pub validation: SplitReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<SplitReport>,
}

impl EvaluationReport {
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Assembles the full report from normalized-scale predictions.
///
/// `predictions` maps row index → predicted target vector on the normalized
/// scale (the models' native output); experimental values come from the
/// dataset records. The task kind picks the accuracy criterion: time-error
/// accuracy for disintegration time, f2 accuracy for release profiles.
/// Profile values are clamped into [0, 100] before the f2 computation since
/// unbounded regressors can predict outside the physical range.
pub fn evaluate(
    ds: &Dataset,
    split: &SplitAssignment,
    predictions: &BTreeMap<usize, Vec<f64>>,
    scaling: &ScalingParams,
) -> Result<EvaluationReport> {
    let train = evaluate_subset(ds, &split.train, predictions, scaling)?;
    let validation = evaluate_subset(ds, &split.validation, predictions, scaling)?;
    let test = if split.test.is_empty() {
        None
    } else {
        Some(evaluate_subset(ds, &split.test, predictions, scaling)?)
    };
    Ok(EvaluationReport {
        train,
        validation,
        test,
    })
}

fn evaluate_subset(
    ds: &Dataset,
    indices: &[usize],
    predictions: &BTreeMap<usize, Vec<f64>>,
    scaling: &ScalingParams,
) -> Result<SplitReport> {
    if indices.is_empty() {
        return Err(Error::Argument("cannot evaluate an empty subset".into()));
    }
    let mut flat_scaled_exp = Vec::new();
    let mut flat_scaled_pred = Vec::new();
    let mut records = Vec::with_capacity(indices.len());
    let mut dt_pairs: Vec<(f64, f64)> = Vec::new();
    let mut profile_pairs: Vec<(DissolutionProfile, DissolutionProfile)> = Vec::new();

    for &i in indices {
        let pred_scaled = predictions
            .get(&i)
            .ok_or_else(|| Error::Argument(format!("missing prediction for record index {i}")))?;
        let rec = ds.record(i);
        let exp_orig = &rec.targets;
        let pred_orig = scaling.invert_targets(pred_scaled)?;
        let exp_scaled = scaling.scale_targets(exp_orig)?;
        flat_scaled_exp.extend_from_slice(&exp_scaled);
        flat_scaled_pred.extend_from_slice(pred_scaled);

        let (score, pass) = match ds.schema().task_kind {
            TaskKind::Ofdf => {
                let err = (pred_orig[0] - exp_orig[0]).abs();
                dt_pairs.push((exp_orig[0], pred_orig[0]));
                (err, err <= 10.0)
            }
            TaskKind::Srmt => {
                let clamped: Vec<f64> =
                    pred_orig.iter().map(|v| v.clamp(0.0, 100.0)).collect();
                let exp_profile = DissolutionProfile::from_values(exp_orig)?;
                let pred_profile = DissolutionProfile::from_values(&clamped)?;
                let f2 = f2_similarity(&exp_profile, &pred_profile)?;
                profile_pairs.push((exp_profile, pred_profile));
                (f2, f2 >= 50.0)
            }
        };
        records.push(RecordDetail {
            record_id: rec.record_id.clone(),
            experimental: exp_orig.clone(),
            predicted: pred_orig,
            score,
            pass,
        });
    }

    let accuracy = match ds.schema().task_kind {
        TaskKind::Ofdf => accuracy_dt(&dt_pairs)?,
        TaskKind::Srmt => accuracy_cdrc(&profile_pairs)?,
    };
    let rmse = rmse(&flat_scaled_exp, &flat_scaled_pred)?;
    let mae = mae(&flat_scaled_exp, &flat_scaled_pred)?;
    // quadratic mean dominates arithmetic mean; tolerance covers rounding
    // when all errors are equal
    assert!(
        rmse >= mae - 1e-12 * mae.max(1.0),
        "rmse {rmse} < mae {mae}"
    );
    Ok(SplitReport {
        accuracy,
        rmse,
        mae,
        records,
    })
}
