use serde::{Deserialize, Serialize};

use crate::data::{Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Min-max bounds for one column. `min == max` flags a constant column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl ColumnScale {
    pub fn is_constant(&self) -> bool {
        self.min == self.max
    }

    /// x' = (x − min) / (max − min); constant columns map to 0. Values
    /// outside the fitted range are not clipped.
    pub fn apply(&self, x: f64) -> f64 {
        if self.is_constant() {
            0.0
        } else {
            (x - self.min) / (self.max - self.min)
        }
    }

    pub fn invert(&self, scaled: f64) -> f64 {
        if self.is_constant() {
            self.min
        } else {
            self.min + scaled * (self.max - self.min)
        }
    }
}

/// Feature and target scaling fitted on the training subset only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    /// One entry per encoded feature column, in matrix column order.
    pub features: Vec<ColumnScale>,
    /// One entry per target column. Dissolution percentages use a fixed
    /// (0, 100) range; disintegration time uses training min/max.
    pub targets: Vec<ColumnScale>,
}

impl ScalingParams {
    /// Scales a target row into the normalized space used for training and
    /// for reporting RMSE/MAE.
    pub fn scale_targets(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.targets.len() {
            return Err(Error::Schema(format!(
                "expected {} target values, got {}",
                self.targets.len(),
                values.len()
            )));
        }
        Ok(values
            .iter()
            .zip(&self.targets)
            .map(|(&v, s)| s.apply(v))
            .collect())
    }

    /// Maps normalized target values back to original units.
    pub fn invert_targets(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.targets.len() {
            return Err(Error::Schema(format!(
                "expected {} target values, got {}",
                self.targets.len(),
                values.len()
            )));
        }
        Ok(values
            .iter()
            .zip(&self.targets)
            .map(|(&v, s)| s.invert(v))
            .collect())
    }

    /// Scales one encoded feature row.
    pub fn scale_feature_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.features.len() {
            return Err(Error::Schema(format!(
                "expected {} feature values, got {}",
                self.features.len(),
                row.len()
            )));
        }
        Ok(row
            .iter()
            .zip(&self.features)
            .map(|(&v, s)| s.apply(v))
            .collect())
    }
}

/// Fits per-column min/max over the training rows only. Validation and test
/// rows never influence the result; the leakage-guard property tests pin
/// this down.
pub fn fit_scaling(ds: &Dataset, train_indices: &[usize]) -> Result<ScalingParams> {
    if train_indices.is_empty() {
        return Err(Error::Argument("training index set is empty".into()));
    }
    let n = ds.n_records();
    if let Some(&bad) = train_indices.iter().find(|&&i| i >= n) {
        return Err(Error::Argument(format!(
            "training index {bad} out of bounds for {n} records"
        )));
    }
    let matrix = ds.matrix()?;
    let columns = ds
        .codebook()
        .map(|cb| cb.encoded_columns(ds.schema()))
        .unwrap_or_default();

    let mut features = Vec::with_capacity(matrix.cols());
    for j in 0..matrix.cols() {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &i in train_indices {
            let v = matrix.get(i, j);
            min = min.min(v);
            max = max.max(v);
        }
        features.push(ColumnScale {
            name: columns.get(j).cloned().unwrap_or_else(|| format!("col{j}")),
            min,
            max,
        });
    }

    let targets = match ds.schema().task_kind {
        TaskKind::Srmt => ds
            .schema()
            .targets
            .iter()
            .map(|name| ColumnScale {
                name: name.clone(),
                min: 0.0,
                max: 100.0,
            })
            .collect(),
        TaskKind::Ofdf => ds
            .schema()
            .targets
            .iter()
            .enumerate()
            .map(|(t, name)| {
                let mut min = f64::INFINITY;
                let mut max = f64::NEG_INFINITY;
                for &i in train_indices {
                    let v = ds.record(i).targets[t];
                    min = min.min(v);
                    max = max.max(v);
                }
                ColumnScale {
                    name: name.clone(),
                    min,
                    max,
                }
            })
            .collect(),
    };

    Ok(ScalingParams { features, targets })
}

/// Applies fitted feature scaling to the encoded matrix of a dataset copy.
pub fn apply_scaling(ds: &Dataset, params: &ScalingParams) -> Result<Dataset> {
    let matrix = ds.matrix()?;
    let columns = ds
        .codebook()
        .map(|cb| cb.encoded_columns(ds.schema()))
        .unwrap_or_default();
    if params.features.len() != matrix.cols() {
        return Err(Error::Schema(format!(
            "scaling has {} feature columns, matrix has {}",
            params.features.len(),
            matrix.cols()
        )));
    }
    for (scale, name) in params.features.iter().zip(&columns) {
        if &scale.name != name {
            return Err(Error::Schema(format!(
                "scaling column {:?} does not match dataset column {:?}",
                scale.name, name
            )));
        }
    }
    let mut scaled = Matrix::zeros(matrix.rows(), matrix.cols());
    for i in 0..matrix.rows() {
        for (j, scale) in params.features.iter().enumerate() {
            scaled.set(i, j, scale.apply(matrix.get(i, j)));
        }
    }
    Ok(ds.with_scaled_matrix(scaled, params.clone()))
}

/// Maps a vector of normalized target values back to original units.
pub fn invert_target_scaling(values: &[f64], params: &ScalingParams) -> Result<Vec<f64>> {
    params.invert_targets(values)
}
