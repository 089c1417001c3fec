//! Formulation records, dataset assembly and the feature pipeline
//! (CSV ingestion → categorical encoding → min-max scaling).

mod csv_io;
mod encode;
mod scaling;
mod schema;

pub use csv_io::{load_csv, load_feature_csv, save_csv};
pub use encode::{encode_categoricals, encode_categoricals_with, CodeBook, EncodingMode};
pub use scaling::{apply_scaling, fit_scaling, invert_target_scaling, ColumnScale, ScalingParams};
pub use schema::{ColumnKind, DatasetSchema, DescriptorSet, FeatureColumn, TaskKind};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// One formulation: identity, API group, raw feature values and the target
/// vector in original units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulationRecord {
    pub record_id: String,
    pub group_id: String,
    /// Categorical feature values by column name ("" means absent).
    pub categoricals: BTreeMap<String, String>,
    /// Numeric feature values by column name.
    pub numerics: BTreeMap<String, f64>,
    /// Target values, ordered as in the schema.
    pub targets: Vec<f64>,
}

/// A validated, immutable collection of records sharing one schema.
///
/// The encoded feature matrix and the code book are attached by
/// [`encode_categoricals`]; [`apply_scaling`] replaces the matrix with its
/// scaled version. Records always keep original units.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: DatasetSchema,
    records: Vec<FormulationRecord>,
    group_index: BTreeMap<String, Vec<usize>>,
    codebook: Option<CodeBook>,
    matrix: Option<Matrix>,
    scaled_with: Option<ScalingParams>,
}

impl Dataset {
    /// Validates records against the schema and builds the group index.
    pub fn new(schema: DatasetSchema, records: Vec<FormulationRecord>) -> Result<Self> {
        schema.validate()?;
        let (lo, hi) = schema.target_range();
        let mut seen_ids = std::collections::BTreeSet::new();
        for rec in &records {
            if !seen_ids.insert(rec.record_id.as_str()) {
                return Err(Error::Integrity(format!(
                    "duplicate record_id {:?}",
                    rec.record_id
                )));
            }
            if rec.targets.len() != schema.targets.len() {
                return Err(Error::Integrity(format!(
                    "record {:?} has {} target values, schema declares {}",
                    rec.record_id,
                    rec.targets.len(),
                    schema.targets.len()
                )));
            }
            for (name, &t) in schema.targets.iter().zip(&rec.targets) {
                if !t.is_finite() || t < lo || t > hi {
                    return Err(Error::Integrity(format!(
                        "record {:?} target {name:?} = {t} outside [{lo}, {hi}]",
                        rec.record_id
                    )));
                }
            }
            for f in schema.numeric_features() {
                match rec.numerics.get(&f.name) {
                    Some(v) if v.is_finite() => {}
                    Some(v) => {
                        return Err(Error::Integrity(format!(
                            "record {:?} has non-finite value {v} in column {:?}",
                            rec.record_id, f.name
                        )))
                    }
                    None => {
                        return Err(Error::Integrity(format!(
                            "record {:?} is missing numeric column {:?}",
                            rec.record_id, f.name
                        )))
                    }
                }
            }
            for f in schema.categorical_features() {
                if !rec.categoricals.contains_key(&f.name) {
                    return Err(Error::Integrity(format!(
                        "record {:?} is missing categorical column {:?}",
                        rec.record_id, f.name
                    )));
                }
            }
        }
        let mut group_index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, rec) in records.iter().enumerate() {
            group_index.entry(rec.group_id.clone()).or_default().push(i);
        }
        Ok(Dataset {
            schema,
            records,
            group_index,
            codebook: None,
            matrix: None,
            scaled_with: None,
        })
    }

    pub fn schema(&self) -> &DatasetSchema {
        &self.schema
    }

    pub fn records(&self) -> &[FormulationRecord] {
        &self.records
    }

    pub fn record(&self, i: usize) -> &FormulationRecord {
        &self.records[i]
    }

    pub fn n_records(&self) -> usize {
        self.records.len()
    }

    /// Record indices per API group; the values partition `0..n_records()`.
    pub fn group_index(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.group_index
    }

    pub fn group_of(&self, i: usize) -> &str {
        &self.records[i].group_id
    }

    /// Row index by record id.
    pub fn index_of(&self, record_id: &str) -> Option<usize> {
        self.records.iter().position(|r| r.record_id == record_id)
    }

    /// Encoded feature matrix. Errors until [`encode_categoricals`] has run.
    pub fn matrix(&self) -> Result<&Matrix> {
        self.matrix.as_ref().ok_or_else(|| {
            Error::Argument("dataset has no encoded matrix; run encode_categoricals first".into())
        })
    }

    pub fn codebook(&self) -> Option<&CodeBook> {
        self.codebook.as_ref()
    }

    /// Scaling parameters applied to the matrix, if any.
    pub fn scaled_with(&self) -> Option<&ScalingParams> {
        self.scaled_with.as_ref()
    }

    /// Targets as a row-per-record matrix, in original units.
    pub fn target_matrix(&self) -> Matrix {
        let rows: Vec<Vec<f64>> = self.records.iter().map(|r| r.targets.clone()).collect();
        Matrix::from_rows(&rows)
    }

    pub(crate) fn with_encoding(&self, codebook: CodeBook, matrix: Matrix) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            records: self.records.clone(),
            group_index: self.group_index.clone(),
            codebook: Some(codebook),
            matrix: Some(matrix),
            scaled_with: None,
        }
    }

    pub(crate) fn with_scaled_matrix(&self, matrix: Matrix, params: ScalingParams) -> Dataset {
        let mut ds = self.clone();
        ds.matrix = Some(matrix);
        ds.scaled_with = Some(params);
        ds
    }

    /// Convenience for distance computations: encodes (if needed) and
    /// min-max-scales the feature matrix over *all* rows. Splitting precedes
    /// model fitting, so whole-dataset statistics are fine here; model
    /// scaling must use [`fit_scaling`] on training indices only.
    pub fn encoded_scaled_for_distance(&self) -> Result<Dataset> {
        let encoded = if self.matrix.is_some() {
            self.clone()
        } else {
            encode_categoricals(self)?
        };
        let all: Vec<usize> = (0..encoded.n_records()).collect();
        let params = fit_scaling(&encoded, &all)?;
        apply_scaling(&encoded, &params)
    }
}
