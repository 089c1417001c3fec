use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{ColumnKind, Dataset, DatasetSchema, FormulationRecord};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingMode {
    /// Each categorical column becomes one real-valued column holding the
    /// label's integer code (1..K over sorted distinct labels; 0 = absent).
    IntegerCodes,
    /// Each categorical column expands into K indicator columns; an absent
    /// label yields all zeros.
    OneHot,
}

/// Per-column label→code tables fitted on a dataset, stored with every model
/// so prediction-time inputs are encoded identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeBook {
    pub mode: EncodingMode,
    /// column name → (label → code), codes 1..K over lexicographically
    /// sorted distinct non-empty labels. Code 0 is reserved for "".
    pub columns: BTreeMap<String, BTreeMap<String, u32>>,
}

impl CodeBook {
    /// Fits code tables from the distinct labels present in the dataset.
    /// Each categorical column gets its own vocabulary.
    pub fn fit(ds: &Dataset, mode: EncodingMode) -> CodeBook {
        let mut columns = BTreeMap::new();
        for f in ds.schema().categorical_features() {
            let mut labels: Vec<&str> = ds
                .records()
                .iter()
                .filter_map(|r| r.categoricals.get(&f.name))
                .map(String::as_str)
                .filter(|l| !l.is_empty())
                .collect();
            labels.sort_unstable();
            labels.dedup();
            let table: BTreeMap<String, u32> = labels
                .into_iter()
                .enumerate()
                .map(|(i, l)| (l.to_string(), (i + 1) as u32))
                .collect();
            columns.insert(f.name.clone(), table);
        }
        CodeBook { mode, columns }
    }

    /// Integer code for a label. "" maps to the reserved code 0; a non-empty
    /// label absent from the fitted table is an unknown-category error.
    pub fn code(&self, column: &str, label: &str) -> Result<u32> {
        if label.is_empty() {
            return Ok(0);
        }
        let table = self.columns.get(column).ok_or_else(|| {
            Error::Schema(format!("column {column:?} is not in the code book"))
        })?;
        table.get(label).copied().ok_or_else(|| Error::UnknownCategory {
            column: column.to_string(),
            label: label.to_string(),
        })
    }

    /// Names of the encoded feature columns, in schema feature order.
    pub fn encoded_columns(&self, schema: &DatasetSchema) -> Vec<String> {
        let mut names = Vec::new();
        for f in &schema.features {
            match f.kind {
                ColumnKind::Numeric => names.push(f.name.clone()),
                ColumnKind::Categorical => match self.mode {
                    EncodingMode::IntegerCodes => names.push(f.name.clone()),
                    EncodingMode::OneHot => {
                        for label in self.columns[&f.name].keys() {
                            names.push(format!("{}={}", f.name, label));
                        }
                    }
                },
            }
        }
        names
    }

    /// Encodes one record into a feature row matching [`Self::encoded_columns`].
    pub fn encode_record(&self, schema: &DatasetSchema, rec: &FormulationRecord) -> Result<Vec<f64>> {
        let mut row = Vec::new();
        for f in &schema.features {
            match f.kind {
                ColumnKind::Numeric => {
                    let v = rec.numerics.get(&f.name).ok_or_else(|| {
                        Error::Schema(format!("record is missing numeric column {:?}", f.name))
                    })?;
                    row.push(*v);
                }
                ColumnKind::Categorical => {
                    let label = rec.categoricals.get(&f.name).map_or("", String::as_str);
                    let code = self.code(&f.name, label)?;
                    match self.mode {
                        EncodingMode::IntegerCodes => row.push(f64::from(code)),
                        EncodingMode::OneHot => {
                            let k = self.columns[&f.name].len();
                            for c in 1..=k as u32 {
                                row.push(if c == code { 1.0 } else { 0.0 });
                            }
                        }
                    }
                }
            }
        }
        Ok(row)
    }
}

/// Encodes all categorical columns with integer codes and attaches the
/// resulting matrix and code book to a copy of the dataset.
pub fn encode_categoricals(ds: &Dataset) -> Result<Dataset> {
    encode_categoricals_with(ds, EncodingMode::IntegerCodes)
}

pub fn encode_categoricals_with(ds: &Dataset, mode: EncodingMode) -> Result<Dataset> {
    let codebook = CodeBook::fit(ds, mode);
    let rows: Vec<Vec<f64>> = ds
        .records()
        .iter()
        .map(|r| codebook.encode_record(ds.schema(), r))
        .collect::<Result<_>>()?;
    Ok(ds.with_encoding(codebook, Matrix::from_rows(&rows)))
}
