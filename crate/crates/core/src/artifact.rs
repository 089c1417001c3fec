//! Self-contained serialized model format.
//!
//! An artifact embeds everything prediction needs: the schema, the fitted
//! categorical code book, the scaling tables and the model parameters, plus
//! a mandatory version field. Saving and loading round-trips bit-exactly, so
//! predictions after a reload equal predictions before it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::MultiTargetWrapper;
use crate::data::{CodeBook, DatasetSchema, FormulationRecord, ScalingParams};
use crate::deepnet::{self, NetworkParams, NetworkSpec, TrainConfig};
use crate::error::{Error, Result};
use crate::FORMAT_VERSION;

/// The fitted model inside an artifact: either per-target conventional
/// regressors or one multi-output network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelPayload {
    MultiTarget { wrapper: MultiTargetWrapper },
    Network {
        spec: NetworkSpec,
        train: TrainConfig,
        params: NetworkParams,
    },
}

impl ModelPayload {
    /// Predicted target vector on the normalized scale.
    pub fn predict_scaled(&self, row: &[f64]) -> Result<Vec<f64>> {
        match self {
            ModelPayload::MultiTarget { wrapper } => Ok(wrapper.predict(row)),
            ModelPayload::Network { params, .. } => deepnet::forward(params, row),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub version: u32,
    /// Model name as requested on the command line (e.g. "knn", "dnn-ofdf").
    pub name: String,
    pub schema: DatasetSchema,
    pub encoding: CodeBook,
    pub scaling: ScalingParams,
    pub model: ModelPayload,
}

impl ModelArtifact {
    pub fn new(
        name: String,
        schema: DatasetSchema,
        encoding: CodeBook,
        scaling: ScalingParams,
        model: ModelPayload,
    ) -> Self {
        ModelArtifact {
            version: FORMAT_VERSION,
            name,
            schema,
            encoding,
            scaling,
            model,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let artifact: ModelArtifact = serde_json::from_str(&text)?;
        if artifact.version != FORMAT_VERSION {
            return Err(Error::Integrity(format!(
                "artifact version {} does not match supported version {}",
                artifact.version, FORMAT_VERSION
            )));
        }
        Ok(artifact)
    }

    /// Encodes and scales a raw record with the stored tables, runs the
    /// model, and returns predictions on the normalized scale.
    pub fn predict_record_scaled(&self, rec: &FormulationRecord) -> Result<Vec<f64>> {
        let encoded = self.encoding.encode_record(&self.schema, rec)?;
        let scaled = self.scaling.scale_feature_row(&encoded)?;
        self.model.predict_scaled(&scaled)
    }

    /// Full prediction pipeline ending in original target units.
    pub fn predict_record(&self, rec: &FormulationRecord) -> Result<Vec<f64>> {
        let scaled = self.predict_record_scaled(rec)?;
        self.scaling.invert_targets(&scaled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{fit_multi, RegressorSpec};
    use crate::data::{apply_scaling, encode_categoricals, fit_scaling};
    use crate::matrix::Matrix;
    use crate::synth::{generate_ofdf_like, SynthConfig};

    fn toy_artifact() -> (ModelArtifact, crate::data::Dataset) {
        let ds = generate_ofdf_like(&SynthConfig::new(vec![5, 5], 0.0, 3).unwrap()).unwrap();
        let encoded = encode_categoricals(&ds).unwrap();
        let train: Vec<usize> = (0..8).collect();
        let scaling = fit_scaling(&encoded, &train).unwrap();
        let scaled = apply_scaling(&encoded, &scaling).unwrap();
        let x = scaled.matrix().unwrap().select_rows(&train);
        let y_rows: Vec<Vec<f64>> = train
            .iter()
            .map(|&i| scaling.scale_targets(&ds.record(i).targets).unwrap())
            .collect();
        let y = Matrix::from_rows(&y_rows);
        let wrapper = fit_multi(&RegressorSpec::Knn { k: 2 }, &x, &y).unwrap();
        let artifact = ModelArtifact::new(
            "knn".into(),
            ds.schema().clone(),
            encoded.codebook().unwrap().clone(),
            scaling,
            ModelPayload::MultiTarget { wrapper },
        );
        (artifact, ds)
    }

    #[test]
    fn save_load_predict_is_bit_identical() {
        let (artifact, ds) = toy_artifact();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        artifact.save(&path).unwrap();
        let reloaded = ModelArtifact::load(&path).unwrap();
        assert_eq!(reloaded, artifact);
        for rec in ds.records() {
            assert_eq!(
                artifact.predict_record(rec).unwrap(),
                reloaded.predict_record(rec).unwrap()
            );
        }
    }

    #[test]
    fn version_mismatch_rejected() {
        let (mut artifact, _) = toy_artifact();
        artifact.version = 999;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let text = serde_json::to_string(&artifact).unwrap();
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            ModelArtifact::load(&path),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn unseen_label_surfaces_from_prediction() {
        let (artifact, ds) = toy_artifact();
        let mut rec = ds.record(0).clone();
        rec.categoricals
            .insert("polymer".into(), "Chitosan".into());
        assert!(matches!(
            artifact.predict_record(&rec),
            Err(Error::UnknownCategory { .. })
        ));
    }
}
