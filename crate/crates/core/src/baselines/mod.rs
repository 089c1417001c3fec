//! From-scratch conventional regressors behind one train/predict contract:
//! multiple linear regression, partial least squares, k-nearest neighbors,
//! a bagged random forest and a single-hidden-layer network (trained by the
//! [`crate::deepnet`] engine).
//!
//! Multi-target problems train one independent model per target column with
//! identical hyperparameters; [`MultiTargetWrapper`] bundles them.

mod knn;
mod mlr;
mod plsr;
mod rf;

pub use knn::KnnModel;
pub use rf::{ForestModel, RfConfig, Tree, TreeNode};

use serde::{Deserialize, Serialize};

use crate::deepnet::{self, NetworkParams, NetworkSpec, TrainConfig};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Which regressor to train, with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegressorSpec {
    Mlr,
    Plsr { n_components: usize },
    Knn { k: usize },
    Rf(RfConfig),
    Ann1 {
        hidden_width: usize,
        train: TrainConfig,
        seed: u64,
    },
}

impl RegressorSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            RegressorSpec::Mlr => "mlr",
            RegressorSpec::Plsr { .. } => "plsr",
            RegressorSpec::Knn { .. } => "knn",
            RegressorSpec::Rf(_) => "rf",
            RegressorSpec::Ann1 { .. } => "ann1",
        }
    }
}

/// A fitted single-target regressor (Ann1 may carry several outputs).
/// Prediction is a pure function of the artifact and the input row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedRegressor {
    Mlr {
        coef: Vec<f64>,
        intercept: f64,
    },
    Plsr {
        n_components: usize,
        coef: Vec<f64>,
        intercept: f64,
    },
    Knn(KnnModel),
    Rf(ForestModel),
    Ann1 {
        hidden_width: usize,
        train: TrainConfig,
        params: NetworkParams,
    },
}

impl TrainedRegressor {
    /// Predicted target vector for one encoded, scaled feature row.
    pub fn predict(&self, row: &[f64]) -> Vec<f64> {
        match self {
            TrainedRegressor::Mlr { coef, intercept }
            | TrainedRegressor::Plsr {
                coef, intercept, ..
            } => vec![mlr::predict_linear(coef, *intercept, row)],
            TrainedRegressor::Knn(m) => vec![m.predict(row)],
            TrainedRegressor::Rf(m) => vec![m.predict(row)],
            TrainedRegressor::Ann1 { params, .. } => {
                deepnet::forward(params, row).expect("row width checked at fit time")
            }
        }
    }
}

/// Least-squares linear regression; rank-deficient systems fall back to the
/// minimum-norm pseudo-inverse solution.
pub fn fit_mlr(x: &Matrix, y: &[f64]) -> Result<TrainedRegressor> {
    let (coef, intercept) = mlr::solve_least_squares(x, y)?;
    Ok(TrainedRegressor::Mlr { coef, intercept })
}

/// NIPALS partial least squares (single target), composed into a linear
/// predictor.
pub fn fit_plsr(x: &Matrix, y: &[f64], n_components: usize) -> Result<TrainedRegressor> {
    let (coef, intercept) = plsr::fit_pls1(x, y, n_components)?;
    Ok(TrainedRegressor::Plsr {
        n_components,
        coef,
        intercept,
    })
}

pub fn fit_knn(x: &Matrix, y: &[f64], k: usize) -> Result<TrainedRegressor> {
    Ok(TrainedRegressor::Knn(knn::fit_knn_model(x, y, k)?))
}

pub fn fit_rf(x: &Matrix, y: &[f64], cfg: &RfConfig) -> Result<TrainedRegressor> {
    Ok(TrainedRegressor::Rf(rf::fit_forest(x, y, cfg)?))
}

/// Single-hidden-layer tanh network with sigmoid output, trained by the
/// deepnet engine. `y` may have several columns (multi-output network).
pub fn fit_ann1(
    x: &Matrix,
    y: &Matrix,
    hidden_width: usize,
    train: &TrainConfig,
    seed: u64,
) -> Result<TrainedRegressor> {
    let spec = NetworkSpec::new(vec![x.cols(), hidden_width, y.cols()], seed)?;
    let outcome = deepnet::train(&spec, train, x, y)?;
    Ok(TrainedRegressor::Ann1 {
        hidden_width,
        train: train.clone(),
        params: outcome.params,
    })
}

/// Fits one spec against one target column.
pub fn fit_single(spec: &RegressorSpec, x: &Matrix, y: &[f64]) -> Result<TrainedRegressor> {
    match spec {
        RegressorSpec::Mlr => fit_mlr(x, y),
        RegressorSpec::Plsr { n_components } => fit_plsr(x, y, *n_components),
        RegressorSpec::Knn { k } => fit_knn(x, y, *k),
        RegressorSpec::Rf(cfg) => fit_rf(x, y, cfg),
        RegressorSpec::Ann1 {
            hidden_width,
            train,
            seed,
        } => {
            let y = Matrix::from_rows(&y.iter().map(|&v| vec![v]).collect::<Vec<_>>());
            fit_ann1(x, &y, *hidden_width, train, *seed)
        }
    }
}

/// One fitted regressor per target column, identical hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiTargetWrapper {
    pub spec: RegressorSpec,
    pub models: Vec<TrainedRegressor>,
}

impl MultiTargetWrapper {
    /// Concatenated per-target predictions for one feature row.
    pub fn predict(&self, row: &[f64]) -> Vec<f64> {
        self.models
            .iter()
            .flat_map(|m| m.predict(row))
            .collect()
    }

    pub fn n_targets(&self) -> usize {
        self.models.len()
    }
}

/// Trains one regressor per column of `y` with identical hyperparameters,
/// the spec's seed included: each target's fit depends only on (X, its own
/// column, the shared spec), so fits can run in any order or in parallel.
pub fn fit_multi(spec: &RegressorSpec, x: &Matrix, y: &Matrix) -> Result<MultiTargetWrapper> {
    if y.cols() == 0 {
        return Err(Error::Argument("no target columns".into()));
    }
    if y.rows() != x.rows() {
        return Err(Error::Argument(format!(
            "{} feature rows but {} target rows",
            x.rows(),
            y.rows()
        )));
    }
    let models = (0..y.cols())
        .map(|j| fit_single(spec, x, &y.column(j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiTargetWrapper {
        spec: spec.clone(),
        models,
    })
}
