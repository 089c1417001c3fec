use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{euclidean, Matrix};

/// k-nearest-neighbors regressor: stores the training rows verbatim and
/// predicts the uniform mean of the k nearest targets by Euclidean distance.
/// Distance ties break toward the lower training-row index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub rows: Matrix,
    pub targets: Vec<f64>,
}

pub(crate) fn fit_knn_model(x: &Matrix, y: &[f64], k: usize) -> Result<KnnModel> {
    if k == 0 {
        return Err(Error::Argument("k must be >= 1".into()));
    }
    if k > x.rows() {
        return Err(Error::Argument(format!(
            "k = {k} exceeds the {} training rows",
            x.rows()
        )));
    }
    if y.len() != x.rows() {
        return Err(Error::Argument(format!(
            "{} rows but {} targets",
            x.rows(),
            y.len()
        )));
    }
    Ok(KnnModel {
        k,
        rows: x.clone(),
        targets: y.to_vec(),
    })
}

impl KnnModel {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut dists: Vec<(f64, usize)> = (0..self.rows.rows())
            .map(|i| (euclidean(self.rows.row(i), row), i))
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances").then(a.1.cmp(&b.1)));
        let sum: f64 = dists[..self.k].iter().map(|&(_, i)| self.targets[i]).sum();
        sum / self.k as f64
    }
}
