use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Least-squares linear model: coefficients per feature plus an intercept.
/// Rank-deficient systems get the minimum-norm solution via SVD.
pub(crate) fn solve_least_squares(x: &Matrix, y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = x.rows();
    let p = x.cols();
    if n == 0 {
        return Err(Error::Argument("cannot fit a linear model on zero rows".into()));
    }
    if y.len() != n {
        return Err(Error::Argument(format!(
            "{} rows but {} targets",
            n,
            y.len()
        )));
    }

    // design matrix with a trailing ones column for the intercept
    let design = DMatrix::from_fn(n, p + 1, |i, j| if j < p { x.get(i, j) } else { 1.0 });
    let rhs = DVector::from_column_slice(y);
    let svd = design.svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-12;
    let w = svd
        .solve(&rhs, cutoff)
        .map_err(|e| Error::Argument(format!("least-squares solve failed: {e}")))?;

    let coef = w.as_slice()[..p].to_vec();
    let intercept = w[p];
    Ok((coef, intercept))
}

pub(crate) fn predict_linear(coef: &[f64], intercept: f64, row: &[f64]) -> f64 {
    coef.iter().zip(row).map(|(c, x)| c * x).sum::<f64>() + intercept
}
