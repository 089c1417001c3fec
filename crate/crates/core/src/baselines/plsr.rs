use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Partial least squares (single target) by NIPALS: extract score/loading
/// pairs maximizing covariance with the residual target, deflate, and
/// compose everything into one linear predictor.
///
/// Returns (coefficients, intercept). With as many components as features on
/// full-rank data this reproduces ordinary least squares.
pub(crate) fn fit_pls1(x: &Matrix, y: &[f64], n_components: usize) -> Result<(Vec<f64>, f64)> {
    let n = x.rows();
    let p = x.cols();
    if n == 0 {
        return Err(Error::Argument("cannot fit on zero rows".into()));
    }
    if n_components == 0 || n_components > p {
        return Err(Error::Argument(format!(
            "n_components must be in 1..={p}, got {n_components}"
        )));
    }
    if y.len() != n {
        return Err(Error::Argument(format!("{n} rows but {} targets", y.len())));
    }

    let x_mean: Vec<f64> = (0..p)
        .map(|j| x.column(j).iter().sum::<f64>() / n as f64)
        .collect();
    let y_mean = y.iter().sum::<f64>() / n as f64;

    // centered working copies, deflated in place
    let mut xc: Vec<Vec<f64>> = (0..n)
        .map(|i| x.row(i).iter().zip(&x_mean).map(|(v, m)| v - m).collect())
        .collect();
    let mut yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    let mut weights: Vec<Vec<f64>> = Vec::new(); // w_h, unit norm
    let mut loadings: Vec<Vec<f64>> = Vec::new(); // p_h
    let mut y_loadings: Vec<f64> = Vec::new(); // q_h

    for _ in 0..n_components {
        // w ∝ Xᵀy on the residuals
        let mut w: Vec<f64> = (0..p)
            .map(|j| xc.iter().zip(&yc).map(|(row, yv)| row[j] * yv).sum())
            .collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            break; // residual target is orthogonal to X (e.g. constant y)
        }
        for v in w.iter_mut() {
            *v /= norm;
        }
        let scores: Vec<f64> = xc
            .iter()
            .map(|row| row.iter().zip(&w).map(|(x, wv)| x * wv).sum())
            .collect();
        let tt: f64 = scores.iter().map(|t| t * t).sum();
        if tt < 1e-12 {
            break;
        }
        let loading: Vec<f64> = (0..p)
            .map(|j| {
                xc.iter()
                    .zip(&scores)
                    .map(|(row, t)| row[j] * t)
                    .sum::<f64>()
                    / tt
            })
            .collect();
        let q: f64 = yc.iter().zip(&scores).map(|(yv, t)| yv * t).sum::<f64>() / tt;

        for (row, t) in xc.iter_mut().zip(&scores) {
            for (xv, pv) in row.iter_mut().zip(&loading) {
                *xv -= t * pv;
            }
        }
        for (yv, t) in yc.iter_mut().zip(&scores) {
            *yv -= q * t;
        }

        weights.push(w);
        loadings.push(loading);
        y_loadings.push(q);
    }

    if weights.is_empty() {
        // nothing extractable: predict the mean
        return Ok((vec![0.0; p], y_mean));
    }

    // b = W (PᵀW)⁻¹ q, expressed on the centered scale
    let a = weights.len();
    let ptw = DMatrix::from_fn(a, a, |i, j| {
        loadings[i]
            .iter()
            .zip(&weights[j])
            .map(|(pv, wv)| pv * wv)
            .sum::<f64>()
    });
    let q = nalgebra::DVector::from_vec(y_loadings.clone());
    let r = ptw
        .lu()
        .solve(&q)
        .ok_or_else(|| Error::Argument("degenerate PLS component system".into()))?;

    let mut coef = vec![0.0; p];
    for (h, w) in weights.iter().enumerate() {
        for (c, wv) in coef.iter_mut().zip(w) {
            *c += r[h] * wv;
        }
    }
    let intercept = y_mean
        - coef
            .iter()
            .zip(&x_mean)
            .map(|(c, m)| c * m)
            .sum::<f64>();
    Ok((coef, intercept))
}
