//! Ridge classifier: closed-form regularized least squares on +-1 targets.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::Label;
use crate::linalg::{cholesky_solve, Matrix};

use super::{validate_two_class, FitError, LinearModel, LossKind, Penalty};

/// Solves `(Xc' Xc + alpha I) w = Xc' yc` on centered data; the intercept
/// is `mean(y) - mean(x).w`, so it stays unpenalized. Prediction takes the
/// sign of the decision value.
pub fn fit_ridge(x: &Matrix, y: &[Label], alpha: f64) -> Result<LinearModel, FitError> {
    validate_two_class(x, y)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(FitError::BadStrength(alpha));
    }
    let n = x.rows();
    let h = x.cols();
    let ys: Vec<f64> = y.iter().map(|l| l.value()).collect();

    let mut x_mean = vec![0.0; h];
    for row in x.iter_rows() {
        for (m, v) in x_mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in x_mean.iter_mut() {
        *m /= n as f64;
    }
    let y_mean = ys.iter().sum::<f64>() / n as f64;

    // Gram of centered features plus the ridge.
    let mut gram = Matrix::zeros(h, h);
    let mut rhs = vec![0.0; h];
    for (i, row) in x.iter_rows().enumerate() {
        let yc = ys[i] - y_mean;
        for a in 0..h {
            let xa = row[a] - x_mean[a];
            rhs[a] += xa * yc;
            for b in a..h {
                gram.set(a, b, gram.get(a, b) + xa * (row[b] - x_mean[b]));
            }
        }
    }
    for a in 0..h {
        for b in 0..a {
            gram.set(a, b, gram.get(b, a));
        }
        gram.set(a, a, gram.get(a, a) + alpha);
    }

    let weights = cholesky_solve(&gram, &rhs)
        .ok_or_else(|| FitError::Degenerate(String::from("ridge system not positive definite")))?;
    let intercept = y_mean - crate::linalg::dot(&x_mean, &weights);
    Ok(LinearModel {
        weights,
        intercept,
        penalty: Penalty::L2,
        strength: alpha,
        loss: LossKind::Squared,
        seed: 0,
        pool_hash: String::new(),
    })
}
