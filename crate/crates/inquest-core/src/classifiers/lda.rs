//! Two-class Fisher discriminant with diagonal shrinkage.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::Label;
use crate::linalg::{cholesky_solve, jacobi_eigh, Matrix};
use crate::math;

use super::{validate_two_class, FitError, LinearModel, LossKind, Penalty};

/// Shrinkage actually applied and the resulting condition number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaFit {
    pub gamma: f64,
    pub condition: f64,
}

const GAMMA_LADDER: [f64; 4] = [1e-4, 1e-3, 1e-2, 1e-1];
const MAX_CONDITION: f64 = 1e8;

/// Fisher LDA: `w = S_pooled^-1 (mu_pos - mu_neg)`, threshold at the class
/// midpoint adjusted by log prior odds.
///
/// The pooled covariance is shrunk toward its diagonal,
/// `S <- (1-gamma) S + gamma diag(S)`, with the smallest gamma from
/// {1e-4, 1e-3, 1e-2, 1e-1} that leaves it well-conditioned.
pub fn fit_lda(x: &Matrix, y: &[Label]) -> Result<(LinearModel, LdaFit), FitError> {
    validate_two_class(x, y)?;
    let h = x.cols();
    let n = x.rows();
    if n < 3 {
        return Err(FitError::TooFewExamples { needed: 3, got: n });
    }

    let mut mu_pos = vec![0.0; h];
    let mut mu_neg = vec![0.0; h];
    let mut n_pos = 0usize;
    for (i, row) in x.iter_rows().enumerate() {
        let target = if y[i] == Label::Relevant {
            n_pos += 1;
            &mut mu_pos
        } else {
            &mut mu_neg
        };
        for (m, v) in target.iter_mut().zip(row) {
            *m += v;
        }
    }
    let n_neg = n - n_pos;
    for m in mu_pos.iter_mut() {
        *m /= n_pos as f64;
    }
    for m in mu_neg.iter_mut() {
        *m /= n_neg as f64;
    }

    // Pooled within-class covariance, n-2 degrees of freedom.
    let mut cov = Matrix::zeros(h, h);
    for (i, row) in x.iter_rows().enumerate() {
        let mu = if y[i] == Label::Relevant { &mu_pos } else { &mu_neg };
        for a in 0..h {
            let da = row[a] - mu[a];
            for b in a..h {
                cov.set(a, b, cov.get(a, b) + da * (row[b] - mu[b]));
            }
        }
    }
    let dof = math::fmax((n - 2) as f64, 1.0);
    for a in 0..h {
        for b in a..h {
            let v = cov.get(a, b) / dof;
            cov.set(a, b, v);
            cov.set(b, a, v);
        }
    }

    let mut chosen = None;
    for &gamma in &GAMMA_LADDER {
        let mut shrunk = Matrix::zeros(h, h);
        for a in 0..h {
            for b in 0..h {
                let v = if a == b {
                    cov.get(a, a)
                } else {
                    (1.0 - gamma) * cov.get(a, b)
                };
                shrunk.set(a, b, v);
            }
        }
        let (vals, _) = jacobi_eigh(&shrunk);
        let lo = vals[0];
        let hi = vals[vals.len() - 1];
        if lo > 0.0 && hi / lo <= MAX_CONDITION {
            chosen = Some((gamma, shrunk, hi / lo));
            break;
        }
    }
    let Some((gamma, shrunk, condition)) = chosen else {
        return Err(FitError::Degenerate(String::from(
            "pooled covariance stays ill-conditioned even at gamma = 0.1",
        )));
    };

    let diff: Vec<f64> = mu_pos.iter().zip(&mu_neg).map(|(p, q)| p - q).collect();
    let weights = cholesky_solve(&shrunk, &diff).ok_or_else(|| {
        FitError::Degenerate(String::from("shrunk covariance failed to factor"))
    })?;
    let mid: Vec<f64> = mu_pos.iter().zip(&mu_neg).map(|(p, q)| 0.5 * (p + q)).collect();
    let intercept =
        -crate::linalg::dot(&weights, &mid) + math::ln(n_pos as f64 / n_neg as f64);

    Ok((
        LinearModel {
            weights,
            intercept,
            penalty: Penalty::L2,
            strength: 1.0,
            loss: LossKind::Squared,
            seed: 0,
            pool_hash: String::new(),
        },
        LdaFit { gamma, condition },
    ))
}
