//! Logistic regression with L1 (coordinate descent) and L2 (Newton) fits.
//!
//! The penalized objective is the mean negative log-likelihood
//! `(1/n) * sum log(1 + exp(-y_i (w.x_i + b)))` plus `lambda*||w||_1` or
//! `(lambda/2)*||w||_2^2`, with `lambda = 1/(n*C)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::Label;
use crate::linalg::{cholesky_solve, Matrix};
use crate::math;

use super::{
    soft_threshold, validate_two_class, FitDiagnostics, FitError, FitOptions, LinearModel,
    LossKind, Penalty, Timer,
};

/// Mean negative log-likelihood and its gradient in `(w, b)`, unpenalized.
pub fn logistic_loss_and_grad(
    x: &Matrix,
    y: &[Label],
    w: &[f64],
    b: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.rows();
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; x.cols()];
    let mut grad_b = 0.0;
    for (i, row) in x.iter_rows().enumerate() {
        let yi = y[i].value();
        let z = crate::linalg::dot(w, row) + b;
        let m = yi * z;
        loss += math::log1p_exp_neg(m);
        // d/dz log(1+exp(-y z)) = -y * sigmoid(-y z)
        let r = -yi * math::sigmoid(-m);
        for (g, xv) in grad_w.iter_mut().zip(row) {
            *g += r * xv;
        }
        grad_b += r;
    }
    let inv_n = 1.0 / n as f64;
    loss *= inv_n;
    for g in grad_w.iter_mut() {
        *g *= inv_n;
    }
    grad_b *= inv_n;
    (loss, grad_w, grad_b)
}

/// Penalized objective at `(w, b)` for penalty weight `lambda`.
pub fn logistic_objective(
    x: &Matrix,
    y: &[Label],
    w: &[f64],
    b: f64,
    penalty: Penalty,
    lambda: f64,
) -> f64 {
    let n = x.rows() as f64;
    let mut loss = 0.0;
    for (i, row) in x.iter_rows().enumerate() {
        let z = crate::linalg::dot(w, row) + b;
        loss += math::log1p_exp_neg(y[i].value() * z);
    }
    loss / n + penalty_term(w, penalty, lambda)
}

fn penalty_term(w: &[f64], penalty: Penalty, lambda: f64) -> f64 {
    match penalty {
        Penalty::L1 => lambda * w.iter().map(|v| math::abs(*v)).sum::<f64>(),
        Penalty::L2 => 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>(),
    }
}

/// Smallest L1 penalty weight that forces the all-zero weight vector.
///
/// With the intercept at its optimum the loss gradient in `w_j` at `w = 0`
/// is `-sum_i y_i (x_ij - mean_j) / (2n)`, so any `lambda` at or above the
/// largest magnitude makes `w = 0` satisfy the subgradient condition.
pub fn lambda_max_logistic(x: &Matrix, y: &[Label]) -> f64 {
    let n = x.rows();
    let h = x.cols();
    let mut means = vec![0.0; h];
    for row in x.iter_rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in means.iter_mut() {
        *m /= n as f64;
    }
    let mut best: f64 = 0.0;
    for j in 0..h {
        let mut s = 0.0;
        for (i, row) in x.iter_rows().enumerate() {
            s += y[i].value() * (row[j] - means[j]);
        }
        best = math::fmax(best, math::abs(s) / (2.0 * n as f64));
    }
    best
}

/// Fits logistic regression at inverse strength `C`.
///
/// L1 runs cyclic coordinate descent with the soft-threshold update against
/// a curvature majorizer, so the penalized objective never increases
/// between sweeps and zeroed coordinates are exact. L2 runs damped Newton.
/// The intercept is unpenalized in both.
pub fn fit_logistic(
    x: &Matrix,
    y: &[Label],
    penalty: Penalty,
    c: f64,
    opts: &FitOptions,
) -> Result<(LinearModel, FitDiagnostics), FitError> {
    validate_two_class(x, y)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(FitError::BadStrength(c));
    }
    let lambda = 1.0 / (x.rows() as f64 * c);
    match penalty {
        Penalty::L1 => fit_l1(x, y, c, lambda, opts),
        Penalty::L2 => fit_l2(x, y, c, lambda, opts),
    }
}

fn fit_l1(
    x: &Matrix,
    y: &[Label],
    c: f64,
    lambda: f64,
    opts: &FitOptions,
) -> Result<(LinearModel, FitDiagnostics), FitError> {
    let timer = Timer::start();
    let n = x.rows();
    let h = x.cols();
    let inv_n = 1.0 / n as f64;

    // Per-coordinate curvature majorizers: the logistic second derivative
    // is at most 1/4, so (1/4n) * sum x_ij^2 bounds the true curvature
    // everywhere and the soft-threshold step can never increase the
    // objective.
    let mut major = vec![0.0; h];
    for row in x.iter_rows() {
        for (mj, v) in major.iter_mut().zip(row) {
            *mj += v * v;
        }
    }
    for mj in major.iter_mut() {
        *mj = math::fmax(0.25 * inv_n * *mj, 1e-12);
    }

    let mut w = vec![0.0; h];
    let mut b = 0.0;
    let mut z = vec![0.0; n]; // margins x_i.w + b
    let ys: Vec<f64> = y.iter().map(|l| l.value()).collect();

    let grad_b = |z: &[f64]| -> f64 {
        let mut g = 0.0;
        for (zi, yi) in z.iter().zip(&ys) {
            g += -yi * math::sigmoid(-yi * zi);
        }
        g * inv_n
    };

    // Settle the intercept before touching coordinates: with w = 0 and b
    // optimal, penalties at or above lambda_max keep every weight at an
    // exact zero from the first sweep.
    let b_tol = math::fmin(opts.tol, 1e-8);
    for _ in 0..10_000 {
        let step = -4.0 * grad_b(&z);
        b += step;
        for zi in z.iter_mut() {
            *zi += step;
        }
        if math::abs(step) <= b_tol {
            break;
        }
    }

    let mut trace = Vec::new();
    let mut sweeps = 0;
    let mut converged = false;
    // Active-set strategy: a full sweep finds coordinates that want to
    // move, then cheap sweeps over the current support run to convergence
    // before the next full check.
    let mut on_active_pass = false;
    while sweeps < opts.max_iter {
        sweeps += 1;
        let mut max_update: f64 = 0.0;

        let b_step = -4.0 * grad_b(&z);
        if b_step != 0.0 {
            b += b_step;
            for zi in z.iter_mut() {
                *zi += b_step;
            }
            max_update = math::fmax(max_update, math::abs(b_step));
        }

        for j in 0..h {
            if on_active_pass && w[j] == 0.0 {
                continue;
            }
            let mut g = 0.0;
            for (i, row) in x.iter_rows().enumerate() {
                g += -ys[i] * math::sigmoid(-ys[i] * z[i]) * row[j];
            }
            g *= inv_n;
            let target = soft_threshold(w[j] - g / major[j], lambda / major[j]);
            let d = target - w[j];
            if d != 0.0 {
                w[j] = target;
                for (i, row) in x.iter_rows().enumerate() {
                    z[i] += d * row[j];
                }
                max_update = math::fmax(max_update, math::abs(d));
            }
        }

        if opts.record_trace {
            trace.push(logistic_objective(x, y, &w, b, Penalty::L1, lambda));
        }
        if max_update <= opts.tol {
            if on_active_pass {
                // Support stabilized; confirm with a full sweep.
                on_active_pass = false;
            } else {
                converged = true;
                break;
            }
        } else if !on_active_pass {
            on_active_pass = true;
        }
    }

    let final_objective = logistic_objective(x, y, &w, b, Penalty::L1, lambda);
    let nnz = w.iter().filter(|v| **v != 0.0).count();
    let model = LinearModel {
        weights: w,
        intercept: b,
        penalty: Penalty::L1,
        strength: c,
        loss: LossKind::Logistic,
        seed: opts.seed,
        pool_hash: String::new(),
    };
    Ok((
        model,
        FitDiagnostics {
            final_objective,
            iterations: sweeps,
            converged,
            nnz,
            wall_time: timer.elapsed(),
            trace,
        },
    ))
}

fn fit_l2(
    x: &Matrix,
    y: &[Label],
    c: f64,
    lambda: f64,
    opts: &FitOptions,
) -> Result<(LinearModel, FitDiagnostics), FitError> {
    let timer = Timer::start();
    let n = x.rows();
    let h = x.cols();
    let mut w = vec![0.0; h];
    let mut b = 0.0;
    let mut obj = logistic_objective(x, y, &w, b, Penalty::L2, lambda);

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let (_, mut grad_w, grad_b) = logistic_loss_and_grad(x, y, &w, b);
        for (g, wj) in grad_w.iter_mut().zip(&w) {
            *g += lambda * wj;
        }
        let gnorm = grad_w
            .iter()
            .chain(core::iter::once(&grad_b))
            .fold(0.0f64, |a, g| math::fmax(a, math::abs(*g)));
        if gnorm <= opts.tol {
            converged = true;
            break;
        }

        // Hessian of the penalized objective over (w, b).
        let d = h + 1;
        let mut hess = Matrix::zeros(d, d);
        for (i, row) in x.iter_rows().enumerate() {
            let z = crate::linalg::dot(&w, row) + b;
            let s = math::sigmoid(z);
            let wgt = s * (1.0 - s) / n as f64;
            if wgt == 0.0 {
                continue;
            }
            for a in 0..h {
                let xa = row[a];
                if xa == 0.0 {
                    continue;
                }
                for bcol in a..h {
                    hess.set(a, bcol, hess.get(a, bcol) + wgt * xa * row[bcol]);
                }
                hess.set(a, h, hess.get(a, h) + wgt * xa);
            }
            hess.set(h, h, hess.get(h, h) + wgt);
            let _ = i;
        }
        for a in 0..d {
            for bcol in 0..a {
                hess.set(a, bcol, hess.get(bcol, a));
            }
        }
        for a in 0..h {
            hess.set(a, a, hess.get(a, a) + lambda);
        }

        let mut rhs: Vec<f64> = grad_w.iter().map(|g| -g).collect();
        rhs.push(-grad_b);
        // Damp until the factorization goes through; near separation the
        // curvature in b can underflow.
        let mut jitter = 1e-10;
        let step = loop {
            match cholesky_solve(&hess, &rhs) {
                Some(s) => break s,
                None => {
                    for a in 0..d {
                        hess.set(a, a, hess.get(a, a) + jitter);
                    }
                    jitter *= 100.0;
                    if jitter > 1e6 {
                        break vec![0.0; d];
                    }
                }
            }
        };
        if step.iter().all(|s| *s == 0.0) {
            break;
        }

        // Backtrack to a strict decrease.
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let w_try: Vec<f64> = w
                .iter()
                .zip(&step[..h])
                .map(|(wj, s)| wj + scale * s)
                .collect();
            let b_try = b + scale * step[h];
            let obj_try = logistic_objective(x, y, &w_try, b_try, Penalty::L2, lambda);
            if obj_try <= obj {
                w = w_try;
                b = b_try;
                obj = obj_try;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if opts.record_trace {
            trace.push(obj);
        }
        if !accepted {
            break;
        }
    }

    let nnz = w.iter().filter(|v| **v != 0.0).count();
    let model = LinearModel {
        weights: w,
        intercept: b,
        penalty: Penalty::L2,
        strength: c,
        loss: LossKind::Logistic,
        seed: opts.seed,
        pool_hash: String::new(),
    };
    Ok((
        model,
        FitDiagnostics {
            final_objective: obj,
            iterations,
            converged,
            nnz,
            wall_time: timer.elapsed(),
            trace,
        },
    ))
}
