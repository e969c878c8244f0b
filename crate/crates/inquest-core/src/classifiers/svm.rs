//! Linear SVC with L1 (proximal subgradient) and L2 (averaged subgradient)
//! fits.
//!
//! The penalized objective is the mean hinge loss
//! `(1/n) * sum max(0, 1 - y_i (w.x_i + b))` plus `lambda*||w||_1` or
//! `(lambda/2)*||w||_2^2`, `lambda = 1/(n*C)`. The subgradient phase tracks
//! the best iterate by penalized objective; on small problems a
//! deterministic exact line-search refinement follows, because diminishing
//! step sizes alone converge like 1/sqrt(t) and cannot hit tight objective
//! tolerances.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::Label;
use crate::linalg::{dot, Matrix};
use crate::math;
use crate::sampling;

use super::{
    soft_threshold, validate_two_class, FitDiagnostics, FitError, FitOptions, LinearModel,
    LossKind, Penalty, Timer,
};

/// Penalized hinge objective at `(w, b)` for penalty weight `lambda`.
pub fn hinge_objective(
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
        let m = y[i].value() * (dot(w, row) + b);
        loss += math::fmax(0.0, 1.0 - m);
    }
    loss / n
        + match penalty {
            Penalty::L1 => lambda * w.iter().map(|v| math::abs(*v)).sum::<f64>(),
            Penalty::L2 => 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>(),
        }
}

/// Penalty weight above which the L1 hinge fit returns exactly zero
/// weights.
///
/// Any hinge subgradient in `w_j` has magnitude at most `(1/n) sum |x_ij|`
/// regardless of the intercept, so at or above this bound `w = 0` is
/// optimal and every proximal step from zero stays at an exact zero. The
/// bound is conservative (sparsity can start earlier).
pub fn lambda_max_svc(x: &Matrix, y: &[Label]) -> f64 {
    let _ = y;
    let n = x.rows() as f64;
    let mut best: f64 = 0.0;
    for j in 0..x.cols() {
        let s: f64 = x.iter_rows().map(|row| math::abs(row[j])).sum();
        best = math::fmax(best, s / n);
    }
    best
}

/// Fits a linear SVC at inverse strength `C`.
pub fn fit_linear_svc(
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
    let timer = Timer::start();
    let n = x.rows();
    let h = x.cols();
    let lambda = 1.0 / (n as f64 * c);
    let ys: Vec<f64> = y.iter().map(|l| l.value()).collect();

    let mut w = vec![0.0; h];
    // Start the intercept at the exact minimizer of the mean hinge with
    // w = 0; its only kinks are at -1 and +1, with ties going to 0.
    let mut b = 0.0;
    let mut best_b_obj = f64::INFINITY;
    for cand in [0.0, 1.0, -1.0] {
        let o = hinge_objective(x, y, &w, cand, penalty, lambda);
        if o < best_b_obj {
            best_b_obj = o;
            b = cand;
        }
    }

    let mut best_w = w.clone();
    let mut best_b = b;
    let mut best_obj = best_b_obj;
    let mut last_improved = 0usize;
    let stall = core::cmp::max(2_000, opts.max_iter / 5);

    let mut trace = Vec::new();
    let mut iterations = 0usize;
    let mut avg_w = vec![0.0; h];
    let mut avg_b = 0.0;
    let mut avg_count = 0u64;

    for t in 0..opts.max_iter {
        iterations = t + 1;
        // One pass: margins, objective and subgradient together.
        let mut loss = 0.0;
        let mut g_w = vec![0.0; h];
        let mut g_b = 0.0;
        for (i, row) in x.iter_rows().enumerate() {
            let m = ys[i] * (dot(&w, row) + b);
            if m < 1.0 {
                loss += 1.0 - m;
                for (g, xv) in g_w.iter_mut().zip(row) {
                    *g += -ys[i] * xv;
                }
                g_b += -ys[i];
            }
        }
        let inv_n = 1.0 / n as f64;
        loss *= inv_n;
        for g in g_w.iter_mut() {
            *g *= inv_n;
        }
        g_b *= inv_n;

        let obj = loss
            + match penalty {
                Penalty::L1 => lambda * w.iter().map(|v| math::abs(*v)).sum::<f64>(),
                Penalty::L2 => 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>(),
            };
        if obj < best_obj - 1e-15 {
            best_obj = obj;
            best_w.copy_from_slice(&w);
            best_b = b;
            last_improved = t;
        }
        if opts.record_trace {
            trace.push(obj);
        }
        if t.saturating_sub(last_improved) > stall {
            break;
        }

        match penalty {
            Penalty::L1 => {
                let eta = 0.5 / math::sqrt((t + 1) as f64);
                for j in 0..h {
                    w[j] = soft_threshold(w[j] - eta * g_w[j], eta * lambda);
                }
                b -= eta * g_b;
            }
            Penalty::L2 => {
                // Strongly convex: 1/(lambda t) schedule, capped, with a
                // running average as a candidate solution.
                let eta = math::fmin(1.0 / (lambda * (t + 1) as f64), 50.0);
                for j in 0..h {
                    w[j] -= eta * (g_w[j] + lambda * w[j]);
                }
                b -= eta * g_b;
                if t >= opts.max_iter / 2 {
                    for (a, wj) in avg_w.iter_mut().zip(&w) {
                        *a += wj;
                    }
                    avg_b += b;
                    avg_count += 1;
                }
            }
        }
    }

    if avg_count > 0 {
        let inv = 1.0 / avg_count as f64;
        let cand_w: Vec<f64> = avg_w.iter().map(|a| a * inv).collect();
        let cand_b = avg_b * inv;
        let obj = hinge_objective(x, y, &cand_w, cand_b, penalty, lambda);
        if obj < best_obj {
            best_obj = obj;
            best_w = cand_w;
            best_b = cand_b;
        }
    }

    let do_polish = opts.polish.unwrap_or(n <= 64 && h <= 8);
    if do_polish {
        polish(x, &ys, &mut best_w, &mut best_b, penalty, lambda, opts.seed);
        best_obj = hinge_objective(x, y, &best_w, best_b, penalty, lambda);
    }

    let residual = subgradient_residual(x, &ys, &best_w, best_b, penalty, lambda);
    let converged = residual <= opts.tol;
    let nnz = best_w.iter().filter(|v| **v != 0.0).count();
    let model = LinearModel {
        weights: best_w,
        intercept: best_b,
        penalty,
        strength: c,
        loss: LossKind::Hinge,
        seed: opts.seed,
        pool_hash: String::new(),
    };
    Ok((
        model,
        FitDiagnostics {
            final_objective: best_obj,
            iterations,
            converged,
            nnz,
            wall_time: timer.elapsed(),
            trace,
        },
    ))
}

/// Distance of zero from the subdifferential, coordinate-wise sup.
///
/// Margin-boundary samples contribute an interval per coordinate; an L1
/// penalty widens the interval at zero weights. This is exact for the
/// separable-per-coordinate relaxation, hence an upper bound on optimality.
fn subgradient_residual(
    x: &Matrix,
    ys: &[f64],
    w: &[f64],
    b: f64,
    penalty: Penalty,
    lambda: f64,
) -> f64 {
    let n = x.rows();
    let h = x.cols();
    let inv_n = 1.0 / n as f64;
    let mut lo = vec![0.0; h + 1];
    let mut hi = vec![0.0; h + 1];
    for (i, row) in x.iter_rows().enumerate() {
        let m = ys[i] * (dot(w, row) + b);
        if m < 1.0 - 1e-12 {
            for j in 0..h {
                let g = -ys[i] * row[j] * inv_n;
                lo[j] += g;
                hi[j] += g;
            }
            lo[h] += -ys[i] * inv_n;
            hi[h] += -ys[i] * inv_n;
        } else if m <= 1.0 + 1e-12 {
            for j in 0..h {
                let g = -ys[i] * row[j] * inv_n;
                lo[j] += math::fmin(0.0, g);
                hi[j] += math::fmax(0.0, g);
            }
            lo[h] += math::fmin(0.0, -ys[i] * inv_n);
            hi[h] += math::fmax(0.0, -ys[i] * inv_n);
        }
    }
    let mut res: f64 = 0.0;
    for j in 0..h {
        let (mut l, mut u) = (lo[j], hi[j]);
        match penalty {
            Penalty::L1 => {
                if w[j] != 0.0 {
                    l += lambda * math::signum(w[j]);
                    u += lambda * math::signum(w[j]);
                } else {
                    l -= lambda;
                    u += lambda;
                }
            }
            Penalty::L2 => {
                l += lambda * w[j];
                u += lambda * w[j];
            }
        }
        res = math::fmax(res, interval_distance(l, u));
    }
    res = math::fmax(res, interval_distance(lo[h], hi[h]));
    res
}

fn interval_distance(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 {
        lo
    } else if hi < 0.0 {
        -hi
    } else {
        0.0
    }
}

/// Cyclic exact line searches along coordinate and seeded random
/// directions. The objective restricted to a line is piecewise quadratic
/// with breakpoints where margins cross 1 or L1 terms cross 0, so each
/// search evaluates every breakpoint plus per-segment interior minima.
fn polish(
    x: &Matrix,
    ys: &[f64],
    w: &mut Vec<f64>,
    b: &mut f64,
    penalty: Penalty,
    lambda: f64,
    seed: u64,
) {
    let h = x.cols();
    let dims = h + 1;
    let mut rng = sampling::derive_rng(seed, 0x5e_a4c4);
    let mut obj = line_objective(x, ys, w, *b, penalty, lambda);
    for _pass in 0..60 {
        let before = obj;
        for d in 0..dims + 4 * dims {
            let mut dir = vec![0.0; dims];
            if d < dims {
                dir[d] = 1.0;
            } else {
                for v in dir.iter_mut() {
                    *v = sampling::unit_f64(&mut rng) * 2.0 - 1.0;
                }
                let norm = math::sqrt(dir.iter().map(|v| v * v).sum::<f64>());
                if norm < 1e-12 {
                    continue;
                }
                for v in dir.iter_mut() {
                    *v /= norm;
                }
            }
            if let Some((t, new_obj)) =
                exact_line_search(x, ys, w, *b, &dir[..h], dir[h], penalty, lambda)
            {
                if new_obj < obj - 1e-15 {
                    for (wj, dj) in w.iter_mut().zip(&dir[..h]) {
                        *wj += t * dj;
                        if math::abs(*wj) < 1e-15 {
                            *wj = 0.0;
                        }
                    }
                    *b += t * dir[h];
                    obj = new_obj;
                }
            }
        }
        if before - obj < 1e-15 {
            break;
        }
    }
}

fn line_objective(
    x: &Matrix,
    ys: &[f64],
    w: &[f64],
    b: f64,
    penalty: Penalty,
    lambda: f64,
) -> f64 {
    let n = x.rows() as f64;
    let mut loss = 0.0;
    for (i, row) in x.iter_rows().enumerate() {
        loss += math::fmax(0.0, 1.0 - ys[i] * (dot(w, row) + b));
    }
    loss / n
        + match penalty {
            Penalty::L1 => lambda * w.iter().map(|v| math::abs(*v)).sum::<f64>(),
            Penalty::L2 => 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>(),
        }
}

/// Minimizes the objective along `(w, b) + t * (dw, db)`; returns the best
/// `(t, value)` or `None` when the direction is degenerate.
#[allow(clippy::too_many_arguments)]
fn exact_line_search(
    x: &Matrix,
    ys: &[f64],
    w: &[f64],
    b: f64,
    dw: &[f64],
    db: f64,
    penalty: Penalty,
    lambda: f64,
) -> Option<(f64, f64)> {
    let n = x.rows();
    let inv_n = 1.0 / n as f64;
    // Margins and their rates along the direction.
    let mut z = Vec::with_capacity(n);
    let mut dz = Vec::with_capacity(n);
    for row in x.iter_rows() {
        z.push(dot(w, row) + b);
        dz.push(dot(dw, row) + db);
    }
    let mut breaks: Vec<f64> = Vec::new();
    for i in 0..n {
        let rate = ys[i] * dz[i];
        if math::abs(rate) > 1e-14 {
            breaks.push((1.0 - ys[i] * z[i]) / rate);
        }
    }
    if penalty == Penalty::L1 {
        for j in 0..w.len() {
            if math::abs(dw[j]) > 1e-14 {
                breaks.push(-w[j] / dw[j]);
            }
        }
    }
    if breaks.is_empty() {
        return None;
    }
    breaks.push(0.0);
    breaks.sort_by(|a, bq| a.partial_cmp(bq).unwrap());
    breaks.dedup_by(|a, bq| math::abs(*a - *bq) < 1e-14);

    let eval = |t: f64| -> f64 {
        let mut loss = 0.0;
        for i in 0..n {
            loss += math::fmax(0.0, 1.0 - ys[i] * (z[i] + t * dz[i]));
        }
        loss *= inv_n;
        match penalty {
            Penalty::L1 => {
                let p: f64 = w.iter().zip(dw).map(|(wj, dj)| math::abs(wj + t * dj)).sum();
                loss + lambda * p
            }
            Penalty::L2 => {
                let p: f64 = w.iter().zip(dw).map(|(wj, dj)| {
                    let v = wj + t * dj;
                    v * v
                }).sum();
                loss + 0.5 * lambda * p
            }
        }
    };

    let mut best_t = 0.0;
    let mut best = eval(0.0);
    let consider = |t: f64, best_t: &mut f64, best: &mut f64| {
        if !t.is_finite() {
            return;
        }
        let v = eval(t);
        if v < *best {
            *best = v;
            *best_t = t;
        }
    };
    for &t in &breaks {
        consider(t, &mut best_t, &mut best);
    }
    // Interior minima of the quadratic segments (L2 term), plus probes
    // beyond the outermost breakpoints where the function is a single
    // piece.
    let quad = match penalty {
        Penalty::L2 => 0.5 * lambda * dw.iter().map(|d| d * d).sum::<f64>(),
        Penalty::L1 => 0.0,
    };
    let derivative_at = |t: f64| -> f64 {
        let mut g = 0.0;
        for i in 0..n {
            if ys[i] * (z[i] + t * dz[i]) < 1.0 {
                g += -ys[i] * dz[i];
            }
        }
        g *= inv_n;
        match penalty {
            Penalty::L1 => {
                for j in 0..w.len() {
                    g += lambda * math::signum(w[j] + t * dw[j]) * dw[j];
                }
            }
            Penalty::L2 => {
                for j in 0..w.len() {
                    g += lambda * (w[j] + t * dw[j]) * dw[j];
                }
            }
        }
        g
    };
    if quad > 0.0 {
        let lo = breaks[0] - 1.0;
        let hi = breaks[breaks.len() - 1] + 1.0;
        let mut segment_points = Vec::with_capacity(breaks.len() + 2);
        segment_points.push(lo);
        segment_points.extend_from_slice(&breaks);
        segment_points.push(hi);
        for pair in segment_points.windows(2) {
            let (a, c) = (pair[0], pair[1]);
            if c - a < 1e-14 {
                continue;
            }
            let mid = 0.5 * (a + c);
            // Within the segment f'(t) = f'(mid) + 2*quad*(t - mid).
            let t_star = mid - derivative_at(mid) / (2.0 * quad);
            if t_star > a && t_star < c {
                consider(t_star, &mut best_t, &mut best);
            }
        }
        // Unbounded end segments: the same formula, anchored outside.
        let t_lo = lo - derivative_at(lo) / (2.0 * quad);
        if t_lo < breaks[0] {
            consider(t_lo, &mut best_t, &mut best);
        }
        let t_hi = hi - derivative_at(hi) / (2.0 * quad);
        if t_hi > breaks[breaks.len() - 1] {
            consider(t_hi, &mut best_t, &mut best);
        }
    }
    Some((best_t, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use alloc::vec;
    use rand_core::RngCore;

    fn labels(vals: &[i32]) -> Vec<Label> {
        vals.iter()
            .map(|v| if *v > 0 { Label::Relevant } else { Label::Irrelevant })
            .collect()
    }

    #[test]
    fn separable_pair_has_margin_at_large_c() {
        let x = Matrix::from_rows(&[vec![-1.0], vec![1.0]]);
        let y = labels(&[-1, 1]);
        for penalty in [Penalty::L1, Penalty::L2] {
            let (m, _) = fit_linear_svc(&x, &y, penalty, 100.0, &FitOptions::default()).unwrap();
            assert!(m.weights[0] > 0.0, "{penalty:?}");
            for (i, row) in x.iter_rows().enumerate() {
                let margin = y[i].value() * (m.weights[0] * row[0] + m.intercept);
                assert!(margin >= 0.0, "{penalty:?}: margin {margin}");
            }
        }
    }

    #[test]
    fn all_positive_labels_error() {
        let x = Matrix::from_rows(&[vec![0.1], vec![0.9]]);
        let y = labels(&[1, 1]);
        assert_eq!(
            fit_linear_svc(&x, &y, Penalty::L1, 1.0, &FitOptions::default()).unwrap_err(),
            FitError::SingleClass
        );
    }

    /// Tiny 4-point L1 instance against the brute-force grid oracle at the
    /// stated step of 0.02 over (w, b).
    #[test]
    fn tiny_l1_instance_matches_grid() {
        let x = Matrix::from_rows(&[vec![0.2], vec![0.4], vec![0.7], vec![0.9]]);
        let y = labels(&[-1, -1, 1, 1]);
        let c = 1.0;
        let lambda = 1.0 / (4.0 * c);
        let (m, diag) = fit_linear_svc(&x, &y, Penalty::L1, c, &FitOptions::default()).unwrap();

        let mut grid_best = f64::INFINITY;
        let mut t = -3.0f64;
        while t <= 3.0 + 1e-12 {
            let mut bb = -3.0f64;
            while bb <= 3.0 + 1e-12 {
                let o = hinge_objective(&x, &y, &[t], bb, Penalty::L1, lambda);
                grid_best = math::fmin(grid_best, o);
                bb += 0.02;
            }
            t += 0.02;
        }
        assert!(
            diag.final_objective <= grid_best + 1e-3,
            "fitted {} vs grid {}",
            diag.final_objective,
            grid_best
        );
        let recomputed = hinge_objective(&x, &y, &m.weights, m.intercept, Penalty::L1, lambda);
        assert!((recomputed - diag.final_objective).abs() < 1e-12);
    }

    #[test]
    fn huge_penalty_forces_exact_zeros() {
        let mut rng = sampling::derive_rng(23, 0);
        for _ in 0..20 {
            let n = 6;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    vec![
                        sampling::unit_f64(&mut rng),
                        sampling::unit_f64(&mut rng) * 2.0 - 1.0,
                    ]
                })
                .collect();
            let x = Matrix::from_rows(&rows);
            let y: Vec<Label> = (0..n)
                .map(|i| if i % 2 == 0 { Label::Relevant } else { Label::Irrelevant })
                .collect();
            let lmax = lambda_max_svc(&x, &y);
            let lambda = lmax * 1.01;
            let c = 1.0 / (n as f64 * lambda);
            let (m, diag) = fit_linear_svc(&x, &y, Penalty::L1, c, &FitOptions::default()).unwrap();
            assert_eq!(diag.nnz, 0, "weights: {:?}", m.weights);
        }
    }

    #[test]
    fn polish_line_search_finds_kink_minimum() {
        // f(t) along w for one sample peaks... minimum sits exactly at a
        // margin breakpoint; the search must land on it.
        let x = Matrix::from_rows(&[vec![1.0], vec![-1.0]]);
        let ys = vec![1.0, -1.0];
        let (t, v) = exact_line_search(&x, &ys, &[0.0], 0.0, &[1.0], 0.0, Penalty::L1, 0.05)
            .unwrap();
        // Along w: mean hinge is max(0, 1-t) and penalty 0.05|t|; the
        // minimum is t = 1 with value 0.05.
        assert!((t - 1.0).abs() < 1e-12, "t = {t}");
        assert!((v - 0.05).abs() < 1e-12);
    }

    #[test]
    fn l2_small_instance_matches_refined_grid() {
        let x = Matrix::from_rows(&[vec![0.1], vec![0.3], vec![0.8], vec![0.95]]);
        let y = labels(&[-1, -1, 1, 1]);
        let c = 2.0;
        let lambda = 1.0 / (4.0 * c);
        let (_, diag) = fit_linear_svc(&x, &y, Penalty::L2, c, &FitOptions::default()).unwrap();
        // Coarse grid then two local refinements.
        let mut center = (0.0f64, 0.0f64);
        let mut step = 0.05f64;
        let mut span = 3.0f64;
        let mut grid_best = f64::INFINITY;
        for _ in 0..3 {
            let (mut w0, mut b0) = center;
            let mut wv = w0 - span;
            while wv <= w0 + span + 1e-12 {
                let mut bv = b0 - span;
                while bv <= b0 + span + 1e-12 {
                    let o = hinge_objective(&x, &y, &[wv], bv, Penalty::L2, lambda);
                    if o < grid_best {
                        grid_best = o;
                        center = (wv, bv);
                    }
                    bv += step;
                }
                wv += step;
            }
            w0 = center.0;
            b0 = center.1;
            let _ = (w0, b0);
            span = step * 2.0;
            step /= 10.0;
        }
        assert!(
            (diag.final_objective - grid_best).abs() < 1e-3,
            "fitted {} vs grid {}",
            diag.final_objective,
            grid_best
        );
    }

    #[test]
    fn nnz_grows_as_penalty_shrinks() {
        let mut rng = sampling::derive_rng(31, 4);
        for _ in 0..10 {
            let n = 6;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    vec![
                        sampling::unit_f64(&mut rng) * 2.0 - 1.0,
                        sampling::unit_f64(&mut rng) * 2.0 - 1.0,
                    ]
                })
                .collect();
            let x = Matrix::from_rows(&rows);
            let y: Vec<Label> = rows
                .iter()
                .map(|r| {
                    if r[0] - 0.3 * r[1] + 0.1 * (rng.next_u64() % 3) as f64 > 0.0 {
                        Label::Relevant
                    } else {
                        Label::Irrelevant
                    }
                })
                .collect();
            if y.iter().all(|l| *l == y[0]) {
                continue;
            }
            let lambda = lambda_max_svc(&x, &y) * 0.4;
            let c_hi = 1.0 / (n as f64 * lambda);
            let c_lo = c_hi / 10.0; // 10x larger lambda
            let (m_strong, _) =
                fit_linear_svc(&x, &y, Penalty::L1, c_lo, &FitOptions::default()).unwrap();
            let (m_weak, _) =
                fit_linear_svc(&x, &y, Penalty::L1, c_hi, &FitOptions::default()).unwrap();
            assert!(
                m_weak.nnz() >= m_strong.nnz(),
                "nnz at lambda/10 = {} < nnz at lambda = {}",
                m_weak.nnz(),
                m_strong.nnz()
            );
        }
    }
}
