//! Stratified cross-validation, grid search, and macro metrics.
//!
//! The experiment protocol: for each outer fold, carve a 70:30 train/val
//! split out of the training folds, pick the strength maximizing validation
//! macro-F1 (ties to the smaller strength, i.e. stronger regularization),
//! refit on the whole training fold, and score the held-out test fold.
//! Aggregates report mean plus sample (n-1) standard deviation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::classifiers::{fit_spec, FitError, FitOptions, FittedModel, ModelSpec};
use crate::corpus::Label;
use crate::linalg::Matrix;
use crate::math;
use crate::sampling;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("class {class} has {count} members, fewer than {needed}")]
    ClassTooSmall {
        class: &'static str,
        count: usize,
        needed: usize,
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("strength grid is empty")]
    EmptyGrid,
    #[error("every candidate strength failed to fit; last error: {0}")]
    AllFitsFailed(String),
    #[error("fold {fold}: {source}")]
    FoldFit { fold: usize, source: FitError },
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Stratified fold assignment for one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub n_folds: usize,
    /// Fold index per example.
    pub assignments: Vec<usize>,
    pub seed: u64,
    /// Train share of the inner train/val split (default 0.7).
    pub inner_train_fraction: f64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, f)| **f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, f)| **f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Stratified fold assignment: within each class, indices are shuffled by
/// the seeded generator and dealt round-robin, so per-fold class counts
/// differ from the ideal proportion by at most one.
pub fn make_folds(labels: &[Label], n_folds: usize, seed: u64) -> Result<FoldPlan, EvalError> {
    if labels.is_empty() || n_folds == 0 {
        return Err(EvalError::EmptyInput);
    }
    for (class, label) in [("Relevant", Label::Relevant), ("Irrelevant", Label::Irrelevant)] {
        let count = labels.iter().filter(|l| **l == label).count();
        if count < n_folds {
            return Err(EvalError::ClassTooSmall {
                class,
                count,
                needed: n_folds,
            });
        }
    }
    let mut assignments = vec![0usize; labels.len()];
    let mut rng = sampling::derive_rng(seed, 0);
    for label in [Label::Relevant, Label::Irrelevant] {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == label)
            .map(|(i, _)| i)
            .collect();
        sampling::shuffle(&mut rng, &mut members);
        for (pos, idx) in members.into_iter().enumerate() {
            assignments[idx] = pos % n_folds;
        }
    }
    Ok(FoldPlan {
        n_folds,
        assignments,
        seed,
        inner_train_fraction: 0.7,
    })
}

/// Stratified train/val split of `indices`. Per class, train takes the
/// ceiling of the fraction but always leaves at least one validation
/// member; classes need two members or the split fails.
pub fn split_train_val(
    indices: &[usize],
    labels: &[Label],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    let mut train = Vec::new();
    let mut val = Vec::new();
    let mut rng = sampling::derive_rng(seed, 1);
    for (class, label) in [("Relevant", Label::Relevant), ("Irrelevant", Label::Irrelevant)] {
        let mut members: Vec<usize> = indices
            .iter()
            .copied()
            .filter(|i| labels[*i] == label)
            .collect();
        if members.len() < 2 {
            return Err(EvalError::ClassTooSmall {
                class,
                count: members.len(),
                needed: 2,
            });
        }
        sampling::shuffle(&mut rng, &mut members);
        let want = train_fraction * members.len() as f64;
        let mut n_train = want as usize;
        if (want - n_train as f64) > 1e-12 {
            n_train += 1; // ceiling
        }
        let n_train = n_train.min(members.len() - 1).max(1);
        train.extend_from_slice(&members[..n_train]);
        val.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    Ok((train, val))
}

/// Per-column standardization fitted on training rows only.
#[derive(Debug, Clone)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Standardizer {
        let h = x.cols();
        let n = x.rows().max(1) as f64;
        let mut means = vec![0.0; h];
        for row in x.iter_rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in means.iter_mut() {
            *m /= n;
        }
        let mut sds = vec![0.0; h];
        for row in x.iter_rows() {
            for (s, (v, m)) in sds.iter_mut().zip(row.iter().zip(&means)) {
                *s += (v - m) * (v - m);
            }
        }
        for s in sds.iter_mut() {
            *s = math::sqrt(*s / n);
            if *s < 1e-12 {
                *s = 1.0; // constant column: leave it centered only
            }
        }
        Standardizer { means, sds }
    }

    pub fn transform(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                out.set(i, j, (x.get(i, j) - self.means[j]) / self.sds[j]);
            }
        }
        out
    }
}

/// Default strength grid: 10 log-spaced points over [1e-2, 1e2].
pub fn default_strength_grid() -> Vec<f64> {
    let points = 10usize;
    (0..points)
        .map(|k| {
            let e = -2.0 + 4.0 * k as f64 / (points - 1) as f64;
            crate::math::exp(e * core::f64::consts::LN_10)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub best_strength: f64,
    pub best_score: f64,
    /// `(strength, validation macro-F1)` per candidate; failures hold None.
    pub tried: Vec<(f64, Option<f64>)>,
}

/// Picks the strength maximizing validation macro-F1. The grid is scanned
/// in ascending order with strictly-better replacement, so ties resolve to
/// the smaller strength.
pub fn grid_search<F>(
    mut fit_fn: F,
    grid: &[f64],
    val_x: &Matrix,
    val_y: &[Label],
) -> Result<GridOutcome, EvalError>
where
    F: FnMut(f64) -> Result<FittedModel, FitError>,
{
    if grid.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let mut ordered = grid.to_vec();
    ordered.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut tried = Vec::with_capacity(ordered.len());
    let mut best: Option<(f64, f64)> = None;
    let mut last_err = String::new();
    for &strength in &ordered {
        match fit_fn(strength) {
            Ok(model) => {
                let preds = model.predict(val_x)?;
                let score = compute_metrics(val_y, &preds)?.macro_f1;
                tried.push((strength, Some(score)));
                if best.map_or(true, |(_, s)| score > s) {
                    best = Some((strength, score));
                }
            }
            Err(e) => {
                last_err = format!("{e}");
                tried.push((strength, None));
            }
        }
    }
    let Some((best_strength, best_score)) = best else {
        return Err(EvalError::AllFitsFailed(last_err));
    };
    Ok(GridOutcome {
        best_strength,
        best_score,
        tried,
    })
}

/// Confusion counts and the macro metric suite for one prediction set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEntry {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

/// Per-class precision/recall/F1 with the 0/0 := 0 convention; macro is
/// the unweighted mean over the two classes.
pub fn compute_metrics(y_true: &[Label], y_pred: &[Label]) -> Result<MetricEntry, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    let mut tn = 0usize;
    for (t, p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (Label::Relevant, Label::Relevant) => tp += 1,
            (Label::Irrelevant, Label::Relevant) => fp += 1,
            (Label::Relevant, Label::Irrelevant) => fn_ += 1,
            (Label::Irrelevant, Label::Irrelevant) => tn += 1,
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let f1 = |p: f64, r: f64| if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };

    let prec_pos = ratio(tp, tp + fp);
    let rec_pos = ratio(tp, tp + fn_);
    let prec_neg = ratio(tn, tn + fn_);
    let rec_neg = ratio(tn, tn + fp);
    Ok(MetricEntry {
        accuracy: (tp + tn) as f64 / y_true.len() as f64,
        macro_f1: 0.5 * (f1(prec_pos, rec_pos) + f1(prec_neg, rec_neg)),
        macro_precision: 0.5 * (prec_pos + prec_neg),
        macro_recall: 0.5 * (rec_pos + rec_neg),
        tp,
        fp,
        fn_,
        tn,
    })
}

#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub fold: usize,
    /// Strength picked by grid search; None for untuned estimators.
    pub strength: Option<f64>,
    pub metrics: Option<MetricEntry>,
    pub error: Option<String>,
}

/// Mean and sample standard deviation of each metric over completed folds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub accuracy: (f64, f64),
    pub macro_f1: (f64, f64),
    pub macro_precision: (f64, f64),
    pub macro_recall: (f64, f64),
    pub folds_used: usize,
}

#[derive(Debug, Clone)]
pub struct MetricReport {
    pub method: String,
    pub per_fold: Vec<FoldOutcome>,
    pub summary: MetricSummary,
}

pub fn summarize(per_fold: &[FoldOutcome]) -> MetricSummary {
    let done: Vec<&MetricEntry> = per_fold.iter().filter_map(|f| f.metrics.as_ref()).collect();
    let stat = |get: fn(&MetricEntry) -> f64| -> (f64, f64) {
        math::aggregate(done.iter().map(|m| get(m)))
    };
    MetricSummary {
        accuracy: stat(|m| m.accuracy),
        macro_f1: stat(|m| m.macro_f1),
        macro_precision: stat(|m| m.macro_precision),
        macro_recall: stat(|m| m.macro_recall),
        folds_used: done.len(),
    }
}

/// Experiment configuration: which estimator, over which grid, and whether
/// to standardize features on training statistics.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub model: ModelSpec,
    pub grid: Vec<f64>,
    pub standardize: bool,
}

impl ExperimentSpec {
    pub fn new(model: ModelSpec) -> Self {
        ExperimentSpec {
            model,
            grid: default_strength_grid(),
            standardize: false,
        }
    }
}

fn subset_labels(y: &[Label], idx: &[usize]) -> Vec<Label> {
    idx.iter().map(|i| y[*i]).collect()
}

/// Full protocol over one fold plan. Per fold: inner split, grid search,
/// refit at the winning strength on the whole training fold, evaluate on
/// the test fold. Fit failures abort the fold with a report entry but the
/// remaining folds still run.
pub fn run_experiment(
    x: &Matrix,
    y: &[Label],
    spec: &ExperimentSpec,
    plan: &FoldPlan,
    opts: &FitOptions,
) -> Result<MetricReport, EvalError> {
    if x.rows() != y.len() {
        return Err(EvalError::LengthMismatch {
            left: x.rows(),
            right: y.len(),
        });
    }
    let mut per_fold = Vec::with_capacity(plan.n_folds);
    for fold in 0..plan.n_folds {
        match run_fold(x, y, spec, plan, opts, fold) {
            Ok((strength, metrics)) => per_fold.push(FoldOutcome {
                fold,
                strength,
                metrics: Some(metrics),
                error: None,
            }),
            Err(e) => per_fold.push(FoldOutcome {
                fold,
                strength: None,
                metrics: None,
                error: Some(e.to_string()),
            }),
        }
    }
    let summary = summarize(&per_fold);
    Ok(MetricReport {
        method: spec.model.name(),
        per_fold,
        summary,
    })
}

fn run_fold(
    x: &Matrix,
    y: &[Label],
    spec: &ExperimentSpec,
    plan: &FoldPlan,
    opts: &FitOptions,
    fold: usize,
) -> Result<(Option<f64>, MetricEntry), EvalError> {
    let test_idx = plan.test_indices(fold);
    let train_idx = plan.train_indices(fold);

    let strength = if spec.model.tunable() {
        let (inner_train, inner_val) = split_train_val(
            &train_idx,
            y,
            plan.inner_train_fraction,
            plan.seed.wrapping_add(1 + fold as u64),
        )?;
        let x_in = x.select_rows(&inner_train);
        let y_in = subset_labels(y, &inner_train);
        let x_val_raw = x.select_rows(&inner_val);
        let y_val = subset_labels(y, &inner_val);
        let (x_tr, x_val) = if spec.standardize {
            let std = Standardizer::fit(&x_in);
            (std.transform(&x_in), std.transform(&x_val_raw))
        } else {
            (x_in, x_val_raw)
        };
        let outcome = grid_search(
            |c| fit_spec(spec.model, &x_tr, &y_in, c, opts),
            &spec.grid,
            &x_val,
            &y_val,
        )?;
        Some(outcome.best_strength)
    } else {
        None
    };

    let x_train_raw = x.select_rows(&train_idx);
    let y_train = subset_labels(y, &train_idx);
    let x_test_raw = x.select_rows(&test_idx);
    let y_test = subset_labels(y, &test_idx);
    let (x_train, x_test) = if spec.standardize {
        let std = Standardizer::fit(&x_train_raw);
        (std.transform(&x_train_raw), std.transform(&x_test_raw))
    } else {
        (x_train_raw, x_test_raw)
    };
    let model = fit_spec(spec.model, &x_train, &y_train, strength.unwrap_or(1.0), opts)
        .map_err(|source| EvalError::FoldFit { fold, source })?;
    let preds = model.predict(&x_test)?;
    Ok((strength, compute_metrics(&y_test, &preds)?))
}

/// Tunes a strength for `(x, y)` with a single stratified 70:30 split;
/// used where a full fold plan is unnecessary (full-data training, the
/// per-fold tuning of the stability protocol).
pub fn tune_strength(
    x: &Matrix,
    y: &[Label],
    model: ModelSpec,
    grid: &[f64],
    seed: u64,
    opts: &FitOptions,
) -> Result<f64, EvalError> {
    let all: Vec<usize> = (0..x.rows()).collect();
    let (tr, val) = split_train_val(&all, y, 0.7, seed)?;
    let x_tr = x.select_rows(&tr);
    let y_tr = subset_labels(y, &tr);
    let x_val = x.select_rows(&val);
    let y_val = subset_labels(y, &val);
    Ok(grid_search(
        |c| fit_spec(model, &x_tr, &y_tr, c, opts),
        grid,
        &x_val,
        &y_val,
    )?
    .best_strength)
}

/// Counts per fold and class; handy for stratification checks and reports.
pub fn fold_class_counts(plan: &FoldPlan, labels: &[Label]) -> Vec<BTreeMap<&'static str, usize>> {
    let mut out = vec![BTreeMap::new(); plan.n_folds];
    for (i, fold) in plan.assignments.iter().enumerate() {
        *out[*fold].entry(labels[i].as_str()).or_insert(0) += 1;
    }
    out
}
