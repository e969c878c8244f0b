//! Bootstrap stability selection and cross-fold consistency analysis.
//!
//! Within each training fold, 100 seeded subsamples of 60% of the rows
//! (without replacement) are fitted with the L1 estimator at the fold's
//! tuned strength; a feature's selection frequency is the fraction of fits
//! giving it a nonzero weight. A feature is stable in a fold when its
//! frequency reaches the threshold tau (boundary inclusive), and the
//! cross-fold stability count drives the always / highly-stable /
//! moderately-stable / unstable / never categories. A full-data
//! L2-regularized logistic fit provides reference coefficients and Wald
//! p-values for the L1-vs-L2 comparison.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::classifiers::{
    fit_linear_svc, fit_logistic, FitError, FitOptions, LinearModel, ModelSpec, Penalty,
};
use crate::corpus::Label;
use crate::eval::{
    compute_metrics, tune_strength, EvalError, FoldPlan, MetricEntry,
};
use crate::linalg::{cholesky_solve, Matrix};
use crate::math;
use crate::sampling;

/// Weights with magnitude above this count as selected; the protocol's
/// "non-zero coefficients" needs a numeric cutoff.
pub const NONZERO_CUTOFF: f64 = 1e-10;

/// Stability counts at or above this many folds enter the L1-vs-L2
/// coefficient comparison.
pub const COMPARISON_MIN_STABILITY: u32 = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StabilityError {
    #[error("subsample fraction {0} outside (0,1)")]
    BadFraction(f64),
    #[error("threshold {0} outside (0,1)")]
    BadThreshold(f64),
    #[error("n_bootstrap must be positive")]
    NoBootstrap,
    #[error("iteration {iteration}: subsample lost a class 3 times in a row")]
    DegenerateSubsample { iteration: usize },
    #[error("fold frequency maps disagree on feature count: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("{0}")]
    Eval(String),
}

impl From<EvalError> for StabilityError {
    fn from(e: EvalError) -> Self {
        StabilityError::Eval(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityConfig {
    pub n_bootstrap: usize,
    pub subsample_frac: f64,
    pub thresholds: Vec<f64>,
    pub seed: u64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            n_bootstrap: 100,
            subsample_frac: 0.60,
            thresholds: vec![0.3, 0.4, 0.5, 0.6],
            seed: 42,
        }
    }
}

impl StabilityConfig {
    pub fn validate(&self) -> Result<(), StabilityError> {
        if self.n_bootstrap == 0 {
            return Err(StabilityError::NoBootstrap);
        }
        if !(self.subsample_frac > 0.0 && self.subsample_frac < 1.0) {
            return Err(StabilityError::BadFraction(self.subsample_frac));
        }
        for &t in &self.thresholds {
            if !(t > 0.0 && t < 1.0) {
                return Err(StabilityError::BadThreshold(t));
            }
        }
        Ok(())
    }
}

/// Selection counts over bootstrap iterations for one fold, plus running
/// coefficient sums over the fits where each feature was selected.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFrequencies {
    pub n_features: usize,
    pub n_bootstrap: usize,
    pub counts: Vec<u32>,
    coef_sum: Vec<f64>,
    coef_sumsq: Vec<f64>,
    /// Degenerate subsamples that had to be redrawn.
    pub resampled: u32,
}

impl FeatureFrequencies {
    fn new(n_features: usize, n_bootstrap: usize) -> Self {
        FeatureFrequencies {
            n_features,
            n_bootstrap,
            counts: vec![0; n_features],
            coef_sum: vec![0.0; n_features],
            coef_sumsq: vec![0.0; n_features],
            resampled: 0,
        }
    }

    fn record(&mut self, weights: &[f64]) {
        for (j, w) in weights.iter().enumerate() {
            if math::abs(*w) > NONZERO_CUTOFF {
                self.counts[j] += 1;
                self.coef_sum[j] += w;
                self.coef_sumsq[j] += w * w;
            }
        }
    }

    /// Selection frequency of feature `j`: counts / n_bootstrap exactly.
    pub fn freq(&self, j: usize) -> f64 {
        self.counts[j] as f64 / self.n_bootstrap as f64
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n_features).map(|j| self.freq(j)).collect()
    }

    /// Features with frequency at or above tau (boundary inclusive).
    pub fn stable_set(&self, tau: f64) -> Vec<usize> {
        (0..self.n_features).filter(|&j| self.freq(j) >= tau).collect()
    }

    /// Mean and SD of the selection frequency over all features, and over
    /// the features selected at least once; the two aggregations answer
    /// different questions, so both are reported, labeled.
    pub fn freq_summary(&self) -> FreqSummary {
        let all = self.freqs();
        let selected: Vec<f64> = all.iter().copied().filter(|f| *f > 0.0).collect();
        FreqSummary {
            all: math::mean_and_std(&all),
            selected: math::mean_and_std(&selected),
            n_selected: selected.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqSummary {
    /// Over all h features.
    pub all: (f64, f64),
    /// Over features selected in at least one iteration.
    pub selected: (f64, f64),
    pub n_selected: usize,
}

/// Runs the bootstrap loop for one training fold. `fit_l1` is the L1
/// estimator already pinned at the fold's tuned strength. Subsamples losing
/// a class are redrawn with the next derived seed, at most three attempts
/// each.
pub fn stability_select<F>(
    x: &Matrix,
    y: &[Label],
    mut fit_l1: F,
    cfg: &StabilityConfig,
) -> Result<FeatureFrequencies, StabilityError>
where
    F: FnMut(&Matrix, &[Label]) -> Result<LinearModel, FitError>,
{
    cfg.validate()?;
    let n = x.rows();
    let take = ((n as f64) * cfg.subsample_frac) as usize;
    let take = take.max(1);
    let mut out = FeatureFrequencies::new(x.cols(), cfg.n_bootstrap);
    for iteration in 0..cfg.n_bootstrap {
        let mut chosen: Option<Vec<usize>> = None;
        for attempt in 0..3u64 {
            // Stream layout: iteration index in the high bits, attempt in
            // the low bits, offset away from the fold/tuning streams.
            let stream = (1u64 << 32) + (iteration as u64) * 4 + attempt;
            let mut rng = sampling::derive_rng(cfg.seed, stream);
            let idx = sampling::sample_without_replacement(&mut rng, n, take);
            let has_pos = idx.iter().any(|&i| y[i] == Label::Relevant);
            let has_neg = idx.iter().any(|&i| y[i] == Label::Irrelevant);
            if has_pos && has_neg {
                chosen = Some(idx);
                break;
            }
            out.resampled += 1;
        }
        let Some(idx) = chosen else {
            return Err(StabilityError::DegenerateSubsample { iteration });
        };
        let x_sub = x.select_rows(&idx);
        let y_sub: Vec<Label> = idx.iter().map(|&i| y[i]).collect();
        let model = fit_l1(&x_sub, &y_sub)?;
        out.record(&model.weights);
    }
    Ok(out)
}

/// Cross-fold consistency category for 5-fold runs (boundaries generalize
/// as n, n-1, n-2, 1..n-3, 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Category {
    Never,
    Unstable,
    ModeratelyStable,
    HighlyStable,
    Always,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Always => "always",
            Category::HighlyStable => "highly_stable",
            Category::ModeratelyStable => "moderately_stable",
            Category::Unstable => "unstable",
            Category::Never => "never",
        }
    }
}

pub fn categorize(stability: u32, n_folds: usize) -> Category {
    let n = n_folds as u32;
    if stability == 0 {
        Category::Never
    } else if stability >= n {
        Category::Always
    } else if stability + 1 == n {
        Category::HighlyStable
    } else if stability + 2 == n {
        Category::ModeratelyStable
    } else {
        Category::Unstable
    }
}

/// Per-feature count of folds where the frequency reached tau.
pub fn cross_fold_consistency(
    folds: &[FeatureFrequencies],
    tau: f64,
) -> Result<Vec<u32>, StabilityError> {
    let Some(first) = folds.first() else {
        return Ok(Vec::new());
    };
    for f in folds {
        if f.n_features != first.n_features {
            return Err(StabilityError::ShapeMismatch {
                left: first.n_features,
                right: f.n_features,
            });
        }
    }
    let mut stability = vec![0u32; first.n_features];
    for f in folds {
        for j in 0..f.n_features {
            if f.freq(j) >= tau {
                stability[j] += 1;
            }
        }
    }
    Ok(stability)
}

/// Mean/SD of the L1 coefficient over every bootstrap fit (all folds) that
/// selected the feature; `None` when never selected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefStats {
    pub mean: f64,
    pub sd: f64,
    pub n: u32,
}

pub fn aggregate_coef_stats(folds: &[FeatureFrequencies]) -> Vec<Option<CoefStats>> {
    let h = folds.first().map_or(0, |f| f.n_features);
    let mut out = Vec::with_capacity(h);
    for j in 0..h {
        let n: u32 = folds.iter().map(|f| f.counts[j]).sum();
        if n == 0 {
            out.push(None);
            continue;
        }
        let sum: f64 = folds.iter().map(|f| f.coef_sum[j]).sum();
        let sumsq: f64 = folds.iter().map(|f| f.coef_sumsq[j]).sum();
        let mean = sum / n as f64;
        let sd = if n > 1 {
            let var = (sumsq - sum * sum / n as f64) / (n - 1) as f64;
            math::sqrt(math::fmax(var, 0.0))
        } else {
            0.0
        };
        out.push(Some(CoefStats { mean, sd, n }));
    }
    out
}

/// Full-data L2 logistic reference: coefficients plus Wald p-values from
/// the inverse observed information of the penalized log-likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardFit {
    pub coeffs: Vec<f64>,
    pub intercept: f64,
    pub pvalues: Vec<f64>,
    pub strength: f64,
    pub converged: bool,
}

pub fn standard_lr_with_pvalues(
    x: &Matrix,
    y: &[Label],
    c: f64,
    opts: &FitOptions,
) -> Result<StandardFit, StabilityError> {
    let (model, diag) = fit_logistic(x, y, Penalty::L2, c, opts)?;
    let n = x.rows();
    let h = x.cols();
    // Observed information on the sum scale: sum s(1-s) xx' plus 1/C on
    // the weight diagonal (intercept unpenalized).
    let d = h + 1;
    let mut info = Matrix::zeros(d, d);
    for row_i in 0..n {
        let row = x.row(row_i);
        let z = crate::linalg::dot(&model.weights, row) + model.intercept;
        let s = math::sigmoid(z);
        let wgt = s * (1.0 - s);
        for a in 0..h {
            let xa = row[a];
            for b in a..h {
                info.set(a, b, info.get(a, b) + wgt * xa * row[b]);
            }
            info.set(a, h, info.get(a, h) + wgt * xa);
        }
        info.set(h, h, info.get(h, h) + wgt);
    }
    for a in 0..d {
        for b in 0..a {
            info.set(a, b, info.get(b, a));
        }
    }
    for a in 0..h {
        info.set(a, a, info.get(a, a) + 1.0 / c);
    }
    // Diagonal of the inverse via one solve per basis vector.
    let mut pvalues = vec![1.0; h];
    for j in 0..h {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let col = cholesky_solve(&info, &e).ok_or_else(|| {
            StabilityError::Fit(FitError::Degenerate(String::from(
                "observed information not positive definite",
            )))
        })?;
        let var = math::fmax(col[j], 0.0);
        let se = math::sqrt(var);
        if se > 0.0 {
            pvalues[j] = math::normal_two_sided_p(model.weights[j] / se);
        }
    }
    Ok(StandardFit {
        coeffs: model.weights,
        intercept: model.intercept,
        pvalues,
        strength: c,
        converged: diag.converged,
    })
}

/// One row of the L1-vs-L2 table.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureComparison {
    pub feature: usize,
    pub stability: u32,
    pub l1_mean: f64,
    pub l1_sd: f64,
    pub l2_coeff: f64,
    pub pvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardComparison {
    /// Pearson correlation of |beta_L1| vs |beta_L2| over features with
    /// stability >= 3; None with fewer than three such features.
    pub corr_l1_l2: Option<f64>,
    /// Comparison rows sorted by |beta_L1| descending.
    pub table: Vec<FeatureComparison>,
}

pub fn compare_with_standard(
    stability: &[u32],
    l1_stats: &[Option<CoefStats>],
    standard: &StandardFit,
    min_stability: u32,
) -> StandardComparison {
    let mut table = Vec::new();
    for (j, &stab) in stability.iter().enumerate() {
        if stab < min_stability {
            continue;
        }
        let (l1_mean, l1_sd) = match l1_stats[j] {
            Some(s) => (s.mean, s.sd),
            None => (0.0, 0.0),
        };
        table.push(FeatureComparison {
            feature: j,
            stability: stab,
            l1_mean,
            l1_sd,
            l2_coeff: standard.coeffs[j],
            pvalue: standard.pvalues[j],
        });
    }
    table.sort_by(|a, b| {
        math::abs(b.l1_mean)
            .partial_cmp(&math::abs(a.l1_mean))
            .unwrap()
            .then(a.feature.cmp(&b.feature))
    });
    let l1_abs: Vec<f64> = table.iter().map(|r| math::abs(r.l1_mean)).collect();
    let l2_abs: Vec<f64> = table.iter().map(|r| math::abs(r.l2_coeff)).collect();
    let corr_l1_l2 = if table.len() < 3 {
        None
    } else {
        math::pearson(&l1_abs, &l2_abs)
    };
    StandardComparison { corr_l1_l2, table }
}

/// Overlap of the stability-filtered feature sets of two runs, reported
/// both ways: `(|A&B| / |A|, |A&B| / |B|)`. `None` when either side is
/// empty.
pub fn selection_overlap(
    stab_a: &[u32],
    stab_b: &[u32],
    min_stability: u32,
) -> Result<Option<(f64, f64)>, StabilityError> {
    if stab_a.len() != stab_b.len() {
        return Err(StabilityError::ShapeMismatch {
            left: stab_a.len(),
            right: stab_b.len(),
        });
    }
    let a: Vec<usize> = stab_a
        .iter()
        .enumerate()
        .filter(|(_, s)| **s >= min_stability)
        .map(|(j, _)| j)
        .collect();
    let b: Vec<usize> = stab_b
        .iter()
        .enumerate()
        .filter(|(_, s)| **s >= min_stability)
        .map(|(j, _)| j)
        .collect();
    if a.is_empty() || b.is_empty() {
        return Ok(None);
    }
    let inter = a.iter().filter(|j| b.contains(j)).count() as f64;
    Ok(Some((inter / a.len() as f64, inter / b.len() as f64)))
}

/// Which sparse estimator the protocol audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparseFamily {
    Logistic,
    Svc,
}

impl SparseFamily {
    pub fn spec(self) -> ModelSpec {
        match self {
            SparseFamily::Logistic => ModelSpec::Logistic(Penalty::L1),
            SparseFamily::Svc => ModelSpec::Svc(Penalty::L1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SparseFamily::Logistic => "l1_logistic",
            SparseFamily::Svc => "l1_svc",
        }
    }
}

/// Everything one protocol run produces for one estimator family.
#[derive(Debug, Clone)]
pub struct StabilityRun {
    pub method: String,
    pub n_features: usize,
    pub n_folds: usize,
    pub config: StabilityConfig,
    pub folds: Vec<FoldSelection>,
    /// L1 coefficient stats aggregated over every selecting bootstrap fit.
    pub l1_stats: Vec<Option<CoefStats>>,
    pub standard: StandardFit,
    pub thresholds: Vec<ThresholdAnalysis>,
}

#[derive(Debug, Clone)]
pub struct FoldSelection {
    pub fold: usize,
    pub strength: f64,
    pub freq: FeatureFrequencies,
    pub test_metrics: MetricEntry,
    pub freq_summary: FreqSummary,
}

#[derive(Debug, Clone)]
pub struct ThresholdAnalysis {
    pub tau: f64,
    pub stability: Vec<u32>,
    pub categories: Vec<Category>,
    /// Counts for [always, highly, moderately, unstable, never]; sums to h.
    pub category_counts: [usize; 5],
    pub comparison: StandardComparison,
}

impl ThresholdAnalysis {
    pub fn count(&self, c: Category) -> usize {
        match c {
            Category::Always => self.category_counts[0],
            Category::HighlyStable => self.category_counts[1],
            Category::ModeratelyStable => self.category_counts[2],
            Category::Unstable => self.category_counts[3],
            Category::Never => self.category_counts[4],
        }
    }
}

impl StabilityRun {
    pub fn threshold(&self, tau: f64) -> Option<&ThresholdAnalysis> {
        self.thresholds
            .iter()
            .find(|t| math::abs(t.tau - tau) < 1e-12)
    }
}

/// The full nested protocol: per outer fold, tune the strength on a 70:30
/// split of the training fold, bootstrap-subsample at that strength, and
/// score the held-out test fold with the tuned refit; then analyze
/// cross-fold consistency per threshold against the full-data standard
/// logistic reference.
pub fn run_stability_protocol(
    x: &Matrix,
    y: &[Label],
    family: SparseFamily,
    plan: &FoldPlan,
    cfg: &StabilityConfig,
    grid: &[f64],
    opts: &FitOptions,
) -> Result<StabilityRun, StabilityError> {
    cfg.validate()?;
    let mut folds = Vec::with_capacity(plan.n_folds);
    for fold in 0..plan.n_folds {
        let train_idx = plan.train_indices(fold);
        let test_idx = plan.test_indices(fold);
        let x_tr = x.select_rows(&train_idx);
        let y_tr: Vec<Label> = train_idx.iter().map(|&i| y[i]).collect();

        let strength = tune_strength(
            &x_tr,
            &y_tr,
            family.spec(),
            grid,
            plan.seed.wrapping_add(101 + fold as u64),
            opts,
        )?;

        let fold_cfg = StabilityConfig {
            seed: cfg.seed.wrapping_add((fold as u64) << 20),
            ..cfg.clone()
        };
        let fit = |xx: &Matrix, yy: &[Label]| -> Result<LinearModel, FitError> {
            match family {
                SparseFamily::Logistic => {
                    fit_logistic(xx, yy, Penalty::L1, strength, opts).map(|(m, _)| m)
                }
                SparseFamily::Svc => {
                    fit_linear_svc(xx, yy, Penalty::L1, strength, opts).map(|(m, _)| m)
                }
            }
        };
        let freq = stability_select(&x_tr, &y_tr, fit, &fold_cfg)?;

        let refit = fit(&x_tr, &y_tr)?;
        let x_te = x.select_rows(&test_idx);
        let y_te: Vec<Label> = test_idx.iter().map(|&i| y[i]).collect();
        let preds = crate::classifiers::predict(&refit, &x_te)?;
        let test_metrics = compute_metrics(&y_te, &preds)?;

        let freq_summary = freq.freq_summary();
        folds.push(FoldSelection {
            fold,
            strength,
            freq,
            test_metrics,
            freq_summary,
        });
    }

    let l1_stats = aggregate_coef_stats(
        &folds.iter().map(|f| f.freq.clone()).collect::<Vec<_>>(),
    );

    let standard_c = tune_strength(
        x,
        y,
        ModelSpec::Logistic(Penalty::L2),
        grid,
        plan.seed.wrapping_add(977),
        opts,
    )?;
    let standard = standard_lr_with_pvalues(x, y, standard_c, opts)?;

    let freq_maps: Vec<FeatureFrequencies> = folds.iter().map(|f| f.freq.clone()).collect();
    let mut thresholds = Vec::with_capacity(cfg.thresholds.len());
    for &tau in &cfg.thresholds {
        let stability = cross_fold_consistency(&freq_maps, tau)?;
        let categories: Vec<Category> = stability
            .iter()
            .map(|&s| categorize(s, plan.n_folds))
            .collect();
        let mut category_counts = [0usize; 5];
        for c in &categories {
            let slot = match c {
                Category::Always => 0,
                Category::HighlyStable => 1,
                Category::ModeratelyStable => 2,
                Category::Unstable => 3,
                Category::Never => 4,
            };
            category_counts[slot] += 1;
        }
        let comparison =
            compare_with_standard(&stability, &l1_stats, &standard, COMPARISON_MIN_STABILITY);
        thresholds.push(ThresholdAnalysis {
            tau,
            stability,
            categories,
            category_counts,
            comparison,
        });
    }

    Ok(StabilityRun {
        method: String::from(family.name()),
        n_features: x.cols(),
        n_folds: plan.n_folds,
        config: cfg.clone(),
        folds,
        l1_stats,
        standard,
        thresholds,
    })
}

/// Summary line mirroring the published comparison layout: the "stable"
/// column there is cumulative (at least 4 of 5 folds), i.e. always +
/// highly-stable.
pub fn summary_row(t: &ThresholdAnalysis) -> String {
    format!(
        "tau={:.1} always={} stable_ge4={} moderate={} unstable={} never={}",
        t.tau,
        t.count(Category::Always),
        t.count(Category::Always) + t.count(Category::HighlyStable),
        t.count(Category::ModeratelyStable),
        t.count(Category::Unstable),
        t.count(Category::Never),
    )
}
