//! Linear models over score features plus LDA and KNN references.
//!
//! Penalized fits minimize a mean loss plus penalty. With inverse
//! regularization strength `C` the penalty weight is `lambda = 1/(n*C)`:
//! L1 adds `lambda * ||w||_1`, L2 adds `lambda/2 * ||w||_2^2`. Ridge takes
//! its `alpha` directly. The intercept is never penalized.

use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::Label;
use crate::linalg::{dot, Matrix};
use crate::math;

mod knn;
mod lda;
mod logistic;
mod ridge;
mod svm;

pub use knn::{fit_knn, KnnModel};
pub use lda::{fit_lda, LdaFit};
pub use logistic::{fit_logistic, lambda_max_logistic, logistic_loss_and_grad, logistic_objective};
pub use ridge::fit_ridge;
pub use svm::{fit_linear_svc, hinge_objective, lambda_max_svc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Penalty {
    L1,
    L2,
}

impl Penalty {
    pub fn as_str(self) -> &'static str {
        match self {
            Penalty::L1 => "l1",
            Penalty::L2 => "l2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    Logistic,
    Hinge,
    Squared,
}

impl LossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Logistic => "logistic",
            LossKind::Hinge => "hinge",
            LossKind::Squared => "squared",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("training data contains a single class")]
    SingleClass,
    #[error("training data contains non-finite values")]
    NonFinite,
    #[error("strength must be positive, got {0}")]
    BadStrength(f64),
    #[error("need at least {needed} examples, got {got}")]
    TooFewExamples { needed: usize, got: usize },
    #[error("label count {labels} does not match row count {rows}")]
    LabelCountMismatch { labels: usize, rows: usize },
    #[error("model expects {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0}")]
    Degenerate(String),
}

/// Fitted linear decision rule `sign(w^T f + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub penalty: Penalty,
    /// Inverse regularization strength `C` (ridge stores `alpha`).
    pub strength: f64,
    pub loss: LossKind,
    pub seed: u64,
    /// Digest of the question pool the training matrix was built against;
    /// empty for models fitted on synthetic matrices.
    pub pool_hash: String,
}

impl LinearModel {
    pub fn decision(&self, features: &[f64]) -> Result<f64, FitError> {
        if features.len() != self.weights.len() {
            return Err(FitError::DimensionMismatch {
                expected: self.weights.len(),
                got: features.len(),
            });
        }
        Ok(dot(&self.weights, features) + self.intercept)
    }

    /// Count of nonzero weights (intercept excluded).
    pub fn nnz(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }

    pub fn with_pool_hash(mut self, pool_hash: &str) -> Self {
        self.pool_hash = String::from(pool_hash);
        self
    }
}

/// Decision scores `w^T f + b` for every row.
pub fn decision_scores(model: &LinearModel, x: &Matrix) -> Result<Vec<f64>, FitError> {
    if x.cols() != model.weights.len() {
        return Err(FitError::DimensionMismatch {
            expected: model.weights.len(),
            got: x.cols(),
        });
    }
    Ok(x.iter_rows()
        .map(|row| dot(&model.weights, row) + model.intercept)
        .collect())
}

/// Labels from decision scores. A score of exactly 0 maps to Relevant; the
/// tie rule is fixed so confusion matrices are deterministic.
pub fn predict(model: &LinearModel, x: &Matrix) -> Result<Vec<Label>, FitError> {
    Ok(decision_scores(model, x)?
        .into_iter()
        .map(label_from_score)
        .collect())
}

pub fn label_from_score(score: f64) -> Label {
    if score >= 0.0 {
        Label::Relevant
    } else {
        Label::Irrelevant
    }
}

/// Proximal operator of `t * |.|`: `sign(z) * max(|z| - t, 0)`.
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let m = math::abs(z) - t;
    if m <= 0.0 {
        0.0
    } else {
        math::signum(z) * m
    }
}

/// Optimizer knobs shared by the iterative fitters.
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Sweeps for coordinate descent, iterations for (sub)gradient methods.
    pub max_iter: usize,
    /// Convergence tolerance: max coordinate update (L1 logistic), gradient
    /// norm (L2 logistic), subgradient residual (SVC).
    pub tol: f64,
    pub seed: u64,
    /// Record the penalized objective once per sweep/iteration.
    pub record_trace: bool,
    /// Exact line-search refinement after the SVC subgradient phase; `None`
    /// enables it automatically on small problems (it is quadratic in n).
    pub polish: Option<bool>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iter: 10_000,
            tol: 1e-6,
            seed: 42,
            record_trace: false,
            polish: None,
        }
    }
}

/// What the optimizer did: final penalized objective, iteration count,
/// whether the optimality residual met tolerance, nonzero count, and wall
/// time (0 when built without `std`).
#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics {
    pub final_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub nnz: usize,
    pub wall_time: f64,
    /// Penalized objective per sweep/iteration when requested; empty
    /// otherwise.
    pub trace: Vec<f64>,
}

pub(crate) struct Timer {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Timer {
    pub(crate) fn start() -> Self {
        Timer {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    #[cfg(feature = "std")]
    pub(crate) fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    #[cfg(not(feature = "std"))]
    pub(crate) fn elapsed(&self) -> f64 {
        0.0
    }
}

pub(crate) fn validate_two_class(x: &Matrix, y: &[Label]) -> Result<(), FitError> {
    if y.len() != x.rows() {
        return Err(FitError::LabelCountMismatch {
            labels: y.len(),
            rows: x.rows(),
        });
    }
    if x.rows() < 2 {
        return Err(FitError::TooFewExamples {
            needed: 2,
            got: x.rows(),
        });
    }
    if !x.is_finite() {
        return Err(FitError::NonFinite);
    }
    let pos = y.iter().filter(|l| **l == Label::Relevant).count();
    if pos == 0 || pos == y.len() {
        return Err(FitError::SingleClass);
    }
    Ok(())
}

/// Which estimator to fit; the harness treats these uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSpec {
    Logistic(Penalty),
    Svc(Penalty),
    Ridge,
    Lda,
    Knn { k: usize },
}

impl ModelSpec {
    /// Whether the estimator has a strength hyperparameter worth tuning.
    pub fn tunable(&self) -> bool {
        matches!(self, ModelSpec::Logistic(_) | ModelSpec::Svc(_) | ModelSpec::Ridge)
    }

    pub fn name(&self) -> String {
        use alloc::format;
        match self {
            ModelSpec::Logistic(p) => format!("{}_logistic", p.as_str()),
            ModelSpec::Svc(p) => format!("{}_svc", p.as_str()),
            ModelSpec::Ridge => String::from("ridge"),
            ModelSpec::Lda => String::from("lda"),
            ModelSpec::Knn { k } => format!("knn{k}"),
        }
    }
}

/// A fitted estimator of any family.
#[derive(Debug, Clone)]
pub enum FittedModel {
    Linear(LinearModel),
    Knn(KnnModel),
}

impl FittedModel {
    pub fn predict(&self, x: &Matrix) -> Result<Vec<Label>, FitError> {
        match self {
            FittedModel::Linear(m) => predict(m, x),
            FittedModel::Knn(m) => m.predict(x),
        }
    }

    pub fn as_linear(&self) -> Option<&LinearModel> {
        match self {
            FittedModel::Linear(m) => Some(m),
            FittedModel::Knn(_) => None,
        }
    }
}

/// Uniform fitting entry point used by grid search and cross-validation.
pub fn fit_spec(
    spec: ModelSpec,
    x: &Matrix,
    y: &[Label],
    strength: f64,
    opts: &FitOptions,
) -> Result<FittedModel, FitError> {
    match spec {
        ModelSpec::Logistic(penalty) => {
            let (m, _) = fit_logistic(x, y, penalty, strength, opts)?;
            Ok(FittedModel::Linear(m))
        }
        ModelSpec::Svc(penalty) => {
            let (m, _) = fit_linear_svc(x, y, penalty, strength, opts)?;
            Ok(FittedModel::Linear(m))
        }
        ModelSpec::Ridge => Ok(FittedModel::Linear(fit_ridge(x, y, strength)?)),
        ModelSpec::Lda => {
            let (m, _) = fit_lda(x, y)?;
            Ok(FittedModel::Linear(m))
        }
        ModelSpec::Knn { k } => Ok(FittedModel::Knn(fit_knn(x, y, k)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn model(weights: Vec<f64>, intercept: f64) -> LinearModel {
        LinearModel {
            weights,
            intercept,
            penalty: Penalty::L2,
            strength: 1.0,
            loss: LossKind::Logistic,
            seed: 42,
            pool_hash: String::new(),
        }
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(1.25, 0.0), 1.25);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
    }

    #[test]
    fn zero_model_predicts_relevant_by_tie_rule() {
        let m = model(vec![0.0, 0.0], 0.0);
        let x = Matrix::from_rows(&[vec![0.3, 0.7], vec![0.9, 0.1]]);
        let preds = predict(&m, &x).unwrap();
        assert!(preds.iter().all(|l| *l == Label::Relevant));
    }

    #[test]
    fn hand_decision_score() {
        let m = model(vec![1.0, -2.0], 0.5);
        let x = Matrix::from_rows(&[vec![0.9, 0.1]]);
        let s = decision_scores(&m, &x).unwrap();
        assert!((s[0] - 1.2).abs() < 1e-12);
        assert_eq!(predict(&m, &x).unwrap(), vec![Label::Relevant]);
    }

    #[test]
    fn positive_scaling_leaves_labels_unchanged() {
        let m = model(vec![0.8, -0.3], -0.1);
        let x = Matrix::from_rows(&[vec![0.2, 0.9], vec![0.7, 0.3], vec![0.5, 0.5]]);
        let base = predict(&m, &x).unwrap();
        for c in [0.5, 2.0, 17.0] {
            let scaled = model(m.weights.iter().map(|w| w * c).collect(), m.intercept * c);
            assert_eq!(predict(&scaled, &x).unwrap(), base);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = model(vec![1.0, 2.0], 0.0);
        let x = Matrix::from_rows(&[vec![1.0, 2.0, 3.0]]);
        assert!(matches!(
            predict(&m, &x),
            Err(FitError::DimensionMismatch { expected: 2, got: 3 })
        ));
    }
}
