//! Core algorithms for relevance classification over question-probability
//! features.
//!
//! The pipeline this crate supports turns (fact set, candidate issue) pairs
//! into h-dimensional feature vectors by answering a shared pool of binary
//! reasoning questions, then trains and audits sparse linear classifiers
//! over those features:
//!
//! * [`corpus`] — cases, issue candidates, question pools and score
//!   matrices, with validation and binarization.
//! * [`elicit`] — question generation, answer scoring and incremental issue
//!   generation against a pluggable language backend, including the
//!   deterministic offline [`elicit::OracleBackend`].
//! * [`classifiers`] — L1/L2 logistic regression and linear SVC plus ridge,
//!   LDA and k-NN references, with the optimizers that fit them.
//! * [`eval`] — stratified k-fold plans, grid search and macro metrics.
//! * [`stability`] — bootstrap stability selection, cross-fold consistency
//!   categories, and L1-vs-L2 coefficient comparison.
//! * [`agreement`] / [`diversity`] — Fleiss/Cohen kappa, Self-BLEU,
//!   Distinct-N and embedding-distance metrics.
//!
//! Everything in this crate is deterministic given the seeds it is handed:
//! random draws go through [`sampling`] with explicitly derived streams, so
//! two runs with the same inputs produce identical outputs. The crate is
//! `no_std`-compatible (requires `alloc`); file formats, HTTP scoring and
//! the command-line surface live in the companion `inquest-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod agreement;
pub mod classifiers;
pub mod corpus;
pub mod diversity;
pub mod elicit;
pub mod eval;
pub mod linalg;
mod math;
pub mod sampling;
pub mod stability;
pub mod synth;

pub use classifiers::{
    soft_threshold, FitDiagnostics, FitOptions, FittedModel, LinearModel, LossKind, ModelSpec,
    Penalty,
};
pub use corpus::{Case, IssueCandidate, Label, Origin, Question, QuestionPool, ScoreMatrix};
pub use eval::{FoldPlan, MetricEntry, MetricReport};
pub use linalg::Matrix;
pub use stability::{StabilityConfig, StabilityRun};
