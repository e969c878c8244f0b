//! Diversity metrics for generated issue sets: Self-BLEU, Distinct-N, and
//! embedding distances (including the Frechet distance between Gaussian
//! fits).
//!
//! Tokenization everywhere is lowercase + whitespace split. Self-BLEU is
//! standard BLEU of each text against all others as references, uniform
//! weights up to n, brevity penalty, clipped counts without smoothing: a
//! missing higher-order match yields 0 rather than a smoothed value.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::{matmul, sym_sqrt, Matrix};
use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiversityError {
    #[error("self-BLEU needs at least two texts, got {0}")]
    CorpusTooSmall(usize),
    #[error("n must be at least 1")]
    BadOrder,
    #[error("embedding widths differ: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("need at least {needed} vectors for {what}, got {got}")]
    TooFewVectors {
        what: &'static str,
        needed: usize,
        got: usize,
    },
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(|t| t.to_lowercase()).collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts: BTreeMap<&[String], usize> = BTreeMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// BLEU-n of one candidate against a reference set: geometric mean of
/// clipped modified precisions for orders 1..=n times the brevity penalty.
/// Any zero precision (including a candidate shorter than the order)
/// yields 0.
fn bleu_n(candidate: &[String], references: &[&[String]], n: usize) -> f64 {
    let c = candidate.len();
    if c == 0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for order in 1..=n {
        let cand = ngram_counts(candidate, order);
        let total: usize = cand.values().sum();
        if total == 0 {
            return 0.0;
        }
        let mut clipped = 0usize;
        for (gram, count) in &cand {
            let max_ref = references
                .iter()
                .map(|r| ngram_counts(r, order).get(gram).copied().unwrap_or(0))
                .max()
                .unwrap_or(0);
            clipped += (*count).min(max_ref);
        }
        if clipped == 0 {
            return 0.0;
        }
        log_sum += math::ln(clipped as f64 / total as f64);
    }
    // Closest reference length; ties favor the shorter reference.
    let r = references
        .iter()
        .map(|r| r.len())
        .min_by_key(|&len| {
            let diff = if len > c { len - c } else { c - len };
            (diff, len)
        })
        .unwrap_or(0);
    let bp = if c >= r {
        1.0
    } else {
        math::exp(1.0 - r as f64 / c as f64)
    };
    bp * math::exp(log_sum / n as f64)
}

/// Mean BLEU-n of each text against all the others. Higher means the
/// corpus repeats itself more; interpretation is left to the caller.
pub fn self_bleu(corpus: &[String], n: usize) -> Result<f64, DiversityError> {
    if n == 0 {
        return Err(DiversityError::BadOrder);
    }
    if corpus.len() < 2 {
        return Err(DiversityError::CorpusTooSmall(corpus.len()));
    }
    let tokenized: Vec<Vec<String>> = corpus.iter().map(|t| tokenize(t)).collect();
    let mut total = 0.0;
    for i in 0..tokenized.len() {
        let refs: Vec<&[String]> = tokenized
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, t)| t.as_slice())
            .collect();
        total += bleu_n(&tokenized[i], &refs, n);
    }
    Ok(total / corpus.len() as f64)
}

/// Count of distinct n-grams across the whole corpus (raw count, not a
/// ratio).
pub fn distinct_n(corpus: &[String], n: usize) -> Result<usize, DiversityError> {
    if n == 0 {
        return Err(DiversityError::BadOrder);
    }
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    for text in corpus {
        let tokens = tokenize(text);
        if tokens.len() >= n {
            for gram in tokens.windows(n) {
                seen.insert(gram.to_vec());
            }
        }
    }
    Ok(seen.len())
}

/// Both means run over all ordered pairs (the self mean includes the zero
/// diagonal), so identical own and reference sets give EMBD = Self-EMBD
/// exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingDistances {
    /// Mean pairwise Euclidean distance within the own set.
    pub self_embd: f64,
    /// Mean pairwise Euclidean distance between own and reference rows.
    pub embd: f64,
    /// Frechet distance between Gaussian fits of the two sets.
    pub fbd: f64,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn mean_rows(x: &Matrix) -> Vec<f64> {
    let mut mu = alloc::vec![0.0; x.cols()];
    for row in x.iter_rows() {
        for (m, v) in mu.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mu.iter_mut() {
        *m /= x.rows() as f64;
    }
    mu
}

/// Sample covariance (n-1 denominator).
fn covariance(x: &Matrix, mu: &[f64]) -> Matrix {
    let d = x.cols();
    let mut cov = Matrix::zeros(d, d);
    for row in x.iter_rows() {
        for a in 0..d {
            let da = row[a] - mu[a];
            for b in a..d {
                cov.set(a, b, cov.get(a, b) + da * (row[b] - mu[b]));
            }
        }
    }
    let denom = (x.rows() - 1) as f64;
    for a in 0..d {
        for b in a..d {
            let v = cov.get(a, b) / denom;
            cov.set(a, b, v);
            cov.set(b, a, v);
        }
    }
    cov
}

/// `||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1 S2)^(1/2))`, with the cross term
/// computed as `tr((S2^(1/2) S1 S2^(1/2))^(1/2))` so every square root is
/// of a symmetric PSD matrix.
pub fn frechet_distance(mu1: &[f64], s1: &Matrix, mu2: &[f64], s2: &Matrix) -> f64 {
    let d = mu1.len();
    let mut dist: f64 = mu1
        .iter()
        .zip(mu2)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let root2 = sym_sqrt(s2);
    let inner = matmul(&matmul(&root2, s1), &root2);
    let cross = sym_sqrt(&inner);
    for i in 0..d {
        dist += s1.get(i, i) + s2.get(i, i) - 2.0 * cross.get(i, i);
    }
    math::fmax(dist, 0.0)
}

/// EMBD, Self-EMBD and FBD between an own embedding set and a reference
/// set. Widths must agree; FBD needs at least two vectors per side,
/// Self-EMBD at least two own vectors.
pub fn embedding_distances(
    own: &Matrix,
    reference: &Matrix,
) -> Result<EmbeddingDistances, DiversityError> {
    if own.cols() != reference.cols() {
        return Err(DiversityError::WidthMismatch {
            left: own.cols(),
            right: reference.cols(),
        });
    }
    if own.rows() < 2 {
        return Err(DiversityError::TooFewVectors {
            what: "the own set",
            needed: 2,
            got: own.rows(),
        });
    }
    if reference.rows() < 2 {
        return Err(DiversityError::TooFewVectors {
            what: "the reference set",
            needed: 2,
            got: reference.rows(),
        });
    }

    let mut self_sum = 0.0;
    for i in 0..own.rows() {
        for j in 0..own.rows() {
            self_sum += euclidean(own.row(i), own.row(j));
        }
    }
    let mut cross_sum = 0.0;
    for i in 0..own.rows() {
        for j in 0..reference.rows() {
            cross_sum += euclidean(own.row(i), reference.row(j));
        }
    }
    let mu1 = mean_rows(own);
    let mu2 = mean_rows(reference);
    let s1 = covariance(own, &mu1);
    let s2 = covariance(reference, &mu2);
    Ok(EmbeddingDistances {
        self_embd: self_sum / (own.rows() * own.rows()) as f64,
        embd: cross_sum / (own.rows() * reference.rows()) as f64,
        fbd: frechet_distance(&mu1, &s1, &mu2, &s2),
    })
}

/// Diversity report over a generated issue set, orders 3..=5, with
/// embedding distances attached when embedding files were supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityReport {
    pub self_bleu: Vec<(usize, f64)>,
    pub distinct: Vec<(usize, usize)>,
    pub self_embd: Option<f64>,
    pub embd: Option<f64>,
    pub fbd: Option<f64>,
}

pub fn diversity_report(
    corpus: &[String],
    embeddings: Option<(&Matrix, &Matrix)>,
) -> Result<DiversityReport, DiversityError> {
    let orders = [3usize, 4, 5];
    let mut self_bleu_v = Vec::new();
    let mut distinct_v = Vec::new();
    for &n in &orders {
        self_bleu_v.push((n, self_bleu(corpus, n)?));
        distinct_v.push((n, distinct_n(corpus, n)?));
    }
    let (self_embd, embd, fbd) = match embeddings {
        Some((own, reference)) => {
            let d = embedding_distances(own, reference)?;
            (Some(d.self_embd), Some(d.embd), Some(d.fbd))
        }
        None => (None, None, None),
    };
    Ok(DiversityReport {
        self_bleu: self_bleu_v,
        distinct: distinct_v,
        self_embd,
        embd,
        fbd,
    })
}
