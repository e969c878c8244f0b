//! Corpus and matrix types shared by every other module.
//!
//! A [`Case`] carries an ordered fact list; [`IssueCandidate`]s reference a
//! case and optionally carry a binary relevance label. Binary reasoning
//! questions accumulate in a [`QuestionPool`] whose order fixes the column
//! order of every [`ScoreMatrix`] derived from it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use sha2::{Digest, Sha256};

use crate::linalg::Matrix;

/// Binary relevance label, encoded internally as +1 / -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    Relevant,
    Irrelevant,
}

impl Label {
    pub fn value(self) -> f64 {
        match self {
            Label::Relevant => 1.0,
            Label::Irrelevant => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Relevant => "Relevant",
            Label::Irrelevant => "Irrelevant",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "Relevant" => Some(Label::Relevant),
            "Irrelevant" => Some(Label::Irrelevant),
            _ => None,
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Relevant => Label::Irrelevant,
            Label::Irrelevant => Label::Relevant,
        }
    }
}

/// Where an issue candidate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Extracted from the judgment text.
    Extracted,
    /// Produced by incremental generation from the fact prefix `[x1..xi]`.
    Incremental { depth: usize },
    /// Produced by single-pass full-context generation.
    Baseline,
}

/// One court case: an ordered fact list plus the issues extracted from the
/// judgment.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub case_id: String,
    pub facts: Vec<String>,
    pub silver_issues: Vec<String>,
    pub source: String,
}

/// A candidate legal issue for one case.
#[derive(Debug, Clone, PartialEq)]
pub struct IssueCandidate {
    pub issue_id: String,
    pub case_id: String,
    pub text: String,
    pub origin: Origin,
    pub label: Option<Label>,
}

/// A binary (yes/no) reasoning question with the pair that elicited it.
#[derive(Debug, Clone, PartialEq)]
pub struct Question {
    pub question_id: String,
    pub text: String,
    /// `(case_id, issue_id)` of the eliciting pair.
    pub provenance: (String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("duplicate case_id `{0}`")]
    DuplicateCase(String),
    #[error("duplicate issue_id `{0}`")]
    DuplicateIssue(String),
    #[error("issue `{issue_id}` references unknown case `{case_id}`")]
    DanglingCase { issue_id: String, case_id: String },
    #[error("case `{0}` has an empty fact list")]
    EmptyFacts(String),
    #[error("case `{0}` contains an empty fact")]
    BlankFact(String),
    #[error("issue `{0}` has empty text")]
    BlankIssue(String),
    #[error("issue `{issue_id}` depth {depth} outside 1..={m} of case `{case_id}`")]
    DepthOutOfRange {
        issue_id: String,
        case_id: String,
        depth: usize,
        m: usize,
    },
    #[error("duplicate question_id `{0}` with differing text")]
    DuplicateQuestion(String),
    #[error("question `{0}` has empty text")]
    BlankQuestion(String),
}

/// A validated corpus: unique ids, no dangling references, non-empty facts.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub cases: Vec<Case>,
    pub issues: Vec<IssueCandidate>,
}

impl Corpus {
    pub fn new(cases: Vec<Case>, issues: Vec<IssueCandidate>) -> Result<Self, CorpusError> {
        let mut case_m: BTreeMap<&str, usize> = BTreeMap::new();
        for case in &cases {
            if case.facts.is_empty() {
                return Err(CorpusError::EmptyFacts(case.case_id.clone()));
            }
            if case.facts.iter().any(|f| f.trim().is_empty()) {
                return Err(CorpusError::BlankFact(case.case_id.clone()));
            }
            if case_m.insert(&case.case_id, case.facts.len()).is_some() {
                return Err(CorpusError::DuplicateCase(case.case_id.clone()));
            }
        }
        let mut seen_issues: BTreeSet<&str> = BTreeSet::new();
        for issue in &issues {
            if issue.text.trim().is_empty() {
                return Err(CorpusError::BlankIssue(issue.issue_id.clone()));
            }
            if !seen_issues.insert(&issue.issue_id) {
                return Err(CorpusError::DuplicateIssue(issue.issue_id.clone()));
            }
            let Some(&m) = case_m.get(issue.case_id.as_str()) else {
                return Err(CorpusError::DanglingCase {
                    issue_id: issue.issue_id.clone(),
                    case_id: issue.case_id.clone(),
                });
            };
            if let Origin::Incremental { depth } = issue.origin {
                if depth < 1 || depth > m {
                    return Err(CorpusError::DepthOutOfRange {
                        issue_id: issue.issue_id.clone(),
                        case_id: issue.case_id.clone(),
                        depth,
                        m,
                    });
                }
            }
        }
        Ok(Corpus { cases, issues })
    }

    pub fn case(&self, case_id: &str) -> Option<&Case> {
        self.cases.iter().find(|c| c.case_id == case_id)
    }

    /// Issues carrying a label, paired with it, in corpus order.
    pub fn labeled_issues(&self) -> impl Iterator<Item = (&IssueCandidate, Label)> {
        self.issues.iter().filter_map(|i| i.label.map(|l| (i, l)))
    }
}

/// Collapses runs of whitespace to single spaces and trims the ends; the
/// pool deduplicates on exact match of this form.
pub fn normalize_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut first = true;
    for token in text.split_whitespace() {
        if !first {
            out.push(' ');
        }
        out.push_str(token);
        first = false;
    }
    out
}

/// The shared, ordered question pool; `h` is its length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuestionPool {
    questions: Vec<Question>,
    normalized: BTreeMap<String, usize>,
    by_id: BTreeMap<String, usize>,
}

impl QuestionPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_questions(questions: Vec<Question>) -> Result<Self, CorpusError> {
        let mut pool = Self::new();
        for q in questions {
            pool.insert(q)?;
        }
        Ok(pool)
    }

    /// Inserts unless a question with the same normalized text already
    /// exists; returns the index of the surviving question.
    pub fn insert(&mut self, q: Question) -> Result<usize, CorpusError> {
        if q.text.trim().is_empty() {
            return Err(CorpusError::BlankQuestion(q.question_id.clone()));
        }
        let norm = normalize_text(&q.text);
        if let Some(&idx) = self.normalized.get(&norm) {
            return Ok(idx);
        }
        if let Some(&idx) = self.by_id.get(&q.question_id) {
            if normalize_text(&self.questions[idx].text) != norm {
                return Err(CorpusError::DuplicateQuestion(q.question_id.clone()));
            }
            return Ok(idx);
        }
        let idx = self.questions.len();
        self.normalized.insert(norm, idx);
        self.by_id.insert(q.question_id.clone(), idx);
        self.questions.push(q);
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn get(&self, idx: usize) -> &Question {
        &self.questions[idx]
    }

    /// Content digest over question texts in order. Two pools share a
    /// digest exactly when their normalized texts and ordering agree.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for q in &self.questions {
            let norm = normalize_text(&q.text);
            hasher.update((norm.len() as u64).to_le_bytes());
            hasher.update(norm.as_bytes());
        }
        hex(&hasher.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Stable content id for a question: `q` plus the leading hex of the
/// normalized-text digest.
pub fn question_id_for(text: &str) -> String {
    let norm = normalize_text(text);
    let mut hasher = Sha256::new();
    hasher.update(norm.as_bytes());
    let digest = hasher.finalize();
    format!("q{}", &hex(&digest)[..12])
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("row {row} column {col}: score {value} outside the open interval (0,1)")]
    ScoreOutOfRange { row: usize, col: usize, value: f64 },
    #[error("matrix has {got} columns but the pool has {expected}")]
    ColumnCountMismatch { got: usize, expected: usize },
    #[error("matrix has {rows} rows but {ids} row ids")]
    RowCountMismatch { rows: usize, ids: usize },
    #[error("cutoff {0} outside the open interval (0,1)")]
    BadCutoff(f64),
}

/// Verifier probabilities for (case, issue) rows against a question pool.
///
/// Row order follows construction order; column `t` corresponds to question
/// `t` of the pool identified by `pool_hash`. Entries from a verifier lie in
/// the open interval (0,1); binarized variants hold {0,1}.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub row_ids: Vec<(String, String)>,
    pub pool_hash: String,
    values: Matrix,
}

impl ScoreMatrix {
    /// Validating constructor: every entry must lie strictly inside (0,1).
    pub fn from_scores(
        row_ids: Vec<(String, String)>,
        pool_hash: String,
        values: Matrix,
    ) -> Result<Self, MatrixError> {
        if row_ids.len() != values.rows() {
            return Err(MatrixError::RowCountMismatch {
                rows: values.rows(),
                ids: row_ids.len(),
            });
        }
        for i in 0..values.rows() {
            for j in 0..values.cols() {
                let v = values.get(i, j);
                if !(v > 0.0 && v < 1.0) {
                    return Err(MatrixError::ScoreOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        Ok(ScoreMatrix {
            row_ids,
            pool_hash,
            values,
        })
    }

    /// Constructor for matrices that are allowed to hold {0,1} entries
    /// (binarized variants); shape checks still apply.
    pub fn from_binary(
        row_ids: Vec<(String, String)>,
        pool_hash: String,
        values: Matrix,
    ) -> Result<Self, MatrixError> {
        if row_ids.len() != values.rows() {
            return Err(MatrixError::RowCountMismatch {
                rows: values.rows(),
                ids: row_ids.len(),
            });
        }
        Ok(ScoreMatrix {
            row_ids,
            pool_hash,
            values,
        })
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn n_rows(&self) -> usize {
        self.values.rows()
    }

    pub fn n_features(&self) -> usize {
        self.values.cols()
    }

    pub fn matches_pool(&self, pool: &QuestionPool) -> Result<(), MatrixError> {
        if self.values.cols() != pool.len() {
            return Err(MatrixError::ColumnCountMismatch {
                got: self.values.cols(),
                expected: pool.len(),
            });
        }
        Ok(())
    }

    /// Position of a `(case_id, issue_id)` row, if present.
    pub fn row_index(&self, case_id: &str, issue_id: &str) -> Option<usize> {
        self.row_ids
            .iter()
            .position(|(c, i)| c == case_id && i == issue_id)
    }
}

/// Maps every entry to 1 if `>= cutoff` else 0, reproducing the binary
/// classifier variants. The boundary is inclusive.
pub fn binarize_scores(matrix: &ScoreMatrix, cutoff: f64) -> Result<ScoreMatrix, MatrixError> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(MatrixError::BadCutoff(cutoff));
    }
    let src = matrix.values();
    let mut out = Matrix::zeros(src.rows(), src.cols());
    for i in 0..src.rows() {
        for j in 0..src.cols() {
            out.set(i, j, if src.get(i, j) >= cutoff { 1.0 } else { 0.0 });
        }
    }
    ScoreMatrix::from_binary(matrix.row_ids.clone(), matrix.pool_hash.clone(), out)
}

/// One training example: a feature row and its +1/-1 label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub row_id: (String, String),
    pub features: Vec<f64>,
    pub label: Label,
}

/// Joins a score matrix with issue labels, keeping matrix row order and
/// skipping unlabeled rows.
pub fn labeled_examples(matrix: &ScoreMatrix, corpus: &Corpus) -> Vec<LabeledExample> {
    let mut labels: BTreeMap<(&str, &str), Label> = BTreeMap::new();
    for (issue, label) in corpus.labeled_issues() {
        labels.insert((issue.case_id.as_str(), issue.issue_id.as_str()), label);
    }
    let mut out = Vec::new();
    for (i, (case_id, issue_id)) in matrix.row_ids.iter().enumerate() {
        if let Some(&label) = labels.get(&(case_id.as_str(), issue_id.as_str())) {
            out.push(LabeledExample {
                row_id: (case_id.clone(), issue_id.clone()),
                features: matrix.values().row(i).to_vec(),
                label,
            });
        }
    }
    out
}

/// Splits labeled examples into a design matrix and a label vector.
pub fn design_from_examples(examples: &[LabeledExample]) -> (Matrix, Vec<Label>) {
    let h = examples.first().map_or(0, |e| e.features.len());
    let mut data = Vec::with_capacity(examples.len() * h);
    let mut labels = Vec::with_capacity(examples.len());
    for e in examples {
        data.extend_from_slice(&e.features);
        labels.push(e.label);
    }
    (Matrix::from_vec(examples.len(), h, data), labels)
}
