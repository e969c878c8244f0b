//! JSON-lines corpus: one record per line, either a case or an issue.
//!
//! ```text
//! {"kind":"case","case_id":"c1","facts":["..."],"silver_issues":["..."],"source":"..."}
//! {"kind":"issue","issue_id":"i1","case_id":"c1","text":"...","origin":"extracted","label":"Relevant"}
//! ```
//!
//! Incremental issues carry `"origin":"incremental"` plus `"depth"`.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use inquest_core::corpus::{Case, Corpus, IssueCandidate, Label, Origin, Question, QuestionPool};

use crate::error::CliError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum Record {
    Case {
        case_id: String,
        facts: Vec<String>,
        #[serde(default)]
        silver_issues: Vec<String>,
        #[serde(default)]
        source: String,
    },
    Issue {
        issue_id: String,
        case_id: String,
        text: String,
        origin: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

fn parse_origin(origin: &str, depth: Option<usize>, line: usize) -> Result<Origin, CliError> {
    match origin {
        "extracted" => Ok(Origin::Extracted),
        "baseline" => Ok(Origin::Baseline),
        "incremental" => {
            let depth = depth.ok_or_else(|| {
                CliError::validation(format!("line {line}: incremental issue without depth"))
            })?;
            Ok(Origin::Incremental { depth })
        }
        other => Err(CliError::validation(format!(
            "line {line}: unknown origin `{other}`"
        ))),
    }
}

fn origin_fields(origin: &Origin) -> (String, Option<usize>) {
    match origin {
        Origin::Extracted => (String::from("extracted"), None),
        Origin::Baseline => (String::from("baseline"), None),
        Origin::Incremental { depth } => (String::from("incremental"), Some(*depth)),
    }
}

/// Reads and validates a corpus, reporting parse errors with their line
/// number.
pub fn ingest_corpus(path: &Path) -> Result<Corpus, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut cases = Vec::new();
    let mut issues = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| {
            CliError::validation(format!("{}: line {lineno}: {e}", path.display()))
        })?;
        match record {
            Record::Case {
                case_id,
                facts,
                silver_issues,
                source,
            } => cases.push(Case {
                case_id,
                facts,
                silver_issues,
                source,
            }),
            Record::Issue {
                issue_id,
                case_id,
                text,
                origin,
                depth,
                label,
            } => {
                let label = match label {
                    None => None,
                    Some(s) => Some(Label::parse(&s).ok_or_else(|| {
                        CliError::validation(format!(
                            "line {lineno}: unknown label `{s}` (expected Relevant or Irrelevant)"
                        ))
                    })?),
                };
                issues.push(IssueCandidate {
                    issue_id,
                    case_id,
                    text,
                    origin: parse_origin(&origin, depth, lineno)?,
                    label,
                });
            }
        }
    }
    Ok(Corpus::new(cases, issues)?)
}

pub fn write_corpus(path: &Path, corpus: &Corpus) -> Result<(), CliError> {
    let mut out = Vec::new();
    for case in &corpus.cases {
        let record = Record::Case {
            case_id: case.case_id.clone(),
            facts: case.facts.clone(),
            silver_issues: case.silver_issues.clone(),
            source: case.source.clone(),
        };
        out.push(serde_json::to_string(&record).expect("serializable"));
    }
    for issue in &corpus.issues {
        let (origin, depth) = origin_fields(&issue.origin);
        let record = Record::Issue {
            issue_id: issue.issue_id.clone(),
            case_id: issue.case_id.clone(),
            text: issue.text.clone(),
            origin,
            depth,
            label: issue.label.map(|l| l.as_str().to_string()),
        };
        out.push(serde_json::to_string(&record).expect("serializable"));
    }
    write_lines(path, &out)
}

/// Issue candidates alone (the `elicit` output), same issue schema.
pub fn write_candidates(path: &Path, candidates: &[IssueCandidate]) -> Result<(), CliError> {
    let mut out = Vec::new();
    for issue in candidates {
        let (origin, depth) = origin_fields(&issue.origin);
        let record = Record::Issue {
            issue_id: issue.issue_id.clone(),
            case_id: issue.case_id.clone(),
            text: issue.text.clone(),
            origin,
            depth,
            label: issue.label.map(|l| l.as_str().to_string()),
        };
        out.push(serde_json::to_string(&record).expect("serializable"));
    }
    write_lines(path, &out)
}

#[derive(Debug, Serialize, Deserialize)]
struct QuestionRecord {
    question_id: String,
    text: String,
    case_id: String,
    issue_id: String,
}

pub fn write_pool(path: &Path, pool: &QuestionPool) -> Result<(), CliError> {
    let mut out = Vec::new();
    for q in pool.questions() {
        let record = QuestionRecord {
            question_id: q.question_id.clone(),
            text: q.text.clone(),
            case_id: q.provenance.0.clone(),
            issue_id: q.provenance.1.clone(),
        };
        out.push(serde_json::to_string(&record).expect("serializable"));
    }
    write_lines(path, &out)
}

pub fn read_pool(path: &Path) -> Result<QuestionPool, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut pool = QuestionPool::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: QuestionRecord = serde_json::from_str(&line).map_err(|e| {
            CliError::validation(format!("{}: line {}: {e}", path.display(), idx + 1))
        })?;
        pool.insert(Question {
            question_id: record.question_id,
            text: record.text,
            provenance: (record.case_id, record.issue_id),
        })?;
    }
    Ok(pool)
}

fn write_lines(path: &Path, lines: &[String]) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    for line in lines {
        writeln!(file, "{line}").map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}
