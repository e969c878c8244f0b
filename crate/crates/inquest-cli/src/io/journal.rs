//! Append-only JSON-lines journal of verifier scores; the resume cache for
//! interrupted scoring runs.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use inquest_core::elicit::{ScoreCache, VerifierScore};

use crate::error::CliError;

#[derive(Debug, Serialize, Deserialize)]
struct JournalRecord {
    case_id: String,
    issue_id: String,
    question_id: String,
    p_yes: f64,
}

/// Loads a journal into a resume cache; later records win on duplicates.
pub fn load_journal(path: &Path) -> Result<ScoreCache, CliError> {
    let mut cache = ScoreCache::new();
    if !path.exists() {
        return Ok(cache);
    }
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: JournalRecord = serde_json::from_str(&line).map_err(|e| {
            CliError::validation(format!("{}: line {}: {e}", path.display(), idx + 1))
        })?;
        cache.insert(
            (record.case_id, record.issue_id, record.question_id),
            record.p_yes,
        );
    }
    Ok(cache)
}

/// Single-writer appender; every record is flushed so a killed run loses
/// at most the line being written.
pub struct JournalWriter {
    file: std::fs::File,
    path: std::path::PathBuf,
}

impl JournalWriter {
    pub fn append_to(path: &Path) -> Result<JournalWriter, CliError> {
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::io(path, e))?;
        Ok(JournalWriter {
            file,
            path: path.to_path_buf(),
        })
    }

    pub fn truncate(path: &Path) -> Result<JournalWriter, CliError> {
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        Ok(JournalWriter {
            file,
            path: path.to_path_buf(),
        })
    }

    pub fn record(&mut self, score: &VerifierScore) -> Result<(), CliError> {
        let record = JournalRecord {
            case_id: score.case_id.clone(),
            issue_id: score.issue_id.clone(),
            question_id: score.question_id.clone(),
            p_yes: score.p_yes,
        };
        let line = serde_json::to_string(&record).expect("serializable");
        writeln!(self.file, "{line}").map_err(|e| CliError::io(&self.path, e))?;
        self.file.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn journal_round_trips_into_a_cache() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.jsonl");
        let mut w = JournalWriter::truncate(&path).unwrap();
        for (q, p) in [("q1", 0.9), ("q2", 0.1)] {
            w.record(&VerifierScore {
                case_id: "c1".into(),
                issue_id: "i1".into(),
                question_id: q.into(),
                p_yes: p,
            })
            .unwrap();
        }
        drop(w);
        let cache = load_journal(&path).unwrap();
        assert_eq!(cache.len(), 2);
        assert_eq!(
            cache[&("c1".into(), "i1".into(), "q1".into())],
            0.9
        );
    }

    #[test]
    fn missing_journal_is_an_empty_cache() {
        let dir = tempfile::tempdir().unwrap();
        let cache = load_journal(&dir.path().join("absent.jsonl")).unwrap();
        assert!(cache.is_empty());
    }
}
