//! Score matrix CSV with a JSON sidecar.
//!
//! Header row is `case_id,issue_id,q_<question_id>,...`; values print with
//! six decimal digits. Ids containing commas, quotes or newlines are
//! rejected at write time; the format does no quoting. The sidecar stores
//! the pool digest and the config digest that produced the matrix.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use inquest_core::corpus::{QuestionPool, ScoreMatrix};
use inquest_core::Matrix;

use crate::error::CliError;

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixMeta {
    pub pool_hash: String,
    pub config_digest: String,
    pub rows: usize,
    pub cols: usize,
}

pub fn meta_path(matrix_path: &Path) -> PathBuf {
    let mut p = matrix_path.as_os_str().to_owned();
    p.push(".meta.json");
    PathBuf::from(p)
}

fn check_id(id: &str) -> Result<(), CliError> {
    if id.contains([',', '"', '\n', '\r']) {
        return Err(CliError::validation(format!(
            "id `{id}` contains characters the CSV format cannot carry"
        )));
    }
    Ok(())
}

pub fn write_matrix(
    path: &Path,
    matrix: &ScoreMatrix,
    pool: &QuestionPool,
    config_digest: &str,
) -> Result<(), CliError> {
    matrix.matches_pool(pool)?;
    let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut header = String::from("case_id,issue_id");
    for q in pool.questions() {
        check_id(&q.question_id)?;
        header.push_str(",q_");
        header.push_str(&q.question_id);
    }
    writeln!(file, "{header}").map_err(|e| CliError::io(path, e))?;
    for (i, (case_id, issue_id)) in matrix.row_ids.iter().enumerate() {
        check_id(case_id)?;
        check_id(issue_id)?;
        let mut line = format!("{case_id},{issue_id}");
        for v in matrix.values().row(i) {
            line.push_str(&format!(",{v:.6}"));
        }
        writeln!(file, "{line}").map_err(|e| CliError::io(path, e))?;
    }
    let meta = MatrixMeta {
        pool_hash: matrix.pool_hash.clone(),
        config_digest: config_digest.to_string(),
        rows: matrix.n_rows(),
        cols: matrix.n_features(),
    };
    let meta_file = meta_path(path);
    std::fs::write(
        &meta_file,
        serde_json::to_string_pretty(&meta).expect("serializable"),
    )
    .map_err(|e| CliError::io(&meta_file, e))?;
    Ok(())
}

pub fn read_meta(matrix_path: &Path) -> Result<MatrixMeta, CliError> {
    let path = meta_path(matrix_path);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<(ScoreMatrix, MatrixMeta), CliError> {
    let meta = read_meta(path)?;
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::validation(format!("{}: empty matrix file", path.display())))?
        .map_err(|e| CliError::io(path, e))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 2 || columns[0] != "case_id" || columns[1] != "issue_id" {
        return Err(CliError::validation(format!(
            "{}: malformed matrix header",
            path.display()
        )));
    }
    let h = columns.len() - 2;
    let mut row_ids = Vec::new();
    let mut data = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != h + 2 {
            return Err(CliError::validation(format!(
                "{}: line {}: expected {} fields, got {}",
                path.display(),
                idx + 2,
                h + 2,
                fields.len()
            )));
        }
        row_ids.push((fields[0].to_string(), fields[1].to_string()));
        for f in &fields[2..] {
            let v: f64 = f.parse().map_err(|_| {
                CliError::validation(format!(
                    "{}: line {}: bad value `{f}`",
                    path.display(),
                    idx + 2
                ))
            })?;
            data.push(v);
        }
    }
    let values = Matrix::from_vec(row_ids.len(), h, data);
    // Binarized matrices hold {0,1}; use the shape-checking constructor and
    // leave range validation to consumers that require the open interval.
    let matrix = ScoreMatrix::from_binary(row_ids, meta.pool_hash.clone(), values)?;
    Ok((matrix, meta))
}
