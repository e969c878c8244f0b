//! Small CSV inputs: embedding files and annotation sheets. Neither format
//! quotes fields.

use std::io::{BufRead, BufReader};
use std::path::Path;

use inquest_core::Matrix;

use crate::error::CliError;

/// Embedding CSV: one row per text, first column a text id, remaining
/// columns reals. Returns ids and the matrix.
pub fn read_embeddings(path: &Path) -> Result<(Vec<String>, Matrix), CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut ids = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let id = fields
            .next()
            .ok_or_else(|| CliError::validation(format!("line {}: empty row", idx + 1)))?;
        let mut row = Vec::new();
        for f in fields {
            let v: f64 = f.trim().parse().map_err(|_| {
                CliError::validation(format!(
                    "{}: line {}: bad value `{f}`",
                    path.display(),
                    idx + 1
                ))
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::validation(format!(
                    "{}: line {}: expected {} values, got {}",
                    path.display(),
                    idx + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        ids.push(id.to_string());
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no embedding rows",
            path.display()
        )));
    }
    Ok((ids, Matrix::from_rows(&rows)))
}

/// Annotation CSV: header `item_id,<rater>,<rater>,...`, one label per
/// rater per item. Returns rater names and per-rater label columns.
pub fn read_annotations(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::validation(format!("{}: empty file", path.display())))?
        .map_err(|e| CliError::io(path, e))?;
    let names: Vec<String> = header.split(',').skip(1).map(|s| s.trim().to_string()).collect();
    if names.len() < 2 {
        return Err(CliError::validation(format!(
            "{}: need at least two rater columns",
            path.display()
        )));
    }
    let mut columns: Vec<Vec<String>> = vec![Vec::new(); names.len()];
    for (idx, line) in lines.enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != names.len() + 1 {
            return Err(CliError::validation(format!(
                "{}: line {}: expected {} fields, got {}",
                path.display(),
                idx + 2,
                names.len() + 1,
                fields.len()
            )));
        }
        for (col, f) in columns.iter_mut().zip(&fields[1..]) {
            col.push(f.trim().to_string());
        }
    }
    if columns[0].is_empty() {
        return Err(CliError::validation(format!(
            "{}: no annotation rows",
            path.display()
        )));
    }
    Ok((names, columns))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeddings_parse_into_a_matrix() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.csv");
        std::fs::write(&path, "t1,0.5,1.5\nt2,-0.25,0.75\n").unwrap();
        let (ids, m) = read_embeddings(&path).unwrap();
        assert_eq!(ids, vec!["t1", "t2"]);
        assert_eq!(m.rows(), 2);
        assert_eq!(m.get(1, 0), -0.25);
    }

    #[test]
    fn ragged_embeddings_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.csv");
        std::fs::write(&path, "t1,0.5,1.5\nt2,-0.25\n").unwrap();
        assert!(read_embeddings(&path).is_err());
    }

    #[test]
    fn annotations_split_into_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ann.csv");
        std::fs::write(
            &path,
            "item_id,alice,bob,cara\n1,Relevant,Relevant,Irrelevant\n2,Irrelevant,Irrelevant,Irrelevant\n",
        )
        .unwrap();
        let (names, cols) = read_annotations(&path).unwrap();
        assert_eq!(names, vec!["alice", "bob", "cara"]);
        assert_eq!(cols[0], vec!["Relevant", "Irrelevant"]);
        assert_eq!(cols[2], vec!["Irrelevant", "Irrelevant"]);
    }
}
