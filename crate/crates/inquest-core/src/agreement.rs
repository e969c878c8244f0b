//! Inter-annotator agreement: Fleiss' kappa and pairwise Cohen's kappa.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AgreementError {
    #[error("empty rating table")]
    Empty,
    #[error("item {item} has {got} ratings, expected {expected}")]
    UnevenRaters {
        item: usize,
        got: u64,
        expected: u64,
    },
    #[error("need at least two raters, got {0}")]
    TooFewRaters(u64),
    #[error("label sequences differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// Fleiss' kappa over an items x categories count table. Every item must
/// carry the same number of ratings. Returns `None` when expected agreement
/// is 1 (all mass in one category), where kappa is undefined.
pub fn fleiss_kappa(table: &[Vec<u64>]) -> Result<Option<f64>, AgreementError> {
    if table.is_empty() || table[0].is_empty() {
        return Err(AgreementError::Empty);
    }
    let raters: u64 = table[0].iter().sum();
    if raters < 2 {
        return Err(AgreementError::TooFewRaters(raters));
    }
    for (item, row) in table.iter().enumerate() {
        let got: u64 = row.iter().sum();
        if got != raters {
            return Err(AgreementError::UnevenRaters {
                item,
                got,
                expected: raters,
            });
        }
    }
    let n_items = table.len() as f64;
    let r = raters as f64;
    let n_categories = table[0].len();

    // Per-item observed agreement.
    let mut p_bar = 0.0;
    for row in table {
        let s: f64 = row.iter().map(|&c| (c * c) as f64).sum();
        p_bar += (s - r) / (r * (r - 1.0));
    }
    p_bar /= n_items;

    // Chance agreement from marginal category proportions.
    let mut p_e = 0.0;
    for c in 0..n_categories {
        let total: u64 = table.iter().map(|row| row[c]).sum();
        let p = total as f64 / (n_items * r);
        p_e += p * p;
    }
    if (1.0 - p_e).abs() < 1e-15 {
        return Ok(None);
    }
    Ok(Some((p_bar - p_e) / (1.0 - p_e)))
}

/// Cohen's kappa between two annotators' label sequences. Returns `None`
/// when chance agreement is 1.
pub fn cohen_kappa<T: Ord>(a: &[T], b: &[T]) -> Result<Option<f64>, AgreementError> {
    if a.len() != b.len() {
        return Err(AgreementError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(AgreementError::Empty);
    }
    let categories: BTreeSet<&T> = a.iter().chain(b.iter()).collect();
    let n = a.len() as f64;
    let observed = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let mut expected = 0.0;
    for c in categories {
        let pa = a.iter().filter(|x| *x == c).count() as f64 / n;
        let pb = b.iter().filter(|x| *x == c).count() as f64 / n;
        expected += pa * pb;
    }
    if (1.0 - expected).abs() < 1e-15 {
        return Ok(None);
    }
    Ok(Some((observed - expected) / (1.0 - expected)))
}

/// Fleiss kappa plus every pairwise Cohen kappa for named annotators whose
/// label columns are aligned by item.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub fleiss: Option<f64>,
    pub cohen_pairs: Vec<((String, String), Option<f64>)>,
    pub n_items: usize,
    pub n_raters: usize,
}

pub fn agreement_report(
    annotators: &[String],
    columns: &[Vec<String>],
) -> Result<AgreementReport, AgreementError> {
    if columns.is_empty() || columns[0].is_empty() {
        return Err(AgreementError::Empty);
    }
    let n_items = columns[0].len();
    for col in columns {
        if col.len() != n_items {
            return Err(AgreementError::LengthMismatch {
                left: n_items,
                right: col.len(),
            });
        }
    }
    let categories: BTreeSet<&String> = columns.iter().flatten().collect();
    let cat_index: Vec<&String> = categories.into_iter().collect();
    let mut table = Vec::with_capacity(n_items);
    for item in 0..n_items {
        let mut row = alloc::vec![0u64; cat_index.len()];
        for col in columns {
            let pos = cat_index.iter().position(|c| **c == col[item]).unwrap();
            row[pos] += 1;
        }
        table.push(row);
    }
    let fleiss = fleiss_kappa(&table)?;
    let mut cohen_pairs = Vec::new();
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            let kappa = cohen_kappa(&columns[i], &columns[j])?;
            cohen_pairs.push(((annotators[i].clone(), annotators[j].clone()), kappa));
        }
    }
    Ok(AgreementReport {
        fleiss,
        cohen_pairs,
        n_items,
        n_raters: columns.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn unanimous_raters_score_one() {
        // Three raters, two categories, items split across categories so
        // expected agreement stays below 1.
        let table = vec![vec![3, 0], vec![0, 3], vec![3, 0], vec![0, 3]];
        let k = fleiss_kappa(&table).unwrap().unwrap();
        assert!((k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_category_table_is_not_applicable() {
        let table = vec![vec![3, 0], vec![3, 0]];
        assert_eq!(fleiss_kappa(&table).unwrap(), None);
    }

    /// The classic 10-item, 14-rater, 5-category worked example; the
    /// expected value comes from evaluating the formula directly:
    /// P-bar = 0.378, P-e = 0.2125, kappa = 0.2099.
    #[test]
    fn worked_example_matches_direct_formula() {
        let table: Vec<Vec<u64>> = vec![
            vec![0, 0, 0, 0, 14],
            vec![0, 2, 6, 4, 2],
            vec![0, 0, 3, 5, 6],
            vec![0, 3, 9, 2, 0],
            vec![2, 2, 8, 1, 1],
            vec![7, 7, 0, 0, 0],
            vec![3, 2, 6, 3, 0],
            vec![2, 5, 3, 2, 2],
            vec![6, 5, 2, 1, 0],
            vec![0, 2, 2, 3, 7],
        ];
        // Direct formula evaluation oracle, computed independently of the
        // implementation: per-item P_i = (sum n_ic^2 - r) / (r (r-1)).
        let r = 14.0f64;
        let mut p_bar = 0.0;
        for row in &table {
            let sq: f64 = row.iter().map(|&c| (c as f64) * (c as f64)).sum();
            p_bar += (sq - r) / (r * (r - 1.0));
        }
        p_bar /= table.len() as f64;
        let mut p_e = 0.0;
        for c in 0..5 {
            let t: u64 = table.iter().map(|row| row[c]).sum();
            let p = t as f64 / (table.len() as f64 * r);
            p_e += p * p;
        }
        let expected = (p_bar - p_e) / (1.0 - p_e);

        let k = fleiss_kappa(&table).unwrap().unwrap();
        assert!((k - expected).abs() < 1e-12);
        assert!((k - 0.2099).abs() < 1e-4, "kappa = {k}");
    }

    #[test]
    fn uneven_rater_counts_are_rejected() {
        let table = vec![vec![3, 0], vec![2, 0]];
        assert!(matches!(
            fleiss_kappa(&table),
            Err(AgreementError::UnevenRaters { item: 1, .. })
        ));
    }

    #[test]
    fn cohen_chance_level_square_is_zero() {
        // 2x2 confusion ((25,25),(25,25)): agreement 0.5, chance 0.5.
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (la, lb, count) in [(0, 0, 25), (0, 1, 25), (1, 0, 25), (1, 1, 25)] {
            for _ in 0..count {
                a.push(la);
                b.push(lb);
            }
        }
        let k = cohen_kappa(&a, &b).unwrap().unwrap();
        assert!(k.abs() < 1e-12);
    }

    #[test]
    fn cohen_perfect_agreement_is_one() {
        let a = vec!["x", "y", "x", "y"];
        let k = cohen_kappa(&a, &a).unwrap().unwrap();
        assert!((k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cohen_identical_constant_sequences_are_not_applicable() {
        let a = vec![1, 1, 1];
        assert_eq!(cohen_kappa(&a, &a).unwrap(), None);
    }

    #[test]
    fn report_builds_pairs() {
        let annotators = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let columns = vec![
            vec!["R".to_string(), "I".to_string(), "R".to_string(), "I".to_string()],
            vec!["R".to_string(), "I".to_string(), "R".to_string(), "I".to_string()],
            vec!["R".to_string(), "I".to_string(), "I".to_string(), "I".to_string()],
        ];
        let rep = agreement_report(&annotators, &columns).unwrap();
        assert_eq!(rep.cohen_pairs.len(), 3);
        assert_eq!(rep.n_raters, 3);
        let ab = rep.cohen_pairs[0].1.unwrap();
        assert!((ab - 1.0).abs() < 1e-12);
        assert!(rep.fleiss.unwrap() > 0.0);
    }
}
