//! Euclidean k-nearest-neighbor majority vote.

use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::Label;
use crate::linalg::Matrix;

use super::{validate_two_class, FitError};

/// Stored training set plus `k`; `k` must be odd so binary votes cannot
/// tie.
#[derive(Debug, Clone)]
pub struct KnnModel {
    x_train: Matrix,
    y_train: Vec<Label>,
    pub k: usize,
}

pub fn fit_knn(x: &Matrix, y: &[Label], k: usize) -> Result<KnnModel, FitError> {
    validate_two_class(x, y)?;
    if k == 0 || k % 2 == 0 {
        return Err(FitError::Degenerate(String::from("k must be odd")));
    }
    if k > x.rows() {
        return Err(FitError::Degenerate(String::from(
            "k exceeds the number of training rows",
        )));
    }
    Ok(KnnModel {
        x_train: x.clone(),
        y_train: y.to_vec(),
        k,
    })
}

impl KnnModel {
    pub fn predict(&self, x: &Matrix) -> Result<Vec<Label>, FitError> {
        Ok(self
            .decision_scores(x)?
            .into_iter()
            .map(super::label_from_score)
            .collect())
    }

    /// Mean neighbor label in [-1, 1]; ties impossible for odd k.
    pub fn decision_scores(&self, x: &Matrix) -> Result<Vec<f64>, FitError> {
        if x.cols() != self.x_train.cols() {
            return Err(FitError::DimensionMismatch {
                expected: self.x_train.cols(),
                got: x.cols(),
            });
        }
        let mut out = Vec::with_capacity(x.rows());
        for query in x.iter_rows() {
            let mut dists: Vec<(f64, usize)> = self
                .x_train
                .iter_rows()
                .enumerate()
                .map(|(i, row)| {
                    let d: f64 = row
                        .iter()
                        .zip(query)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    (d, i)
                })
                .collect();
            // Distance ties break by training index for determinism.
            dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            let vote: f64 = dists[..self.k]
                .iter()
                .map(|(_, i)| self.y_train[*i].value())
                .sum();
            out.push(vote / self.k as f64);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn k1_on_a_training_row_returns_its_label() {
        let x = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]);
        let y = vec![Label::Irrelevant, Label::Relevant, Label::Irrelevant];
        let m = fit_knn(&x, &y, 1).unwrap();
        let q = Matrix::from_rows(&[vec![1.0, 1.0]]);
        assert_eq!(m.predict(&q).unwrap(), vec![Label::Relevant]);
    }

    #[test]
    fn even_k_and_oversized_k_are_rejected() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]);
        let y = vec![
            Label::Irrelevant,
            Label::Relevant,
            Label::Irrelevant,
            Label::Relevant,
        ];
        assert!(fit_knn(&x, &y, 4).is_err());
        assert!(fit_knn(&x, &y, 5).is_err());
        assert!(fit_knn(&x, &y, 3).is_ok());
    }

    #[test]
    fn k_equals_n_returns_global_majority() {
        let x = Matrix::from_rows(&[vec![0.0], vec![0.5], vec![1.0]]);
        let y = vec![Label::Relevant, Label::Relevant, Label::Irrelevant];
        let m = fit_knn(&x, &y, 3).unwrap();
        let q = Matrix::from_rows(&[vec![100.0], vec![-100.0]]);
        let preds = m.predict(&q).unwrap();
        assert!(preds.iter().all(|l| *l == Label::Relevant));
    }
}
