//! Linear model persistence: one JSON document per fitted model. Weights
//! serialize as JSON numbers, which round-trip f64 exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use inquest_core::classifiers::{LinearModel, LossKind, Penalty};

use crate::error::CliError;

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelDoc {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub penalty: String,
    pub strength: f64,
    pub loss: String,
    pub seed: u64,
    pub pool_hash: String,
    pub config_digest: String,
}

impl ModelDoc {
    pub fn from_model(model: &LinearModel, config_digest: &str) -> ModelDoc {
        ModelDoc {
            weights: model.weights.clone(),
            intercept: model.intercept,
            penalty: model.penalty.as_str().to_string(),
            strength: model.strength,
            loss: model.loss.as_str().to_string(),
            seed: model.seed,
            pool_hash: model.pool_hash.clone(),
            config_digest: config_digest.to_string(),
        }
    }

    pub fn into_model(self) -> Result<LinearModel, CliError> {
        let penalty = match self.penalty.as_str() {
            "l1" => Penalty::L1,
            "l2" => Penalty::L2,
            other => return Err(CliError::validation(format!("unknown penalty `{other}`"))),
        };
        let loss = match self.loss.as_str() {
            "logistic" => LossKind::Logistic,
            "hinge" => LossKind::Hinge,
            "squared" => LossKind::Squared,
            other => return Err(CliError::validation(format!("unknown loss `{other}`"))),
        };
        Ok(LinearModel {
            weights: self.weights,
            intercept: self.intercept,
            penalty,
            strength: self.strength,
            loss,
            seed: self.seed,
            pool_hash: self.pool_hash,
        })
    }
}

pub fn write_model(path: &Path, model: &LinearModel, config_digest: &str) -> Result<(), CliError> {
    let doc = ModelDoc::from_model(model, config_digest);
    std::fs::write(
        path,
        serde_json::to_string_pretty(&doc).expect("serializable"),
    )
    .map_err(|e| CliError::io(path, e))
}

pub fn read_model(path: &Path) -> Result<(LinearModel, String), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: ModelDoc = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    let digest = doc.config_digest.clone();
    Ok((doc.into_model()?, digest))
}
