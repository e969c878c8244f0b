//! Run configuration: a TOML file plus command-line overrides. Every
//! artifact a command writes embeds the digest of the effective
//! configuration so mixed-provenance artifacts are detectable.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use inquest_core::classifiers::{ModelSpec, Penalty};
use inquest_core::elicit::EndpointConfig;
use inquest_core::stability::StabilityConfig;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Directory all artifacts live in.
    pub workspace: PathBuf,
    pub paths: PathsSection,
    pub endpoint: EndpointSection,
    pub elicit: ElicitSection,
    pub experiment: ExperimentSection,
    pub stability: StabilitySection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            workspace: PathBuf::from("workspace"),
            paths: PathsSection::default(),
            endpoint: EndpointSection::default(),
            elicit: ElicitSection::default(),
            experiment: ExperimentSection::default(),
            stability: StabilitySection::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PathsSection {
    pub corpus: PathBuf,
    /// Embedding CSVs for the diversity report (optional).
    pub embeddings_own: Option<PathBuf>,
    pub embeddings_reference: Option<PathBuf>,
    /// Annotation CSV for the agreement report (optional).
    pub annotations: Option<PathBuf>,
    /// Directory of prompt template overrides; embedded defaults are used
    /// for any file not present.
    pub prompts: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct EndpointSection {
    pub base_url: String,
    pub model: String,
    pub auth_token_env: String,
    pub temperature: f64,
    pub max_retries: u32,
    pub timeout_secs: f64,
    /// Use the deterministic offline oracle instead of the endpoint.
    pub oracle: bool,
    /// Maximum in-flight scoring requests.
    pub max_inflight: usize,
    /// When the endpoint cannot return token log-probabilities, parse the
    /// yes/no answer text at 0.9/0.1 instead of failing hard.
    pub binary_fallback: bool,
}

impl Default for EndpointSection {
    fn default() -> Self {
        EndpointSection {
            base_url: String::from("http://localhost:8000/v1"),
            model: String::from("local-model"),
            auth_token_env: String::from("INQUEST_API_TOKEN"),
            temperature: 0.0,
            max_retries: 3,
            timeout_secs: 60.0,
            oracle: false,
            max_inflight: 4,
            binary_fallback: false,
        }
    }
}

impl EndpointSection {
    pub fn to_core(&self) -> EndpointConfig {
        EndpointConfig {
            base_url: self.base_url.clone(),
            auth_token_env: self.auth_token_env.clone(),
            model_name: self.model.clone(),
            temperature: self.temperature,
            max_retries: self.max_retries,
            timeout_secs: self.timeout_secs,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ElicitSection {
    /// Questions requested per (case, issue) pair.
    pub questions_per_pair: usize,
    /// Samples for the single-pass baseline generator (diversity report).
    pub baseline_samples: u32,
}

impl Default for ElicitSection {
    fn default() -> Self {
        ElicitSection {
            questions_per_pair: 8,
            baseline_samples: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    /// logistic | svc | ridge | lda | knn
    pub family: String,
    /// l1 | l2
    pub penalty: String,
    /// Strength grid; empty means the default 10-point log grid over
    /// [1e-2, 1e2].
    pub grid: Vec<f64>,
    pub folds: usize,
    pub knn_k: usize,
    pub standardize: bool,
    /// 0 disables; otherwise scores are binarized at this cutoff first.
    pub binarize_cutoff: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            family: String::from("logistic"),
            penalty: String::from("l1"),
            grid: Vec::new(),
            folds: 5,
            knn_k: 5,
            standardize: false,
            binarize_cutoff: 0.0,
        }
    }
}

impl ExperimentSection {
    pub fn model_spec(&self) -> Result<ModelSpec, CliError> {
        let penalty = match self.penalty.as_str() {
            "l1" => Penalty::L1,
            "l2" => Penalty::L2,
            other => {
                return Err(CliError::validation(format!(
                    "unknown penalty `{other}` (expected l1 or l2)"
                )))
            }
        };
        match self.family.as_str() {
            "logistic" => Ok(ModelSpec::Logistic(penalty)),
            "svc" => Ok(ModelSpec::Svc(penalty)),
            "ridge" => Ok(ModelSpec::Ridge),
            "lda" => Ok(ModelSpec::Lda),
            "knn" => Ok(ModelSpec::Knn { k: self.knn_k }),
            other => Err(CliError::validation(format!(
                "unknown model family `{other}` (expected logistic, svc, ridge, lda or knn)"
            ))),
        }
    }

    pub fn strength_grid(&self) -> Vec<f64> {
        if self.grid.is_empty() {
            inquest_core::eval::default_strength_grid()
        } else {
            let mut g = self.grid.clone();
            g.sort_by(|a, b| a.partial_cmp(b).unwrap());
            g
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct StabilitySection {
    pub n_bootstrap: usize,
    pub subsample_frac: f64,
    pub thresholds: Vec<f64>,
    /// Iteration cap for the L1 SVC subgradient fits inside the bootstrap.
    pub svc_max_iter: usize,
}

impl Default for StabilitySection {
    fn default() -> Self {
        StabilitySection {
            n_bootstrap: 100,
            subsample_frac: 0.60,
            thresholds: vec![0.3, 0.4, 0.5, 0.6],
            svc_max_iter: 2_000,
        }
    }
}

impl StabilitySection {
    pub fn to_core(&self, seed: u64) -> StabilityConfig {
        StabilityConfig {
            n_bootstrap: self.n_bootstrap,
            subsample_frac: self.subsample_frac,
            thresholds: self.thresholds.clone(),
            seed,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Digest of the effective configuration (after overrides); embedded
    /// into every artifact.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_toml().as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.endpoint.to_core().validate()?;
        self.experiment.model_spec()?;
        self.stability.to_core(self.seed).validate()?;
        if self.experiment.folds < 2 {
            return Err(CliError::validation("experiment.folds must be at least 2"));
        }
        if self.elicit.questions_per_pair < 1 {
            return Err(CliError::validation(
                "elicit.questions_per_pair must be at least 1",
            ));
        }
        if self.experiment.binarize_cutoff != 0.0
            && !(self.experiment.binarize_cutoff > 0.0 && self.experiment.binarize_cutoff < 1.0)
        {
            return Err(CliError::validation(
                "experiment.binarize_cutoff must be 0 (off) or inside (0,1)",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let mut cfg = RunConfig::default();
        cfg.seed = 7;
        cfg.paths.corpus = PathBuf::from("corpus.jsonl");
        cfg.experiment.family = String::from("svc");
        cfg.experiment.grid = vec![0.1, 1.0, 10.0];
        let text = cfg.to_toml();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.digest(), back.digest());
    }

    #[test]
    fn digest_tracks_content() {
        let a = RunConfig::default();
        let mut b = RunConfig::default();
        b.seed = 43;
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn unknown_family_is_rejected() {
        let mut cfg = RunConfig::default();
        cfg.experiment.family = String::from("boosted");
        assert!(cfg.validate().is_err());
    }
}
