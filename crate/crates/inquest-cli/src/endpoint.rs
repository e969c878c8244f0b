//! Chat-completion backend: maps the three elicitation requests onto an
//! OpenAI-style `/chat/completions` endpoint with token log-probabilities,
//! retrying transient failures with exponential backoff and jitter.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use inquest_core::elicit::{
    p_yes_from_logprobs, BackendError, EndpointConfig, LanguageBackend,
};

use crate::error::CliError;

/// Prompt templates; placeholders `{facts}`, `{issue}`, `{question}`,
/// `{k}` are substituted verbatim.
#[derive(Debug, Clone)]
pub struct PromptSet {
    pub question_gen: String,
    pub incremental: String,
    pub verifier: String,
}

impl PromptSet {
    /// Embedded defaults, each overridable by a file of the same name in
    /// the configured prompts directory.
    pub fn load(dir: Option<&std::path::Path>) -> Result<PromptSet, CliError> {
        let mut set = PromptSet {
            question_gen: include_str!("../assets/prompts/question_gen.txt").to_string(),
            incremental: include_str!("../assets/prompts/incremental.txt").to_string(),
            verifier: include_str!("../assets/prompts/verifier.txt").to_string(),
        };
        if let Some(dir) = dir {
            for (name, slot) in [
                ("question_gen.txt", &mut set.question_gen),
                ("incremental.txt", &mut set.incremental),
                ("verifier.txt", &mut set.verifier),
            ] {
                let path = dir.join(name);
                if path.exists() {
                    *slot = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                }
            }
        }
        Ok(set)
    }
}

fn numbered_facts(facts: &[String]) -> String {
    facts
        .iter()
        .enumerate()
        .map(|(i, f)| format!("{}. {f}", i + 1))
        .collect::<Vec<_>>()
        .join("\n")
}

pub struct HttpBackend {
    config: EndpointConfig,
    prompts: PromptSet,
    client: reqwest::blocking::Client,
    token: Option<String>,
    binary_fallback: bool,
    /// Cells where neither yes nor no appeared among the top tokens.
    pub indeterminate_answers: AtomicU64,
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Debug, Deserialize)]
struct Choice {
    message: Message,
    #[serde(default)]
    logprobs: Option<Logprobs>,
}

#[derive(Debug, Deserialize)]
struct Message {
    #[serde(default)]
    content: String,
}

#[derive(Debug, Deserialize)]
struct Logprobs {
    #[serde(default)]
    content: Vec<TokenLogprob>,
}

#[derive(Debug, Deserialize)]
struct TokenLogprob {
    #[serde(default)]
    top_logprobs: Vec<TopToken>,
}

#[derive(Debug, Deserialize)]
struct TopToken {
    token: String,
    logprob: f64,
}

impl HttpBackend {
    pub fn new(
        config: EndpointConfig,
        prompts: PromptSet,
        binary_fallback: bool,
    ) -> Result<HttpBackend, CliError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_secs))
            .build()
            .map_err(|e| CliError::Other(format!("http client: {e}")))?;
        let token = std::env::var(&config.auth_token_env).ok();
        Ok(HttpBackend {
            config,
            prompts,
            client,
            token,
            binary_fallback,
            indeterminate_answers: AtomicU64::new(0),
        })
    }

    fn chat(&self, prompt: &str, want_logprobs: bool, max_tokens: u32) -> Result<ChatResponse, BackendError> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let mut body = json!({
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": max_tokens,
        });
        if want_logprobs {
            body["logprobs"] = json!(true);
            body["top_logprobs"] = json!(20);
        }
        let mut last = String::from("no attempts made");
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                // Exponential backoff with up to 25% jitter.
                let base = 0.5 * (1u64 << (attempt - 1).min(6)) as f64;
                let jitter = (std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.subsec_nanos())
                    .unwrap_or(0) as f64
                    / u32::MAX as f64)
                    * 0.25
                    * base;
                std::thread::sleep(Duration::from_secs_f64(base + jitter));
            }
            let mut request = self.client.post(&url).json(&body);
            if let Some(token) = &self.token {
                request = request.bearer_auth(token);
            }
            match request.send() {
                Ok(response) => {
                    let status = response.status();
                    if status.is_success() {
                        let text = response.text().map_err(|e| {
                            BackendError::Transport(format!("reading body: {e}"))
                        })?;
                        return serde_json::from_str(&text).map_err(|_| {
                            BackendError::Unparseable { raw: truncate(&text) }
                        });
                    }
                    // Retry throttling and server errors; anything else is
                    // a hard failure.
                    if status.as_u16() == 429 || status.is_server_error() {
                        last = format!("status {status}");
                        continue;
                    }
                    let body_text = response.text().unwrap_or_default();
                    return Err(BackendError::Transport(format!(
                        "status {status}: {}",
                        truncate(&body_text)
                    )));
                }
                Err(e) => {
                    last = e.to_string();
                    continue;
                }
            }
        }
        Err(BackendError::Transport(last))
    }
}

fn truncate(s: &str) -> String {
    let mut out: String = s.chars().take(400).collect();
    if out.len() < s.len() {
        out.push_str("...");
    }
    out
}

/// Extracts the first JSON array of strings from a completion, tolerating
/// prose around it.
pub fn parse_string_array(text: &str) -> Option<Vec<String>> {
    let start = text.find('[')?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (offset, ch) in text[start..].char_indices() {
        if in_string {
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_string = false;
            }
            continue;
        }
        match ch {
            '"' => in_string = true,
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth == 0 {
                    let candidate = &text[start..start + offset + 1];
                    return serde_json::from_str::<Vec<String>>(candidate).ok();
                }
            }
            _ => {}
        }
    }
    None
}

/// Lowercased token with surrounding whitespace and punctuation stripped;
/// the yes/no match is case-insensitive per the verifier contract.
fn normalize_answer_token(token: &str) -> String {
    token
        .trim()
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Probability mass on yes renormalized against no over the first answer
/// token's top log-probabilities. `None` when neither token appears.
pub fn yes_probability_from_top(tokens: &[(String, f64)]) -> Option<f64> {
    let mut yes_mass = 0.0f64;
    let mut no_mass = 0.0f64;
    for (token, logprob) in tokens {
        match normalize_answer_token(token).as_str() {
            "yes" => yes_mass += logprob.exp(),
            "no" => no_mass += logprob.exp(),
            _ => {}
        }
    }
    if yes_mass == 0.0 && no_mass == 0.0 {
        return None;
    }
    // Reuse the stable two-token softmax on the accumulated masses.
    Some(p_yes_from_logprobs(
        yes_mass.max(1e-300).ln(),
        no_mass.max(1e-300).ln(),
    ))
}

impl LanguageBackend for HttpBackend {
    fn generate_questions(
        &self,
        facts: &[String],
        issue: &str,
        k: usize,
    ) -> Result<Vec<String>, BackendError> {
        let prompt = self
            .prompts
            .question_gen
            .replace("{facts}", &numbered_facts(facts))
            .replace("{issue}", issue)
            .replace("{k}", &k.to_string());
        let response = self.chat(&prompt, false, 1024)?;
        let content = response
            .choices
            .first()
            .map(|c| c.message.content.clone())
            .unwrap_or_default();
        parse_string_array(&content).ok_or(BackendError::Unparseable {
            raw: truncate(&content),
        })
    }

    fn propose_issues(&self, facts: &[String], _sample: u32) -> Result<Vec<String>, BackendError> {
        let prompt = self
            .prompts
            .incremental
            .replace("{facts}", &numbered_facts(facts));
        let response = self.chat(&prompt, false, 1024)?;
        let content = response
            .choices
            .first()
            .map(|c| c.message.content.clone())
            .unwrap_or_default();
        parse_string_array(&content).ok_or(BackendError::Unparseable {
            raw: truncate(&content),
        })
    }

    fn answer_probability(
        &self,
        facts: &[String],
        issue: &str,
        question: &str,
    ) -> Result<f64, BackendError> {
        let prompt = self
            .prompts
            .verifier
            .replace("{facts}", &numbered_facts(facts))
            .replace("{issue}", issue)
            .replace("{question}", question);
        let response = self.chat(&prompt, true, 4)?;
        let Some(choice) = response.choices.first() else {
            return Err(BackendError::Unparseable {
                raw: String::from("(no choices)"),
            });
        };
        let top = choice
            .logprobs
            .as_ref()
            .and_then(|lp| lp.content.first())
            .map(|t| {
                t.top_logprobs
                    .iter()
                    .map(|tt| (tt.token.clone(), tt.logprob))
                    .collect::<Vec<_>>()
            });
        match top {
            Some(tokens) if !tokens.is_empty() => match yes_probability_from_top(&tokens) {
                Some(p) => Ok(p),
                None => {
                    self.indeterminate_answers.fetch_add(1, Ordering::Relaxed);
                    Ok(0.5)
                }
            },
            _ => {
                if self.binary_fallback {
                    match normalize_answer_token(choice.message.content.trim()).as_str() {
                        s if s.starts_with("yes") => Ok(0.9),
                        s if s.starts_with("no") => Ok(0.1),
                        _ => {
                            self.indeterminate_answers.fetch_add(1, Ordering::Relaxed);
                            Ok(0.5)
                        }
                    }
                } else {
                    Err(BackendError::MissingLogprobs)
                }
            }
        }
    }
}
