//! Generic chat-completion client used by `mbl gen`.
//!
//! The endpoint is described by a small JSON config; the auth token is
//! read from the environment variable the config names and is used only
//! in the request header. It is never printed, logged, or echoed into
//! errors. Tests run against recorded fixtures; live calls are opt-in.

use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable that must be set to "1" before the client will
/// touch the network.
pub const LIVE_MODE_VAR: &str = "MBL_LIVE_MODEL";

const PLACEHOLDER: &str = "{{description}}";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEndpointConfig {
    /// Full URL of the chat-completions route.
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub token_env: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl ModelEndpointConfig {
    pub fn validate(&self) -> Result<(), ClientError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(ClientError::Config(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if self.base_url.is_empty() || self.model.is_empty() || self.token_env.is_empty() {
            return Err(ClientError::Config(
                "base_url, model, and token_env must all be set".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("endpoint config: {0}")]
    Config(String),
    #[error("prompt template has no {PLACEHOLDER} placeholder")]
    BadTemplate,
    #[error("auth token variable {0} is not set")]
    MissingToken(String),
    #[error("live mode disabled; set {LIVE_MODE_VAR}=1 or pass --offline fixtures")]
    LiveDisabled,
    #[error("no recorded fixture for this description")]
    NoFixture,
    #[error("transport: {0}")]
    Transport(String),
    #[error("endpoint returned {status}{}", .retry_after.as_ref().map(|s| format!(" (retry after {s})")).unwrap_or_default())]
    Http {
        status: u16,
        retry_after: Option<String>,
    },
    #[error("response had no generated text")]
    EmptyResponse,
}

/// Substitutes the description into the prompt template.
pub fn build_prompt(template: &str, description: &str) -> Result<String, ClientError> {
    if !template.contains(PLACEHOLDER) {
        return Err(ClientError::BadTemplate);
    }
    Ok(template.replace(PLACEHOLDER, description))
}

/// Request body for the chat-completions call. A temperature override
/// replaces the configured value verbatim.
pub fn build_payload(
    cfg: &ModelEndpointConfig,
    prompt: &str,
    temperature_override: Option<f64>,
) -> serde_json::Value {
    serde_json::json!({
        "model": cfg.model,
        "temperature": temperature_override.unwrap_or(cfg.temperature),
        "max_tokens": cfg.max_output_tokens,
        "messages": [{"role": "user", "content": prompt}],
    })
}

/// Pulls the generated text out of the common response shapes.
pub fn extract_text(response: &serde_json::Value) -> Option<String> {
    let first = response.get("choices")?.get(0)?;
    if let Some(content) = first
        .get("message")
        .and_then(|m| m.get("content"))
        .and_then(|c| c.as_str())
    {
        return Some(content.to_string());
    }
    first
        .get("text")
        .and_then(|t| t.as_str())
        .map(str::to_string)
}

/// Recorded description → code pairs for hermetic runs.
#[derive(Debug, Default)]
pub struct Fixtures {
    by_description: HashMap<String, String>,
}

impl Fixtures {
    pub fn parse(jsonl: &str) -> Result<Fixtures, ClientError> {
        #[derive(Deserialize)]
        struct Row {
            description: String,
            code: String,
        }
        let mut by_description = HashMap::new();
        for (i, line) in jsonl.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Row = serde_json::from_str(line).map_err(|e| {
                ClientError::Config(format!("fixture line {}: {e}", i + 1))
            })?;
            by_description.insert(row.description, row.code);
        }
        Ok(Fixtures { by_description })
    }

    pub fn lookup(&self, description: &str) -> Result<String, ClientError> {
        self.by_description
            .get(description)
            .cloned()
            .ok_or(ClientError::NoFixture)
    }
}

fn live_enabled() -> bool {
    std::env::var(LIVE_MODE_VAR).is_ok_and(|v| v == "1")
}

/// Sends one generation request. Requires live mode to be switched on
/// and the token variable to be set; returns the model's raw text.
pub fn generate_live(
    cfg: &ModelEndpointConfig,
    prompt: &str,
    temperature_override: Option<f64>,
    timeout: Duration,
) -> Result<String, ClientError> {
    cfg.validate()?;
    if let Some(t) = temperature_override {
        if !(0.0..=2.0).contains(&t) {
            return Err(ClientError::Config(format!(
                "temperature override {t} outside [0, 2]"
            )));
        }
    }
    if !live_enabled() {
        return Err(ClientError::LiveDisabled);
    }
    let token = std::env::var(&cfg.token_env)
        .map_err(|_| ClientError::MissingToken(cfg.token_env.clone()))?;

    let client = reqwest::blocking::Client::builder()
        .timeout(timeout)
        .build()
        .map_err(|e| ClientError::Transport(e.to_string()))?;
    let response = client
        .post(&cfg.base_url)
        .bearer_auth(token)
        .json(&build_payload(cfg, prompt, temperature_override))
        .send()
        .map_err(|e| ClientError::Transport(e.without_url().to_string()))?;

    let status = response.status();
    if !status.is_success() {
        let retry_after = response
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .map(str::to_string);
        return Err(ClientError::Http {
            status: status.as_u16(),
            retry_after,
        });
    }
    let body: serde_json::Value = response
        .json()
        .map_err(|e| ClientError::Transport(e.without_url().to_string()))?;
    extract_text(&body).ok_or(ClientError::EmptyResponse)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ModelEndpointConfig {
        ModelEndpointConfig {
            base_url: "https://example.invalid/v1/chat/completions".into(),
            model: "test-model".into(),
            token_env: "MBL_TEST_TOKEN".into(),
            temperature: 0.2,
            max_output_tokens: 2048,
        }
    }

    #[test]
    fn temperature_bounds_are_enforced() {
        assert!(cfg().validate().is_ok());
        let mut bad = cfg();
        bad.temperature = 2.5;
        assert!(bad.validate().is_err());
        bad.temperature = -0.1;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn prompt_template_substitutes_the_description() {
        let prompt = build_prompt("Task.\n\nInput: {{description}}\n", "two modules").unwrap();
        assert_eq!(prompt, "Task.\n\nInput: two modules\n");
        assert!(matches!(
            build_prompt("no placeholder", "x"),
            Err(ClientError::BadTemplate)
        ));
    }

    #[test]
    fn payload_carries_the_override_temperature() {
        let payload = build_payload(&cfg(), "hello", None);
        assert_eq!(payload["temperature"], serde_json::json!(0.2));
        assert_eq!(payload["model"], "test-model");
        assert_eq!(payload["max_tokens"], 2048);
        assert_eq!(payload["messages"][0]["content"], "hello");

        let overridden = build_payload(&cfg(), "hello", Some(1.5));
        assert_eq!(overridden["temperature"], serde_json::json!(1.5));
    }

    #[test]
    fn response_text_is_found_in_both_shapes() {
        let chat = serde_json::json!({
            "choices": [{"message": {"role": "assistant", "content": "code here"}}]
        });
        assert_eq!(extract_text(&chat).as_deref(), Some("code here"));
        let completion = serde_json::json!({"choices": [{"text": "plain"}]});
        assert_eq!(extract_text(&completion).as_deref(), Some("plain"));
        assert_eq!(extract_text(&serde_json::json!({})), None);
    }

    #[test]
    fn fixtures_replay_by_exact_description() {
        let fx = Fixtures::parse(
            "{\"description\": \"a\", \"code\": \"A;\"}\n\n{\"description\": \"b\", \"code\": \"B;\"}\n",
        )
        .unwrap();
        assert_eq!(fx.lookup("a").unwrap(), "A;");
        assert_eq!(fx.lookup("b").unwrap(), "B;");
        assert!(matches!(fx.lookup("c"), Err(ClientError::NoFixture)));
    }

    #[test]
    fn live_mode_is_off_by_default() {
        // the env var is not set in the test environment
        let err = generate_live(&cfg(), "p", None, Duration::from_secs(1)).unwrap_err();
        assert!(matches!(err, ClientError::LiveDisabled));
    }
}
