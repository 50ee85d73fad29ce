//! JSON-over-HTTP backends: the Gemini `generateContent` API and any
//! OpenAI-compatible `chat/completions` endpoint.
//!
//! Credentials come from an environment variable named per backend and
//! are never read from config files.

use std::time::Duration;

use base64::Engine;
use mcqa_core::ModelRequest;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::client::{Backend, BackendFailure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provider {
    Gemini,
    Openai,
}

impl Provider {
    pub fn default_base_url(self) -> &'static str {
        match self {
            Provider::Gemini => "https://generativelanguage.googleapis.com",
            Provider::Openai => "https://api.openai.com/v1",
        }
    }

    pub fn default_key_env(self) -> &'static str {
        match self {
            Provider::Gemini => "GEMINI_API_KEY",
            Provider::Openai => "OPENAI_API_KEY",
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("environment variable {0} is not set")]
pub struct MissingCredential(pub String);

pub struct HttpBackend {
    provider: Provider,
    base_url: String,
    api_key: String,
    agent: ureq::Agent,
}

/// Best-effort MIME type from magic bytes.
pub fn sniff_mime(bytes: &[u8]) -> &'static str {
    match bytes {
        [0x89, b'P', b'N', b'G', ..] => "image/png",
        [0xFF, 0xD8, ..] => "image/jpeg",
        [b'G', b'I', b'F', b'8', ..] => "image/gif",
        [b'R', b'I', b'F', b'F', _, _, _, _, b'W', b'E', b'B', b'P', ..] => "image/webp",
        _ => "image/png",
    }
}

/// 429 and 5xx are worth retrying; 401/403 are credential problems.
pub fn classify_status(status: u16, body: &str) -> BackendFailure {
    let snippet: String = body.chars().take(300).collect();
    let msg = format!("HTTP {status}: {snippet}");
    match status {
        429 | 500..=599 => BackendFailure::Transient(msg),
        401 | 403 => BackendFailure::Auth(msg),
        _ => BackendFailure::Fatal(msg),
    }
}

impl HttpBackend {
    pub fn new(provider: Provider, base_url: &str, api_key: String, timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        Self {
            provider,
            base_url: base_url.trim_end_matches('/').into(),
            api_key,
            agent: ureq::Agent::new_with_config(config),
        }
    }

    pub fn from_env(
        provider: Provider,
        base_url: &str,
        key_env: &str,
        timeout: Duration,
    ) -> Result<Self, MissingCredential> {
        let key = std::env::var(key_env)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| MissingCredential(key_env.into()))?;
        Ok(Self::new(provider, base_url, key, timeout))
    }

    fn body(&self, req: &ModelRequest) -> (String, Value) {
        let image = req.image_bytes.as_deref().map(|b| {
            (
                sniff_mime(b),
                base64::engine::general_purpose::STANDARD.encode(b),
            )
        });
        match self.provider {
            Provider::Gemini => {
                let mut parts = vec![json!({ "text": req.prompt_text })];
                if let Some((mime, data)) = image {
                    parts.push(json!({ "inline_data": { "mime_type": mime, "data": data } }));
                }
                let url = format!(
                    "{}/v1beta/models/{}:generateContent",
                    self.base_url, req.model_id
                );
                let body = json!({
                    "contents": [{ "role": "user", "parts": parts }],
                    "generationConfig": {
                        "temperature": req.temperature.as_f64(),
                        "maxOutputTokens": req.max_output,
                    }
                });
                (url, body)
            }
            Provider::Openai => {
                let mut content = vec![json!({ "type": "text", "text": req.prompt_text })];
                if let Some((mime, data)) = image {
                    content.push(json!({
                        "type": "image_url",
                        "image_url": { "url": format!("data:{mime};base64,{data}") }
                    }));
                }
                let url = format!("{}/chat/completions", self.base_url);
                let body = json!({
                    "model": req.model_id,
                    "messages": [{ "role": "user", "content": content }],
                    "temperature": req.temperature.as_f64(),
                    "max_tokens": req.max_output,
                });
                (url, body)
            }
        }
    }

    fn extract_text(&self, v: &Value) -> Option<String> {
        match self.provider {
            Provider::Gemini => {
                let parts = v.pointer("/candidates/0/content/parts")?.as_array()?;
                Some(
                    parts
                        .iter()
                        .filter_map(|p| p.get("text")?.as_str())
                        .collect(),
                )
            }
            Provider::Openai => v
                .pointer("/choices/0/message/content")?
                .as_str()
                .map(String::from),
        }
    }
}

fn transport_failure(e: ureq::Error) -> BackendFailure {
    match e {
        ureq::Error::Timeout(_)
        | ureq::Error::Io(_)
        | ureq::Error::ConnectionFailed
        | ureq::Error::HostNotFound => BackendFailure::Transient(e.to_string()),
        other => BackendFailure::Fatal(other.to_string()),
    }
}

impl Backend for HttpBackend {
    fn generate(&self, req: &ModelRequest) -> Result<String, BackendFailure> {
        let (url, body) = self.body(req);
        let request = self
            .agent
            .post(&url)
            .header("content-type", "application/json");
        let request = match self.provider {
            Provider::Gemini => request.header("x-goog-api-key", &self.api_key),
            Provider::Openai => {
                request.header("authorization", &format!("Bearer {}", self.api_key))
            }
        };
        let mut resp = request.send_json(&body).map_err(transport_failure)?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(transport_failure)?;
        if !(200..300).contains(&status) {
            return Err(classify_status(status, &text));
        }
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| BackendFailure::Fatal(format!("bad JSON response: {e}")))?;
        self.extract_text(&v).ok_or_else(|| {
            BackendFailure::Fatal(format!(
                "response has no text: {}",
                text.chars().take(300).collect::<String>()
            ))
        })
    }
}
