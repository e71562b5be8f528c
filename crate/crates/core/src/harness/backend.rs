use std::collections::VecDeque;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::transcript::{Role, TranscriptRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub temperature: f64,
    pub top_p: f64,
    pub presence_penalty: f64,
    pub frequency_penalty: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            temperature: 1.0,
            top_p: 1.0,
            presence_penalty: 0.0,
            frequency_penalty: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("context length exceeded: {0}")]
    ContextLength(String),
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("no recorded answer left for session {0}")]
    ReplayExhausted(String),
}

impl BackendError {
    /// Worth another attempt after a pause.
    pub fn is_transient(&self) -> bool {
        match self {
            BackendError::Transport(_) => true,
            BackendError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

/// Something that continues a conversation with one assistant message.
pub trait ChatBackend {
    fn complete(&mut self, model: &str, messages: &[ChatMessage], params: &SamplingParams) -> Result<String, BackendError>;
}

/// Environment variable holding the bearer token for [`HttpBackend`].
pub const TOKEN_ENV: &str = "QLC_API_KEY";

/// Chat-completions endpoint over HTTP with JSON bodies.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    url: String,
    token: Option<String>,
}

impl HttpBackend {
    pub fn new(base_url: &str, token: Option<String>, timeout: Duration) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok(Self {
            client,
            url: format!("{}/chat/completions", base_url.trim_end_matches('/')),
            token,
        })
    }

    /// Token read from [`TOKEN_ENV`], if set.
    pub fn from_env(base_url: &str, timeout: Duration) -> Result<Self, BackendError> {
        Self::new(base_url, std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty()), timeout)
    }
}

fn request_body(model: &str, messages: &[ChatMessage], params: &SamplingParams) -> Value {
    json!({
        "model": model,
        "messages": messages.iter().map(|m| json!({"role": m.role.as_str(), "content": m.content})).collect::<Vec<_>>(),
        "temperature": params.temperature,
        "top_p": params.top_p,
        "presence_penalty": params.presence_penalty,
        "frequency_penalty": params.frequency_penalty,
    })
}

fn is_context_error(body: &str) -> bool {
    body.contains("context_length_exceeded") || body.contains("maximum context length")
}

impl ChatBackend for HttpBackend {
    fn complete(&mut self, model: &str, messages: &[ChatMessage], params: &SamplingParams) -> Result<String, BackendError> {
        let mut req = self.client.post(&self.url).json(&request_body(model, messages, params));
        if let Some(t) = &self.token {
            req = req.bearer_auth(t);
        }
        let resp = req.send().map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp.text().map_err(|e| BackendError::Transport(e.to_string()))?;
        if status != 200 {
            if status == 400 && is_context_error(&body) {
                return Err(BackendError::ContextLength(body));
            }
            return Err(BackendError::Status { status, body });
        }
        let v: Value = serde_json::from_str(&body).map_err(|e| BackendError::Malformed(e.to_string()))?;
        v["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| BackendError::Malformed("no choices[0].message.content".into()))
    }
}

/// Plays back the assistant messages of one recorded session, in order.
pub struct ReplayBackend {
    session_id: String,
    answers: VecDeque<String>,
}

impl ReplayBackend {
    pub fn for_session(records: &[TranscriptRecord], session_id: &str) -> Self {
        Self {
            session_id: session_id.to_string(),
            answers: records
                .iter()
                .filter(|r| r.session_id == session_id && r.role == Role::Assistant)
                .map(|r| r.text.clone())
                .collect(),
        }
    }
}

impl ChatBackend for ReplayBackend {
    fn complete(&mut self, _: &str, _: &[ChatMessage], _: &SamplingParams) -> Result<String, BackendError> {
        self.answers
            .pop_front()
            .ok_or_else(|| BackendError::ReplayExhausted(self.session_id.clone()))
    }
}
