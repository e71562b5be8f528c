use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::backend::{BackendError, ChatBackend, ChatMessage, SamplingParams};
use super::grade::{grade, Verdict};
use super::prompt::{build_first_prompt, build_follow_up, PromptError, PROMPT_TEMPLATE_VERSION, SYSTEM_PROMPT};
use super::transcript::{Role, TranscriptRecord, TranscriptSink};
use crate::parser::SourceProgram;
use crate::qlcgen::{Qlc, TaskBundle, SCHEMA_VERSION};

/// One conversation about one program. History only grows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatSession {
    pub session_id: String,
    pub model_name: String,
    pub params: SamplingParams,
    history: Vec<ChatMessage>,
}

impl ChatSession {
    pub fn new(session_id: impl Into<String>, model_name: impl Into<String>, params: SamplingParams) -> Self {
        Self {
            session_id: session_id.into(),
            model_name: model_name.into(),
            params,
            history: Vec::new(),
        }
    }

    /// Conventional id for the session about `program_id`.
    pub fn id_for(model_name: &str, program_id: &str) -> String {
        format!("{model_name}/{program_id}")
    }

    pub fn history(&self) -> &[ChatMessage] {
        &self.history
    }

    fn push(&mut self, role: Role, content: String) {
        self.history.push(ChatMessage { role, content });
    }
}

#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            base_delay: Duration::from_secs(1),
            max_delay: Duration::from_secs(60),
        }
    }
}

impl RetryPolicy {
    /// Pause before attempt `attempt` (1-based; the first attempt never waits).
    pub fn delay(&self, attempt: u32) -> Duration {
        if attempt <= 1 {
            return Duration::ZERO;
        }
        self.base_delay
            .saturating_mul(1 << (attempt - 2).min(20))
            .min(self.max_delay)
    }
}

/// The model's reply to one question, or why there is none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawAnswer {
    pub qlc_id: String,
    pub session_id: String,
    pub model_name: String,
    pub raw_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing_reason: Option<String>,
}

#[derive(Debug, Error)]
pub enum AskError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("could not persist transcript: {0}")]
    Persist(#[from] std::io::Error),
}

fn with_retry(
    backend: &mut dyn ChatBackend,
    session: &ChatSession,
    retry: &RetryPolicy,
) -> Result<String, BackendError> {
    let mut attempt = 1;
    loop {
        std::thread::sleep(retry.delay(attempt));
        match backend.complete(&session.model_name, &session.history, &session.params) {
            Err(e) if e.is_transient() && attempt < retry.max_attempts => attempt += 1,
            other => return other,
        }
    }
}

/// Ask every question in order within one session.
///
/// Each prompt is persisted before it is sent and each reply as soon as it
/// arrives. A failure that survives the retries, or an overflowing context,
/// ends the session: that answer and all later ones are missing.
pub fn ask_all(
    session: &mut ChatSession,
    backend: &mut dyn ChatBackend,
    task: &TaskBundle,
    program: &SourceProgram,
    qlcs: &[Qlc],
    sink: &mut dyn TranscriptSink,
    retry: &RetryPolicy,
) -> Result<Vec<RawAnswer>, AskError> {
    let mut record = |session: &ChatSession, role: Role, text: &str, qlc_id: Option<&str>| {
        let mut r = TranscriptRecord::new(&session.session_id, role, text);
        r.qlc_id = qlc_id.map(str::to_string);
        r.model = Some(session.model_name.clone());
        r.prompt_version = Some(PROMPT_TEMPLATE_VERSION.to_string());
        sink.append(&r)
    };
    if session.history.is_empty() {
        session.push(Role::System, SYSTEM_PROMPT.to_string());
        record(session, Role::System, SYSTEM_PROMPT, None)?;
    }
    let answer = |qlc: &Qlc, session: &ChatSession, raw_text: Option<String>, missing_reason: Option<String>| RawAnswer {
        qlc_id: qlc.id.clone(),
        session_id: session.session_id.clone(),
        model_name: session.model_name.clone(),
        raw_text,
        missing_reason,
    };
    let mut out = Vec::with_capacity(qlcs.len());
    let mut stopped: Option<String> = None;
    for (i, qlc) in qlcs.iter().enumerate() {
        if let Some(reason) = &stopped {
            out.push(answer(qlc, session, None, Some(format!("session ended earlier: {reason}"))));
            continue;
        }
        let prompt = if i == 0 && session.history.len() == 1 {
            build_first_prompt(task, program, qlc)?
        } else {
            build_follow_up(qlc)
        };
        session.push(Role::User, prompt.clone());
        record(session, Role::User, &prompt, Some(&qlc.id))?;
        match with_retry(backend, session, retry) {
            Ok(text) => {
                session.push(Role::Assistant, text.clone());
                record(session, Role::Assistant, &text, Some(&qlc.id))?;
                out.push(answer(qlc, session, Some(text), None));
            }
            Err(e) => {
                out.push(answer(qlc, session, None, Some(e.to_string())));
                stopped = Some(e.to_string());
            }
        }
    }
    Ok(out)
}

/// A graded answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub schema_version: u32,
    pub answer_id: String,
    pub qlc_id: String,
    pub model_name: String,
    pub session_id: String,
    pub raw_text: String,
    pub extracted_letters: std::collections::BTreeSet<char>,
    pub verdict: Verdict,
    pub needs_review: bool,
}

impl AnswerRecord {
    pub fn answer_id(model_name: &str, qlc_id: &str) -> String {
        format!("{model_name}/{qlc_id}")
    }

    /// Grade a received answer; missing answers yield `None`.
    pub fn from_raw(raw: &RawAnswer, qlc: &Qlc) -> Option<AnswerRecord> {
        let text = raw.raw_text.as_ref()?;
        let g = grade(text, qlc);
        Some(AnswerRecord {
            schema_version: SCHEMA_VERSION,
            answer_id: Self::answer_id(&raw.model_name, &qlc.id),
            qlc_id: qlc.id.clone(),
            model_name: raw.model_name.clone(),
            session_id: raw.session_id.clone(),
            raw_text: text.clone(),
            extracted_letters: g.extracted_letters,
            verdict: g.verdict,
            needs_review: g.needs_review,
        })
    }
}
