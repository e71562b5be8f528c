//! Asking a chat model the generated questions and grading its answers.

mod backend;
mod filter;
mod grade;
mod kappa;
mod prompt;
mod session;
mod transcript;

pub use backend::{BackendError, ChatBackend, ChatMessage, HttpBackend, ReplayBackend, SamplingParams, TOKEN_ENV};
pub use filter::{filter_candidate, FilterOutcome, RejectReason};
pub use grade::{grade, Grading, Verdict};
pub use kappa::{kappa, KappaError};
pub use prompt::{build_first_prompt, build_follow_up, PromptError, INSTRUCTION, PROMPT_TEMPLATE_VERSION, SYSTEM_PROMPT};
pub use session::{ask_all, AnswerRecord, AskError, ChatSession, RawAnswer, RetryPolicy};
pub use transcript::{read_transcript, JsonlTranscript, Role, TranscriptRecord, TranscriptSink};
