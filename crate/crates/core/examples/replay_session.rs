//! Run a chat session against a scripted model, then replay it from the transcript.
//!
//! cargo run --example replay_session

use qlc::analysis::resolve_scopes;
use qlc::corpus;
use qlc::harness::{
    ask_all, AnswerRecord, BackendError, ChatBackend, ChatMessage, ChatSession, ReplayBackend, RetryPolicy, SamplingParams,
    TranscriptRecord,
};
use qlc::qlcgen::generate;
use qlc::tracer::DEFAULT_STEP_LIMIT;

/// Always picks option a.
struct AlwaysA;

impl ChatBackend for AlwaysA {
    fn complete(&mut self, _: &str, history: &[ChatMessage], _: &SamplingParams) -> Result<String, BackendError> {
        Ok(format!("After {} messages I choose a.", history.len()))
    }
}

fn main() {
    let task = corpus::task("T4").unwrap();
    let program = corpus::program("T4_b").unwrap();
    let ast = program.parse().unwrap();
    let traces = task.traces(&ast, DEFAULT_STEP_LIMIT);
    let questions = generate(&program.id, &ast, &resolve_scopes(&ast), &traces, 0);

    let session_id = ChatSession::id_for("always-a", &program.id);
    let mut session = ChatSession::new(&session_id, "always-a", SamplingParams::default());
    let mut transcript: Vec<TranscriptRecord> = Vec::new();
    let answers = ask_all(&mut session, &mut AlwaysA, &task, &program, &questions, &mut transcript, &RetryPolicy::default()).unwrap();
    println!("first prompt:\n{}\n", session.history()[1].content);
    for (raw, q) in answers.iter().zip(&questions) {
        let graded = AnswerRecord::from_raw(raw, q).unwrap();
        println!("{:<22} {:?}", q.qlc_type.name(), graded.verdict);
    }

    let mut replay = ReplayBackend::for_session(&transcript, &session_id);
    let mut again = ChatSession::new(&session_id, "always-a", SamplingParams::default());
    let replayed = ask_all(&mut again, &mut replay, &task, &program, &questions, &mut Vec::new(), &RetryPolicy::default()).unwrap();
    println!("\n{} messages recorded; replay identical: {}", transcript.len(), replayed == answers);
}
