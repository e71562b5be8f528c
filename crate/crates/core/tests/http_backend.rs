//! The HTTP chat backend against a local mock server.

mod support;

use std::time::Duration;

use qlc::corpus;
use qlc::harness::{
    ask_all, BackendError, ChatBackend, ChatMessage, ChatSession, HttpBackend, RetryPolicy, Role, SamplingParams, TranscriptRecord,
};
use qlc::qlcgen::generate;
use qlc::tracer::DEFAULT_STEP_LIMIT;
use support::{completion, MockServer};

fn user(text: &str) -> Vec<ChatMessage> {
    vec![ChatMessage {
        role: Role::User,
        content: text.into(),
    }]
}

fn backend(server: &MockServer, token: Option<&str>) -> HttpBackend {
    HttpBackend::new(&server.base_url, token.map(String::from), Duration::from_secs(5)).unwrap()
}

#[test]
fn sends_history_and_sampling_parameters() {
    let server = MockServer::start(|_, _| (200, completion("b. 6")));
    let params = SamplingParams {
        temperature: 0.5,
        ..SamplingParams::default()
    };
    let reply = backend(&server, Some("secret")).complete("some-model", &user("hello"), &params).unwrap();
    assert_eq!(reply, "b. 6");
    let req = &server.requests()[0];
    assert_eq!(req.path, "/v1/chat/completions");
    assert_eq!(req.header("authorization"), Some("Bearer secret"));
    assert_eq!(req.body["model"], "some-model");
    assert_eq!(req.body["messages"][0]["role"], "user");
    assert_eq!(req.body["messages"][0]["content"], "hello");
    assert_eq!(req.body["temperature"], 0.5);
    assert_eq!(req.body["top_p"], 1.0);
    assert_eq!(req.body["frequency_penalty"], 0.0);
}

#[test]
fn no_token_means_no_authorization_header() {
    let server = MockServer::start(|_, _| (200, completion("ok")));
    backend(&server, None).complete("m", &user("x"), &SamplingParams::default()).unwrap();
    assert_eq!(server.requests()[0].header("authorization"), None);
}

#[test]
fn classifies_failures() {
    let server = MockServer::start(|i, _| match i {
        0 => (400, r#"{"error":{"code":"context_length_exceeded","message":"too long"}}"#.into()),
        1 => (429, "{}".into()),
        2 => (401, "{}".into()),
        _ => (200, "{\"choices\": []}".into()),
    });
    let mut b = backend(&server, None);
    let p = SamplingParams::default();
    assert!(matches!(b.complete("m", &user("x"), &p), Err(BackendError::ContextLength(_))));
    let e = b.complete("m", &user("x"), &p).unwrap_err();
    assert!(e.is_transient(), "{e}");
    let e = b.complete("m", &user("x"), &p).unwrap_err();
    assert!(!e.is_transient(), "{e}");
    assert!(matches!(b.complete("m", &user("x"), &p), Err(BackendError::Malformed(_))));
}

#[test]
fn unreachable_server_is_a_transport_error() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1", listener.local_addr().unwrap());
    drop(listener);
    let mut b = HttpBackend::new(&url, None, Duration::from_secs(2)).unwrap();
    let e = b.complete("m", &user("x"), &SamplingParams::default()).unwrap_err();
    assert!(matches!(e, BackendError::Transport(_)), "{e}");
}

#[test]
fn session_retries_transient_errors_and_keeps_order() {
    let server = MockServer::start(|i, _| if i == 1 { (503, "{}".into()) } else { (200, completion(&format!("reply {i}"))) });
    let task = corpus::task("T4").unwrap();
    let program = corpus::program("T4_b").unwrap();
    let ast = program.parse().unwrap();
    let traces = task.traces(&ast, DEFAULT_STEP_LIMIT);
    let qlcs = generate(&program.id, &ast, &qlc::analysis::resolve_scopes(&ast), &traces, 3);
    let mut session = ChatSession::new("s", "m", SamplingParams::default());
    let mut transcript: Vec<TranscriptRecord> = Vec::new();
    let retry = RetryPolicy {
        max_attempts: 3,
        base_delay: Duration::ZERO,
        max_delay: Duration::ZERO,
    };
    let answers = ask_all(&mut session, &mut backend(&server, None), &task, &program, &qlcs[..3], &mut transcript, &retry).unwrap();
    let texts: Vec<_> = answers.iter().map(|a| a.raw_text.clone().unwrap()).collect();
    assert_eq!(texts, ["reply 0", "reply 2", "reply 3"]);
    let reqs = server.requests();
    assert_eq!(reqs.len(), 4);
    // Every request carries the whole history so far: system, then user/assistant pairs.
    assert_eq!(reqs[0].body["messages"].as_array().unwrap().len(), 2);
    assert_eq!(reqs[2].body["messages"].as_array().unwrap().len(), 4);
    assert_eq!(reqs[3].body["messages"].as_array().unwrap().len(), 6);
    assert!(reqs[0].body["messages"][1]["content"].as_str().unwrap().contains("```"));
}
