//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::sync::{Arc, Mutex};

use qlc::analysis::fingerprint;
use qlc::cli::{write_json, AnswerFile, ProgramRecord, QlcFile, WorkspaceLayout};
use qlc::corpus;
use qlc::harness::{
    ask_all, AnswerRecord, BackendError, ChatBackend, ChatMessage, ChatSession, JsonlTranscript, RetryPolicy, SamplingParams, Verdict,
};
use qlc::qlcgen::{Qlc, QlcOption, QlcType, Target, PRNG, SCHEMA_VERSION};
use qlc::tracer::{run_traced, CallSpec, Event, DEFAULT_STEP_LIMIT};
use serde::Deserialize;

#[derive(Deserialize)]
struct Reference {
    program: String,
    call: CallSpec,
    result: String,
    stdout: String,
    assignments: Vec<(String, String, usize)>,
    loop_entries: BTreeMap<String, u64>,
}

/// Compare the tracer with the recorded CPython executions.
/// Returns the number of records and a description of every mismatch.
pub fn reference_mismatches() -> (usize, Vec<String>) {
    let records: Vec<Reference> = serde_json::from_str(include_str!("../fixtures/reference_traces.json")).unwrap();
    let mut bad = Vec::new();
    for rec in &records {
        let ctx = format!("{} {}", rec.program, rec.call.render());
        let Some(program) = corpus::program(&rec.program) else {
            bad.push(format!("{ctx}: no such program"));
            continue;
        };
        let trace = match run_traced(&program.parse().unwrap(), &rec.call, DEFAULT_STEP_LIMIT) {
            Ok(t) => t,
            Err(e) => {
                bad.push(format!("{ctx}: {e}"));
                continue;
            }
        };
        if trace.result.repr() != rec.result {
            bad.push(format!("{ctx}: result {} vs {}", trace.result.repr(), rec.result));
        }
        if trace.stdout != rec.stdout {
            bad.push(format!("{ctx}: stdout {:?} vs {:?}", trace.stdout, rec.stdout));
        }
        let assigns: Vec<(String, String, usize)> = trace
            .events
            .iter()
            .filter_map(|e| match e {
                Event::Assign { name, value, line, .. } => Some((name.clone(), value.repr(), *line)),
                _ => None,
            })
            .collect();
        if assigns != rec.assignments {
            bad.push(format!("{ctx}: assignments {assigns:?} vs {:?}", rec.assignments));
        }
        let mut loops: BTreeMap<String, u64> = BTreeMap::new();
        for e in &trace.events {
            if let Event::LoopBodyEntered { header_line, .. } = e {
                *loops.entry(header_line.to_string()).or_default() += 1;
            }
        }
        if loops != rec.loop_entries {
            bad.push(format!("{ctx}: loop entries {loops:?} vs {:?}", rec.loop_entries));
        }
    }
    (records.len(), bad)
}

/// Questions per type with the correct counts of two models, chosen so that
/// the rounded per-type rates and the overall rates land on the published
/// table: 277 of 399 and 352 of 399.
pub const SYNTHETIC_COUNTS: [(QlcType, usize, usize, usize); 8] = [
    (QlcType::ParameterNames, 60, 57, 60),
    (QlcType::VariableNames, 60, 44, 59),
    (QlcType::LoopEnd, 50, 20, 36),
    (QlcType::VariableDeclaration, 60, 38, 56),
    (QlcType::VariableRole, 47, 39, 43),
    (QlcType::LinePurpose, 16, 14, 16),
    (QlcType::LoopCount, 50, 34, 43),
    (QlcType::VariableTrace, 56, 31, 39),
];

pub const MODEL_A: &str = "model-a";
pub const MODEL_B: &str = "model-b";

fn synthetic_qlc(id: String, program_id: &str, t: QlcType) -> Qlc {
    Qlc {
        schema_version: SCHEMA_VERSION,
        id,
        program_id: program_id.into(),
        qlc_type: t,
        block_model: t.block_model(),
        select_mode: t.select_mode(),
        stem: "stem".into(),
        options: ('a'..='d').map(|letter| QlcOption { letter, label: letter.to_string() }).collect(),
        correct_letters: BTreeSet::from(['a']),
        target: Target::default(),
        seed: 0,
        prng: PRNG.into(),
    }
}

fn synthetic_answer(model: &str, q: &Qlc, correct: bool) -> AnswerRecord {
    let letter = if correct { 'a' } else { 'b' };
    AnswerRecord {
        schema_version: SCHEMA_VERSION,
        answer_id: AnswerRecord::answer_id(model, &q.id),
        qlc_id: q.id.clone(),
        model_name: model.into(),
        session_id: format!("{model}/{}", q.program_id),
        raw_text: format!("{letter}."),
        extracted_letters: BTreeSet::from([letter]),
        verdict: if correct { Verdict::Correct } else { Verdict::Incorrect },
        needs_review: false,
    }
}

/// The graded dataset behind [`SYNTHETIC_COUNTS`]: questions spread over one program per task.
pub fn synthetic_dataset() -> (Vec<Qlc>, Vec<AnswerRecord>) {
    let programs: Vec<String> = (1..=6).map(|t| format!("T{t}_a")).collect();
    let mut qlcs = Vec::new();
    let mut answers = Vec::new();
    for (t, n, ca, cb) in SYNTHETIC_COUNTS {
        for i in 0..n {
            let pid = &programs[i % programs.len()];
            let q = synthetic_qlc(format!("{pid}-{}-{i}", t.name()), pid, t);
            answers.push(synthetic_answer(MODEL_A, &q, i < ca));
            answers.push(synthetic_answer(MODEL_B, &q, i < cb));
            qlcs.push(q);
        }
    }
    (qlcs, answers)
}

/// A workspace holding the [`synthetic_dataset`] as if it had been graded.
pub fn synthetic_workspace(root: &Path) -> WorkspaceLayout {
    let ws = WorkspaceLayout::new(root);
    ws.create().unwrap();
    let (qlcs, answers) = synthetic_dataset();
    for t in 1..=6 {
        let p = corpus::program(&format!("T{t}_a")).unwrap();
        let fp = fingerprint(&p.parse().unwrap());
        let rec = ProgramRecord {
            schema_version: SCHEMA_VERSION,
            program: p.clone(),
            fingerprint: fp,
            review: None,
        };
        write_json(&ws.program_path(&p.id), &rec).unwrap();
        let questions: Vec<Qlc> = qlcs.iter().filter(|q| q.program_id == p.id).cloned().collect();
        let file = QlcFile {
            schema_version: SCHEMA_VERSION,
            program_id: p.id.clone(),
            task_id: p.task_id.clone(),
            seed: 0,
            questions,
        };
        write_json(&ws.qlc_path(&p.id), &file).unwrap();
        for model in [MODEL_A, MODEL_B] {
            let mine: Vec<AnswerRecord> = answers
                .iter()
                .filter(|a| a.model_name == model && file.questions.iter().any(|q| q.id == a.qlc_id))
                .cloned()
                .collect();
            write_json(&ws.answer_path(model, &p.id), &AnswerFile::new(model, &p.id, mine)).unwrap();
        }
    }
    ws
}

/// Backend that answers with a fixed rotation of replies.
pub struct Rotating(pub Vec<&'static str>, pub usize);

impl ChatBackend for Rotating {
    fn complete(&mut self, _: &str, _: &[ChatMessage], _: &SamplingParams) -> Result<String, BackendError> {
        let r = self.0[self.1 % self.0.len()].to_string();
        self.1 += 1;
        Ok(r)
    }
}

/// Record a full session per generated program of `ws` into its transcripts.
pub fn record_sessions(ws: &WorkspaceLayout, model: &str, backend: &mut dyn ChatBackend) {
    let programs: BTreeMap<String, _> = ws.programs().unwrap().into_iter().map(|r| (r.program.id.clone(), r.program)).collect();
    for f in ws.qlc_files().unwrap() {
        let task = ws.task(&f.task_id).unwrap();
        let path = ws.transcript_path(model, &f.program_id);
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        let mut sink = JsonlTranscript::open(&path).unwrap();
        let mut session = ChatSession::new(ChatSession::id_for(model, &f.program_id), model, SamplingParams::default());
        let fast = RetryPolicy {
            max_attempts: 1,
            ..RetryPolicy::default()
        };
        ask_all(&mut session, backend, &task, &programs[&f.program_id], &f.questions, &mut sink, &fast).unwrap();
    }
}

/// One request seen by [`MockServer`].
#[derive(Debug, Clone)]
pub struct SeenRequest {
    pub path: String,
    pub headers: Vec<(String, String)>,
    pub body: serde_json::Value,
}

impl SeenRequest {
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.iter().find(|(k, _)| k.eq_ignore_ascii_case(name)).map(|(_, v)| v.as_str())
    }
}

type Responder = dyn Fn(usize, &SeenRequest) -> (u16, String) + Send + Sync;

/// Minimal HTTP/1.1 server on localhost; the responder picks a status and
/// body from the zero-based request index.
pub struct MockServer {
    pub base_url: String,
    pub seen: Arc<Mutex<Vec<SeenRequest>>>,
}

impl MockServer {
    pub fn start(responder: impl Fn(usize, &SeenRequest) -> (u16, String) + Send + Sync + 'static) -> MockServer {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let seen: Arc<Mutex<Vec<SeenRequest>>> = Arc::default();
        let responder: Arc<Responder> = Arc::new(responder);
        let log = seen.clone();
        std::thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { continue };
                let log = log.clone();
                let responder = responder.clone();
                std::thread::spawn(move || {
                    let mut reader = BufReader::new(stream.try_clone().unwrap());
                    let mut writer = stream;
                    loop {
                        let mut first = String::new();
                        if reader.read_line(&mut first).unwrap_or(0) == 0 {
                            return;
                        }
                        let path = first.split_whitespace().nth(1).unwrap_or("").to_string();
                        let mut headers = Vec::new();
                        loop {
                            let mut line = String::new();
                            reader.read_line(&mut line).unwrap();
                            let line = line.trim_end();
                            if line.is_empty() {
                                break;
                            }
                            if let Some((k, v)) = line.split_once(':') {
                                headers.push((k.trim().to_string(), v.trim().to_string()));
                            }
                        }
                        let len: usize = headers
                            .iter()
                            .find(|(k, _)| k.eq_ignore_ascii_case("content-length"))
                            .map_or(0, |(_, v)| v.parse().unwrap());
                        let mut body = vec![0; len];
                        reader.read_exact(&mut body).unwrap();
                        let req = SeenRequest {
                            path,
                            headers,
                            body: serde_json::from_slice(&body).unwrap_or(serde_json::Value::Null),
                        };
                        let index = {
                            let mut l = log.lock().unwrap();
                            l.push(req.clone());
                            l.len() - 1
                        };
                        let (status, text) = responder(index, &req);
                        let reply = format!(
                            "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{text}",
                            text.len()
                        );
                        if writer.write_all(reply.as_bytes()).is_err() {
                            return;
                        }
                    }
                });
            }
        });
        MockServer {
            base_url: format!("http://{addr}/v1"),
            seen,
        }
    }

    pub fn requests(&self) -> Vec<SeenRequest> {
        self.seen.lock().unwrap().clone()
    }
}

/// Body of a successful chat completion.
pub fn completion(text: &str) -> String {
    serde_json::json!({"choices": [{"index": 0, "message": {"role": "assistant", "content": text}}]}).to_string()
}
