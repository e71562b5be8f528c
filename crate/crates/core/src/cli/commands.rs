use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use super::workspace::{read_annotations, AnswerFile, ProgramRecord, QlcFile, WorkspaceLayout};
use super::CliError;
use crate::analysis::{resolve_scopes, sha256_hex};
use crate::corpus;
use crate::harness::{
    ask_all, filter_candidate, read_transcript, AnswerRecord, ChatBackend, ChatSession, FilterOutcome, HttpBackend, JsonlTranscript,
    RawAnswer, RejectReason, ReplayBackend, RetryPolicy, Role, SamplingParams, TranscriptRecord, Verdict,
};
use crate::parser::{normalize, Origin, SourceProgram};
use crate::qlcgen::{generate, render, QlcType, TaskBundle, SCHEMA_VERSION};
use crate::report::{
    aggregate_errors, aggregate_success, primary_annotations, rater_agreement, write_reports, Annotation, ErrorCode, Reports,
};
use crate::tracer::run_traced;

fn say(out: &mut dyn Write, line: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(out, "{}", line.as_ref()).map_err(CliError::Output)
}

/// Content-derived program id: task id plus the first ten hex digits of the
/// hash of the normalized source.
pub fn program_id(task_id: &str, source: &str) -> String {
    format!("{task_id}-{}", &sha256_hex(normalize(source).as_bytes())[..10])
}

fn accepted_for(ws: &WorkspaceLayout, task_id: &str) -> Result<Vec<(String, crate::analysis::StructuralFingerprint)>, CliError> {
    Ok(ws
        .programs()?
        .into_iter()
        .filter(|r| r.program.task_id == task_id)
        .map(|r| (r.program.id, r.fingerprint))
        .collect())
}

/// Outcome of one ingested file.
#[derive(Debug, Clone, PartialEq)]
pub enum Ingested {
    Accepted { id: String, review: Option<String> },
    Rejected(Vec<RejectReason>),
}

fn ingest_one(ws: &WorkspaceLayout, task: &TaskBundle, program: SourceProgram) -> Result<Ingested, CliError> {
    let accepted = accepted_for(ws, &task.task_id)?;
    Ok(match filter_candidate(&program, task, &accepted) {
        FilterOutcome::Accepted { fingerprint, review } => {
            let id = program.id.clone();
            let record = ProgramRecord {
                schema_version: SCHEMA_VERSION,
                program: SourceProgram { accepted: true, ..program },
                fingerprint,
                review: review.clone(),
            };
            super::workspace::write_json(&ws.program_path(&id), &record)?;
            Ingested::Accepted { id, review }
        }
        FilterOutcome::Rejected(r) => Ingested::Rejected(r),
    })
}

fn report_ingest(out: &mut dyn Write, what: &str, r: &Ingested) -> Result<(), CliError> {
    match r {
        Ingested::Accepted { id, review: None } => say(out, format!("accepted {id} ({what})")),
        Ingested::Accepted { id, review: Some(note) } => say(out, format!("accepted {id} ({what}); review: {note}")),
        Ingested::Rejected(reasons) => {
            let rs: Vec<String> = reasons.iter().map(ToString::to_string).collect();
            say(out, format!("rejected {what}: {}", rs.join("; ")))
        }
    }
}

/// Create the workspace and write the bundled task descriptions; optionally
/// ingest the bundled solutions under their corpus ids.
pub fn cmd_init(ws: &WorkspaceLayout, with_corpus: bool, out: &mut dyn Write) -> Result<(), CliError> {
    ws.create()?;
    let tasks = corpus::tasks();
    for t in &tasks {
        super::workspace::write_json(&ws.task_path(&t.task_id), t)?;
    }
    say(out, format!("wrote {} tasks to {}", tasks.len(), ws.dir("tasks").display()))?;
    if with_corpus {
        for p in corpus::programs() {
            let task = ws.task(&p.task_id)?;
            let what = format!("corpus {}", p.id);
            let r = ingest_one(ws, &task, SourceProgram { accepted: false, ..p })?;
            report_ingest(out, &what, &r)?;
        }
    }
    Ok(())
}

/// Filter candidate files for `task_id` and store the accepted ones.
pub fn cmd_ingest(ws: &WorkspaceLayout, task_id: &str, paths: &[PathBuf], origin: Origin, out: &mut dyn Write) -> Result<Vec<Ingested>, CliError> {
    let task = ws.task(task_id)?;
    let mut results = Vec::new();
    for path in paths {
        let source = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        let program = SourceProgram {
            id: program_id(task_id, &source),
            task_id: task_id.to_string(),
            source,
            origin,
            accepted: false,
        };
        let r = ingest_one(ws, &task, program)?;
        report_ingest(out, &path.display().to_string(), &r)?;
        results.push(r);
    }
    Ok(results)
}

/// Generate one question of every supported type for each accepted program.
pub fn cmd_generate(
    ws: &WorkspaceLayout,
    task_filter: Option<&str>,
    seed: u64,
    step_limit: u64,
    out: &mut dyn Write,
) -> Result<BTreeMap<QlcType, usize>, CliError> {
    let programs: Vec<ProgramRecord> = ws
        .programs()?
        .into_iter()
        .filter(|r| task_filter.is_none_or(|t| r.program.task_id == t))
        .collect();
    if programs.is_empty() {
        return Err(CliError::MissingUpstream("no accepted programs; run ingest first".into()));
    }
    let mut tasks: HashMap<String, TaskBundle> = HashMap::new();
    let mut counts: BTreeMap<QlcType, usize> = QlcType::ALL.iter().map(|t| (*t, 0)).collect();
    for rec in &programs {
        let p = &rec.program;
        if !tasks.contains_key(&p.task_id) {
            tasks.insert(p.task_id.clone(), ws.task(&p.task_id)?);
        }
        let task = &tasks[&p.task_id];
        let ast = p.parse().map_err(|e| CliError::Invalid(format!("stored program {} no longer parses: {e}", p.id)))?;
        let mut traces = Vec::new();
        for call in &task.call_specs {
            match run_traced(&ast, call, step_limit) {
                Ok(t) => traces.push(t),
                Err(e) => say(out, format!("note: {}: {} skipped ({e})", p.id, call.render()))?,
            }
        }
        let questions = generate(&p.id, &ast, &resolve_scopes(&ast), &traces, seed);
        for q in &questions {
            *counts.get_mut(&q.qlc_type).expect("all types present") += 1;
        }
        let file = QlcFile {
            schema_version: SCHEMA_VERSION,
            program_id: p.id.clone(),
            task_id: p.task_id.clone(),
            seed,
            questions,
        };
        super::workspace::write_json(&ws.qlc_path(&p.id), &file)?;
    }
    let total: usize = counts.values().sum();
    let per: Vec<String> = counts.iter().map(|(t, n)| format!("{} {n}", t.name())).collect();
    say(out, format!("generated {total} questions for {} programs: {}", programs.len(), per.join(", ")))?;
    Ok(counts)
}

/// Where answers come from during `cmd_ask`.
pub enum AnswerSource {
    Http { base_url: String },
    /// Transcript file, or a directory of them, to replay.
    Replay(PathBuf),
}

pub struct AskOptions {
    pub model: String,
    pub source: AnswerSource,
    pub params: SamplingParams,
    pub task: Option<String>,
    pub retry: RetryPolicy,
    pub timeout: std::time::Duration,
}

fn load_replay(path: &Path) -> Result<Vec<TranscriptRecord>, CliError> {
    let files = if path.is_dir() {
        let mut v = Vec::new();
        for dir in std::iter::once(path.to_path_buf()).chain(
            fs::read_dir(path)
                .map_err(|source| CliError::Io { path: path.into(), source })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_dir()),
        ) {
            v.extend(super::workspace::files_with_ext(&dir, "jsonl")?);
        }
        v
    } else {
        vec![path.to_path_buf()]
    };
    let mut out = Vec::new();
    for f in files {
        out.extend(read_transcript(&f).map_err(|source| CliError::Io { path: f.clone(), source })?);
    }
    Ok(out)
}

fn answered(records: &[TranscriptRecord]) -> HashSet<&str> {
    records
        .iter()
        .filter(|r| r.role == Role::Assistant)
        .filter_map(|r| r.qlc_id.as_deref())
        .collect()
}

/// Move an incomplete transcript aside so a fresh session can start.
fn set_aside(path: &Path) -> Result<PathBuf, CliError> {
    let mut k = 1;
    loop {
        let target = path.with_extension(format!("jsonl.incomplete-{k}"));
        if !target.exists() {
            fs::rename(path, &target).map_err(|source| CliError::Io { path: path.into(), source })?;
            return Ok(target);
        }
        k += 1;
    }
}

/// Ask every generated question, one session per program.
///
/// Programs whose transcript already answers every question are skipped.
/// The first program with missing answers ends the run with an error;
/// everything written before that stays on disk.
pub fn cmd_ask(ws: &WorkspaceLayout, opts: &AskOptions, out: &mut dyn Write) -> Result<usize, CliError> {
    let files: Vec<QlcFile> = ws
        .qlc_files()?
        .into_iter()
        .filter(|f| opts.task.as_deref().is_none_or(|t| f.task_id == t))
        .collect();
    if files.is_empty() {
        return Err(CliError::MissingUpstream("no generated questions; run generate first".into()));
    }
    let replay = match &opts.source {
        AnswerSource::Replay(p) => Some(load_replay(p)?),
        AnswerSource::Http { .. } => None,
    };
    let mut http = match &opts.source {
        AnswerSource::Http { base_url } => Some(HttpBackend::from_env(base_url, opts.timeout).map_err(|e| CliError::Backend(e.to_string()))?),
        AnswerSource::Replay(_) => None,
    };
    let mut asked = 0;
    for f in &files {
        let path = ws.transcript_path(&opts.model, &f.program_id);
        if path.is_file() {
            let existing = read_transcript(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            let done = answered(&existing);
            if f.questions.iter().all(|q| done.contains(q.id.as_str())) {
                say(out, format!("skipped {}: already answered", f.program_id))?;
                continue;
            }
            let moved = set_aside(&path)?;
            say(out, format!("note: incomplete transcript moved to {}", moved.display()))?;
        }
        let program = ws.programs()?.into_iter().find(|r| r.program.id == f.program_id).map(|r| r.program).ok_or_else(|| {
            CliError::MissingUpstream(format!("questions for {} but no such program", f.program_id))
        })?;
        let task = ws.task(&f.task_id)?;
        let session_id = ChatSession::id_for(&opts.model, &f.program_id);
        let mut session = ChatSession::new(&session_id, &opts.model, opts.params);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
        }
        let mut sink = JsonlTranscript::open(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        let mut replayer;
        let backend: &mut dyn ChatBackend = match (&replay, &mut http) {
            (Some(records), _) => {
                replayer = ReplayBackend::for_session(records, &session_id);
                &mut replayer
            }
            (None, Some(h)) => h,
            (None, None) => unreachable!("one answer source is always configured"),
        };
        let answers = ask_all(&mut session, backend, &task, &program, &f.questions, &mut sink, &opts.retry).map_err(|e| match e {
            crate::harness::AskError::Persist(source) => CliError::Io { path: path.clone(), source },
            other => CliError::Invalid(other.to_string()),
        })?;
        let missing: Vec<&RawAnswer> = answers.iter().filter(|a| a.raw_text.is_none()).collect();
        asked += answers.len() - missing.len();
        if let Some(first) = missing.first() {
            say(out, format!("{}: {} of {} answers missing", f.program_id, missing.len(), answers.len()))?;
            return Err(CliError::Backend(format!(
                "{}: {}",
                first.qlc_id,
                first.missing_reason.clone().unwrap_or_default()
            )));
        }
        say(out, format!("asked {} questions about {}", answers.len(), f.program_id))?;
    }
    Ok(asked)
}

/// Grade every transcript into `answers/`. Re-running gives identical files.
pub fn cmd_grade(ws: &WorkspaceLayout, model: Option<&str>, out: &mut dyn Write) -> Result<Vec<AnswerRecord>, CliError> {
    let models = match model {
        Some(m) => vec![crate::report::file_stem(m)],
        None => ws.transcript_models()?,
    };
    let qlcs: HashMap<String, QlcFile> = ws.qlc_files()?.into_iter().map(|f| (f.program_id.clone(), f)).collect();
    let mut all = Vec::new();
    for dir_name in &models {
        let transcripts = ws.transcripts(dir_name)?;
        for (program_id, records) in transcripts {
            let file = qlcs
                .get(&program_id)
                .ok_or_else(|| CliError::MissingUpstream(format!("transcript for {program_id} but no questions")))?;
            let model_name = records.iter().find_map(|r| r.model.clone()).unwrap_or_else(|| dir_name.clone());
            let mut graded = Vec::new();
            for q in &file.questions {
                let reply = records.iter().rev().find(|r| r.role == Role::Assistant && r.qlc_id.as_deref() == Some(q.id.as_str()));
                let Some(reply) = reply else { continue };
                let raw = RawAnswer {
                    qlc_id: q.id.clone(),
                    session_id: reply.session_id.clone(),
                    model_name: model_name.clone(),
                    raw_text: Some(reply.text.clone()),
                    missing_reason: None,
                };
                graded.extend(AnswerRecord::from_raw(&raw, q));
            }
            super::workspace::write_json(&ws.answer_path(&model_name, &program_id), &AnswerFile::new(&model_name, &program_id, graded.clone()))?;
            all.extend(graded);
        }
    }
    if all.is_empty() && models.iter().all(|m| !ws.transcript_dir(m).is_dir()) {
        return Err(CliError::MissingUpstream("no transcripts; run ask first".into()));
    }
    let count = |v: Verdict| all.iter().filter(|a| a.verdict == v).count();
    say(
        out,
        format!(
            "graded {} answers: {} correct, {} incorrect, {} indeterminate, {} flagged for review",
            all.len(),
            count(Verdict::Correct),
            count(Verdict::Incorrect),
            count(Verdict::Indeterminate),
            all.iter().filter(|a| a.needs_review).count()
        ),
    )?;
    Ok(all)
}

fn numbered(source: &str) -> String {
    let normalized = normalize(source);
    let width = normalized.lines().count().to_string().len();
    normalized
        .lines()
        .enumerate()
        .map(|(i, l)| format!("{:>width$} | {l}\n", i + 1))
        .collect()
}

/// Code every incorrect answer that `rater` has not coded yet, reading one
/// key per answer from `input`. Returns how many codes were recorded.
pub fn cmd_annotate(
    ws: &WorkspaceLayout,
    rater: &str,
    model: Option<&str>,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<usize, CliError> {
    let path = ws.annotation_path(rater);
    let done: HashSet<String> = read_annotations(&path)?.into_iter().map(|a| a.answer_id).collect();
    let answers = ws.answers()?;
    if answers.is_empty() {
        return Err(CliError::MissingUpstream("no graded answers; run grade first".into()));
    }
    let qlcs: HashMap<String, crate::qlcgen::Qlc> = ws.qlcs()?.into_iter().map(|q| (q.id.clone(), q)).collect();
    let programs: HashMap<String, SourceProgram> = ws.programs()?.into_iter().map(|r| (r.program.id.clone(), r.program)).collect();
    let queue: Vec<&AnswerRecord> = answers
        .iter()
        .filter(|a| a.verdict != Verdict::Correct)
        .filter(|a| model.is_none_or(|m| a.model_name == m))
        .filter(|a| !done.contains(&a.answer_id))
        .collect();
    say(out, format!("{} answers to annotate", queue.len()))?;
    let mut recorded = 0;
    for (i, a) in queue.iter().enumerate() {
        let q = qlcs
            .get(&a.qlc_id)
            .ok_or_else(|| CliError::MissingUpstream(format!("answer {} refers to unknown question", a.answer_id)))?;
        let source = programs.get(&q.program_id).map(|p| p.source.as_str()).unwrap_or("");
        let correct: String = q.correct_letters.iter().collect();
        say(out, format!("\n=== {} of {}: {} ({:?}) ===", i + 1, queue.len(), a.answer_id, a.verdict))?;
        say(out, numbered(source))?;
        say(out, render(q))?;
        say(out, format!("\nCorrect: {correct}    Extracted: {}", a.extracted_letters.iter().collect::<String>()))?;
        say(out, format!("\n--- answer ---\n{}\n--------------", a.raw_text.trim_end()))?;
        for c in ErrorCode::ALL {
            say(out, format!("  {}  {}", c.key(), c.title()))?;
        }
        let code = loop {
            write!(out, "code [a-j, q to stop]: ").map_err(CliError::Output)?;
            out.flush().map_err(CliError::Output)?;
            let mut line = String::new();
            if input.read_line(&mut line).map_err(CliError::Output)? == 0 {
                say(out, "")?;
                return Ok(recorded);
            }
            let key = line.trim();
            if key == "q" {
                return Ok(recorded);
            }
            let mut chars = key.chars();
            match (chars.next().and_then(ErrorCode::from_key), chars.next()) {
                (Some(c), None) => break c,
                _ => say(out, format!("{key:?} is not one of a-j"))?,
            }
        };
        let ann = Annotation::new(&a.answer_id, rater, code);
        append_annotation(&path, &ann)?;
        recorded += 1;
    }
    Ok(recorded)
}

fn append_annotation(path: &Path, ann: &Annotation) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.into(), source };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    writeln!(f, "{}", serde_json::to_string(ann).expect("annotation serializes")).map_err(io)?;
    f.sync_data().map_err(io)
}

/// Aggregate everything graded and annotated into report files and print
/// the overall success line.
pub fn cmd_report(ws: &WorkspaceLayout, rater: Option<&str>, out_dir: Option<&Path>, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let answers = ws.answers()?;
    if answers.is_empty() {
        return Err(CliError::MissingUpstream("no graded answers; run grade first".into()));
    }
    let qlcs = ws.qlcs()?;
    let programs: Vec<SourceProgram> = ws.programs()?.into_iter().map(|r| r.program).collect();
    let success = aggregate_success(&answers, &qlcs, &programs).map_err(|e| CliError::Invalid(e.to_string()))?;
    let annotations = ws.annotations()?;
    let primary = primary_annotations(&annotations, rater);
    let (errors, diagnostics) = aggregate_errors(&primary, &answers, &qlcs);
    let agreements = rater_agreement(&annotations);
    let dir = out_dir.map_or_else(|| ws.dir("reports"), Path::to_path_buf);
    let written = write_reports(
        &dir,
        &Reports {
            success: &success,
            errors: &errors,
            agreements: &agreements,
            diagnostics: &diagnostics,
        },
    )
    .map_err(|source| CliError::Io { path: dir.clone(), source })?;
    say(out, success.table().to_text())?;
    say(out, success.overall_line())?;
    for a in &agreements {
        say(out, a.line())?;
    }
    for d in &diagnostics {
        say(out, format!("warning: {d}"))?;
    }
    say(out, format!("wrote {} report files to {}", written.len(), dir.display()))?;
    Ok(written)
}
