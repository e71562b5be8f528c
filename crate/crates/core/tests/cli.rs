//! The command line, through the binary and through the command functions.

mod support;

use std::io::Cursor;
use std::path::Path;
use std::process::{Command, Output};

use qlc::cli::{cmd_annotate, cmd_grade, cmd_ingest, program_id, read_json, Ingested, ProgramRecord, WorkspaceLayout};
use qlc::corpus;
use qlc::harness::Verdict;
use qlc::parser::Origin;
use qlc::report::{Annotation, ErrorCode};
use support::Rotating;

const LOOP_SHAPE: &str = "22ce6fc08ad7e9e009d66a982c8e2d6c802e227dab14e954a7f3b917bef95dd6";
const LOOP_IDENTIFIERS: &str = "8eb83f51a628eb929a5a0574d2760766687893f5fa9347ff9197841b37bbda44";
const COMPREHENSION_SHAPE: &str = "e1a8e68d5091f735312361b0dcf02ab996ed0086ef852c5cc0d118c5e99d39e7";

fn qlc(ws: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlc"))
        .arg("--workspace")
        .arg(ws)
        .args(args)
        .env_remove("QLC_WORKSPACE")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn ingest_accepts_both_averages_with_pinned_fingerprints() {
    let dir = tempfile::tempdir().unwrap();
    assert!(qlc(dir.path(), &["init"]).status.success());
    let a = write(dir.path(), "a.py", corpus::AVERAGE_WITH_COMPREHENSION);
    let b = write(dir.path(), "b.py", corpus::AVERAGE_WITH_LOOP);
    let out = qlc(dir.path(), &["ingest", "--task", "T4", &a, &b]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).matches("accepted ").count(), 2, "{}", stdout(&out));
    let ws = WorkspaceLayout::new(dir.path());
    let rec = |src: &str| -> ProgramRecord { read_json(&ws.program_path(&program_id("T4", src))).unwrap() };
    let (ra, rb) = (rec(corpus::AVERAGE_WITH_COMPREHENSION), rec(corpus::AVERAGE_WITH_LOOP));
    assert_eq!(ra.fingerprint.shape, COMPREHENSION_SHAPE);
    assert_eq!(rb.fingerprint.shape, LOOP_SHAPE);
    assert_eq!(rb.fingerprint.identifiers, LOOP_IDENTIFIERS);
    assert_eq!(ra.schema_version, 1);
    assert!(rb.program.id.starts_with("T4-") && rb.program.id.len() == 13);
}

#[test]
fn ingest_rejects_duplicates_and_lambdas() {
    let dir = tempfile::tempdir().unwrap();
    let ws = WorkspaceLayout::new(dir.path());
    qlc::cli::cmd_init(&ws, false, &mut Vec::new()).unwrap();
    let b = write(dir.path(), "b.py", corpus::AVERAGE_WITH_LOOP).into();
    let again = write(dir.path(), "again.py", corpus::AVERAGE_WITH_LOOP).into();
    let lambda = write(
        dir.path(),
        "l.py",
        "def averageAllPositiveIntegers(numbers):\n    keep = lambda n: n > 0\n    return 0\n",
    )
    .into();
    let r = cmd_ingest(&ws, "T4", &[b, again, lambda], Origin::Llm, &mut Vec::new()).unwrap();
    assert!(matches!(r[0], Ingested::Accepted { .. }));
    assert!(matches!(&r[1], Ingested::Rejected(x) if x[0].code() == "duplicate_shape"), "{:?}", r[1]);
    assert!(matches!(&r[2], Ingested::Rejected(x) if x[0].code() == "lambda"), "{:?}", r[2]);
}

#[test]
fn contract_violations_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "b.py", corpus::AVERAGE_WITH_LOOP);
    assert!(!qlc(dir.path(), &["ingest", "--task", "T9", &p]).status.success());
    assert!(!qlc(dir.path(), &["generate"]).status.success());
    assert!(!qlc(dir.path(), &["grade"]).status.success());
    assert!(!qlc(dir.path(), &["report"]).status.success());
    assert!(!qlc(dir.path(), &["ask", "--model", "m"]).status.success());
    assert!(qlc(dir.path(), &["init", "--corpus"]).status.success());
    let out = qlc(dir.path(), &["generate", "--seed", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("LinePurpose"), "{}", stdout(&out));
}

fn graded_workspace(root: &Path) -> WorkspaceLayout {
    assert!(qlc(root, &["init", "--corpus"]).status.success());
    assert!(qlc(root, &["generate", "--task", "T4"]).status.success());
    let ws = WorkspaceLayout::new(root);
    support::record_sessions(&ws, "m", &mut Rotating(vec!["a.", "b.", "Option c", "I think (d)."], 0));
    cmd_grade(&ws, None, &mut Vec::new()).unwrap();
    ws
}

#[test]
fn annotate_reprompts_until_a_valid_code() {
    let dir = tempfile::tempdir().unwrap();
    let ws = graded_workspace(dir.path());
    let wrong = ws.answers().unwrap().iter().filter(|a| a.verdict != Verdict::Correct).count();
    assert!(wrong >= 2);
    let mut out = Vec::new();
    let n = cmd_annotate(&ws, "r1", None, &mut Cursor::new("x\nab\n\nc\nq\n"), &mut out).unwrap();
    assert_eq!(n, 1);
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.matches("is not one of a-j").count(), 3, "{text}");
    assert!(text.contains("Hallucinates to justify incorrect answer"));
    // A second run resumes after the coded answer and stops at end of input.
    let n = cmd_annotate(&ws, "r1", None, &mut Cursor::new("d\n"), &mut Vec::new()).unwrap();
    assert_eq!(n, 1);
    let anns = ws.annotations().unwrap();
    assert_eq!(anns.iter().map(|a| a.error_code).collect::<Vec<_>>(), [ErrorCode::C, ErrorCode::D]);
}

#[test]
fn report_is_reproducible_and_computes_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let ws = graded_workspace(dir.path());
    let wrong: Vec<String> = ws
        .answers()
        .unwrap()
        .into_iter()
        .filter(|a| a.verdict != Verdict::Correct)
        .map(|a| a.answer_id)
        .collect();
    let codes = [ErrorCode::A, ErrorCode::B];
    let lines = |rater: &str, shift: usize| -> String {
        wrong
            .iter()
            .enumerate()
            .map(|(i, id)| serde_json::to_string(&Annotation::new(id, rater, codes[(i + shift * (i % 2)) % 2])).unwrap() + "\n")
            .collect()
    };
    std::fs::write(ws.annotation_path("r1"), lines("r1", 0)).unwrap();
    std::fs::write(ws.annotation_path("r2"), lines("r2", 1)).unwrap();
    let first = qlc(dir.path(), &["report"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let text = stdout(&first);
    assert!(text.contains("Over all types: m "), "{text}");
    assert!(text.contains(&format!("kappa r1 vs r2 over {} answers", wrong.len())), "{text}");
    let before = std::fs::read_dir(ws.dir("reports")).unwrap().count();
    let snapshot: Vec<(String, Vec<u8>)> = {
        let mut v: Vec<_> = std::fs::read_dir(ws.dir("reports"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
            .collect();
        v.sort();
        v
    };
    assert!(snapshot.iter().any(|(n, _)| n == "m.type-task.csv"));
    assert!(snapshot.iter().any(|(n, _)| n == "m.type-code.txt"));
    std::fs::remove_dir_all(ws.dir("reports")).unwrap();
    assert!(qlc(dir.path(), &["report"]).status.success());
    let mut again: Vec<_> = std::fs::read_dir(ws.dir("reports"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    again.sort();
    assert_eq!(before, again.len());
    assert_eq!(snapshot, again);
}

#[test]
fn report_over_the_synthetic_fixture_prints_both_rates() {
    let dir = tempfile::tempdir().unwrap();
    support::synthetic_workspace(dir.path());
    let out_dir = dir.path().join("elsewhere");
    let out = qlc(dir.path(), &["report", "--out-dir", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("model-a 69% (N=399), model-b 88% (N=399)"), "{}", stdout(&out));
    let success = std::fs::read_to_string(out_dir.join("all.success.csv")).unwrap();
    assert!(success.lines().any(|l| l == "VariableTrace,56,55%,70%"), "{success}");
}

#[test]
fn replay_through_the_binary_then_grade() {
    let dir = tempfile::tempdir().unwrap();
    let ws = graded_workspace(dir.path());
    let other = tempfile::tempdir().unwrap();
    assert!(qlc(other.path(), &["init", "--corpus"]).status.success());
    assert!(qlc(other.path(), &["generate", "--task", "T4"]).status.success());
    let replay = ws.dir("transcripts");
    let out = qlc(other.path(), &["ask", "--model", "m", "--replay", replay.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let again = qlc(other.path(), &["ask", "--model", "m", "--replay", replay.to_str().unwrap()]);
    assert!(stdout(&again).contains("already answered"));
    assert!(qlc(other.path(), &["grade"]).status.success());
    let theirs = WorkspaceLayout::new(other.path()).answers().unwrap();
    assert_eq!(theirs, ws.answers().unwrap());
}
