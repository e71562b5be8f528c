//! Eligible targets per question type, each with its ground truth and distractors.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{QlcType, Target};
use crate::analysis::{classify_line_purpose, classify_role, enclosing_block_end, loops, LinePurpose, ScopeTable, VariableRole};
use crate::parser::Program;
use crate::tracer::{assignment_trace, loop_iterations, CallSpec, ExecutionTrace, Literal};

/// Names never used by a bundled program, offered as obviously wrong choices.
pub const DECOY_NAMES: [&str; 3] = ["bar", "foo", "tmp"];

pub const ROLE_OPTIONS: [&str; 5] = [
    "The variable is never accessed and could be removed",
    "A fixed value that is not changed after created",
    "A stepper that systematically goes through evenly spaced values",
    "A gatherer that combines new values to itself",
    "A holder that replaces it's value with the next acceptable value",
];

pub const PURPOSE_OPTIONS: [&str; 4] = [
    "Accepts new data",
    "Guards against division by zero",
    "Is a condition for ending program",
    "Tells even and odd numbers apart",
];

/// Options shown for name questions.
const NAME_OPTIONS: usize = 5;
/// At most this many correct names are shown.
const MAX_CORRECT_NAMES: usize = 3;
/// Maximum trace length for value-sequence questions.
pub const MAX_TRACE_EVENTS: usize = 8;

pub fn role_label(role: VariableRole) -> &'static str {
    ROLE_OPTIONS[role as usize]
}

pub fn purpose_label(purpose: LinePurpose) -> &'static str {
    PURPOSE_OPTIONS[purpose as usize]
}

pub enum Options {
    Names { correct: Vec<String>, pool: Vec<String> },
    Numeric { answer: i64, distractors: Vec<i64> },
    Fixed { labels: &'static [&'static str], correct: usize },
    Sequences { answer: String, distractors: Vec<String> },
}

pub struct Candidate {
    pub target: Target,
    pub stem: String,
    pub options: Options,
}

pub fn stem(t: QlcType, line: usize, variable: &str, call: Option<&CallSpec>, assigned: bool) -> String {
    let call = call.map(CallSpec::render).unwrap_or_default();
    match t {
        QlcType::ParameterNames => format!("Which of the following are parameter names of the function declared on line {line}?"),
        QlcType::VariableNames => "Which of the following are variable names in the program?".to_string(),
        QlcType::LoopEnd => format!("A program loop starts on line {line}. Which is the last line inside it?"),
        QlcType::VariableDeclaration => {
            let verb = if assigned { "assigned to" } else { "accessed from" };
            format!("A value is {verb} variable {variable} on line {line}. On which line is {variable} created?")
        }
        QlcType::VariableRole => {
            format!("Which of the following best describes the role of variable {variable} that is created on line {line}?")
        }
        QlcType::LinePurpose => format!("Which of the following best describes the purpose of line {line}?"),
        QlcType::LoopCount => {
            format!("Line {line} has a loop structure. How many times does the loop execute when running {call}?")
        }
        QlcType::VariableTrace => format!(
            "Line {line} declares a variable named {variable}. Which values and in which order are assigned to the variable when running {call}?"
        ),
    }
}

fn target(line: usize, variable: Option<&str>, call: Option<&CallSpec>) -> Target {
    Target {
        line: Some(line),
        variable: variable.map(str::to_string),
        call_spec: call.cloned(),
    }
}

/// Take the first `n` candidates that are distinct, differ from `answer`
/// and satisfy `valid`.
fn pick<T: PartialEq + Clone>(cands: impl IntoIterator<Item = T>, answer: &T, n: usize, valid: impl Fn(&T) -> bool) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for c in cands {
        if out.len() == n {
            break;
        }
        if &c != answer && valid(&c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn decoys(scopes: &ScopeTable) -> impl Iterator<Item = String> + '_ {
    let taken = scopes.user_identifiers();
    DECOY_NAMES
        .into_iter()
        .filter(move |d| !taken.contains(d) && !scopes.builtins_used.contains(*d))
        .map(str::to_string)
}

fn name_pool(scopes: &ScopeTable, extra: &[&str], exclude: &BTreeSet<&str>) -> Vec<String> {
    let mut pool: BTreeSet<String> = scopes.keywords_used.iter().cloned().collect();
    pool.extend(scopes.builtins_used.iter().cloned());
    pool.insert(scopes.function_name.clone());
    pool.extend(extra.iter().map(|s| s.to_string()));
    pool.extend(decoys(scopes));
    pool.into_iter().filter(|n| !exclude.contains(n.as_str())).collect()
}

fn names_candidate(t: QlcType, line: usize, correct: Vec<String>, pool: Vec<String>) -> Option<Candidate> {
    let shown = correct.len().min(MAX_CORRECT_NAMES);
    if correct.is_empty() || pool.len() < 3.max(NAME_OPTIONS - shown) {
        return None;
    }
    Some(Candidate {
        target: target(line, None, None),
        stem: stem(t, line, "", None, false),
        options: Options::Names { correct, pool },
    })
}

fn sequence_label(values: &[Literal]) -> String {
    values.iter().map(Literal::repr).collect::<Vec<_>>().join(", ")
}

/// Wrong value sequences, most plausible first.
pub fn trace_distractors(values: &[Literal]) -> Vec<String> {
    let n = values.len();
    let mut fams: Vec<Vec<Literal>> = Vec::new();
    if n >= 2 {
        fams.push(values[1..].to_vec());
        fams.push(values[..n - 1].to_vec());
    }
    if let Some(Literal::Int(last)) = values.last() {
        if let Some(bumped) = last.checked_add(1) {
            let mut v = values.to_vec();
            v[n - 1] = Literal::Int(bumped);
            fams.push(v);
        }
    }
    fams.push(values.iter().rev().cloned().collect());
    if n >= 2 {
        fams.push(vec![values[0].clone()]);
    }
    let mut dup = values.to_vec();
    dup.push(values[n - 1].clone());
    fams.push(dup);
    if let Some(Literal::Int(first)) = values.first() {
        if let Some(lowered) = first.checked_sub(1) {
            let mut v = values.to_vec();
            v[0] = Literal::Int(lowered);
            fams.push(v);
        }
    }
    let answer = sequence_label(values);
    pick(
        fams.iter().filter(|f| !f.is_empty()).map(|f| sequence_label(f)),
        &answer,
        3,
        |_| true,
    )
}

fn first_list_length(call: &CallSpec) -> Option<i64> {
    call.arguments.iter().find_map(|a| match a {
        Literal::List(items) => Some(items.len() as i64),
        Literal::Str(s) => Some(s.chars().count() as i64),
        _ => None,
    })
}

pub fn loop_count_distractors(answer: i64, call: &CallSpec) -> Vec<i64> {
    let mut cands = vec![answer + 1, answer - 1, 0];
    cands.extend(first_list_length(call));
    cands.extend([answer + 2, answer + 3]);
    pick(cands, &answer, 3, |c| *c >= 0)
}

pub fn loop_end_distractors(program: &Program, header: usize, last: usize) -> Vec<i64> {
    let mut cands = vec![header as i64 - 1, last as i64 - 1, last as i64 + 1];
    cands.extend(enclosing_block_end(program, header).map(|e| e as i64));
    cands.extend([last as i64 + 2, last as i64 - 2]);
    let max = program.line_count as i64;
    pick(cands, &(last as i64), 3, |c| (1..=max).contains(c))
}

pub fn declaration_distractors(program: &Program, scopes: &ScopeTable, name: &str, use_line: usize) -> Vec<i64> {
    let v = scopes.variable(name).expect("known variable");
    let creation = v.creation_line as i64;
    let mut cands = vec![use_line as i64, scopes.def_line as i64];
    cands.extend(v.assignment_lines.iter().map(|l| *l as i64));
    cands.extend(v.read_lines.iter().map(|l| *l as i64));
    cands.extend([creation - 1, creation + 1]);
    let max = program.line_count as i64;
    pick(cands, &creation, 3, |c| (1..=max).contains(c))
}

fn numeric(tgt: Target, stem: String, answer: i64, distractors: Vec<i64>) -> Option<Candidate> {
    (distractors.len() >= 3).then_some(Candidate {
        target: tgt,
        stem,
        options: Options::Numeric { answer, distractors },
    })
}

/// Every eligible target for `t`, in a fixed order.
pub fn candidates(t: QlcType, program: &Program, scopes: &ScopeTable, traces: &[ExecutionTrace]) -> Vec<Candidate> {
    let mut out = Vec::new();
    let variables = || scopes.variables.iter().filter(|v| !v.comprehension);
    match t {
        QlcType::ParameterNames => {
            let correct: Vec<String> = scopes.parameters.iter().map(|(p, _)| p.clone()).collect();
            let vars: Vec<&str> = variables().map(|v| v.name.as_str()).collect();
            let exclude = correct.iter().map(String::as_str).collect();
            out.extend(names_candidate(t, scopes.def_line, correct.clone(), name_pool(scopes, &vars, &exclude)));
        }
        QlcType::VariableNames => {
            let correct: Vec<String> = scopes.variable_names().iter().map(|s| s.to_string()).collect();
            let mut exclude = scopes.user_identifiers();
            exclude.remove(scopes.function_name.as_str());
            let pool = name_pool(scopes, &[], &exclude);
            out.extend(names_candidate(t, scopes.def_line, correct, pool));
        }
        QlcType::LoopEnd => {
            for l in loops(program) {
                let d = loop_end_distractors(program, l.header_line, l.last_body_line);
                let stem = stem(t, l.header_line, "", None, false);
                out.extend(numeric(target(l.header_line, None, None), stem, l.last_body_line as i64, d));
            }
        }
        QlcType::VariableDeclaration => {
            for v in variables() {
                for line in v.use_lines() {
                    if line == v.creation_line {
                        continue;
                    }
                    let d = declaration_distractors(program, scopes, &v.name, line);
                    let stem = stem(t, line, &v.name, None, v.assignment_lines.contains(&line));
                    out.extend(numeric(target(line, Some(&v.name), None), stem, v.creation_line as i64, d));
                }
            }
        }
        QlcType::VariableRole => {
            let empty;
            let runs: Vec<&ExecutionTrace> = if traces.is_empty() {
                empty = ExecutionTrace {
                    call: CallSpec::new(scopes.function_name.clone(), Vec::new()),
                    events: Vec::new(),
                    steps_used: 0,
                    result: Literal::None,
                    stdout: String::new(),
                };
                vec![&empty]
            } else {
                traces.iter().collect()
            };
            for v in variables() {
                let found = runs.iter().find_map(|tr| classify_role(program, tr, &v.name).ok().map(|r| (r, *tr)));
                if let Some((role, tr)) = found {
                    let call = (!traces.is_empty()).then_some(&tr.call);
                    out.push(Candidate {
                        target: target(v.creation_line, Some(&v.name), call),
                        stem: stem(t, v.creation_line, &v.name, None, false),
                        options: Options::Fixed {
                            labels: &ROLE_OPTIONS,
                            correct: role as usize,
                        },
                    });
                }
            }
        }
        QlcType::LinePurpose => {
            for line in 1..=program.line_count {
                match classify_line_purpose(program, line) {
                    Some(p) if p != LinePurpose::AcceptsNewData => out.push(Candidate {
                        target: target(line, None, None),
                        stem: stem(t, line, "", None, false),
                        options: Options::Fixed {
                            labels: &PURPOSE_OPTIONS,
                            correct: p as usize,
                        },
                    }),
                    _ => {}
                }
            }
        }
        QlcType::LoopCount => {
            if let Some(tr) = traces.first() {
                for l in loops(program) {
                    let count = loop_iterations(tr, l.header_line) as i64;
                    let d = loop_count_distractors(count, &tr.call);
                    let stem = stem(t, l.header_line, "", Some(&tr.call), false);
                    out.extend(numeric(target(l.header_line, None, Some(&tr.call)), stem, count, d));
                }
            }
        }
        QlcType::VariableTrace => {
            for v in variables() {
                let found = traces.iter().find_map(|tr| {
                    assignment_trace(tr, &v.name)
                        .ok()
                        .filter(|vals| vals.len() <= MAX_TRACE_EVENTS)
                        .map(|vals| (vals, tr))
                });
                let Some((values, tr)) = found else { continue };
                let distractors = trace_distractors(&values);
                if distractors.len() < 3 {
                    continue;
                }
                out.push(Candidate {
                    target: target(v.creation_line, Some(&v.name), Some(&tr.call)),
                    stem: stem(t, v.creation_line, &v.name, Some(&tr.call), false),
                    options: Options::Sequences {
                        answer: sequence_label(&values),
                        distractors,
                    },
                });
            }
        }
    }
    out
}

/// Choose a target uniformly and lay out its options: the target, stem,
/// ordered labels and the indices of the correct labels.
pub fn instantiate(mut cands: Vec<Candidate>, rng: &mut impl Rng) -> Option<(Target, String, Vec<String>, Vec<usize>)> {
    if cands.is_empty() {
        return None;
    }
    let chosen = cands.swap_remove(rng.random_range(0..cands.len()));
    let (labels, correct): (Vec<String>, Vec<String>) = match chosen.options {
        Options::Names { correct, pool } => {
            let shown: Vec<String> = if correct.len() > MAX_CORRECT_NAMES {
                correct.choose_multiple(rng, MAX_CORRECT_NAMES).cloned().collect()
            } else {
                correct
            };
            let wrong: Vec<String> = pool.choose_multiple(rng, NAME_OPTIONS - shown.len()).cloned().collect();
            let mut labels: Vec<String> = shown.iter().chain(&wrong).cloned().collect();
            labels.sort();
            (labels, shown)
        }
        Options::Numeric { answer, mut distractors } => {
            distractors.push(answer);
            distractors.sort();
            (distractors.iter().map(i64::to_string).collect(), vec![answer.to_string()])
        }
        Options::Fixed { labels, correct } => (
            labels.iter().map(|s| s.to_string()).collect(),
            vec![labels[correct].to_string()],
        ),
        Options::Sequences { answer, mut distractors } => {
            distractors.push(answer.clone());
            distractors.sort();
            (distractors, vec![answer])
        }
    };
    let idx = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| correct.contains(l))
        .map(|(i, _)| i)
        .collect();
    Some((chosen.target, chosen.stem, labels, idx))
}
