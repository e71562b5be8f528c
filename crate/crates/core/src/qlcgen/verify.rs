//! Recompute a question's answer straight from the program and a fresh run.

use std::collections::BTreeSet;

use thiserror::Error;

use super::candidates::{purpose_label, role_label};
use super::{Qlc, QlcType, SelectMode};
use crate::analysis::{classify_line_purpose, classify_role, declaration_line, loop_extent, resolve_scopes};
use crate::parser::Program;
use crate::tracer::{assignment_trace, loop_iterations, run_traced, ExecutionTrace, Literal, DEFAULT_STEP_LIMIT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Inconsistency {
    #[error("{id}: malformed question: {reason}")]
    Malformed { id: String, reason: String },
    #[error("{id}: target cannot be analyzed: {reason}")]
    Target { id: String, reason: String },
    #[error("{id}: correct options {stored:?} but recomputed {recomputed:?}")]
    Mismatch {
        id: String,
        stored: BTreeSet<String>,
        recomputed: BTreeSet<String>,
    },
    #[error("{id}: distractor {label} equals the answer")]
    Collision { id: String, label: String },
}

fn run(qlc: &Qlc, program: &Program) -> Result<ExecutionTrace, Inconsistency> {
    let call = qlc.target.call_spec.as_ref().ok_or_else(|| Inconsistency::Target {
        id: qlc.id.clone(),
        reason: "no call".into(),
    })?;
    run_traced(program, call, DEFAULT_STEP_LIMIT).map_err(|e| Inconsistency::Target {
        id: qlc.id.clone(),
        reason: e.to_string(),
    })
}

/// The labels among the offered options that are correct, derived without
/// the generator's own bookkeeping.
pub fn recompute_correct_labels(qlc: &Qlc, program: &Program) -> Result<BTreeSet<String>, Inconsistency> {
    let target_err = |reason: String| Inconsistency::Target {
        id: qlc.id.clone(),
        reason,
    };
    let scopes = resolve_scopes(program);
    let line = qlc.target.line.unwrap_or(0);
    let var = qlc.target.variable.as_deref().unwrap_or("");
    let offered = qlc.options.iter().map(|o| o.label.clone());
    let single = |label: String| Ok(BTreeSet::from([label]));
    match qlc.qlc_type {
        QlcType::ParameterNames => Ok(offered.filter(|l| scopes.is_parameter(l)).collect()),
        QlcType::VariableNames => Ok(offered
            .filter(|l| scopes.variable_names().contains(&l.as_str()))
            .collect()),
        QlcType::LoopEnd => {
            let l = loop_extent(program, line).map_err(|e| target_err(e.to_string()))?;
            single(l.last_body_line.to_string())
        }
        QlcType::VariableDeclaration => {
            let d = declaration_line(&scopes, var, line).map_err(|e| target_err(e.to_string()))?;
            single(d.to_string())
        }
        QlcType::VariableRole => {
            let trace = match &qlc.target.call_spec {
                Some(_) => run(qlc, program)?,
                None => ExecutionTrace {
                    call: crate::tracer::CallSpec::new(scopes.function_name.clone(), Vec::new()),
                    events: Vec::new(),
                    steps_used: 0,
                    result: Literal::None,
                    stdout: String::new(),
                },
            };
            let role = classify_role(program, &trace, var).map_err(|e| target_err(e.to_string()))?;
            single(role_label(role).to_string())
        }
        QlcType::LinePurpose => {
            let p = classify_line_purpose(program, line).ok_or_else(|| target_err("no unique purpose".into()))?;
            single(purpose_label(p).to_string())
        }
        QlcType::LoopCount => {
            let trace = run(qlc, program)?;
            loop_extent(program, line).map_err(|e| target_err(e.to_string()))?;
            single(loop_iterations(&trace, line).to_string())
        }
        QlcType::VariableTrace => {
            let trace = run(qlc, program)?;
            let values = assignment_trace(&trace, var).map_err(|e| target_err(e.to_string()))?;
            single(values.iter().map(Literal::repr).collect::<Vec<_>>().join(", "))
        }
    }
}

/// Structural checks plus agreement between stored and recomputed answers.
pub fn verify(qlc: &Qlc, program: &Program) -> Result<(), Inconsistency> {
    let malformed = |reason: &str| {
        Err(Inconsistency::Malformed {
            id: qlc.id.clone(),
            reason: reason.to_string(),
        })
    };
    let n = qlc.options.len();
    if !(4..=5).contains(&n) {
        return malformed("needs 4 or 5 options");
    }
    let labels: BTreeSet<&str> = qlc.options.iter().map(|o| o.label.as_str()).collect();
    if labels.len() != n {
        return malformed("duplicate labels");
    }
    if !qlc.letters().eq('a'..(b'a' + n as u8) as char) {
        return malformed("letters must run a, b, c, ...");
    }
    if qlc.correct_letters.is_empty() || !qlc.correct_letters.iter().all(|l| qlc.label(*l).is_some()) {
        return malformed("correct letters must be offered");
    }
    if qlc.select_mode == SelectMode::Single && qlc.correct_letters.len() != 1 {
        return malformed("single-select needs exactly one correct letter");
    }
    let stored: BTreeSet<String> = qlc.correct_labels().into_iter().map(str::to_string).collect();
    let recomputed = recompute_correct_labels(qlc, program)?;
    if stored != recomputed {
        return Err(Inconsistency::Mismatch {
            id: qlc.id.clone(),
            stored,
            recomputed,
        });
    }
    if matches!(qlc.qlc_type, QlcType::LoopEnd | QlcType::VariableDeclaration | QlcType::LoopCount) {
        let answer: i64 = recomputed.iter().next().unwrap().parse().unwrap();
        for o in &qlc.options {
            if !qlc.correct_letters.contains(&o.letter) && o.label.parse::<i64>().ok() == Some(answer) {
                return Err(Inconsistency::Collision {
                    id: qlc.id.clone(),
                    label: o.label.clone(),
                });
            }
        }
    }
    Ok(())
}
