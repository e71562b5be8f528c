use thiserror::Error;

use crate::parser::SourceProgram;
use crate::qlcgen::{render, Qlc, TaskBundle};

/// Bumped whenever the prompt wording changes; stored with every transcript.
pub const PROMPT_TEMPLATE_VERSION: &str = "answer-and-explain/1";
pub const INSTRUCTION: &str = "Answer and explain.";
pub const SYSTEM_PROMPT: &str = "You are a helpful assistant.";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("task {0} has an empty description")]
    EmptyDescription(String),
    #[error("program is empty")]
    EmptyProgram,
}

/// Task description, the code in a fence, then the first question.
pub fn build_first_prompt(task: &TaskBundle, program: &SourceProgram, qlc: &Qlc) -> Result<String, PromptError> {
    if task.description.trim().is_empty() {
        return Err(PromptError::EmptyDescription(task.task_id.clone()));
    }
    if program.source.trim().is_empty() {
        return Err(PromptError::EmptyProgram);
    }
    Ok(format!(
        "{}\n\n```\n{}\n```\n\n{}",
        task.description.trim(),
        program.source.trim_end(),
        build_follow_up(qlc)
    ))
}

/// Each later question, asked in the same session.
pub fn build_follow_up(qlc: &Qlc) -> String {
    format!("{}\n{INSTRUCTION}", render(qlc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::resolve_scopes;
    use crate::corpus;
    use crate::tracer::DEFAULT_STEP_LIMIT;

    fn setup() -> (TaskBundle, SourceProgram, Vec<Qlc>) {
        let task = corpus::task("T4").unwrap();
        let program = corpus::program("T4_b").unwrap();
        let ast = program.parse().unwrap();
        let traces = task.traces(&ast, DEFAULT_STEP_LIMIT);
        let qlcs = crate::qlcgen::generate(&program.id, &ast, &resolve_scopes(&ast), &traces, 1);
        (task, program, qlcs)
    }

    #[test]
    fn first_prompt_layout() {
        let (task, program, qlcs) = setup();
        let q = qlcs.iter().find(|q| q.qlc_type == crate::qlcgen::QlcType::LoopEnd).unwrap();
        let p = build_first_prompt(&task, &program, q).unwrap();
        assert!(p.starts_with("Given a list of integers, return the average of all positive elements.\n\n```\ndef averageAllPositiveIntegers(numbers):\n"));
        assert!(p.contains("        return 0\n```\n\nA program loop starts on line 4. Which is the last line inside it?\na. 3\n"));
        assert!(p.ends_with("d. 8\nAnswer and explain."));
    }

    #[test]
    fn prompts_share_prefix_up_to_question() {
        let (task, program, qlcs) = setup();
        let a = build_first_prompt(&task, &program, &qlcs[0]).unwrap();
        let b = build_first_prompt(&task, &program, &qlcs[1]).unwrap();
        let prefix = format!("{}\n\n```\n{}\n```\n\n", task.description, program.source.trim_end());
        assert!(a.starts_with(&prefix) && b.starts_with(&prefix));
        assert_ne!(a, b);
    }

    #[test]
    fn empty_description_is_rejected() {
        let (mut task, program, qlcs) = setup();
        task.description = "  ".into();
        assert_eq!(
            build_first_prompt(&task, &program, &qlcs[0]),
            Err(PromptError::EmptyDescription("T4".into()))
        );
    }
}
