use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::Program;
use crate::tracer::{run_traced, CallSpec, ExecutionTrace, Literal, TraceError, DEFAULT_STEP_LIMIT};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// One functional test: either a return value or printed output is expected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTest {
    pub arguments: Vec<Literal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Literal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_output: Option<String>,
}

impl FunctionalTest {
    /// Python equality on the result, or exact match on captured output.
    pub fn passes(&self, trace: &ExecutionTrace) -> bool {
        if let Some(out) = &self.expected_output {
            return &trace.stdout == out;
        }
        self.expected
            .as_ref()
            .is_some_and(|e| e.py_eq(&trace.result))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskBundle {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub task_id: String,
    pub description: String,
    pub function_name: String,
    pub tests: Vec<FunctionalTest>,
    pub call_specs: Vec<CallSpec>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TestFailure {
    #[error("test {index} raised: {error}")]
    Error { index: usize, error: TraceError },
    #[error("test {index} failed for {call}: got {got}")]
    WrongResult { index: usize, call: String, got: String },
}

impl TaskBundle {
    pub fn call(&self, arguments: Vec<Literal>) -> CallSpec {
        CallSpec::new(self.function_name.clone(), arguments)
    }

    /// Run every functional test under the tracer; the first failure is returned.
    pub fn check(&self, program: &Program) -> Result<(), TestFailure> {
        for (index, t) in self.tests.iter().enumerate() {
            let call = self.call(t.arguments.clone());
            let trace = run_traced(program, &call, DEFAULT_STEP_LIMIT).map_err(|error| TestFailure::Error { index, error })?;
            if !t.passes(&trace) {
                let got = if t.expected_output.is_some() {
                    format!("{:?}", trace.stdout)
                } else {
                    trace.result.repr()
                };
                return Err(TestFailure::WrongResult {
                    index,
                    call: call.render(),
                    got,
                });
            }
        }
        Ok(())
    }

    /// Traces of the bundled call specs, in bundle order. Runs that fail (for
    /// example by exceeding the step limit) are dropped, which leaves the
    /// dynamic question types without that input.
    pub fn traces(&self, program: &Program, step_limit: u64) -> Vec<ExecutionTrace> {
        self.call_specs
            .iter()
            .filter_map(|c| run_traced(program, c, step_limit).ok())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn bundles_load_and_every_solution_passes() {
        let tasks = corpus::tasks();
        assert_eq!(tasks.len(), 6);
        for p in corpus::programs() {
            let task = tasks.iter().find(|t| t.task_id == p.task_id).unwrap();
            task.check(&p.parse().unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.id));
            assert_eq!(task.traces(&p.parse().unwrap(), DEFAULT_STEP_LIMIT).len(), 2, "{}", p.id);
        }
    }

    #[test]
    fn wrong_solution_is_reported() {
        let task = corpus::task("T4").unwrap();
        let p = crate::parser::parse("def averageAllPositiveIntegers(numbers):\n    return 1\n").unwrap();
        assert!(matches!(task.check(&p), Err(TestFailure::WrongResult { index: 0, .. })));
    }

    #[test]
    fn int_and_float_expectations_round_trip() {
        let task = corpus::task("T4").unwrap();
        assert_eq!(task.tests[0].expected, Some(Literal::Float(2.0)));
        assert_eq!(task.tests[1].expected, Some(Literal::Int(0)));
        let json = serde_json::to_string(&task).unwrap();
        let back: TaskBundle = serde_json::from_str(&json).unwrap();
        assert_eq!(back, task);
    }
}
