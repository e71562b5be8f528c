//! Step-limited tracing interpreter for the subset language.
//!
//! A run records every assignment to a local name, every entry into a loop
//! body and the final return. Loop iterations are counted as body entries, so
//! a loop whose first statement breaks out still counts one execution.

mod builtins;
mod interp;
pub mod value;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::Program;
pub use builtins::{is_builtin, BUILTINS};
pub use value::{Literal, Value};

pub const DEFAULT_STEP_LIMIT: u64 = 100_000;

/// A concrete call of the analyzed function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallSpec {
    pub function_name: String,
    pub arguments: Vec<Literal>,
}

impl CallSpec {
    pub fn new(function_name: impl Into<String>, arguments: Vec<Literal>) -> Self {
        Self {
            function_name: function_name.into(),
            arguments,
        }
    }

    /// Source form of the call, e.g. `averageAllPositiveIntegers([1, -2, 3])`.
    pub fn render(&self) -> String {
        let args: Vec<String> = self.arguments.iter().map(Literal::repr).collect();
        format!("{}({})", self.function_name, args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Assign {
        name: String,
        value: Literal,
        line: usize,
        step: u64,
    },
    LoopBodyEntered {
        header_line: usize,
        /// 1-based, restarting for every fresh execution of the loop statement.
        iteration: u64,
        step: u64,
    },
    Return {
        value: Literal,
        line: usize,
        step: u64,
    },
}

impl Event {
    pub fn step(&self) -> u64 {
        match self {
            Event::Assign { step, .. }
            | Event::LoopBodyEntered { step, .. }
            | Event::Return { step, .. } => *step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub call: CallSpec,
    pub events: Vec<Event>,
    pub steps_used: u64,
    pub result: Literal,
    /// Text written by `print`.
    pub stdout: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("step limit of {limit} exceeded")]
    StepLimitExceeded { limit: u64 },
    #[error("runtime error at line {line}: {message}")]
    Runtime { line: usize, message: String },
    #[error("program does not define a single function")]
    NoFunction,
    #[error("no function named {0}")]
    UnknownFunction(String),
    #[error("{name}() takes {expected} arguments but {given} were given")]
    Arity {
        name: String,
        expected: usize,
        given: usize,
    },
    #[error("step limit must be positive")]
    InvalidStepLimit,
}

/// Execute `call` against the program's function, recording a trace.
pub fn run_traced(
    program: &Program,
    call: &CallSpec,
    step_limit: u64,
) -> Result<ExecutionTrace, TraceError> {
    if step_limit == 0 {
        return Err(TraceError::InvalidStepLimit);
    }
    let function = program.main_function().ok_or(TraceError::NoFunction)?;
    if function.name != call.function_name {
        return Err(TraceError::UnknownFunction(call.function_name.clone()));
    }
    if function.params.len() != call.arguments.len() {
        return Err(TraceError::Arity {
            name: call.function_name.clone(),
            expected: function.params.len(),
            given: call.arguments.len(),
        });
    }
    let mut interp = interp::Interpreter::new(step_limit);
    let result = interp.call(function, &call.arguments)?;
    Ok(ExecutionTrace {
        call: call.clone(),
        events: interp.events,
        steps_used: interp.steps,
        result: result.to_literal(),
        stdout: interp.stdout,
    })
}

/// Number of body entries for the loop whose header is on `header_line`.
pub fn loop_iterations(trace: &ExecutionTrace, header_line: usize) -> u64 {
    trace
        .events
        .iter()
        .filter(|e| matches!(e, Event::LoopBodyEntered { header_line: h, .. } if *h == header_line))
        .count() as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable {0} is never assigned in the trace")]
pub struct NeverAssigned(pub String);

/// Every value assigned to `name`, in order, including repeated values.
pub fn assignment_trace(trace: &ExecutionTrace, name: &str) -> Result<Vec<Literal>, NeverAssigned> {
    let values: Vec<Literal> = trace
        .events
        .iter()
        .filter_map(|e| match e {
            Event::Assign { name: n, value, .. } if n == name => Some(value.clone()),
            _ => None,
        })
        .collect();
    if values.is_empty() {
        Err(NeverAssigned(name.to_string()))
    } else {
        Ok(values)
    }
}

/// Lines on which `name` received a value during the run, with multiplicity.
pub fn assignment_lines(trace: &ExecutionTrace, name: &str) -> Vec<usize> {
    trace
        .events
        .iter()
        .filter_map(|e| match e {
            Event::Assign { name: n, line, .. } if n == name => Some(*line),
            _ => None,
        })
        .collect()
}
