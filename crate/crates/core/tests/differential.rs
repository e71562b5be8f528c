//! The tracer against CPython: every bundled program on every bundled call,
//! compared with executions recorded by `fixtures/record_reference.py`.

mod support;

use qlc::corpus;
use qlc::tracer::{run_traced, CallSpec, DEFAULT_STEP_LIMIT};

#[test]
fn every_program_matches_cpython() {
    let (n, bad) = support::reference_mismatches();
    assert_eq!(n, corpus::programs().len() * 2);
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn bundled_tests_pass_under_the_tracer() {
    for task in corpus::tasks() {
        for p in corpus::programs().iter().filter(|p| p.task_id == task.task_id) {
            let program = p.parse().unwrap();
            for t in &task.tests {
                let call = CallSpec::new(task.function_name.clone(), t.arguments.clone());
                let trace = run_traced(&program, &call, DEFAULT_STEP_LIMIT).unwrap();
                assert!(t.passes(&trace), "{} {}", p.id, call.render());
            }
        }
    }
}
