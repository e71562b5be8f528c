use super::*;
use crate::analysis::resolve_scopes;
use crate::corpus::{self, AVERAGE_WITH_COMPREHENSION, AVERAGE_WITH_LOOP};
use crate::parser::parse;
use crate::tracer::{Literal, DEFAULT_STEP_LIMIT};

fn questions(src: &str, seed: u64) -> (Program, Vec<Qlc>) {
    let task = corpus::task("T4").unwrap();
    let p = parse(src).unwrap();
    let traces = task.traces(&p, DEFAULT_STEP_LIMIT);
    let q = generate("T4_b", &p, &resolve_scopes(&p), &traces, seed);
    (p, q)
}

fn of(qs: &[Qlc], t: QlcType) -> &Qlc {
    qs.iter().find(|q| q.qlc_type == t).unwrap()
}

#[test]
fn loop_average_loop_end_options() {
    for seed in 0..20 {
        let (_, qs) = questions(AVERAGE_WITH_LOOP, seed);
        let q = of(&qs, QlcType::LoopEnd);
        assert_eq!(
            render(q),
            "A program loop starts on line 4. Which is the last line inside it?\na. 3\nb. 6\nc. 7\nd. 8"
        );
        assert_eq!(q.correct_letters, BTreeSet::from(['c']));
    }
}

#[test]
fn loop_average_supports_static_and_dynamic_types() {
    let p = parse(AVERAGE_WITH_LOOP).unwrap();
    let traces = corpus::task("T4").unwrap().traces(&p, DEFAULT_STEP_LIMIT);
    let s = supported_types(&p, &resolve_scopes(&p), &traces);
    for t in [
        QlcType::ParameterNames,
        QlcType::VariableNames,
        QlcType::LoopEnd,
        QlcType::VariableDeclaration,
        QlcType::LoopCount,
        QlcType::VariableTrace,
    ] {
        assert!(s.contains(&t), "{t}");
    }
    assert_eq!(s.len(), 8);
}

#[test]
fn parameter_only_program() {
    let p = parse("def f(a):\n    return a\n").unwrap();
    let s = supported_types(&p, &resolve_scopes(&p), &[]);
    assert_eq!(s, BTreeSet::from([QlcType::ParameterNames]));
}

#[test]
fn no_traces_means_no_dynamic_types() {
    let p = parse(AVERAGE_WITH_LOOP).unwrap();
    let s = supported_types(&p, &resolve_scopes(&p), &[]);
    assert!(!s.contains(&QlcType::LoopCount) && !s.contains(&QlcType::VariableTrace));
}

#[test]
fn comprehension_average_variable_names() {
    let (_, qs) = questions(AVERAGE_WITH_COMPREHENSION, 0);
    let q = of(&qs, QlcType::VariableNames);
    assert_eq!(q.stem, "Which of the following are variable names in the program?");
    assert_eq!(q.correct_labels(), BTreeSet::from(["positive_numbers"]));
    assert_eq!(q.options.len(), 5);
    assert!(q.options.windows(2).all(|w| w[0].label < w[1].label));
    assert!(q.options.iter().all(|o| o.label != "num" && o.label != "numbers"));
}

#[test]
fn loop_count_stem() {
    let (_, qs) = questions(AVERAGE_WITH_LOOP, 0);
    let q = of(&qs, QlcType::LoopCount);
    assert_eq!(
        q.stem,
        "Line 4 has a loop structure. How many times does the loop execute when running averageAllPositiveIntegers([1, -2, 3])?"
    );
    assert_eq!(q.correct_labels(), BTreeSet::from(["3"]));
}

#[test]
fn role_options_in_fixed_order() {
    let (_, qs) = questions(AVERAGE_WITH_LOOP, 0);
    let q = of(&qs, QlcType::VariableRole);
    let labels: Vec<&str> = q.options.iter().map(|o| o.label.as_str()).collect();
    assert_eq!(labels, candidates::ROLE_OPTIONS);
    assert_eq!(labels[2], "A stepper that systematically goes through evenly spaced values");
}

#[test]
fn same_seed_same_questions() {
    let (_, a) = questions(AVERAGE_WITH_LOOP, 42);
    let (_, b) = questions(AVERAGE_WITH_LOOP, 42);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn repeat_characters_declaration_distractors() {
    let p = corpus::program("T3_a").unwrap().parse().unwrap();
    let s = resolve_scopes(&p);
    assert_eq!(candidates::declaration_distractors(&p, &s, "result", 6), [6, 1, 5]);
}

#[test]
fn trace_distractor_families() {
    let v = [Literal::Int(0), Literal::Int(1), Literal::Int(4)];
    assert_eq!(candidates::trace_distractors(&v), ["1, 4", "0, 1", "0, 1, 5"]);
    let v = [Literal::Str("x".into())];
    assert_eq!(candidates::trace_distractors(&v), ["'x', 'x'"]);
}

#[test]
fn every_corpus_question_is_self_consistent() {
    for p in corpus::programs() {
        let task = corpus::task(&p.task_id).unwrap();
        let ast = p.parse().unwrap();
        let traces = task.traces(&ast, DEFAULT_STEP_LIMIT);
        for seed in 0..5 {
            for q in generate(&p.id, &ast, &resolve_scopes(&ast), &traces, seed) {
                verify(&q, &ast).unwrap_or_else(|e| panic!("{e}\n{}", render(&q)));
            }
        }
    }
}
