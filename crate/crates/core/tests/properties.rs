//! Property tests across modules.

mod support;

use proptest::prelude::*;
use qlc::harness::{grade, kappa, Verdict};
use qlc::parser::{parse, printer::program_to_string};
use qlc::qlcgen::{generate, QlcType};
use qlc::report::aggregate_success;
use qlc::tracer::{run_traced, CallSpec, Literal, DEFAULT_STEP_LIMIT};

/// Source text of a random expression over the parameters `x` and `y`.
fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0i64..50).prop_map(|n| n.to_string()),
        Just("x".to_string()),
        Just("y".to_string()),
        Just("True".to_string()),
        Just("'ab'".to_string()),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let op = prop::sample::select(vec!["+", "-", "*", "//", "%", "<", "==", "and", "or"]);
        prop_oneof![
            (inner.clone(), op, inner.clone()).prop_map(|(a, o, b)| format!("({a} {o} {b})")),
            inner.clone().prop_map(|a| format!("-{a}")),
            inner.clone().prop_map(|a| format!("(not {a})")),
            prop::collection::vec(inner.clone(), 0..3).prop_map(|v| format!("[{}]", v.join(", "))),
            (inner.clone(), inner.clone(), inner).prop_map(|(a, b, c)| format!("({a} if {b} else {c})")),
        ]
    })
}

fn program(body: &str) -> String {
    format!("def f(x, y):\n    z = {body}\n    return z\n")
}

fn outcome(src: &str, x: i64, y: i64) -> String {
    let p = parse(src).unwrap();
    match run_traced(&p, &CallSpec::new("f", vec![Literal::Int(x), Literal::Int(y)]), DEFAULT_STEP_LIMIT) {
        Ok(t) => t.result.repr(),
        Err(e) => format!("error: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn printer_round_trips(e in expr(), x in -5i64..5, y in -5i64..5) {
        let src = program(&e);
        let printed = program_to_string(&parse(&src).unwrap());
        let reprinted = program_to_string(&parse(&printed).unwrap());
        prop_assert_eq!(&printed, &reprinted);
        prop_assert_eq!(outcome(&src, x, y), outcome(&printed, x, y));
    }

    #[test]
    fn kappa_is_symmetric_and_bounded(pairs in prop::collection::vec((0u8..10, 0u8..10), 1..80)) {
        let (a, b): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        match (kappa(&a, &b), kappa(&b, &a)) {
            (Ok(x), Ok(y)) => {
                prop_assert!((x - y).abs() < 1e-12);
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&x));
            }
            (x, y) => prop_assert_eq!(x, y),
        }
    }

    #[test]
    fn success_rates_ignore_record_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let (qlcs, mut answers) = support::synthetic_dataset();
        let programs = qlc::corpus::programs();
        let before = aggregate_success(&answers, &qlcs, &programs).unwrap();
        answers.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let after = aggregate_success(&answers, &qlcs, &programs).unwrap();
        prop_assert_eq!(before.table().to_text(), after.table().to_text());
        prop_assert_eq!(before.overall()[support::MODEL_A].n, 399);
    }

    #[test]
    fn grading_is_pure_and_correct_means_exact(text in "[a-e .,()]{0,40}(not )?[a-e][.)]?[ a-z]{0,20}", seed in 0u64..4) {
        let p = qlc::corpus::program("T4_b").unwrap();
        let ast = p.parse().unwrap();
        let traces = qlc::corpus::task("T4").unwrap().traces(&ast, DEFAULT_STEP_LIMIT);
        let qs = generate(&p.id, &ast, &qlc::analysis::resolve_scopes(&ast), &traces, seed);
        for q in &qs {
            let g = grade(&text, q);
            prop_assert_eq!(&g, &grade(&text, q));
            prop_assert_eq!(g.verdict == Verdict::Correct, g.extracted_letters == q.correct_letters);
            prop_assert!(g.extracted_letters.iter().all(|l| q.label(*l).is_some()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generation_is_deterministic(seed in any::<u64>()) {
        for p in qlc::corpus::programs() {
            let ast = p.parse().unwrap();
            let traces = qlc::corpus::task(&p.task_id).unwrap().traces(&ast, DEFAULT_STEP_LIMIT);
            let scopes = qlc::analysis::resolve_scopes(&ast);
            let a = generate(&p.id, &ast, &scopes, &traces, seed);
            prop_assert_eq!(&a, &generate(&p.id, &ast, &scopes, &traces, seed));
            let types: Vec<QlcType> = a.iter().map(|q| q.qlc_type).collect();
            let mut sorted = types.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(types, sorted);
        }
    }
}
