//! Generate one question of every supported type for each bundled solution.
//!
//! cargo run --example generate_questions [seed]

use std::collections::BTreeMap;

use qlc::{analysis, corpus, qlcgen, tracer};

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut counts: BTreeMap<qlcgen::QlcType, usize> = BTreeMap::new();
    for program in corpus::programs() {
        let task = corpus::task(&program.task_id).expect("bundled task");
        let ast = program.parse().expect("bundled program parses");
        let scopes = analysis::resolve_scopes(&ast);
        let traces = task.traces(&ast, tracer::DEFAULT_STEP_LIMIT);
        println!("=== {} ===\n{}", program.id, program.source);
        for q in qlcgen::generate(&program.id, &ast, &scopes, &traces, seed) {
            *counts.entry(q.qlc_type).or_default() += 1;
            let correct: String = q.correct_letters.iter().collect();
            println!("[{}] {}\n(correct: {correct})\n", q.qlc_type, qlcgen::render(&q));
        }
    }
    println!("questions per type:");
    for (t, n) in counts {
        println!("  {t:<20} {n}");
    }
}
