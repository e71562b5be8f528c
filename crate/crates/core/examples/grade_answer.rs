//! Grade free-text answers against a generated question.
//!
//! cargo run --example grade_answer ["answer text"]

use qlc::analysis::resolve_scopes;
use qlc::corpus;
use qlc::harness::grade;
use qlc::qlcgen::{generate, render, QlcType};
use qlc::tracer::DEFAULT_STEP_LIMIT;

fn main() {
    let program = corpus::program("T4_b").unwrap();
    let ast = program.parse().unwrap();
    let traces = corpus::task("T4").unwrap().traces(&ast, DEFAULT_STEP_LIMIT);
    let questions = generate(&program.id, &ast, &resolve_scopes(&ast), &traces, 0);
    let q = questions.iter().find(|q| q.qlc_type == QlcType::LoopEnd).unwrap();
    println!("{}\n", render(q));
    let answers: Vec<String> = match std::env::args().nth(1) {
        Some(a) => vec![a],
        None => vec![
            "The correct answer is c. 7".into(),
            "The loop ends on line 6, so b.".into(),
            "It is not b. The answer is c.".into(),
            "Either (a) or (b).".into(),
            "I am not sure.".into(),
            "7".into(),
        ],
    };
    for a in answers {
        let g = grade(&a, q);
        let letters: String = g.extracted_letters.iter().collect();
        let review = if g.needs_review { ", needs review" } else { "" };
        println!("{a:?}\n  -> {{{letters}}} {:?}{review}", g.verdict);
    }
}
