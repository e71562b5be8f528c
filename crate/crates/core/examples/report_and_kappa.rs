//! Aggregate a small graded dataset and compare two raters.
//!
//! cargo run --example report_and_kappa

use qlc::analysis::resolve_scopes;
use qlc::corpus;
use qlc::harness::{grade, AnswerRecord};
use qlc::qlcgen::{generate, SCHEMA_VERSION};
use qlc::report::{aggregate_errors, aggregate_success, rater_agreement, Annotation, ErrorCode};
use qlc::tracer::DEFAULT_STEP_LIMIT;

fn main() {
    let programs = corpus::programs();
    let mut questions = Vec::new();
    for p in &programs {
        let ast = p.parse().unwrap();
        let traces = corpus::task(&p.task_id).unwrap().traces(&ast, DEFAULT_STEP_LIMIT);
        questions.extend(generate(&p.id, &ast, &resolve_scopes(&ast), &traces, 0));
    }
    // Two made-up models: one always answers a, one answers b.
    let mut answers = Vec::new();
    for (model, reply) in [("picks-a", "a."), ("picks-b", "b.")] {
        for q in &questions {
            let g = grade(reply, q);
            answers.push(AnswerRecord {
                schema_version: SCHEMA_VERSION,
                answer_id: AnswerRecord::answer_id(model, &q.id),
                qlc_id: q.id.clone(),
                model_name: model.into(),
                session_id: format!("{model}/{}", q.program_id),
                raw_text: reply.into(),
                extracted_letters: g.extracted_letters,
                verdict: g.verdict,
                needs_review: g.needs_review,
            });
        }
    }
    let success = aggregate_success(&answers, &questions, &programs).unwrap();
    print!("{}", success.table().to_text());
    println!("{}\n", success.overall_line());
    print!("{}", success.task_grid("picks-a").to_text());

    let wrong: Vec<&AnswerRecord> = answers.iter().filter(|a| a.verdict != qlc::harness::Verdict::Correct).collect();
    let mut annotations = Vec::new();
    for (i, a) in wrong.iter().enumerate() {
        let first = ErrorCode::ALL[i % 10];
        let second = if i % 4 == 0 { ErrorCode::ALL[(i + 1) % 10] } else { first };
        annotations.push(Annotation::new(&a.answer_id, "rater-1", first));
        annotations.push(Annotation::new(&a.answer_id, "rater-2", second));
    }
    let primary: Vec<Annotation> = annotations.iter().filter(|a| a.rater_id == "rater-1").cloned().collect();
    let (errors, diagnostics) = aggregate_errors(&primary, &answers, &questions);
    println!();
    print!("{}", errors.code_table().to_text());
    println!("{} diagnostics", diagnostics.len());
    for a in rater_agreement(&annotations) {
        println!("{}", a.line());
    }
}
