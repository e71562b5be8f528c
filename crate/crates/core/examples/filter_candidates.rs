//! Run candidate solutions through the acceptance filter.
//!
//! cargo run --example filter_candidates

use qlc::analysis::StructuralFingerprint;
use qlc::corpus;
use qlc::harness::{filter_candidate, FilterOutcome};
use qlc::parser::{Origin, SourceProgram};

fn candidate(id: &str, source: String) -> SourceProgram {
    SourceProgram {
        id: id.into(),
        task_id: "T4".into(),
        source,
        origin: Origin::Llm,
        accepted: false,
    }
}

fn main() {
    let task = corpus::task("T4").unwrap();
    let base = corpus::AVERAGE_WITH_LOOP;
    let candidates = [
        candidate("loop", base.to_string()),
        candidate("comprehension", corpus::AVERAGE_WITH_COMPREHENSION.to_string()),
        candidate("renamed", base.replace("sum_positive", "total")),
        candidate("imports", format!("import statistics\n{base}")),
        candidate("wrong", base.replace("num > 0", "num >= 0").replace("return 0", "return 1")),
        candidate("broken", base.replace("):", ")")),
    ];
    let mut accepted: Vec<(String, StructuralFingerprint)> = Vec::new();
    for c in candidates {
        match filter_candidate(&c, &task, &accepted) {
            FilterOutcome::Accepted { fingerprint, review } => {
                println!("{:<14} accepted{}", c.id, review.map(|r| format!(" ({r})")).unwrap_or_default());
                accepted.push((c.id, fingerprint));
            }
            FilterOutcome::Rejected(reasons) => {
                let rs: Vec<String> = reasons.iter().map(ToString::to_string).collect();
                println!("{:<14} rejected: {}", c.id, rs.join("; "));
            }
        }
    }
}
