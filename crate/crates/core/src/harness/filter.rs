use serde::{Deserialize, Serialize};

use crate::analysis::{fingerprint, StructuralFingerprint};
use crate::parser::{check_subset, ParseError, SourceProgram, ViolationKind};
use crate::qlcgen::TaskBundle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    Syntax { message: String },
    Import { line: usize },
    Lambda { line: usize },
    GeneratorExpression { line: usize },
    UnsupportedNode { line: usize },
    TestFailed { message: String },
    DuplicateShape { of: String },
}

impl RejectReason {
    pub fn code(&self) -> &'static str {
        match self {
            RejectReason::Syntax { .. } => "syntax",
            RejectReason::Import { .. } => "import",
            RejectReason::Lambda { .. } => "lambda",
            RejectReason::GeneratorExpression { .. } => "generator_expression",
            RejectReason::UnsupportedNode { .. } => "unsupported_node",
            RejectReason::TestFailed { .. } => "test_failed",
            RejectReason::DuplicateShape { .. } => "duplicate_shape",
        }
    }

    fn subset(kind: ViolationKind, line: usize) -> Self {
        match kind {
            ViolationKind::Import => RejectReason::Import { line },
            ViolationKind::Lambda => RejectReason::Lambda { line },
            ViolationKind::GeneratorExpression => RejectReason::GeneratorExpression { line },
            ViolationKind::UnsupportedNode => RejectReason::UnsupportedNode { line },
        }
    }
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RejectReason::Syntax { message } | RejectReason::TestFailed { message } => {
                write!(f, "{}: {message}", self.code())
            }
            RejectReason::Import { line }
            | RejectReason::Lambda { line }
            | RejectReason::GeneratorExpression { line }
            | RejectReason::UnsupportedNode { line } => write!(f, "{} at line {line}", self.code()),
            RejectReason::DuplicateShape { of } => write!(f, "{} of {of}", self.code()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FilterOutcome {
    Accepted {
        fingerprint: StructuralFingerprint,
        /// Set when an accepted program already uses the same identifiers;
        /// a person decides whether the two are really distinct.
        review: Option<String>,
    },
    Rejected(Vec<RejectReason>),
}

impl FilterOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, FilterOutcome::Accepted { .. })
    }
}

/// Decide whether a candidate solution joins the corpus.
///
/// `accepted` pairs the ids of programs already in the corpus with their
/// fingerprints. Subset violations are all reported together; the tests
/// and the duplicate check only run on subset-clean programs.
pub fn filter_candidate(
    program: &SourceProgram,
    task: &TaskBundle,
    accepted: &[(String, StructuralFingerprint)],
) -> FilterOutcome {
    let ast = match program.parse() {
        Ok(ast) => ast,
        Err(ParseError::Unsupported(v)) => return FilterOutcome::Rejected(vec![RejectReason::subset(v.kind, v.line)]),
        Err(e) => return FilterOutcome::Rejected(vec![RejectReason::Syntax { message: e.to_string() }]),
    };
    let violations = check_subset(&ast);
    if !violations.is_empty() {
        return FilterOutcome::Rejected(violations.iter().map(|v| RejectReason::subset(v.kind, v.line)).collect());
    }
    if let Err(e) = task.check(&ast) {
        return FilterOutcome::Rejected(vec![RejectReason::TestFailed { message: e.to_string() }]);
    }
    let fp = fingerprint(&ast);
    if let Some((id, _)) = accepted.iter().find(|(_, f)| f.shape == fp.shape) {
        return FilterOutcome::Rejected(vec![RejectReason::DuplicateShape { of: id.clone() }]);
    }
    let review = accepted
        .iter()
        .find(|(_, f)| f.identifiers == fp.identifiers)
        .map(|(id, _)| format!("same identifiers as {id}"));
    FilterOutcome::Accepted { fingerprint: fp, review }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::parser::Origin;

    fn candidate(source: &str) -> SourceProgram {
        SourceProgram {
            id: "cand".into(),
            task_id: "T4".into(),
            source: source.into(),
            origin: Origin::Llm,
            accepted: false,
        }
    }

    fn accept(p: &SourceProgram, task: &TaskBundle) -> StructuralFingerprint {
        match filter_candidate(p, task, &[]) {
            FilterOutcome::Accepted { fingerprint, .. } => fingerprint,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loop_average_is_accepted() {
        let task = corpus::task("T4").unwrap();
        accept(&corpus::program("T4_b").unwrap(), &task);
    }

    #[test]
    fn import_is_rejected() {
        let task = corpus::task("T4").unwrap();
        let src = format!("import math\n{}", corpus::AVERAGE_WITH_LOOP);
        let out = filter_candidate(&candidate(&src), &task, &[]);
        assert!(matches!(&out, FilterOutcome::Rejected(r) if r[0].code() == "import"), "{out:?}");
    }

    #[test]
    fn lambda_is_rejected() {
        let task = corpus::task("T4").unwrap();
        let src = "def f(xs):\n    g = lambda x: x\n    return g(xs)\n";
        let out = filter_candidate(&candidate(src), &task, &[]);
        assert_eq!(out, FilterOutcome::Rejected(vec![RejectReason::Lambda { line: 2 }]));
    }

    #[test]
    fn failing_tests_reject() {
        let task = corpus::task("T4").unwrap();
        let original = corpus::program("T4_b").unwrap();
        let wrong = original.source.replace("return sum_positive / count", "return count");
        let out = filter_candidate(&candidate(&wrong), &task, &[]);
        assert!(matches!(&out, FilterOutcome::Rejected(r) if r[0].code() == "test_failed"), "{out:?}");
    }

    #[test]
    fn renamed_copy_is_a_duplicate() {
        let task = corpus::task("T4").unwrap();
        let original = corpus::program("T4_b").unwrap();
        let fp = accept(&original, &task);
        let renamed = original.source.replace("count", "n");
        let out = filter_candidate(&candidate(&renamed), &task, &[("T4_b".into(), fp)]);
        assert_eq!(out, FilterOutcome::Rejected(vec![RejectReason::DuplicateShape { of: "T4_b".into() }]));
    }

    #[test]
    fn distinct_programs_pass_without_review() {
        let task = corpus::task("T4").unwrap();
        let fp = accept(&corpus::program("T4_b").unwrap(), &task);
        let out = filter_candidate(&corpus::program("T4_a").unwrap(), &task, &[("T4_b".into(), fp.clone())]);
        match out {
            FilterOutcome::Accepted { fingerprint, review } => {
                assert_ne!(fingerprint.shape, fp.shape);
                assert!(review.is_none());
            }
            other => panic!("{other:?}"),
        }
    }
}
