//! Success rates and error-code counts over graded answers.

mod annotation;
mod errors;
mod success;
mod table;

use std::collections::{BTreeMap, BTreeSet};
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use annotation::{primary_annotations, Annotation, ErrorCode};
pub use errors::{aggregate_errors, Diagnostic, ErrorMatrix};
pub use success::{aggregate_success, SuccessTable, Tally, OVERALL_LABEL};
pub use table::{percent, percent_text, Table};

use crate::harness::{kappa, KappaError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("answer {answer_id} refers to unknown question {qlc_id}")]
    UnknownQlc { answer_id: String, qlc_id: String },
    #[error("question {qlc_id} refers to unknown program {program_id}")]
    UnknownProgram { qlc_id: String, program_id: String },
}

/// Agreement between two raters on the answers both of them coded.
#[derive(Debug, Clone, PartialEq)]
pub struct Agreement {
    pub rater_a: String,
    pub rater_b: String,
    pub items: usize,
    pub kappa: Result<f64, KappaError>,
}

/// Kappa for every pair of raters with at least one answer in common.
pub fn rater_agreement(annotations: &[Annotation]) -> Vec<Agreement> {
    let mut by_rater: BTreeMap<&str, BTreeMap<&str, ErrorCode>> = BTreeMap::new();
    for a in annotations {
        by_rater.entry(&a.rater_id).or_default().entry(&a.answer_id).or_insert(a.error_code);
    }
    let raters: Vec<&str> = by_rater.keys().copied().collect();
    let mut out = Vec::new();
    for (i, ra) in raters.iter().enumerate() {
        for rb in &raters[i + 1..] {
            let (ma, mb) = (&by_rater[ra], &by_rater[rb]);
            let shared: BTreeSet<&str> = ma.keys().filter(|k| mb.contains_key(*k)).copied().collect();
            if shared.is_empty() {
                continue;
            }
            let la: Vec<ErrorCode> = shared.iter().map(|k| ma[k]).collect();
            let lb: Vec<ErrorCode> = shared.iter().map(|k| mb[k]).collect();
            out.push(Agreement {
                rater_a: ra.to_string(),
                rater_b: rb.to_string(),
                items: shared.len(),
                kappa: kappa(&la, &lb),
            });
        }
    }
    out
}

impl Agreement {
    pub fn line(&self) -> String {
        match &self.kappa {
            Ok(k) => format!("kappa {} vs {} over {} answers: {k:.3}", self.rater_a, self.rater_b, self.items),
            Err(e) => format!("kappa {} vs {} over {} answers: undefined ({e})", self.rater_a, self.rater_b, self.items),
        }
    }
}

/// Name used for a model in report file names.
pub fn file_stem(model: &str) -> String {
    model
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') { c } else { '_' })
        .collect()
}

/// Everything `write_reports` renders.
pub struct Reports<'a> {
    pub success: &'a SuccessTable,
    pub errors: &'a ErrorMatrix,
    pub agreements: &'a [Agreement],
    pub diagnostics: &'a [Diagnostic],
}

/// Write every report into `dir` as `{model}.{kind}.{csv,txt}`, where
/// `all` stands for tables covering every model. Returns the paths written.
pub fn write_reports(dir: &Path, r: &Reports<'_>) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> io::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    let mut both = |model: &str, kind: &str, csv: &Table, text: &Table| -> io::Result<()> {
        put(format!("{}.{kind}.csv", file_stem(model)), csv.to_csv())?;
        put(format!("{}.{kind}.txt", file_stem(model)), text.to_text())
    };
    let success = r.success.table();
    both("all", "success", &success, &success)?;
    let counts = r.success.counts_table();
    both("all", "success-counts", &counts, &counts)?;
    for m in &r.success.models {
        both(m, "type-task", &r.success.task_grid_csv(m), &r.success.task_grid(m))?;
    }
    let codes = r.errors.code_table();
    both("all", "error-codes", &codes, &codes)?;
    for m in &r.errors.models {
        let g = r.errors.type_grid(m);
        both(m, "type-code", &g, &g)?;
    }
    let mut put = |name: &str, lines: Vec<String>| -> io::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, lines.iter().map(|l| format!("{l}\n")).collect::<String>())?;
        written.push(path);
        Ok(())
    };
    put("all.overall.txt", vec![r.success.overall_line()])?;
    put("all.indeterminate.txt", r.success.indeterminate.clone())?;
    put("all.kappa.txt", r.agreements.iter().map(Agreement::line).collect())?;
    put("all.diagnostics.txt", r.diagnostics.iter().map(ToString::to_string).collect())?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::harness::{AnswerRecord, Verdict};
    use crate::parser::{Origin, SourceProgram};
    use crate::qlcgen::{Qlc, QlcType, Target, PRNG, SCHEMA_VERSION};

    fn qlc(id: &str, program_id: &str, t: QlcType) -> Qlc {
        Qlc {
            schema_version: SCHEMA_VERSION,
            id: id.into(),
            program_id: program_id.into(),
            qlc_type: t,
            block_model: t.block_model(),
            select_mode: t.select_mode(),
            stem: String::new(),
            options: Vec::new(),
            correct_letters: BTreeSet::from(['a']),
            target: Target::default(),
            seed: 0,
            prng: PRNG.into(),
        }
    }

    fn program(id: &str, task: &str) -> SourceProgram {
        SourceProgram {
            id: id.into(),
            task_id: task.into(),
            source: String::new(),
            origin: Origin::Manual,
            accepted: true,
        }
    }

    fn record(model: &str, qlc_id: &str, verdict: Verdict) -> AnswerRecord {
        AnswerRecord {
            schema_version: SCHEMA_VERSION,
            answer_id: AnswerRecord::answer_id(model, qlc_id),
            qlc_id: qlc_id.into(),
            model_name: model.into(),
            session_id: String::new(),
            raw_text: String::new(),
            extracted_letters: BTreeSet::new(),
            verdict,
            needs_review: false,
        }
    }

    /// `n` questions of one type, the first `correct` answered correctly.
    fn dataset(t: QlcType, n: usize, correct: usize) -> (Vec<Qlc>, Vec<AnswerRecord>, Vec<SourceProgram>) {
        let qlcs: Vec<Qlc> = (0..n).map(|i| qlc(&format!("P{}-q{i}", i % 3), &format!("P{}", i % 3), t)).collect();
        let recs = qlcs
            .iter()
            .enumerate()
            .map(|(i, q)| record("m", &q.id, if i < correct { Verdict::Correct } else { Verdict::Incorrect }))
            .collect();
        let progs = (0..3).map(|i| program(&format!("P{i}"), &format!("T{}", i + 1))).collect();
        (qlcs, recs, progs)
    }

    #[test]
    fn variable_trace_row() {
        let (q, r, p) = dataset(QlcType::VariableTrace, 56, 31);
        let s = aggregate_success(&r, &q, &p).unwrap();
        let text = s.table().to_text();
        let row = text.lines().find(|l| l.starts_with("VariableTrace")).unwrap();
        assert_eq!(row.split_whitespace().collect::<Vec<_>>(), ["VariableTrace", "56", "55%"]);
        assert_eq!(s.overall()["m"].n, 56);
    }

    #[test]
    fn all_correct_is_full_marks() {
        let (q, r, p) = dataset(QlcType::LoopEnd, 9, 9);
        let s = aggregate_success(&r, &q, &p).unwrap();
        assert_eq!(s.overall_line(), "Over all types: m 100% (N=9)");
        let grid = s.task_grid("m").to_text();
        assert!(grid.contains("100% (3/3)"), "{grid}");
    }

    #[test]
    fn rows_follow_type_order() {
        let (q, r, p) = dataset(QlcType::LoopEnd, 3, 1);
        let labels: Vec<String> = aggregate_success(&r, &q, &p).unwrap().table().rows.iter().map(|r| r[0].clone()).collect();
        let mut expected: Vec<String> = QlcType::ALL.iter().map(|t| t.name().to_string()).collect();
        expected.push(OVERALL_LABEL.into());
        assert_eq!(labels, expected);
    }

    #[test]
    fn indeterminate_counts_as_incorrect_and_is_listed() {
        let q = vec![qlc("P0-q0", "P0", QlcType::LoopEnd)];
        let r = vec![record("m", "P0-q0", Verdict::Indeterminate)];
        let s = aggregate_success(&r, &q, &[program("P0", "T1")]).unwrap();
        assert_eq!(s.overall()["m"].rate(), "0%");
        assert_eq!(s.indeterminate, ["m/P0-q0"]);
    }

    #[test]
    fn dangling_references_fail() {
        let r = vec![record("m", "nope", Verdict::Correct)];
        assert!(matches!(aggregate_success(&r, &[], &[]), Err(ReportError::UnknownQlc { .. })));
        let q = vec![qlc("P9-q0", "P9", QlcType::LoopEnd)];
        let r = vec![record("m", "P9-q0", Verdict::Correct)];
        assert!(matches!(aggregate_success(&r, &q, &[]), Err(ReportError::UnknownProgram { .. })));
    }

    #[test]
    fn error_counts_and_diagnostics() {
        let (q, mut r, _) = dataset(QlcType::LoopCount, 11, 1);
        r.push(record("other", "P0-q0", Verdict::Incorrect));
        let mut anns: Vec<Annotation> = ErrorCode::ALL
            .iter()
            .enumerate()
            .map(|(i, c)| Annotation::new(AnswerRecord::answer_id("m", &q[i + 1].id), "r", *c))
            .collect();
        anns.push(Annotation::new("m/P0-q0", "r", ErrorCode::A));
        anns.push(Annotation::new("m/missing", "r", ErrorCode::A));
        let (m, d) = aggregate_errors(&anns, &r, &q);
        assert!(ErrorCode::ALL.iter().all(|c| m.by_model["m"][c] == 1));
        assert_eq!(m.total("m"), 10);
        assert_eq!(m.total("other"), 0);
        assert_eq!(d.len(), 2);
        assert!(matches!(d[0], Diagnostic::CorrectAnswer { .. }));
        let row = m.type_grid("m").rows[6].clone();
        assert_eq!(row[0], "LoopCount");
        assert_eq!(row.last().unwrap(), "10");
    }

    #[test]
    fn empty_annotations_give_zero_matrix() {
        let (q, r, _) = dataset(QlcType::LoopCount, 4, 0);
        let (m, d) = aggregate_errors(&[], &r, &q);
        assert!(d.is_empty());
        assert_eq!(m.total("m"), 0);
        assert!(m.code_table().to_text().contains("Total"));
    }

    #[test]
    fn agreement_on_overlap() {
        let anns = vec![
            Annotation::new("x", "r1", ErrorCode::A),
            Annotation::new("y", "r1", ErrorCode::B),
            Annotation::new("x", "r2", ErrorCode::A),
            Annotation::new("y", "r2", ErrorCode::B),
            Annotation::new("z", "r2", ErrorCode::C),
        ];
        let a = rater_agreement(&anns);
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].items, 2);
        assert_eq!(a[0].line(), "kappa r1 vs r2 over 2 answers: 1.000");
    }

    #[test]
    fn file_names_are_safe() {
        assert_eq!(file_stem("gpt-3.5/turbo x"), "gpt-3.5_turbo_x");
    }
}
