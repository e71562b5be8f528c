use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::annotation::{Annotation, ErrorCode};
use super::table::Table;
use crate::harness::{AnswerRecord, Verdict};
use crate::qlcgen::{Qlc, QlcType};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorMatrix {
    pub models: Vec<String>,
    pub by_model: BTreeMap<String, BTreeMap<ErrorCode, usize>>,
    pub by_type: BTreeMap<String, BTreeMap<(QlcType, ErrorCode), usize>>,
}

/// Why an annotation was left out of the counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum Diagnostic {
    UnknownAnswer { answer_id: String },
    CorrectAnswer { answer_id: String, rater_id: String },
    UnknownQlc { answer_id: String, qlc_id: String },
    Duplicate { answer_id: String, rater_id: String },
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::UnknownAnswer { answer_id } => write!(f, "annotation for unknown answer {answer_id}"),
            Diagnostic::CorrectAnswer { answer_id, rater_id } => {
                write!(f, "{rater_id} annotated {answer_id}, which was graded correct")
            }
            Diagnostic::UnknownQlc { answer_id, qlc_id } => write!(f, "answer {answer_id} refers to unknown question {qlc_id}"),
            Diagnostic::Duplicate { answer_id, rater_id } => write!(f, "second annotation of {answer_id} (by {rater_id}) ignored"),
        }
    }
}

/// Count one error code per annotated incorrect answer.
///
/// Annotations that do not join to an incorrect (or indeterminate) answer
/// are skipped and reported. Pass one annotation per answer; see
/// [`super::primary_annotations`].
pub fn aggregate_errors(annotations: &[Annotation], records: &[AnswerRecord], qlcs: &[Qlc]) -> (ErrorMatrix, Vec<Diagnostic>) {
    let record_by_id: HashMap<&str, &AnswerRecord> = records.iter().map(|r| (r.answer_id.as_str(), r)).collect();
    let qlc_by_id: HashMap<&str, &Qlc> = qlcs.iter().map(|q| (q.id.as_str(), q)).collect();
    let models: BTreeSet<String> = records.iter().map(|r| r.model_name.clone()).collect();
    let mut by_model: BTreeMap<String, BTreeMap<ErrorCode, usize>> = models
        .iter()
        .map(|m| (m.clone(), ErrorCode::ALL.iter().map(|c| (*c, 0)).collect()))
        .collect();
    let mut by_type: BTreeMap<String, BTreeMap<(QlcType, ErrorCode), usize>> = BTreeMap::new();
    let mut seen = HashSet::new();
    let mut diagnostics = Vec::new();
    for a in annotations {
        let Some(r) = record_by_id.get(a.answer_id.as_str()) else {
            diagnostics.push(Diagnostic::UnknownAnswer { answer_id: a.answer_id.clone() });
            continue;
        };
        if r.verdict == Verdict::Correct {
            diagnostics.push(Diagnostic::CorrectAnswer {
                answer_id: a.answer_id.clone(),
                rater_id: a.rater_id.clone(),
            });
            continue;
        }
        let Some(q) = qlc_by_id.get(r.qlc_id.as_str()) else {
            diagnostics.push(Diagnostic::UnknownQlc {
                answer_id: a.answer_id.clone(),
                qlc_id: r.qlc_id.clone(),
            });
            continue;
        };
        if !seen.insert(a.answer_id.as_str()) {
            diagnostics.push(Diagnostic::Duplicate {
                answer_id: a.answer_id.clone(),
                rater_id: a.rater_id.clone(),
            });
            continue;
        }
        *by_model.get_mut(&r.model_name).expect("model collected above").get_mut(&a.error_code).expect("all codes present") += 1;
        *by_type.entry(r.model_name.clone()).or_default().entry((q.qlc_type, a.error_code)).or_default() += 1;
    }
    (
        ErrorMatrix {
            models: models.into_iter().collect(),
            by_model,
            by_type,
        },
        diagnostics,
    )
}

impl ErrorMatrix {
    pub fn total(&self, model: &str) -> usize {
        self.by_model.get(model).map_or(0, |c| c.values().sum())
    }

    /// Codes down, models across, with a total row. Zero cells read "-".
    pub fn code_table(&self) -> Table {
        let mut t = Table::new(["Code".to_string(), "Error".to_string()].into_iter().chain(self.models.iter().cloned()));
        let cell = |n: usize| if n == 0 { "-".to_string() } else { n.to_string() };
        for c in ErrorCode::ALL {
            t.push([c.key().to_string(), c.title().to_string()].into_iter().chain(self.models.iter().map(|m| cell(self.by_model[m][&c]))));
        }
        t.push(["".to_string(), "Total".to_string()].into_iter().chain(self.models.iter().map(|m| self.total(m).to_string())));
        t
    }

    /// Question types down, codes across, for one model.
    pub fn type_grid(&self, model: &str) -> Table {
        let empty = BTreeMap::new();
        let cells = self.by_type.get(model).unwrap_or(&empty);
        let mut t = Table::new(
            std::iter::once("QLC type".to_string())
                .chain(ErrorCode::ALL.iter().map(|c| c.key().to_string()))
                .chain(std::iter::once("Total".to_string())),
        );
        for ty in QlcType::ALL {
            let counts: Vec<usize> = ErrorCode::ALL.iter().map(|c| cells.get(&(ty, *c)).copied().unwrap_or(0)).collect();
            let total: usize = counts.iter().sum();
            t.push(
                std::iter::once(ty.name().to_string())
                    .chain(counts.iter().map(|n| n.to_string()))
                    .chain(std::iter::once(total.to_string())),
            );
        }
        t
    }
}
