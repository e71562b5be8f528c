use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::table::{percent_text, Table};
use super::ReportError;
use crate::harness::{AnswerRecord, Verdict};
use crate::parser::SourceProgram;
use crate::qlcgen::{Qlc, QlcType};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub n: usize,
    pub correct: usize,
    /// Counted as incorrect, kept apart for auditing.
    pub indeterminate: usize,
}

impl Tally {
    fn add(&mut self, verdict: Verdict) {
        self.n += 1;
        match verdict {
            Verdict::Correct => self.correct += 1,
            Verdict::Indeterminate => self.indeterminate += 1,
            Verdict::Incorrect => {}
        }
    }

    pub fn rate(&self) -> String {
        percent_text(self.correct, self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessTable {
    /// Sorted model names; one column each.
    pub models: Vec<String>,
    /// Every question type in order, then the overall row under `None`.
    pub rows: Vec<(Option<QlcType>, BTreeMap<String, Tally>)>,
    /// Per model, tallies by question type and task.
    pub by_task: BTreeMap<String, BTreeMap<(QlcType, String), Tally>>,
    pub tasks: Vec<String>,
    /// Answer ids graded indeterminate, sorted.
    pub indeterminate: Vec<String>,
}

pub const OVERALL_LABEL: &str = "Over all types";

/// Count graded answers by model, question type and task.
pub fn aggregate_success(records: &[AnswerRecord], qlcs: &[Qlc], programs: &[SourceProgram]) -> Result<SuccessTable, ReportError> {
    let qlc_by_id: HashMap<&str, &Qlc> = qlcs.iter().map(|q| (q.id.as_str(), q)).collect();
    let task_by_program: HashMap<&str, &str> = programs.iter().map(|p| (p.id.as_str(), p.task_id.as_str())).collect();
    let models: BTreeSet<String> = records.iter().map(|r| r.model_name.clone()).collect();
    let mut per_type: BTreeMap<QlcType, BTreeMap<String, Tally>> = BTreeMap::new();
    let mut overall: BTreeMap<String, Tally> = models.iter().map(|m| (m.clone(), Tally::default())).collect();
    let mut by_task: BTreeMap<String, BTreeMap<(QlcType, String), Tally>> = BTreeMap::new();
    let mut tasks = BTreeSet::new();
    let mut indeterminate = Vec::new();
    for r in records {
        let qlc = qlc_by_id.get(r.qlc_id.as_str()).ok_or_else(|| ReportError::UnknownQlc {
            answer_id: r.answer_id.clone(),
            qlc_id: r.qlc_id.clone(),
        })?;
        let task = task_by_program
            .get(qlc.program_id.as_str())
            .ok_or_else(|| ReportError::UnknownProgram {
                qlc_id: qlc.id.clone(),
                program_id: qlc.program_id.clone(),
            })?;
        tasks.insert(task.to_string());
        per_type.entry(qlc.qlc_type).or_default().entry(r.model_name.clone()).or_default().add(r.verdict);
        overall.get_mut(&r.model_name).expect("model collected above").add(r.verdict);
        by_task
            .entry(r.model_name.clone())
            .or_default()
            .entry((qlc.qlc_type, task.to_string()))
            .or_default()
            .add(r.verdict);
        if r.verdict == Verdict::Indeterminate {
            indeterminate.push(r.answer_id.clone());
        }
    }
    indeterminate.sort();
    let mut rows: Vec<(Option<QlcType>, BTreeMap<String, Tally>)> = QlcType::ALL
        .iter()
        .map(|t| {
            let mut cells = per_type.remove(t).unwrap_or_default();
            for m in &models {
                cells.entry(m.clone()).or_default();
            }
            (Some(*t), cells)
        })
        .collect();
    rows.push((None, overall));
    Ok(SuccessTable {
        models: models.into_iter().collect(),
        rows,
        by_task,
        tasks: tasks.into_iter().collect(),
        indeterminate,
    })
}

fn row_label(t: Option<QlcType>) -> String {
    t.map_or_else(|| OVERALL_LABEL.to_string(), |t| t.name().to_string())
}

fn n_text(cells: &BTreeMap<String, Tally>) -> String {
    let ns: BTreeSet<usize> = cells.values().map(|t| t.n).collect();
    if ns.len() <= 1 {
        ns.into_iter().next().unwrap_or(0).to_string()
    } else {
        cells.values().map(|t| t.n.to_string()).collect::<Vec<_>>().join("/")
    }
}

impl SuccessTable {
    pub fn overall(&self) -> &BTreeMap<String, Tally> {
        &self.rows.last().expect("overall row always present").1
    }

    /// Type, N, then one success-rate column per model.
    pub fn table(&self) -> Table {
        let mut t = Table::new(["QLC type".to_string(), "N".to_string()].into_iter().chain(self.models.iter().cloned()));
        for (ty, cells) in &self.rows {
            t.push([row_label(*ty), n_text(cells)].into_iter().chain(self.models.iter().map(|m| cells[m].rate())));
        }
        t
    }

    /// Full counts, one line per type and model.
    pub fn counts_table(&self) -> Table {
        let mut t = Table::new(["qlc_type", "model", "n", "correct", "indeterminate", "rate"]);
        for (ty, cells) in &self.rows {
            for m in &self.models {
                let c = cells[m];
                t.push([row_label(*ty), m.clone(), c.n.to_string(), c.correct.to_string(), c.indeterminate.to_string(), c.rate()]);
            }
        }
        t
    }

    /// Question type by task grid for one model; cells read "rate (correct/n)".
    pub fn task_grid(&self, model: &str) -> Table {
        let empty = BTreeMap::new();
        let cells = self.by_task.get(model).unwrap_or(&empty);
        let mut t = Table::new(std::iter::once("QLC type".to_string()).chain(self.tasks.iter().cloned()));
        for ty in QlcType::ALL {
            t.push(std::iter::once(ty.name().to_string()).chain(self.tasks.iter().map(|task| {
                match cells.get(&(ty, task.clone())) {
                    Some(c) if c.n > 0 => format!("{} ({}/{})", c.rate(), c.correct, c.n),
                    _ => "-".to_string(),
                }
            })));
        }
        t
    }

    pub fn task_grid_csv(&self, model: &str) -> Table {
        let mut t = Table::new(["qlc_type", "task", "n", "correct", "rate"]);
        if let Some(cells) = self.by_task.get(model) {
            for ((ty, task), c) in cells {
                t.push([ty.name().to_string(), task.clone(), c.n.to_string(), c.correct.to_string(), c.rate()]);
            }
        }
        t
    }

    /// The overall success rate of every model on one line.
    pub fn overall_line(&self) -> String {
        let parts: Vec<String> = self.overall().iter().map(|(m, t)| format!("{m} {} (N={})", t.rate(), t.n)).collect();
        format!("{OVERALL_LABEL}: {}", parts.join(", "))
    }
}
