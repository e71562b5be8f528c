//! Question generation: the eight templates, distractors and rendering.
//!
//! ```
//! use qlc::{analysis, corpus, qlcgen, tracer};
//! let task = corpus::task("T4").unwrap();
//! let program = qlc::parser::parse(corpus::AVERAGE_WITH_LOOP).unwrap();
//! let scopes = analysis::resolve_scopes(&program);
//! let traces = task.traces(&program, tracer::DEFAULT_STEP_LIMIT);
//! let qlcs = qlcgen::generate("T4_b", &program, &scopes, &traces, 7);
//! let loop_end = qlcs.iter().find(|q| q.qlc_type == qlcgen::QlcType::LoopEnd).unwrap();
//! assert_eq!(qlcgen::render(loop_end),
//!     "A program loop starts on line 4. Which is the last line inside it?\na. 3\nb. 6\nc. 7\nd. 8");
//! ```

mod candidates;
mod task;
mod verify;

use std::collections::BTreeSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{sha256_hex, ScopeTable};
use crate::parser::Program;
use crate::tracer::{CallSpec, ExecutionTrace};
pub use task::{FunctionalTest, TaskBundle, TestFailure, SCHEMA_VERSION};
pub use verify::{recompute_correct_labels, verify, Inconsistency};

/// Name of the pseudo-random generator recorded in every question.
pub const PRNG: &str = "chacha8-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QlcType {
    ParameterNames,
    VariableNames,
    LoopEnd,
    VariableDeclaration,
    VariableRole,
    LinePurpose,
    LoopCount,
    VariableTrace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockScope {
    Atom,
    Block,
    Relation,
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockDimension {
    Text,
    Execution,
    Function,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockModel {
    pub scope: BlockScope,
    pub dimension: BlockDimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectMode {
    Multi,
    Single,
}

impl QlcType {
    pub const ALL: [QlcType; 8] = [
        QlcType::ParameterNames,
        QlcType::VariableNames,
        QlcType::LoopEnd,
        QlcType::VariableDeclaration,
        QlcType::VariableRole,
        QlcType::LinePurpose,
        QlcType::LoopCount,
        QlcType::VariableTrace,
    ];

    /// 1-based position in the template table.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            QlcType::ParameterNames => "ParameterNames",
            QlcType::VariableNames => "VariableNames",
            QlcType::LoopEnd => "LoopEnd",
            QlcType::VariableDeclaration => "VariableDeclaration",
            QlcType::VariableRole => "VariableRole",
            QlcType::LinePurpose => "LinePurpose",
            QlcType::LoopCount => "LoopCount",
            QlcType::VariableTrace => "VariableTrace",
        }
    }

    pub fn from_name(name: &str) -> Option<QlcType> {
        QlcType::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn block_model(self) -> BlockModel {
        use BlockDimension::*;
        use BlockScope::*;
        let (scope, dimension) = match self {
            QlcType::ParameterNames | QlcType::VariableNames => (Atom, Text),
            QlcType::LoopEnd => (Block, Text),
            QlcType::VariableDeclaration => (Relation, Text),
            QlcType::VariableRole => (Relation, Execution),
            QlcType::LinePurpose => (Block, Function),
            QlcType::LoopCount => (Block, Execution),
            QlcType::VariableTrace => (Atom, Execution),
        };
        BlockModel { scope, dimension }
    }

    pub fn select_mode(self) -> SelectMode {
        match self {
            QlcType::ParameterNames | QlcType::VariableNames => SelectMode::Multi,
            _ => SelectMode::Single,
        }
    }

    /// Whether answering needs an execution trace.
    pub fn is_dynamic(self) -> bool {
        matches!(self, QlcType::LoopCount | QlcType::VariableTrace)
    }
}

impl fmt::Display for QlcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QlcOption {
    pub letter: char,
    pub label: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Target {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub call_spec: Option<CallSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qlc {
    pub schema_version: u32,
    pub id: String,
    pub program_id: String,
    pub qlc_type: QlcType,
    pub block_model: BlockModel,
    pub select_mode: SelectMode,
    pub stem: String,
    pub options: Vec<QlcOption>,
    pub correct_letters: BTreeSet<char>,
    pub target: Target,
    pub seed: u64,
    pub prng: String,
}

impl Qlc {
    pub fn label(&self, letter: char) -> Option<&str> {
        self.options
            .iter()
            .find(|o| o.letter == letter)
            .map(|o| o.label.as_str())
    }

    pub fn letters(&self) -> impl Iterator<Item = char> + '_ {
        self.options.iter().map(|o| o.letter)
    }

    pub fn correct_labels(&self) -> BTreeSet<&str> {
        self.correct_letters
            .iter()
            .filter_map(|l| self.label(*l))
            .collect()
    }
}

/// Stem, then one `letter. label` line per option.
pub fn render(qlc: &Qlc) -> String {
    let mut out = qlc.stem.clone();
    for o in &qlc.options {
        out.push('\n');
        out.push(o.letter);
        out.push_str(". ");
        out.push_str(&o.label);
    }
    out
}

/// The generator for one (program, seed) pair.
pub fn rng_for(program_id: &str, seed: u64) -> ChaCha8Rng {
    let digest = sha256_hex(format!("{PRNG}:{seed}:{program_id}").as_bytes());
    let mut bytes = [0u8; 32];
    for (i, b) in bytes.iter_mut().enumerate() {
        *b = u8::from_str_radix(&digest[2 * i..2 * i + 2], 16).unwrap();
    }
    ChaCha8Rng::from_seed(bytes)
}

/// Types with at least one eligible target. Without traces the dynamic types
/// are never supported.
pub fn supported_types(program: &Program, scopes: &ScopeTable, traces: &[ExecutionTrace]) -> BTreeSet<QlcType> {
    QlcType::ALL
        .into_iter()
        .filter(|t| !candidates::candidates(*t, program, scopes, traces).is_empty())
        .collect()
}

/// One question per supported type, in template order.
pub fn generate(program_id: &str, program: &Program, scopes: &ScopeTable, traces: &[ExecutionTrace], seed: u64) -> Vec<Qlc> {
    let mut rng = rng_for(program_id, seed);
    QlcType::ALL
        .into_iter()
        .filter_map(|t| {
            let cands = candidates::candidates(t, program, scopes, traces);
            candidates::instantiate(cands, &mut rng).map(|(target, stem, labels, correct)| {
                let options = labels
                    .into_iter()
                    .zip('a'..='e')
                    .map(|(label, letter)| QlcOption { letter, label })
                    .collect::<Vec<_>>();
                Qlc {
                    schema_version: SCHEMA_VERSION,
                    id: format!("{program_id}-q{}", t.number()),
                    program_id: program_id.to_string(),
                    qlc_type: t,
                    block_model: t.block_model(),
                    select_mode: t.select_mode(),
                    stem,
                    correct_letters: correct.into_iter().map(|i| options[i].letter).collect(),
                    options,
                    target,
                    seed,
                    prng: PRNG.to_string(),
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests;
