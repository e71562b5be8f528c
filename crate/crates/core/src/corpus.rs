//! Bundled tasks and solutions for the six introductory exercises.

use crate::parser::{Origin, SourceProgram};
use crate::qlcgen::TaskBundle;

pub const AVERAGE_WITH_COMPREHENSION: &str = include_str!("../corpus/programs/T4_a.py");
pub const AVERAGE_WITH_LOOP: &str = include_str!("../corpus/programs/T4_b.py");

const TASKS: &[&str] = &[
    include_str!("../corpus/tasks/T1.json"),
    include_str!("../corpus/tasks/T2.json"),
    include_str!("../corpus/tasks/T3.json"),
    include_str!("../corpus/tasks/T4.json"),
    include_str!("../corpus/tasks/T5.json"),
    include_str!("../corpus/tasks/T6.json"),
];

macro_rules! programs {
    ($($id:literal => $origin:ident),* $(,)?) => {
        &[$(($id, Origin::$origin, include_str!(concat!("../corpus/programs/", $id, ".py")))),*]
    };
}

const PROGRAMS: &[(&str, Origin, &str)] = programs![
    "T1_a" => Manual,
    "T1_b" => Manual,
    "T1_c" => Manual,
    "T2_a" => Manual,
    "T2_b" => Manual,
    "T2_c" => Manual,
    "T3_a" => Llm,
    "T3_b" => Manual,
    "T3_c" => Manual,
    "T4_a" => Llm,
    "T4_b" => Llm,
    "T4_c" => Manual,
    "T5_a" => Manual,
    "T5_b" => Manual,
    "T5_c" => Manual,
    "T6_a" => Manual,
    "T6_b" => Manual,
    "T6_c" => Manual,
];

/// The six task bundles, T1 through T6.
pub fn tasks() -> Vec<TaskBundle> {
    TASKS
        .iter()
        .map(|t| serde_json::from_str(t).expect("bundled task parses"))
        .collect()
}

pub fn task(task_id: &str) -> Option<TaskBundle> {
    tasks().into_iter().find(|t| t.task_id == task_id)
}

/// All bundled solutions, ordered by id. Ids are `<task>_<variant>`.
pub fn programs() -> Vec<SourceProgram> {
    PROGRAMS
        .iter()
        .map(|(id, origin, source)| SourceProgram {
            id: (*id).to_string(),
            task_id: id.split('_').next().unwrap().to_string(),
            source: (*source).to_string(),
            origin: *origin,
            accepted: true,
        })
        .collect()
}

pub fn program(id: &str) -> Option<SourceProgram> {
    programs().into_iter().find(|p| p.id == id)
}
