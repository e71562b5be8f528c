//! Questions about learners' code.
//!
//! Generates multiple-choice comprehension questions from short programs in a
//! Python subset, and evaluates chat models on them: prompting, grading,
//! error annotation and aggregate reports.
//!
//! The pipeline, stage by stage:
//!
//! - [`parser`] turns source text into a line-annotated tree and applies the
//!   acceptance filter (no imports, lambdas or generator expressions).
//! - [`analysis`] derives static facts: names, scopes, loop extents, variable
//!   roles, line purposes and structural fingerprints.
//! - [`tracer`] runs the function on concrete inputs and records assignments
//!   and loop iterations.
//! - [`qlcgen`] fills the eight question templates and synthesizes distractors.
//! - [`harness`] talks to a chat-completion endpoint (or replays transcripts),
//!   grades answers and computes inter-rater agreement.
//! - [`report`] aggregates graded answers and annotations into tables.
//! - [`cli`] wires the stages together over a workspace directory.
//!
//! Runnable walkthroughs of each stage live in the crate's `examples/` directory.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod harness;
pub mod parser;
pub mod qlcgen;
pub mod report;
pub mod tracer;
