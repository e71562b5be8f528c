//! Parser for the analyzed Python subset and the structural acceptance filter.
//!
//! ```
//! let program = qlc::parser::parse("def f():\n    return 0\n").unwrap();
//! assert_eq!(program.main_function().unwrap().def_line(), 1);
//! assert!(qlc::parser::check_subset(&program).is_empty());
//! ```

pub mod ast;
mod lexer;
mod parse;
pub mod printer;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::Program;
pub use lexer::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Llm,
    Manual,
}

/// A candidate or accepted solution for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceProgram {
    pub id: String,
    pub task_id: String,
    pub source: String,
    pub origin: Origin,
    pub accepted: bool,
}

impl SourceProgram {
    pub fn parse(&self) -> Result<Program, ParseError> {
        parse(&self.source)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Import,
    Lambda,
    GeneratorExpression,
    UnsupportedNode,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Import => "import",
            ViolationKind::Lambda => "lambda",
            ViolationKind::GeneratorExpression => "generator_expression",
            ViolationKind::UnsupportedNode => "unsupported_node",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsetViolation {
    pub kind: ViolationKind,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unsupported construct ({}) at line {}", .0.kind.as_str(), .0.line)]
    Unsupported(SubsetViolation),
    #[error("empty source")]
    Empty,
}

/// Parse subset source text into a position-annotated tree.
pub fn parse(source: &str) -> Result<Program, ParseError> {
    let normalized = lexer::normalize(source);
    if normalized.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let tokens = lexer::tokenize(&normalized)?;
    let body = parse::Parser::new(tokens).parse_file()?;
    Ok(Program {
        body,
        line_count: lexer::physical_lines(&normalized),
    })
}

/// Constructs rejected by the acceptance filter, in source order.
///
/// Imports, lambdas and generator expressions are reported wherever they
/// occur. A program must also consist of exactly one top-level function
/// definition; any other top-level statement (or a missing function) is an
/// `UnsupportedNode` violation.
pub fn check_subset(program: &Program) -> Vec<SubsetViolation> {
    let mut out = Vec::new();
    let mut functions = 0;
    for stmt in &program.body {
        match &stmt.kind {
            ast::StmtKind::FunctionDef { .. } => {
                functions += 1;
                if functions > 1 {
                    out.push(SubsetViolation {
                        kind: ViolationKind::UnsupportedNode,
                        line: stmt.span.line_start,
                    });
                }
            }
            ast::StmtKind::Import { .. } => {}
            _ => out.push(SubsetViolation {
                kind: ViolationKind::UnsupportedNode,
                line: stmt.span.line_start,
            }),
        }
    }
    if functions == 0 {
        out.push(SubsetViolation {
            kind: ViolationKind::UnsupportedNode,
            line: 1,
        });
    }
    ast::walk_stmts(&program.body, &mut |s| {
        if let ast::StmtKind::Import { .. } = s.kind {
            out.push(SubsetViolation {
                kind: ViolationKind::Import,
                line: s.span.line_start,
            });
        }
    });
    ast::walk_exprs(&program.body, &mut |_, e| {
        let kind = match e.kind {
            ast::ExprKind::Lambda { .. } => ViolationKind::Lambda,
            ast::ExprKind::GeneratorExp { .. } => ViolationKind::GeneratorExpression,
            _ => return,
        };
        out.push(SubsetViolation {
            kind,
            line: e.span.line_start,
        });
    });
    out.sort_by_key(|v| (v.line, v.kind.as_str()));
    out.dedup();
    out
}
