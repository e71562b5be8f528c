use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::ast::{Expr, ExprKind, Param, Stmt, StmtKind};
use crate::parser::Program;
use crate::tracer::is_builtin;

/// Keywords offered as decoys in name questions, when the program uses them.
const DECOY_KEYWORDS: &[&str] = &["def", "if", "else", "for", "while", "return", "in", "break"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableInfo {
    pub name: String,
    /// First assignment line.
    pub creation_line: usize,
    /// Every line that binds the name, ascending, without repeats.
    pub assignment_lines: Vec<usize>,
    pub read_lines: Vec<usize>,
    /// Bound only as a list-comprehension variable.
    pub comprehension: bool,
    /// Bound by a `for` header (as opposed to `=` or augmented assignment).
    pub loop_target: bool,
}

impl VariableInfo {
    /// Lines where the name is read or written.
    pub fn use_lines(&self) -> BTreeSet<usize> {
        self.assignment_lines
            .iter()
            .chain(&self.read_lines)
            .copied()
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopeTable {
    pub function_name: String,
    pub def_line: usize,
    pub parameters: Vec<(String, usize)>,
    /// Ordered by creation line, then name.
    pub variables: Vec<VariableInfo>,
    pub builtins_used: BTreeSet<String>,
    pub keywords_used: BTreeSet<String>,
}

impl ScopeTable {
    pub fn variable(&self, name: &str) -> Option<&VariableInfo> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn is_parameter(&self, name: &str) -> bool {
        self.parameters.iter().any(|(p, _)| p == name)
    }

    /// Names that count as program variables in name questions: comprehension
    /// variables live in their own scope and are left out.
    pub fn variable_names(&self) -> Vec<&str> {
        self.variables
            .iter()
            .filter(|v| !v.comprehension)
            .map(|v| v.name.as_str())
            .collect()
    }

    /// Every identifier the program itself introduces.
    pub fn user_identifiers(&self) -> BTreeSet<&str> {
        let mut out: BTreeSet<&str> = self.variables.iter().map(|v| v.name.as_str()).collect();
        out.extend(self.parameters.iter().map(|(p, _)| p.as_str()));
        out.insert(&self.function_name);
        out
    }
}

#[derive(Default)]
struct Collector {
    assigned: BTreeMap<String, BTreeSet<usize>>,
    reads: BTreeMap<String, BTreeSet<usize>>,
    comp_bound: BTreeMap<String, BTreeSet<usize>>,
    loop_bound: BTreeSet<String>,
    called: BTreeSet<String>,
    loaded: BTreeSet<String>,
    keywords: BTreeSet<String>,
}

impl Collector {
    fn bind(&mut self, target: &Expr, line: usize) {
        match &target.kind {
            ExprKind::Name(n) => {
                self.assigned.entry(n.clone()).or_default().insert(line);
            }
            ExprKind::Tuple(items) | ExprKind::List(items) => {
                for t in items {
                    self.bind(t, line);
                }
            }
            // Item assignment mutates the container: a read of its name.
            _ => self.expr(target),
        }
    }

    fn comp_bind(&mut self, target: &Expr) {
        target.walk(&mut |e| {
            if let ExprKind::Name(n) = &e.kind {
                self.comp_bound
                    .entry(n.clone())
                    .or_default()
                    .insert(e.span.line_start);
            }
        });
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Name(n) => {
                self.reads
                    .entry(n.clone())
                    .or_default()
                    .insert(e.span.line_start);
                self.loaded.insert(n.clone());
            }
            ExprKind::Call { func, args, keywords } => {
                if let ExprKind::Name(n) = &func.kind {
                    self.called.insert(n.clone());
                    self.loaded.insert(n.clone());
                } else {
                    self.expr(func);
                }
                for a in args {
                    self.expr(a);
                }
                for k in keywords {
                    self.expr(&k.value);
                }
            }
            ExprKind::ListComp { element, generators } | ExprKind::GeneratorExp { element, generators } => {
                for g in generators {
                    self.expr(&g.iter);
                    self.comp_bind(&g.target);
                    for c in &g.conditions {
                        self.expr(c);
                    }
                }
                self.expr(element);
            }
            _ => {
                for c in e.children() {
                    self.expr(c);
                }
            }
        }
    }

    fn stmts(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        let line = s.span.line_start;
        match &s.kind {
            StmtKind::FunctionDef { body, .. } => {
                self.keywords.insert("def".into());
                self.stmts(body);
            }
            StmtKind::Assign { targets, value } => {
                self.expr(value);
                for t in targets {
                    self.bind(t, line);
                }
            }
            StmtKind::AugAssign { target, value, .. } => {
                self.expr(value);
                self.expr(target);
                self.bind(target, line);
            }
            StmtKind::If { test, body, orelse, elif } => {
                self.keywords.insert(if *elif { "elif" } else { "if" }.into());
                self.expr(test);
                self.stmts(body);
                if !orelse.is_empty() && !matches!(orelse[0].kind, StmtKind::If { elif: true, .. }) {
                    self.keywords.insert("else".into());
                }
                self.stmts(orelse);
            }
            StmtKind::For { target, iter, body } => {
                self.keywords.insert("for".into());
                self.keywords.insert("in".into());
                self.expr(iter);
                self.bind(target, line);
                target.walk(&mut |e| {
                    if let Some(n) = e.as_name() {
                        self.loop_bound.insert(n.to_string());
                    }
                });
                self.stmts(body);
            }
            StmtKind::While { test, body } => {
                self.keywords.insert("while".into());
                self.expr(test);
                self.stmts(body);
            }
            StmtKind::Return(value) => {
                self.keywords.insert("return".into());
                if let Some(v) = value {
                    self.expr(v);
                }
            }
            StmtKind::Break => {
                self.keywords.insert("break".into());
            }
            StmtKind::Expr(e) => self.expr(e),
            StmtKind::Continue | StmtKind::Pass | StmtKind::Import { .. } => {}
        }
    }
}

/// Name inventory of the program's single function.
///
/// A builtin name that the program assigns to is a variable, not a builtin.
/// Programs without exactly one function yield an empty table.
pub fn resolve_scopes(program: &Program) -> ScopeTable {
    let Some(function) = program.main_function() else {
        return ScopeTable {
            function_name: String::new(),
            def_line: 1,
            parameters: Vec::new(),
            variables: Vec::new(),
            builtins_used: BTreeSet::new(),
            keywords_used: BTreeSet::new(),
        };
    };
    let mut c = Collector::default();
    c.stmt(function.stmt);
    let params: Vec<(String, usize)> = function
        .params
        .iter()
        .map(|Param { name, .. }| (name.clone(), function.def_line()))
        .collect();
    let is_param = |n: &str| params.iter().any(|(p, _)| p == n);

    let mut names: BTreeSet<&String> = c.assigned.keys().collect();
    names.extend(c.comp_bound.keys());
    let mut variables: Vec<VariableInfo> = names
        .into_iter()
        .filter(|n| !is_param(n))
        .map(|n| {
            let mut lines: BTreeSet<usize> = c.assigned.get(n).cloned().unwrap_or_default();
            let comprehension = lines.is_empty();
            if comprehension {
                lines = c.comp_bound[n].clone();
            }
            VariableInfo {
                name: n.clone(),
                creation_line: *lines.first().unwrap(),
                assignment_lines: lines.into_iter().collect(),
                read_lines: c.reads.get(n).map(|r| r.iter().copied().collect()).unwrap_or_default(),
                comprehension,
                loop_target: c.loop_bound.contains(n.as_str()),
            }
        })
        .collect();
    variables.sort_by(|a, b| (a.creation_line, &a.name).cmp(&(b.creation_line, &b.name)));

    let builtins_used = c
        .loaded
        .iter()
        .filter(|n| is_builtin(n) && !is_param(n) && variables.iter().all(|v| &v.name != *n))
        .cloned()
        .collect();
    let keywords_used = c
        .keywords
        .into_iter()
        .filter(|k| DECOY_KEYWORDS.contains(&k.as_str()))
        .collect();
    ScopeTable {
        function_name: function.name.to_string(),
        def_line: function.def_line(),
        parameters: params,
        variables,
        builtins_used,
        keywords_used,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeclarationError {
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("{name} is not used on line {line}")]
    NotUsedOnLine { name: String, line: usize },
}

/// Line on which `name` comes into existence, asked from a site on `use_line`.
///
/// Parameters are created on the `def` line; variables on their first assignment.
pub fn declaration_line(scopes: &ScopeTable, name: &str, use_line: usize) -> Result<usize, DeclarationError> {
    if scopes.is_parameter(name) {
        return Ok(scopes.def_line);
    }
    let v = scopes
        .variable(name)
        .ok_or_else(|| DeclarationError::UnknownName(name.to_string()))?;
    if !v.use_lines().contains(&use_line) {
        return Err(DeclarationError::NotUsedOnLine {
            name: name.to_string(),
            line: use_line,
        });
    }
    Ok(v.creation_line)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, AVERAGE_WITH_COMPREHENSION, AVERAGE_WITH_LOOP};
    use crate::parser::parse;

    fn scopes(src: &str) -> ScopeTable {
        resolve_scopes(&parse(src).unwrap())
    }

    #[test]
    fn comprehension_average_inventory() {
        let s = scopes(AVERAGE_WITH_COMPREHENSION);
        let vars: Vec<&str> = s.variables.iter().map(|v| v.name.as_str()).collect();
        assert_eq!(vars, ["num", "positive_numbers"]);
        assert_eq!(s.variable_names(), ["positive_numbers"]);
        assert!(s.variable("num").unwrap().comprehension);
        assert!(s.builtins_used.contains("sum") && s.builtins_used.contains("len"));
        assert_eq!(s.parameters, vec![("numbers".to_string(), 1)]);
        assert_eq!(s.keywords_used.iter().map(String::as_str).collect::<Vec<_>>(), ["def", "else", "if", "return"]);
    }

    #[test]
    fn parameter_only_function() {
        let s = scopes("def f(a):\n    return a\n");
        assert_eq!(s.parameters, vec![("a".to_string(), 1)]);
        assert!(s.variables.is_empty());
    }

    #[test]
    fn loop_average_creation_lines() {
        let s = scopes(AVERAGE_WITH_LOOP);
        let got: Vec<(&str, usize)> = s.variables.iter().map(|v| (v.name.as_str(), v.creation_line)).collect();
        assert_eq!(got, [("sum_positive", 2), ("count", 3), ("num", 4)]);
        let sp = s.variable("sum_positive").unwrap();
        assert_eq!(sp.assignment_lines, [2, 6]);
        assert_eq!(sp.read_lines, [6, 9]);
        assert!(s.variable("num").unwrap().loop_target);
    }

    #[test]
    fn shadowed_builtin_is_a_variable() {
        let s = scopes("def f(xs):\n    sum = 0\n    for x in xs:\n        sum += x\n    return max(sum, 0)\n");
        assert!(s.variable("sum").is_some());
        assert!(!s.builtins_used.contains("sum"));
        assert!(s.builtins_used.contains("max"));
    }

    #[test]
    fn declaration_lines() {
        let s = scopes(AVERAGE_WITH_LOOP);
        assert_eq!(declaration_line(&s, "sum_positive", 9), Ok(2));
        assert_eq!(declaration_line(&s, "sum_positive", 6), Ok(2));
        assert_eq!(declaration_line(&s, "numbers", 4), Ok(1));
        assert!(matches!(declaration_line(&s, "total", 4), Err(DeclarationError::UnknownName(_))));
        assert!(matches!(declaration_line(&s, "count", 5), Err(DeclarationError::NotUsedOnLine { .. })));
        let s = resolve_scopes(&corpus::program("T3_a").unwrap().parse().unwrap());
        assert_eq!(declaration_line(&s, "result", 6), Ok(2));
    }

    #[test]
    fn builtins_never_overlap_parameters_or_variables() {
        for p in corpus::programs() {
            let s = resolve_scopes(&p.parse().unwrap());
            for b in &s.builtins_used {
                assert!(!s.is_parameter(b) && s.variable(b).is_none(), "{}", p.id);
            }
        }
    }

    #[test]
    fn item_assignment_reads_the_container() {
        let s = scopes("def f(grid):\n    row = grid[0]\n    row[1] = 0\n    return grid\n");
        assert_eq!(s.variable("row").unwrap().assignment_lines, [2]);
        assert_eq!(s.variable("row").unwrap().read_lines, [3]);
    }
}
