//! Syntax tree for the analyzed Python subset.
//!
//! Every statement and expression carries a [`Span`] with 1-based physical
//! line numbers. Comments and blank lines count as lines, so the numbers match
//! what a reader sees in a numbered listing.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub line_start: usize,
    pub line_end: usize,
    /// 1-based column of the first token.
    pub col: usize,
}

impl Span {
    pub fn new(line_start: usize, line_end: usize, col: usize) -> Self {
        Self {
            line_start,
            line_end,
            col,
        }
    }

    pub fn to(self, other: Span) -> Span {
        Span {
            line_start: self.line_start,
            line_end: self.line_end.max(other.line_end),
            col: self.col,
        }
    }
}

/// A parsed source file.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub body: Vec<Stmt>,
    /// Number of physical lines in the (tab-expanded) source.
    pub line_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    FunctionDef {
        name: String,
        params: Vec<Param>,
        body: Vec<Stmt>,
    },
    /// `a = b = value`; `targets` holds every left-hand side in source order.
    Assign {
        targets: Vec<Expr>,
        value: Expr,
    },
    AugAssign {
        target: Expr,
        op: BinOp,
        value: Expr,
    },
    If {
        test: Expr,
        body: Vec<Stmt>,
        orelse: Vec<Stmt>,
        /// Written as `elif` inside the parent's `orelse`.
        elif: bool,
    },
    For {
        target: Expr,
        iter: Expr,
        body: Vec<Stmt>,
    },
    While {
        test: Expr,
        body: Vec<Stmt>,
    },
    Return(Option<Expr>),
    Break,
    Continue,
    Pass,
    Expr(Expr),
    Import {
        module: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Keyword {
    pub name: String,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comprehension {
    pub target: Expr,
    pub iter: Expr,
    pub conditions: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Name(String),
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    None,
    List(Vec<Expr>),
    Tuple(Vec<Expr>),
    BinOp {
        op: BinOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    UnaryOp {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    BoolOp {
        op: BoolOp,
        values: Vec<Expr>,
    },
    Compare {
        left: Box<Expr>,
        ops: Vec<(CmpOp, Expr)>,
    },
    IfExp {
        test: Box<Expr>,
        body: Box<Expr>,
        orelse: Box<Expr>,
    },
    Call {
        func: Box<Expr>,
        args: Vec<Expr>,
        keywords: Vec<Keyword>,
    },
    Attribute {
        value: Box<Expr>,
        attr: String,
    },
    Subscript {
        value: Box<Expr>,
        index: Box<Expr>,
    },
    Slice {
        lower: Option<Box<Expr>>,
        upper: Option<Box<Expr>>,
        step: Option<Box<Expr>>,
    },
    ListComp {
        element: Box<Expr>,
        generators: Vec<Comprehension>,
    },
    GeneratorExp {
        element: Box<Expr>,
        generators: Vec<Comprehension>,
    },
    Lambda {
        params: Vec<String>,
        body: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    FloorDiv,
    Mod,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::FloorDiv => "//",
            BinOp::Mod => "%",
            BinOp::Pow => "**",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Pos,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    NotEq,
    Lt,
    LtE,
    Gt,
    GtE,
    In,
    NotIn,
    Is,
    IsNot,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::NotEq => "!=",
            CmpOp::Lt => "<",
            CmpOp::LtE => "<=",
            CmpOp::Gt => ">",
            CmpOp::GtE => ">=",
            CmpOp::In => "in",
            CmpOp::NotIn => "not in",
            CmpOp::Is => "is",
            CmpOp::IsNot => "is not",
        }
    }
}

impl Program {
    /// The function definitions at the top level, in source order.
    pub fn functions(&self) -> impl Iterator<Item = (&Stmt, &str, &[Param], &[Stmt])> {
        self.body.iter().filter_map(|s| match &s.kind {
            StmtKind::FunctionDef { name, params, body } => {
                Some((s, name.as_str(), params.as_slice(), body.as_slice()))
            }
            _ => None,
        })
    }

    /// The single analyzed function, if the program has exactly one.
    pub fn main_function(&self) -> Option<Function<'_>> {
        let mut it = self.functions();
        let first = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some(Function {
            stmt: first.0,
            name: first.1,
            params: first.2,
            body: first.3,
        })
    }
}

/// Borrowed view of a function definition.
#[derive(Debug, Clone, Copy)]
pub struct Function<'a> {
    pub stmt: &'a Stmt,
    pub name: &'a str,
    pub params: &'a [Param],
    pub body: &'a [Stmt],
}

impl Function<'_> {
    pub fn def_line(&self) -> usize {
        self.stmt.span.line_start
    }
}

impl Stmt {
    /// Nested statement blocks, in source order.
    pub fn blocks(&self) -> Vec<&[Stmt]> {
        match &self.kind {
            StmtKind::FunctionDef { body, .. }
            | StmtKind::For { body, .. }
            | StmtKind::While { body, .. } => vec![body.as_slice()],
            StmtKind::If { body, orelse, .. } => vec![body.as_slice(), orelse.as_slice()],
            _ => Vec::new(),
        }
    }

    /// Expressions owned directly by this statement (not by nested blocks).
    pub fn exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Assign { targets, value } => {
                let mut v: Vec<&Expr> = targets.iter().collect();
                v.push(value);
                v
            }
            StmtKind::AugAssign { target, value, .. } => vec![target, value],
            StmtKind::If { test, .. } | StmtKind::While { test, .. } => vec![test],
            StmtKind::For { target, iter, .. } => vec![target, iter],
            StmtKind::Return(Some(e)) | StmtKind::Expr(e) => vec![e],
            _ => Vec::new(),
        }
    }

    pub fn is_loop(&self) -> bool {
        matches!(self.kind, StmtKind::For { .. } | StmtKind::While { .. })
    }
}

impl Expr {
    /// Direct sub-expressions in evaluation order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Name(_)
            | ExprKind::Int(_)
            | ExprKind::Float(_)
            | ExprKind::Str(_)
            | ExprKind::Bool(_)
            | ExprKind::None => Vec::new(),
            ExprKind::List(items) | ExprKind::Tuple(items) => items.iter().collect(),
            ExprKind::BinOp { left, right, .. } => vec![left, right],
            ExprKind::UnaryOp { operand, .. } => vec![operand],
            ExprKind::BoolOp { values, .. } => values.iter().collect(),
            ExprKind::Compare { left, ops } => {
                let mut v = vec![left.as_ref()];
                v.extend(ops.iter().map(|(_, e)| e));
                v
            }
            ExprKind::IfExp { test, body, orelse } => vec![body, test, orelse],
            ExprKind::Call {
                func,
                args,
                keywords,
            } => {
                let mut v = vec![func.as_ref()];
                v.extend(args.iter());
                v.extend(keywords.iter().map(|k| &k.value));
                v
            }
            ExprKind::Attribute { value, .. } => vec![value],
            ExprKind::Subscript { value, index } => vec![value, index],
            ExprKind::Slice { lower, upper, step } => [lower, upper, step]
                .into_iter()
                .flatten()
                .map(|b| b.as_ref())
                .collect(),
            ExprKind::ListComp {
                element,
                generators,
            }
            | ExprKind::GeneratorExp {
                element,
                generators,
            } => {
                let mut v = Vec::new();
                for g in generators {
                    v.push(&g.iter);
                    v.push(&g.target);
                    v.extend(g.conditions.iter());
                }
                v.push(element.as_ref());
                v
            }
            ExprKind::Lambda { body, .. } => vec![body],
        }
    }

    /// Pre-order walk over this expression and all sub-expressions.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn as_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Name(n) => Some(n),
            _ => None,
        }
    }

    /// Structural equality that ignores source positions.
    pub fn same_shape(&self, other: &Expr) -> bool {
        crate::parser::printer::expr_to_string(self) == crate::parser::printer::expr_to_string(other)
    }
}

/// Pre-order walk over every statement in `body`, including nested blocks.
pub fn walk_stmts<'a>(body: &'a [Stmt], f: &mut dyn FnMut(&'a Stmt)) {
    for s in body {
        f(s);
        for b in s.blocks() {
            walk_stmts(b, f);
        }
    }
}

/// Pre-order walk over every expression owned by statements in `body`.
pub fn walk_exprs<'a>(body: &'a [Stmt], f: &mut dyn FnMut(&'a Stmt, &'a Expr)) {
    walk_stmts(body, &mut |s| {
        for e in s.exprs() {
            e.walk(&mut |x| f(s, x));
        }
    });
}
