use serde::{Deserialize, Serialize};

use crate::parser::ast::{walk_stmts, BinOp, CmpOp, Expr, ExprKind, Stmt, StmtKind};
use crate::parser::Program;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinePurpose {
    AcceptsNewData,
    GuardsDivisionByZero,
    EndCondition,
    EvenOddDiscrimination,
}

impl LinePurpose {
    pub const ALL: [LinePurpose; 4] = [
        LinePurpose::AcceptsNewData,
        LinePurpose::GuardsDivisionByZero,
        LinePurpose::EndCondition,
        LinePurpose::EvenOddDiscrimination,
    ];
}

/// The unique purpose of the statement starting on `line`, if exactly one rule fires.
pub fn classify_line_purpose(program: &Program, line: usize) -> Option<LinePurpose> {
    match purposes_at(program, line).as_slice() {
        [one] => Some(*one),
        _ => None,
    }
}

/// Every purpose rule that fires for the statement starting on `line`.
pub fn purposes_at(program: &Program, line: usize) -> Vec<LinePurpose> {
    let mut out = Vec::new();
    visit(&program.body, false, line, &mut out);
    out.sort();
    out.dedup();
    out
}

fn visit(block: &[Stmt], in_loop: bool, line: usize, out: &mut Vec<LinePurpose>) {
    for (i, s) in block.iter().enumerate() {
        if s.span.line_start == line {
            rules(s, &block[i + 1..], in_loop, out);
        }
        let nested_loop = in_loop || s.is_loop();
        for b in s.blocks() {
            visit(b, nested_loop, line, out);
        }
    }
}

fn rules(s: &Stmt, following: &[Stmt], in_loop: bool, out: &mut Vec<LinePurpose>) {
    let mut reads_input = false;
    let mut parity = false;
    for e in s.exprs() {
        e.walk(&mut |x| {
            reads_input |= matches!(&x.kind, ExprKind::Call { func, .. } if func.as_name() == Some("input"));
            parity |= is_parity_test(x);
        });
    }
    if reads_input {
        out.push(LinePurpose::AcceptsNewData);
    }
    if parity {
        out.push(LinePurpose::EvenOddDiscrimination);
    }
    match &s.kind {
        StmtKind::While { .. } => out.push(LinePurpose::EndCondition),
        StmtKind::If { test, body, orelse, .. } => {
            if in_loop && matches!(body.as_slice(), [Stmt { kind: StmtKind::Break | StmtKind::Return(_), .. }]) {
                out.push(LinePurpose::EndCondition);
            }
            if guards_division(test, body, orelse, following) {
                out.push(LinePurpose::GuardsDivisionByZero);
            }
        }
        _ => {}
    }
}

fn is_zero(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Int(0))
}

fn is_parity_test(e: &Expr) -> bool {
    let ExprKind::Compare { left, ops } = &e.kind else {
        return false;
    };
    let mut lhs = left.as_ref();
    for (op, rhs) in ops {
        if matches!(op, CmpOp::Eq | CmpOp::NotEq) && (is_mod_two(lhs) && is_zero_or_one(rhs) || is_mod_two(rhs) && is_zero_or_one(lhs)) {
            return true;
        }
        lhs = rhs;
    }
    false
}

fn is_mod_two(e: &Expr) -> bool {
    matches!(&e.kind, ExprKind::BinOp { op: BinOp::Mod, right, .. } if matches!(right.kind, ExprKind::Int(2)))
}

fn is_zero_or_one(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Int(0 | 1))
}

/// The test compares some E with 0 and the branch taken when E is nonzero divides by E.
fn guards_division(test: &Expr, body: &[Stmt], orelse: &[Stmt], following: &[Stmt]) -> bool {
    let ExprKind::Compare { left, ops } = &test.kind else {
        return false;
    };
    let [(op, right)] = ops.as_slice() else {
        return false;
    };
    let (divisor, nonzero_when_true) = if is_zero(right) {
        match op {
            CmpOp::Gt | CmpOp::NotEq => (left.as_ref(), true),
            CmpOp::Eq | CmpOp::LtE => (left.as_ref(), false),
            _ => return false,
        }
    } else if is_zero(left) {
        match op {
            CmpOp::Lt | CmpOp::NotEq => (right, true),
            CmpOp::Eq | CmpOp::GtE => (right, false),
            _ => return false,
        }
    } else {
        return false;
    };
    if matches!(divisor.kind, ExprKind::Int(_) | ExprKind::Float(_)) {
        return false;
    }
    if nonzero_when_true {
        divides_by(body, divisor)
    } else {
        let exits = matches!(body.last().map(|s| &s.kind), Some(StmtKind::Return(_)));
        divides_by(orelse, divisor) || exits && divides_by(following, divisor)
    }
}

fn divides_by(block: &[Stmt], divisor: &Expr) -> bool {
    let mut found = false;
    walk_stmts(block, &mut |s| {
        for e in s.exprs() {
            e.walk(&mut |x| {
                if let ExprKind::BinOp { op: BinOp::Div | BinOp::FloorDiv | BinOp::Mod, right, .. } = &x.kind {
                    found |= right.same_shape(divisor);
                }
            });
        }
    });
    found
}
