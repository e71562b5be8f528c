//! Canonical source rendering of a syntax tree.
//!
//! Output is normalized: four-space indentation, one statement per line, no
//! comments, minimal parentheses. Parsing the output yields the same tree up
//! to line positions.

use super::ast::*;
use crate::tracer::value::format_float;

pub fn program_to_string(program: &Program) -> String {
    let mut out = String::new();
    for s in &program.body {
        write_stmt(&mut out, s, 0);
    }
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn write_block(out: &mut String, body: &[Stmt], level: usize) {
    if body.is_empty() {
        indent(out, level);
        out.push_str("pass\n");
    }
    for s in body {
        write_stmt(out, s, level);
    }
}

fn write_stmt(out: &mut String, s: &Stmt, level: usize) {
    indent(out, level);
    match &s.kind {
        StmtKind::FunctionDef { name, params, body } => {
            let names: Vec<&str> = params.iter().map(|p| p.name.as_str()).collect();
            out.push_str(&format!("def {}({}):\n", name, names.join(", ")));
            write_block(out, body, level + 1);
        }
        StmtKind::Assign { targets, value } => {
            for t in targets {
                out.push_str(&expr_to_string(t));
                out.push_str(" = ");
            }
            out.push_str(&expr_to_string(value));
            out.push('\n');
        }
        StmtKind::AugAssign { target, op, value } => {
            out.push_str(&format!(
                "{} {}= {}\n",
                expr_to_string(target),
                op.symbol(),
                expr_to_string(value)
            ));
        }
        StmtKind::If {
            test, body, orelse, ..
        } => {
            out.push_str(&format!("if {}:\n", expr_to_string(test)));
            write_block(out, body, level + 1);
            write_else(out, orelse, level);
        }
        StmtKind::For { target, iter, body } => {
            out.push_str(&format!(
                "for {} in {}:\n",
                target_to_string(target),
                expr_to_string(iter)
            ));
            write_block(out, body, level + 1);
        }
        StmtKind::While { test, body } => {
            out.push_str(&format!("while {}:\n", expr_to_string(test)));
            write_block(out, body, level + 1);
        }
        StmtKind::Return(None) => out.push_str("return\n"),
        StmtKind::Return(Some(e)) => out.push_str(&format!("return {}\n", expr_to_string(e))),
        StmtKind::Break => out.push_str("break\n"),
        StmtKind::Continue => out.push_str("continue\n"),
        StmtKind::Pass => out.push_str("pass\n"),
        StmtKind::Expr(e) => {
            out.push_str(&expr_to_string(e));
            out.push('\n');
        }
        StmtKind::Import { module } => out.push_str(&format!("import {module}\n")),
    }
}

fn write_else(out: &mut String, orelse: &[Stmt], level: usize) {
    match orelse {
        [] => {}
        [only] if matches!(only.kind, StmtKind::If { elif: true, .. }) => {
            let StmtKind::If {
                test, body, orelse, ..
            } = &only.kind
            else {
                unreachable!()
            };
            indent(out, level);
            out.push_str(&format!("elif {}:\n", expr_to_string(test)));
            write_block(out, body, level + 1);
            write_else(out, orelse, level);
        }
        _ => {
            indent(out, level);
            out.push_str("else:\n");
            write_block(out, orelse, level + 1);
        }
    }
}

fn target_to_string(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Tuple(items) if !items.is_empty() => items
            .iter()
            .map(expr_to_string)
            .collect::<Vec<_>>()
            .join(", "),
        _ => expr_to_string(e),
    }
}

// Binding strength, higher binds tighter.
fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Lambda { .. } => 1,
        ExprKind::IfExp { .. } => 2,
        ExprKind::BoolOp { op: BoolOp::Or, .. } => 3,
        ExprKind::BoolOp { op: BoolOp::And, .. } => 4,
        ExprKind::UnaryOp { op: UnaryOp::Not, .. } => 5,
        ExprKind::Compare { .. } => 6,
        ExprKind::BinOp {
            op: BinOp::Add | BinOp::Sub,
            ..
        } => 7,
        ExprKind::BinOp {
            op: BinOp::Mul | BinOp::Div | BinOp::FloorDiv | BinOp::Mod,
            ..
        } => 8,
        ExprKind::UnaryOp { .. } => 9,
        ExprKind::BinOp { op: BinOp::Pow, .. } => 10,
        ExprKind::Tuple(_) => 0,
        ExprKind::GeneratorExp { .. } => 0,
        _ => 11,
    }
}

fn wrap(e: &Expr, min: u8) -> String {
    let s = expr_to_string(e);
    if precedence(e) < min {
        format!("({s})")
    } else {
        s
    }
}

fn generators_to_string(gens: &[Comprehension]) -> String {
    let mut s = String::new();
    for g in gens {
        s.push_str(&format!(
            " for {} in {}",
            target_to_string(&g.target),
            wrap(&g.iter, 3)
        ));
        for c in &g.conditions {
            s.push_str(&format!(" if {}", wrap(c, 3)));
        }
    }
    s
}

pub fn expr_to_string(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Name(n) => n.clone(),
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Float(v) => format_float(*v),
        ExprKind::Str(s) => crate::tracer::value::repr_str(s),
        ExprKind::Bool(true) => "True".into(),
        ExprKind::Bool(false) => "False".into(),
        ExprKind::None => "None".into(),
        ExprKind::List(items) => format!(
            "[{}]",
            items.iter().map(|i| wrap(i, 1)).collect::<Vec<_>>().join(", ")
        ),
        ExprKind::Tuple(items) => match items.len() {
            0 => "()".into(),
            1 => format!("({},)", wrap(&items[0], 1)),
            _ => format!(
                "({})",
                items.iter().map(|i| wrap(i, 1)).collect::<Vec<_>>().join(", ")
            ),
        },
        ExprKind::BinOp { op, left, right } => {
            let p = precedence(e);
            if *op == BinOp::Pow {
                // Right-associative; unary operands on the left need parentheses.
                format!("{} ** {}", wrap(left, p + 1), wrap(right, p - 1))
            } else {
                format!("{} {} {}", wrap(left, p), op.symbol(), wrap(right, p + 1))
            }
        }
        ExprKind::UnaryOp { op, operand } => match op {
            UnaryOp::Not => format!("not {}", wrap(operand, 5)),
            UnaryOp::Neg => format!("-{}", wrap(operand, 9)),
            UnaryOp::Pos => format!("+{}", wrap(operand, 9)),
        },
        ExprKind::BoolOp { op, values } => {
            let p = precedence(e);
            let sym = match op {
                BoolOp::And => " and ",
                BoolOp::Or => " or ",
            };
            values
                .iter()
                .map(|v| wrap(v, p + 1))
                .collect::<Vec<_>>()
                .join(sym)
        }
        ExprKind::Compare { left, ops } => {
            let mut s = wrap(left, 7);
            for (op, right) in ops {
                s.push_str(&format!(" {} {}", op.symbol(), wrap(right, 7)));
            }
            s
        }
        ExprKind::IfExp { test, body, orelse } => format!(
            "{} if {} else {}",
            wrap(body, 3),
            wrap(test, 3),
            wrap(orelse, 2)
        ),
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            let mut parts: Vec<String> = args
                .iter()
                .map(|a| match a.kind {
                    ExprKind::GeneratorExp { .. } if args.len() == 1 && keywords.is_empty() => {
                        let s = expr_to_string(a);
                        s[1..s.len() - 1].to_string()
                    }
                    _ => wrap(a, 1),
                })
                .collect();
            parts.extend(
                keywords
                    .iter()
                    .map(|k| format!("{}={}", k.name, wrap(&k.value, 1))),
            );
            format!("{}({})", wrap(func, 11), parts.join(", "))
        }
        ExprKind::Attribute { value, attr } => {
            let base = wrap(value, 11);
            // `1 .real` style ambiguity cannot arise from int literals in the subset, but guard anyway.
            if matches!(value.kind, ExprKind::Int(_)) {
                format!("({base}).{attr}")
            } else {
                format!("{base}.{attr}")
            }
        }
        ExprKind::Subscript { value, index } => {
            format!("{}[{}]", wrap(value, 11), expr_to_string(index))
        }
        ExprKind::Slice { lower, upper, step } => {
            let part = |p: &Option<Box<Expr>>| p.as_ref().map(|e| wrap(e, 1)).unwrap_or_default();
            let mut s = format!("{}:{}", part(lower), part(upper));
            if step.is_some() {
                s.push(':');
                s.push_str(&part(step));
            }
            s
        }
        ExprKind::ListComp {
            element,
            generators,
        } => format!("[{}{}]", wrap(element, 2), generators_to_string(generators)),
        ExprKind::GeneratorExp {
            element,
            generators,
        } => format!("({}{})", wrap(element, 2), generators_to_string(generators)),
        ExprKind::Lambda { params, body } => {
            if params.is_empty() {
                format!("lambda: {}", wrap(body, 1))
            } else {
                format!("lambda {}: {}", params.join(", "), wrap(body, 1))
            }
        }
    }
}
