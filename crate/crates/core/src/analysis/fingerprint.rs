use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::scopes::resolve_scopes;
use crate::parser::ast::{Expr, ExprKind, Stmt, StmtKind};
use crate::parser::printer::program_to_string;
use crate::parser::Program;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StructuralFingerprint {
    /// Hash of the canonical printout with every user identifier replaced by `_`.
    pub shape: String,
    /// Hash of the multiset of user identifiers.
    pub identifiers: String,
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn fingerprint(program: &Program) -> StructuralFingerprint {
    let scopes = resolve_scopes(program);
    let user: BTreeSet<String> = scopes.user_identifiers().into_iter().map(str::to_string).collect();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut erased = program.clone();
    for s in &mut erased.body {
        stmt_names(s, &mut |n| {
            if user.contains(n.as_str()) {
                *counts.entry(std::mem::replace(n, "_".into())).or_default() += 1;
            }
        });
    }
    let ids: Vec<String> = counts.iter().map(|(n, c)| format!("{n}:{c}")).collect();
    StructuralFingerprint {
        shape: sha256_hex(program_to_string(&erased).as_bytes()),
        identifiers: sha256_hex(ids.join("\n").as_bytes()),
    }
}

fn stmt_names(s: &mut Stmt, f: &mut dyn FnMut(&mut String)) {
    match &mut s.kind {
        StmtKind::FunctionDef { name, params, body } => {
            f(name);
            for p in params {
                f(&mut p.name);
            }
            for b in body {
                stmt_names(b, f);
            }
        }
        StmtKind::Assign { targets, value } => {
            for t in targets {
                expr_names(t, f);
            }
            expr_names(value, f);
        }
        StmtKind::AugAssign { target, value, .. } => {
            expr_names(target, f);
            expr_names(value, f);
        }
        StmtKind::If { test, body, orelse, .. } => {
            expr_names(test, f);
            for b in body.iter_mut().chain(orelse) {
                stmt_names(b, f);
            }
        }
        StmtKind::For { target, iter, body } => {
            expr_names(target, f);
            expr_names(iter, f);
            for b in body {
                stmt_names(b, f);
            }
        }
        StmtKind::While { test, body } => {
            expr_names(test, f);
            for b in body {
                stmt_names(b, f);
            }
        }
        StmtKind::Return(Some(e)) | StmtKind::Expr(e) => expr_names(e, f),
        StmtKind::Return(None) | StmtKind::Break | StmtKind::Continue | StmtKind::Pass | StmtKind::Import { .. } => {}
    }
}

fn expr_names(e: &mut Expr, f: &mut dyn FnMut(&mut String)) {
    match &mut e.kind {
        ExprKind::Name(n) => f(n),
        ExprKind::Int(_) | ExprKind::Float(_) | ExprKind::Str(_) | ExprKind::Bool(_) | ExprKind::None => {}
        ExprKind::List(items) | ExprKind::Tuple(items) => items.iter_mut().for_each(|x| expr_names(x, f)),
        ExprKind::BinOp { left, right, .. } => {
            expr_names(left, f);
            expr_names(right, f);
        }
        ExprKind::UnaryOp { operand, .. } => expr_names(operand, f),
        ExprKind::BoolOp { values, .. } => values.iter_mut().for_each(|x| expr_names(x, f)),
        ExprKind::Compare { left, ops } => {
            expr_names(left, f);
            ops.iter_mut().for_each(|(_, x)| expr_names(x, f));
        }
        ExprKind::IfExp { test, body, orelse } => {
            expr_names(body, f);
            expr_names(test, f);
            expr_names(orelse, f);
        }
        ExprKind::Call { func, args, keywords } => {
            expr_names(func, f);
            args.iter_mut().for_each(|x| expr_names(x, f));
            keywords.iter_mut().for_each(|k| expr_names(&mut k.value, f));
        }
        ExprKind::Attribute { value, .. } => expr_names(value, f),
        ExprKind::Subscript { value, index } => {
            expr_names(value, f);
            expr_names(index, f);
        }
        ExprKind::Slice { lower, upper, step } => {
            for x in [lower, upper, step].into_iter().flatten() {
                expr_names(x, f);
            }
        }
        ExprKind::ListComp { element, generators } | ExprKind::GeneratorExp { element, generators } => {
            for g in generators {
                expr_names(&mut g.iter, f);
                expr_names(&mut g.target, f);
                g.conditions.iter_mut().for_each(|x| expr_names(x, f));
            }
            expr_names(element, f);
        }
        ExprKind::Lambda { params, body } => {
            for p in params.iter_mut() {
                f(p);
            }
            expr_names(body, f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AVERAGE_WITH_COMPREHENSION, AVERAGE_WITH_LOOP};
    use crate::parser::parse;

    fn fp(src: &str) -> StructuralFingerprint {
        fingerprint(&parse(src).unwrap())
    }

    #[test]
    fn identical_source_identical_fingerprint() {
        assert_eq!(fp(AVERAGE_WITH_LOOP), fp(AVERAGE_WITH_LOOP));
    }

    #[test]
    fn renaming_changes_only_identifier_hash() {
        let renamed = AVERAGE_WITH_LOOP
            .replace("sum_positive", "total")
            .replace("count", "n_pos");
        let (a, b) = (fp(AVERAGE_WITH_LOOP), fp(&renamed));
        assert_eq!(a.shape, b.shape);
        assert_ne!(a.identifiers, b.identifiers);
    }

    #[test]
    fn layout_and_comments_are_ignored() {
        let noisy = AVERAGE_WITH_LOOP.replacen("    count = 0\n", "    # counter\n    count = 0\n\n", 1);
        assert_eq!(fp(AVERAGE_WITH_LOOP), fp(&noisy));
    }

    #[test]
    fn average_programs_differ_in_shape() {
        let (a, b) = (fp(AVERAGE_WITH_COMPREHENSION), fp(AVERAGE_WITH_LOOP));
        assert_ne!(a.shape, b.shape);
        // sha256 of the hand-erased listing, computed with Python's hashlib
        assert_eq!(a.shape, "e1a8e68d5091f735312361b0dcf02ab996ed0086ef852c5cc0d118c5e99d39e7");
    }
}
