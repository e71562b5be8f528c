use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::loops::{loops, LoopKind};
use super::scopes::resolve_scopes;
use crate::parser::ast::{Expr, ExprKind, Stmt, StmtKind};
use crate::parser::Program;
use crate::tracer::{assignment_trace, ExecutionTrace, Literal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableRole {
    Unused,
    FixedValue,
    Stepper,
    Gatherer,
    MostWantedHolder,
}

impl VariableRole {
    pub const ALL: [VariableRole; 5] = [
        VariableRole::Unused,
        VariableRole::FixedValue,
        VariableRole::Stepper,
        VariableRole::Gatherer,
        VariableRole::MostWantedHolder,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no role for {name}: {reason}")]
pub struct Unclassifiable {
    pub name: String,
    pub reason: &'static str,
}

struct Site<'a> {
    stmt: &'a Stmt,
    in_branch: bool,
}

fn assignment_sites<'a>(body: &'a [Stmt], name: &str, in_branch: bool, out: &mut Vec<Site<'a>>) {
    for s in body {
        let binds = match &s.kind {
            StmtKind::Assign { targets, .. } => targets.iter().any(|t| binds_name(t, name)),
            StmtKind::AugAssign { target, .. } => target.as_name() == Some(name),
            _ => false,
        };
        if binds {
            out.push(Site { stmt: s, in_branch });
        }
        let nested = in_branch || matches!(s.kind, StmtKind::If { .. });
        for b in s.blocks() {
            assignment_sites(b, name, nested, out);
        }
    }
}

fn binds_name(target: &Expr, name: &str) -> bool {
    match &target.kind {
        ExprKind::Name(n) => n == name,
        ExprKind::Tuple(items) | ExprKind::List(items) => items.iter().any(|t| binds_name(t, name)),
        _ => false,
    }
}

fn reads_itself(site: &Site, name: &str) -> bool {
    match &site.stmt.kind {
        StmtKind::AugAssign { .. } => true,
        StmtKind::Assign { value, .. } => {
            let mut found = false;
            value.walk(&mut |e| found |= e.as_name() == Some(name));
            found
        }
        _ => false,
    }
}

fn constant_nonzero_step(values: &[Literal]) -> bool {
    let nums: Option<Vec<f64>> = values
        .iter()
        .map(|v| match v {
            Literal::Int(_) | Literal::Float(_) => v.as_f64(),
            _ => None,
        })
        .collect();
    let Some(nums) = nums else { return false };
    if nums.len() < 3 {
        return false;
    }
    let d = nums[1] - nums[0];
    d != 0.0 && nums.windows(2).all(|w| w[1] - w[0] == d)
}

/// Role of `name` in the run recorded by `trace`; the first matching rule wins.
///
/// 1. unused: never read.
/// 2. fixed value: assigned exactly once in the run.
/// 3. stepper: a `for ... in range(...)` target, or at least three numeric
///    values with a constant nonzero difference.
/// 4. gatherer: some assignment reads the variable itself.
/// 5. most-wanted holder: every reassignment sits inside an `if` branch.
///
/// Parameters, comprehension variables and targets of loops over a
/// collection are not classified.
pub fn classify_role(program: &Program, trace: &ExecutionTrace, name: &str) -> Result<VariableRole, Unclassifiable> {
    let fail = |reason| {
        Err(Unclassifiable {
            name: name.to_string(),
            reason,
        })
    };
    let scopes = resolve_scopes(program);
    if scopes.is_parameter(name) {
        return fail("parameter");
    }
    let Some(var) = scopes.variable(name) else {
        return fail("not a variable");
    };
    if var.comprehension {
        return fail("comprehension variable");
    }
    let loop_kinds: Vec<LoopKind> = loops(program)
        .iter()
        .filter(|l| l.kind != LoopKind::While && var.assignment_lines.contains(&l.header_line))
        .map(|l| l.kind)
        .collect();
    let for_target = var.loop_target && !loop_kinds.is_empty();
    if for_target && loop_kinds.contains(&LoopKind::ForIter) {
        return fail("loop over a collection");
    }
    if var.read_lines.is_empty() {
        return Ok(VariableRole::Unused);
    }
    let Ok(values) = assignment_trace(trace, name) else {
        return fail("not assigned in this run");
    };
    if values.len() == 1 {
        return Ok(VariableRole::FixedValue);
    }
    if for_target || constant_nonzero_step(&values) {
        return Ok(VariableRole::Stepper);
    }
    let Some(function) = program.main_function() else {
        return fail("no function");
    };
    let mut sites = Vec::new();
    assignment_sites(function.body, name, false, &mut sites);
    if sites.iter().any(|s| reads_itself(s, name)) {
        return Ok(VariableRole::Gatherer);
    }
    let reassignments = sites.iter().filter(|s| s.stmt.span.line_start != var.creation_line);
    if sites.len() > 1 && reassignments.clone().all(|s| s.in_branch) {
        return Ok(VariableRole::MostWantedHolder);
    }
    fail("no rule matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, AVERAGE_WITH_LOOP};
    use crate::parser::parse;
    use crate::tracer::{run_traced, CallSpec, DEFAULT_STEP_LIMIT};

    fn role(src: &str, args: Vec<Literal>, name: &str) -> Result<VariableRole, Unclassifiable> {
        let p = parse(src).unwrap();
        let f = p.main_function().unwrap().name.to_string();
        let t = run_traced(&p, &CallSpec::new(f, args), DEFAULT_STEP_LIMIT).unwrap();
        classify_role(&p, &t, name)
    }

    fn ints(v: &[i64]) -> Literal {
        Literal::List(v.iter().map(|i| Literal::Int(*i)).collect())
    }

    #[test]
    fn loop_average_roles() {
        assert_eq!(role(AVERAGE_WITH_LOOP, vec![ints(&[1, -2, 3])], "count"), Ok(VariableRole::Stepper));
        assert_eq!(role(AVERAGE_WITH_LOOP, vec![ints(&[1, -2, 3])], "sum_positive"), Ok(VariableRole::Gatherer));
        assert!(role(AVERAGE_WITH_LOOP, vec![ints(&[1, -2, 3])], "num").is_err());
        assert!(role(AVERAGE_WITH_LOOP, vec![ints(&[1, -2, 3])], "numbers").is_err());
    }

    #[test]
    fn write_only_is_unused() {
        let src = "def f(a):\n    unused = 3\n    return a\n";
        assert_eq!(role(src, vec![Literal::Int(1)], "unused"), Ok(VariableRole::Unused));
    }

    #[test]
    fn single_assignment_is_fixed() {
        let src = "def f(s):\n    words = s.split()\n    return len(words)\n";
        assert_eq!(role(src, vec![Literal::Str("a b".into())], "words"), Ok(VariableRole::FixedValue));
    }

    #[test]
    fn range_target_is_stepper() {
        let p = corpus::program("T6_c").unwrap();
        let src = p.source.as_str();
        let grid = Literal::List(vec![ints(&[1]), ints(&[1]), ints(&[2])]);
        assert_eq!(role(src, vec![grid], "r"), Ok(VariableRole::Stepper));
    }

    #[test]
    fn conditional_replacement_is_holder() {
        let src = "def f(xs):\n    best = 0\n    for i in range(len(xs)):\n        if xs[i] >= xs[best]:\n            best = i\n    return best\n";
        assert_eq!(role(src, vec![ints(&[5, 1, 7])], "best"), Ok(VariableRole::MostWantedHolder));
    }

    #[test]
    fn two_value_accumulator_is_gatherer() {
        let src = "def f(xs):\n    total = 0\n    for x in xs:\n        total = total + x\n    return total\n";
        assert_eq!(role(src, vec![ints(&[5])], "total"), Ok(VariableRole::Gatherer));
        let p = corpus::program("T3_a").unwrap();
        assert_eq!(
            role(&p.source, vec![Literal::Str("ab".into()), Literal::Int(2)], "result"),
            Ok(VariableRole::Gatherer)
        );
    }

    #[test]
    fn classification_is_deterministic() {
        let a = role(AVERAGE_WITH_LOOP, vec![ints(&[4, 0, -1, 6, 2])], "sum_positive");
        let b = role(AVERAGE_WITH_LOOP, vec![ints(&[4, 0, -1, 6, 2])], "sum_positive");
        assert_eq!(a, b);
    }
}
