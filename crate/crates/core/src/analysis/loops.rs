use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::ast::{walk_stmts, ExprKind, Stmt, StmtKind};
use crate::parser::Program;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    ForRange,
    ForIter,
    While,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopInfo {
    pub header_line: usize,
    /// Lexically last line of the body, nested blocks included.
    pub last_body_line: usize,
    pub kind: LoopKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no loop starts on line {0}")]
pub struct NoLoopAtLine(pub usize);

fn info(s: &Stmt) -> Option<LoopInfo> {
    let (kind, body) = match &s.kind {
        StmtKind::For { iter, body, .. } => {
            let is_range = matches!(&iter.kind, ExprKind::Call { func, .. } if func.as_name() == Some("range"));
            (if is_range { LoopKind::ForRange } else { LoopKind::ForIter }, body)
        }
        StmtKind::While { body, .. } => (LoopKind::While, body),
        _ => return None,
    };
    Some(LoopInfo {
        header_line: s.span.line_start,
        last_body_line: body.iter().map(|b| b.span.line_end).max()?,
        kind,
    })
}

/// Every loop in the program, in source order.
pub fn loops(program: &Program) -> Vec<LoopInfo> {
    let mut out = Vec::new();
    walk_stmts(&program.body, &mut |s| out.extend(info(s)));
    out
}

pub fn loop_extent(program: &Program, header_line: usize) -> Result<LoopInfo, NoLoopAtLine> {
    loops(program)
        .into_iter()
        .find(|l| l.header_line == header_line)
        .ok_or(NoLoopAtLine(header_line))
}

/// Last line of the block that directly contains the statement starting on `line`.
pub fn enclosing_block_end(program: &Program, line: usize) -> Option<usize> {
    fn search(block: &[Stmt], line: usize) -> Option<usize> {
        for s in block {
            if s.span.line_start == line {
                return block.iter().map(|b| b.span.line_end).max();
            }
            for inner in s.blocks() {
                if let Some(end) = search(inner, line) {
                    return Some(end);
                }
            }
        }
        None
    }
    search(&program.body, line)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::AVERAGE_WITH_LOOP;
    use crate::parser::parse;

    fn extent(src: &str, header: usize) -> Result<LoopInfo, NoLoopAtLine> {
        loop_extent(&parse(src).unwrap(), header)
    }

    #[test]
    fn loop_average_loop_ends_on_seven() {
        let l = extent(AVERAGE_WITH_LOOP, 4).unwrap();
        assert_eq!(l.last_body_line, 7);
        assert_eq!(l.kind, LoopKind::ForIter);
        assert_eq!(extent(AVERAGE_WITH_LOOP, 5), Err(NoLoopAtLine(5)));
        assert_eq!(enclosing_block_end(&parse(AVERAGE_WITH_LOOP).unwrap(), 4), Some(11));
    }

    #[test]
    fn single_statement_body() {
        let l = extent("def f(n):\n    t = 0\n    for i in range(n):\n        t += i\n    return t\n", 3).unwrap();
        assert_eq!(l.last_body_line, 4);
        assert_eq!(l.kind, LoopKind::ForRange);
    }

    // Each shape was checked against CPython's end_lineno for the loop node.
    #[test]
    fn nested_shapes() {
        let cases = [
            ("def f(xs):\n    for x in xs:\n        if x:\n            a = 1\n        else:\n            a = 2\n    return 0\n", 2, 6),
            ("def f(xs):\n    while xs:\n        if xs[0]:\n            break\n        xs = xs[1:]\n    return xs\n", 2, 5),
            ("def f(xs):\n    for x in xs:\n        for y in xs:\n            t = [x,\n                 y]\n\n    return 0\n", 2, 5),
            ("def f(xs):\n    for x in xs:\n        if x:\n            pass\n        elif x > 1:\n            t = 1\n    return 0\n", 2, 6),
            ("def f(xs):\n    for x in xs:\n        t = x\n        # trailing comment\n    return 0\n", 2, 3),
        ];
        for (src, header, last) in cases {
            assert_eq!(extent(src, header).unwrap().last_body_line, last, "{src}");
        }
    }

    #[test]
    fn loops_in_source_order() {
        let p = parse("def f(n):\n    i = 0\n    while i < n:\n        for j in range(i):\n            pass\n        i += 1\n    return i\n").unwrap();
        let headers: Vec<(usize, usize)> = loops(&p).iter().map(|l| (l.header_line, l.last_body_line)).collect();
        assert_eq!(headers, [(3, 6), (4, 5)]);
    }
}
