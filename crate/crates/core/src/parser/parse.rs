use super::ast::*;
use super::lexer::{Tok, Token};
use super::{ParseError, SubsetViolation, ViolationKind};

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "class", "try", "except", "finally", "with", "global", "nonlocal", "del", "assert", "raise",
    "yield", "async", "await",
];

const RESERVED: &[&str] = &[
    "def", "if", "elif", "else", "for", "while", "in", "not", "and", "or", "is", "return",
    "break", "continue", "pass", "import", "from", "lambda", "True", "False", "None", "as",
];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Line of the most recently consumed token.
    last_line: usize,
    fn_depth: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        Self {
            toks,
            pos: 0,
            last_line: 1,
            fn_depth: 0,
        }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, off: usize) -> &Token {
        &self.toks[(self.pos + off).min(self.toks.len() - 1)]
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.toks.len() {
            self.pos += 1;
        }
        if !matches!(t.tok, Tok::Dedent | Tok::Indent | Tok::Eof) {
            self.last_line = t.line;
        }
        t
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(&self.peek().tok, Tok::Op(o) if *o == op)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Name(n) if n == kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.is_op(op) {
            self.next();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn unsupported(&self, line: usize) -> ParseError {
        ParseError::Unsupported(SubsetViolation {
            kind: ViolationKind::UnsupportedNode,
            line,
        })
    }

    fn expect_op(&mut self, op: &str) -> PResult<Token> {
        if self.is_op(op) {
            Ok(self.next())
        } else {
            Err(self.error_here(format!("expected '{op}'")))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Token> {
        if self.is_kw(kw) {
            Ok(self.next())
        } else {
            Err(self.error_here(format!("expected '{kw}'")))
        }
    }

    fn expect_name(&mut self) -> PResult<(String, Token)> {
        match &self.peek().tok {
            Tok::Name(n) if !RESERVED.contains(&n.as_str()) => {
                let n = n.clone();
                if UNSUPPORTED_KEYWORDS.contains(&n.as_str()) {
                    return Err(self.unsupported(self.peek().line));
                }
                Ok((n, self.next()))
            }
            _ => Err(self.error_here("expected identifier")),
        }
    }

    fn expect_newline(&mut self) -> PResult<()> {
        match self.peek().tok {
            Tok::Newline => {
                self.next();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.error_here("expected end of line")),
        }
    }

    pub fn parse_file(&mut self) -> PResult<Vec<Stmt>> {
        let mut body = Vec::new();
        while !matches!(self.peek().tok, Tok::Eof) {
            match self.peek().tok {
                Tok::Newline => {
                    self.next();
                }
                Tok::Indent => return Err(self.error_here("unexpected indent")),
                _ => body.extend(self.statement()?),
            }
        }
        Ok(body)
    }

    fn statement(&mut self) -> PResult<Vec<Stmt>> {
        let t = self.peek().clone();
        if let Tok::Name(n) = &t.tok {
            match n.as_str() {
                "def" => return Ok(vec![self.function_def()?]),
                "if" => return Ok(vec![self.if_stmt(false)?]),
                "for" => return Ok(vec![self.for_stmt()?]),
                "while" => return Ok(vec![self.while_stmt()?]),
                k if UNSUPPORTED_KEYWORDS.contains(&k) => return Err(self.unsupported(t.line)),
                _ => {}
            }
        }
        if self.is_op("@") {
            return Err(self.unsupported(t.line));
        }
        self.simple_statements()
    }

    fn simple_statements(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = vec![self.small_statement()?];
        while self.eat_op(";") {
            if matches!(self.peek().tok, Tok::Newline | Tok::Eof) {
                break;
            }
            out.push(self.small_statement()?);
        }
        self.expect_newline()?;
        Ok(out)
    }

    fn small_statement(&mut self) -> PResult<Stmt> {
        let t = self.peek().clone();
        let start = Span::new(t.line, t.line, t.col);
        let kind = if self.eat_kw("pass") {
            StmtKind::Pass
        } else if self.eat_kw("break") {
            StmtKind::Break
        } else if self.eat_kw("continue") {
            StmtKind::Continue
        } else if self.eat_kw("return") {
            if matches!(self.peek().tok, Tok::Newline | Tok::Eof) || self.is_op(";") {
                StmtKind::Return(None)
            } else {
                StmtKind::Return(Some(self.testlist()?))
            }
        } else if self.eat_kw("import") {
            let module = self.dotted_name()?;
            while self.eat_op(",") || self.eat_kw("as") {
                self.dotted_name()?;
            }
            StmtKind::Import { module }
        } else if self.eat_kw("from") {
            let module = self.dotted_name()?;
            self.expect_kw("import")?;
            // Names after `import` are irrelevant; the statement is rejected by the subset check.
            while !matches!(self.peek().tok, Tok::Newline | Tok::Eof) && !self.is_op(";") {
                self.next();
            }
            StmtKind::Import { module }
        } else {
            self.expr_statement()?
        };
        Ok(Stmt {
            kind,
            span: Span::new(start.line_start, self.last_line, start.col),
        })
    }

    fn dotted_name(&mut self) -> PResult<String> {
        let mut name = self.expect_name()?.0;
        while self.eat_op(".") {
            name.push('.');
            name.push_str(&self.expect_name()?.0);
        }
        Ok(name)
    }

    fn expr_statement(&mut self) -> PResult<StmtKind> {
        let first = self.testlist()?;
        const AUG: &[(&str, BinOp)] = &[
            ("+=", BinOp::Add),
            ("-=", BinOp::Sub),
            ("*=", BinOp::Mul),
            ("/=", BinOp::Div),
            ("//=", BinOp::FloorDiv),
            ("%=", BinOp::Mod),
            ("**=", BinOp::Pow),
        ];
        for (sym, op) in AUG {
            if self.is_op(sym) {
                let t = self.next();
                check_target(&first, false).map_err(|_| ParseError::Syntax {
                    line: t.line,
                    col: t.col,
                    message: "illegal target for augmented assignment".into(),
                })?;
                let value = self.testlist()?;
                return Ok(StmtKind::AugAssign {
                    target: first,
                    op: *op,
                    value,
                });
            }
        }
        if self.is_op(":=") || self.is_op("->") {
            return Err(self.unsupported(self.peek().line));
        }
        if self.is_op(":") {
            // Annotated assignment.
            return Err(self.unsupported(self.peek().line));
        }
        if !self.is_op("=") {
            return Ok(StmtKind::Expr(first));
        }
        let mut chain = vec![first];
        while self.is_op("=") {
            let t = self.next();
            let last = chain.last().unwrap();
            check_target(last, true).map_err(|_| ParseError::Syntax {
                line: t.line,
                col: t.col,
                message: "cannot assign to expression".into(),
            })?;
            chain.push(self.testlist()?);
        }
        let value = chain.pop().unwrap();
        Ok(StmtKind::Assign {
            targets: chain,
            value,
        })
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_op(":")?;
        if !matches!(self.peek().tok, Tok::Newline) {
            return self.simple_statements();
        }
        self.next();
        if !matches!(self.peek().tok, Tok::Indent) {
            return Err(self.error_here("expected an indented block"));
        }
        self.next();
        let mut body = Vec::new();
        loop {
            match self.peek().tok {
                Tok::Dedent => {
                    self.next();
                    break;
                }
                Tok::Eof => break,
                Tok::Newline => {
                    self.next();
                }
                _ => body.extend(self.statement()?),
            }
        }
        Ok(body)
    }

    fn block_end(body: &[Stmt], fallback: usize) -> usize {
        body.last().map(|s| s.span.line_end).unwrap_or(fallback)
    }

    fn function_def(&mut self) -> PResult<Stmt> {
        let def = self.expect_kw("def")?;
        if self.fn_depth > 0 {
            return Err(self.unsupported(def.line));
        }
        let (name, _) = self.expect_name()?;
        self.expect_op("(")?;
        let mut params = Vec::new();
        while !self.is_op(")") {
            if self.is_op("*") || self.is_op("**") || self.is_op("/") {
                return Err(self.unsupported(self.peek().line));
            }
            let (p, t) = self.expect_name()?;
            if self.is_op("=") || self.is_op(":") {
                // Defaults and annotations are outside the subset.
                return Err(self.unsupported(t.line));
            }
            params.push(Param { name: p, line: t.line });
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        if self.is_op("->") {
            return Err(self.unsupported(self.peek().line));
        }
        self.fn_depth += 1;
        let body = self.block();
        self.fn_depth -= 1;
        let body = body?;
        let end = Self::block_end(&body, def.line);
        Ok(Stmt {
            kind: StmtKind::FunctionDef { name, params, body },
            span: Span::new(def.line, end, def.col),
        })
    }

    fn if_stmt(&mut self, elif: bool) -> PResult<Stmt> {
        let kw = self.next();
        let test = self.namedexpr()?;
        let body = self.block()?;
        let mut end = Self::block_end(&body, kw.line);
        let orelse = if self.is_kw("elif") {
            let nested = self.if_stmt(true)?;
            end = nested.span.line_end;
            vec![nested]
        } else if self.eat_kw("else") {
            let b = self.block()?;
            end = Self::block_end(&b, end);
            b
        } else {
            Vec::new()
        };
        Ok(Stmt {
            kind: StmtKind::If {
                test,
                body,
                orelse,
                elif,
            },
            span: Span::new(kw.line, end, kw.col),
        })
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        let kw = self.next();
        let target = self.target_list()?;
        check_target(&target, false).map_err(|_| self.error_here("invalid for-loop target"))?;
        self.expect_kw("in")?;
        let iter = self.testlist()?;
        let body = self.block()?;
        if self.is_kw("else") {
            return Err(self.unsupported(self.peek().line));
        }
        let end = Self::block_end(&body, kw.line);
        Ok(Stmt {
            kind: StmtKind::For { target, iter, body },
            span: Span::new(kw.line, end, kw.col),
        })
    }

    fn while_stmt(&mut self) -> PResult<Stmt> {
        let kw = self.next();
        let test = self.namedexpr()?;
        let body = self.block()?;
        if self.is_kw("else") {
            return Err(self.unsupported(self.peek().line));
        }
        let end = Self::block_end(&body, kw.line);
        Ok(Stmt {
            kind: StmtKind::While { test, body },
            span: Span::new(kw.line, end, kw.col),
        })
    }

    fn namedexpr(&mut self) -> PResult<Expr> {
        let e = self.test()?;
        if self.is_op(":=") {
            return Err(self.unsupported(self.peek().line));
        }
        Ok(e)
    }

    // ---- expressions ----

    fn make(&self, kind: ExprKind, start: Span) -> Expr {
        Expr {
            kind,
            span: Span::new(start.line_start, self.last_line.max(start.line_start), start.col),
        }
    }

    fn start(&self) -> Span {
        let t = self.peek();
        Span::new(t.line, t.line, t.col)
    }

    /// `test (',' test)* [',']`, producing a tuple when a comma is present.
    fn testlist(&mut self) -> PResult<Expr> {
        let start = self.start();
        let first = self.test()?;
        if !self.is_op(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_op(",") {
            if self.at_expr_end() {
                break;
            }
            items.push(self.test()?);
        }
        Ok(self.make(ExprKind::Tuple(items), start))
    }

    fn at_expr_end(&self) -> bool {
        matches!(self.peek().tok, Tok::Newline | Tok::Eof)
            || self.is_op("=")
            || self.is_op(")")
            || self.is_op("]")
            || self.is_op(":")
            || self.is_op(";")
    }

    /// Targets for `for` and comprehensions: stops before `in`.
    fn target_list(&mut self) -> PResult<Expr> {
        let start = self.start();
        let first = self.arith_or_star()?;
        if !self.is_op(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_op(",") {
            if self.is_kw("in") {
                break;
            }
            items.push(self.arith_or_star()?);
        }
        Ok(self.make(ExprKind::Tuple(items), start))
    }

    fn arith_or_star(&mut self) -> PResult<Expr> {
        if self.is_op("*") {
            return Err(self.unsupported(self.peek().line));
        }
        self.arith()
    }

    fn test(&mut self) -> PResult<Expr> {
        if self.is_kw("lambda") {
            return self.lambda();
        }
        let start = self.start();
        let body = self.or_test()?;
        if self.is_kw("if") {
            // Conditional expression; the `if` of a comprehension is handled by the caller
            // because comprehension conditions are parsed with `or_test`.
            self.next();
            let test = self.or_test()?;
            self.expect_kw("else")?;
            let orelse = self.test()?;
            return Ok(self.make(
                ExprKind::IfExp {
                    test: Box::new(test),
                    body: Box::new(body),
                    orelse: Box::new(orelse),
                },
                start,
            ));
        }
        Ok(body)
    }

    fn lambda(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.next();
        let mut params = Vec::new();
        while !self.is_op(":") {
            let (p, _) = self.expect_name()?;
            params.push(p);
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(":")?;
        let body = self.test()?;
        Ok(self.make(
            ExprKind::Lambda {
                params,
                body: Box::new(body),
            },
            start,
        ))
    }

    fn or_test(&mut self) -> PResult<Expr> {
        self.bool_chain("or", BoolOp::Or, Self::and_test)
    }

    fn and_test(&mut self) -> PResult<Expr> {
        self.bool_chain("and", BoolOp::And, Self::not_test)
    }

    fn bool_chain(
        &mut self,
        kw: &str,
        op: BoolOp,
        sub: fn(&mut Self) -> PResult<Expr>,
    ) -> PResult<Expr> {
        let start = self.start();
        let first = sub(self)?;
        if !self.is_kw(kw) {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_kw(kw) {
            values.push(sub(self)?);
        }
        Ok(self.make(ExprKind::BoolOp { op, values }, start))
    }

    fn not_test(&mut self) -> PResult<Expr> {
        if self.is_kw("not") {
            let start = self.start();
            self.next();
            let operand = self.not_test()?;
            return Ok(self.make(
                ExprKind::UnaryOp {
                    op: UnaryOp::Not,
                    operand: Box::new(operand),
                },
                start,
            ));
        }
        self.comparison()
    }

    fn comp_op(&mut self) -> Option<CmpOp> {
        let op = match &self.peek().tok {
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::NotEq,
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op("<=") => CmpOp::LtE,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op(">=") => CmpOp::GtE,
            Tok::Name(n) if n == "in" => CmpOp::In,
            Tok::Name(n) if n == "not" => {
                if matches!(&self.peek_at(1).tok, Tok::Name(m) if m == "in") {
                    self.next();
                    CmpOp::NotIn
                } else {
                    return None;
                }
            }
            Tok::Name(n) if n == "is" => {
                if matches!(&self.peek_at(1).tok, Tok::Name(m) if m == "not") {
                    self.next();
                    CmpOp::IsNot
                } else {
                    CmpOp::Is
                }
            }
            _ => return None,
        };
        self.next();
        Some(op)
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let start = self.start();
        let left = self.arith()?;
        let mut ops = Vec::new();
        while let Some(op) = self.comp_op() {
            ops.push((op, self.arith()?));
        }
        if ops.is_empty() {
            return Ok(left);
        }
        Ok(self.make(
            ExprKind::Compare {
                left: Box::new(left),
                ops,
            },
            start,
        ))
    }

    fn arith(&mut self) -> PResult<Expr> {
        if self.is_op("|") || self.is_op("&") || self.is_op("^") {
            return Err(self.unsupported(self.peek().line));
        }
        let start = self.start();
        let mut left = self.term()?;
        loop {
            let op = if self.is_op("+") {
                BinOp::Add
            } else if self.is_op("-") {
                BinOp::Sub
            } else {
                break;
            };
            self.next();
            let right = self.term()?;
            left = self.make(
                ExprKind::BinOp {
                    op,
                    left: Box::new(left),
                    right: Box::new(right),
                },
                start,
            );
        }
        Ok(left)
    }

    fn term(&mut self) -> PResult<Expr> {
        let start = self.start();
        let mut left = self.factor()?;
        loop {
            let op = match &self.peek().tok {
                Tok::Op("*") => BinOp::Mul,
                Tok::Op("/") => BinOp::Div,
                Tok::Op("//") => BinOp::FloorDiv,
                Tok::Op("%") => BinOp::Mod,
                Tok::Op("@") => return Err(self.unsupported(self.peek().line)),
                _ => break,
            };
            self.next();
            let right = self.factor()?;
            left = self.make(
                ExprKind::BinOp {
                    op,
                    left: Box::new(left),
                    right: Box::new(right),
                },
                start,
            );
        }
        Ok(left)
    }

    fn factor(&mut self) -> PResult<Expr> {
        let start = self.start();
        let op = if self.is_op("-") {
            UnaryOp::Neg
        } else if self.is_op("+") {
            UnaryOp::Pos
        } else {
            return self.power();
        };
        self.next();
        let operand = self.factor()?;
        Ok(self.make(
            ExprKind::UnaryOp {
                op,
                operand: Box::new(operand),
            },
            start,
        ))
    }

    fn power(&mut self) -> PResult<Expr> {
        let start = self.start();
        let base = self.atom_expr()?;
        if self.eat_op("**") {
            let exp = self.factor()?;
            return Ok(self.make(
                ExprKind::BinOp {
                    op: BinOp::Pow,
                    left: Box::new(base),
                    right: Box::new(exp),
                },
                start,
            ));
        }
        Ok(base)
    }

    fn atom_expr(&mut self) -> PResult<Expr> {
        let start = self.start();
        let mut e = self.atom()?;
        loop {
            if self.eat_op("(") {
                let (args, keywords) = self.call_args(start)?;
                e = self.make(
                    ExprKind::Call {
                        func: Box::new(e),
                        args,
                        keywords,
                    },
                    start,
                );
            } else if self.eat_op("[") {
                let index = self.subscript()?;
                self.expect_op("]")?;
                e = self.make(
                    ExprKind::Subscript {
                        value: Box::new(e),
                        index: Box::new(index),
                    },
                    start,
                );
            } else if self.eat_op(".") {
                let (attr, _) = self.expect_name()?;
                e = self.make(
                    ExprKind::Attribute {
                        value: Box::new(e),
                        attr,
                    },
                    start,
                );
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn call_args(&mut self, _start: Span) -> PResult<(Vec<Expr>, Vec<Keyword>)> {
        let mut args = Vec::new();
        let mut keywords = Vec::new();
        while !self.is_op(")") {
            if self.is_op("*") || self.is_op("**") {
                return Err(self.unsupported(self.peek().line));
            }
            let is_kwarg = matches!(&self.peek().tok, Tok::Name(_))
                && matches!(&self.peek_at(1).tok, Tok::Op("="));
            if is_kwarg {
                let (name, _) = self.expect_name()?;
                self.next();
                let value = self.test()?;
                keywords.push(Keyword { name, value });
            } else {
                let arg_start = self.start();
                let value = self.test()?;
                if self.is_kw("for") {
                    let generators = self.comp_for()?;
                    args.push(self.make(
                        ExprKind::GeneratorExp {
                            element: Box::new(value),
                            generators,
                        },
                        arg_start,
                    ));
                } else {
                    if !keywords.is_empty() {
                        return Err(self.error_here("positional argument follows keyword argument"));
                    }
                    args.push(value);
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        Ok((args, keywords))
    }

    fn subscript(&mut self) -> PResult<Expr> {
        let start = self.start();
        let lower = if self.is_op(":") {
            None
        } else {
            let e = self.test()?;
            if !self.is_op(":") {
                if self.is_op(",") {
                    return Err(self.unsupported(self.peek().line));
                }
                return Ok(e);
            }
            Some(Box::new(e))
        };
        self.expect_op(":")?;
        let upper = if self.is_op(":") || self.is_op("]") {
            None
        } else {
            Some(Box::new(self.test()?))
        };
        let step = if self.eat_op(":") {
            if self.is_op("]") {
                None
            } else {
                Some(Box::new(self.test()?))
            }
        } else {
            None
        };
        Ok(self.make(ExprKind::Slice { lower, upper, step }, start))
    }

    fn comp_for(&mut self) -> PResult<Vec<Comprehension>> {
        let mut gens = Vec::new();
        while self.eat_kw("for") {
            let target = self.target_list()?;
            check_target(&target, false).map_err(|_| self.error_here("invalid comprehension target"))?;
            self.expect_kw("in")?;
            let iter = self.or_test()?;
            let mut conditions = Vec::new();
            while self.eat_kw("if") {
                conditions.push(self.or_test()?);
            }
            gens.push(Comprehension {
                target,
                iter,
                conditions,
            });
        }
        Ok(gens)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        let start = Span::new(t.line, t.line, t.col);
        match &t.tok {
            Tok::Int(v) => {
                self.next();
                Ok(self.make(ExprKind::Int(*v), start))
            }
            Tok::Float(v) => {
                self.next();
                Ok(self.make(ExprKind::Float(*v), start))
            }
            Tok::Str(s) => {
                let mut s = s.clone();
                self.next();
                // Adjacent literals concatenate.
                while let Tok::Str(more) = &self.peek().tok {
                    s.push_str(more);
                    self.next();
                }
                Ok(self.make(ExprKind::Str(s), start))
            }
            Tok::Name(n) => match n.as_str() {
                "True" => {
                    self.next();
                    Ok(self.make(ExprKind::Bool(true), start))
                }
                "False" => {
                    self.next();
                    Ok(self.make(ExprKind::Bool(false), start))
                }
                "None" => {
                    self.next();
                    Ok(self.make(ExprKind::None, start))
                }
                k if UNSUPPORTED_KEYWORDS.contains(&k) => Err(self.unsupported(t.line)),
                k if RESERVED.contains(&k) => Err(self.error_here(format!("unexpected keyword '{k}'"))),
                _ => {
                    let name = n.clone();
                    self.next();
                    Ok(self.make(ExprKind::Name(name), start))
                }
            },
            Tok::Op("(") => {
                self.next();
                if self.eat_op(")") {
                    return Ok(self.make(ExprKind::Tuple(Vec::new()), start));
                }
                let first = self.test()?;
                if self.is_kw("for") {
                    let generators = self.comp_for()?;
                    self.expect_op(")")?;
                    return Ok(self.make(
                        ExprKind::GeneratorExp {
                            element: Box::new(first),
                            generators,
                        },
                        start,
                    ));
                }
                if self.eat_op(")") {
                    // Parenthesized expression keeps the inner node; widen its span.
                    let mut inner = first;
                    inner.span = Span::new(start.line_start, self.last_line, start.col);
                    return Ok(inner);
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.is_op(")") {
                        break;
                    }
                    items.push(self.test()?);
                }
                self.expect_op(")")?;
                Ok(self.make(ExprKind::Tuple(items), start))
            }
            Tok::Op("[") => {
                self.next();
                if self.eat_op("]") {
                    return Ok(self.make(ExprKind::List(Vec::new()), start));
                }
                let first = self.test()?;
                if self.is_kw("for") {
                    let generators = self.comp_for()?;
                    self.expect_op("]")?;
                    return Ok(self.make(
                        ExprKind::ListComp {
                            element: Box::new(first),
                            generators,
                        },
                        start,
                    ));
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.is_op("]") {
                        break;
                    }
                    items.push(self.test()?);
                }
                self.expect_op("]")?;
                Ok(self.make(ExprKind::List(items), start))
            }
            Tok::Op("{") => Err(self.unsupported(t.line)),
            Tok::Op("*") => Err(self.unsupported(t.line)),
            Tok::Op(o) => Err(self.error_here(format!("unexpected '{o}'"))),
            Tok::Newline | Tok::Eof => Err(self.error_here("unexpected end of line")),
            Tok::Indent => Err(self.error_here("unexpected indent")),
            Tok::Dedent => Err(self.error_here("unexpected dedent")),
        }
    }
}

/// Whether `e` is a valid assignment target: a name, subscript, or tuple/list of targets.
fn check_target(e: &Expr, allow_subscript: bool) -> Result<(), ()> {
    match &e.kind {
        ExprKind::Name(_) => Ok(()),
        ExprKind::Subscript { .. } => Ok(()),
        ExprKind::Attribute { .. } if allow_subscript => Ok(()),
        ExprKind::Tuple(items) | ExprKind::List(items) if !items.is_empty() => {
            items.iter().try_for_each(|i| check_target(i, allow_subscript))
        }
        _ => Err(()),
    }
}
