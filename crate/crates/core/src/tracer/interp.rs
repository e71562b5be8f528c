use std::collections::HashMap;
use std::rc::Rc;

use super::builtins;
use super::value::{Literal, Num, Value};
use super::{Event, TraceError};
use crate::parser::ast::*;

pub(super) enum Flow {
    Normal,
    Break,
    Continue,
    Return(Value),
}

pub(super) type EvalResult<T> = Result<T, TraceError>;

pub(super) struct Interpreter {
    pub events: Vec<Event>,
    pub steps: u64,
    pub stdout: String,
    limit: u64,
    /// Function-local variables.
    locals: HashMap<String, Value>,
    /// Comprehension scopes, innermost last.
    comp_scopes: Vec<HashMap<String, Value>>,
    /// Line of the statement being executed, for error reports.
    pub line: usize,
}

pub(super) fn runtime(line: usize, message: impl Into<String>) -> TraceError {
    TraceError::Runtime {
        line,
        message: message.into(),
    }
}

impl Interpreter {
    pub fn new(limit: u64) -> Self {
        Self {
            events: Vec::new(),
            steps: 0,
            stdout: String::new(),
            limit,
            locals: HashMap::new(),
            comp_scopes: Vec::new(),
            line: 0,
        }
    }

    pub fn err(&self, message: impl Into<String>) -> TraceError {
        runtime(self.line, message)
    }

    fn tick(&mut self) -> EvalResult<()> {
        self.steps += 1;
        if self.steps > self.limit {
            return Err(TraceError::StepLimitExceeded { limit: self.limit });
        }
        Ok(())
    }

    pub fn call(&mut self, function: Function<'_>, args: &[Literal]) -> EvalResult<Value> {
        self.line = function.def_line();
        for (p, a) in function.params.iter().zip(args) {
            self.locals.insert(p.name.clone(), Value::from_literal(a));
        }
        match self.exec_block(function.body)? {
            Flow::Return(v) => Ok(v),
            _ => Ok(Value::None),
        }
    }

    fn exec_block(&mut self, body: &[Stmt]) -> EvalResult<Flow> {
        for s in body {
            match self.exec(s)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn exec(&mut self, s: &Stmt) -> EvalResult<Flow> {
        self.line = s.span.line_start;
        self.tick()?;
        match &s.kind {
            StmtKind::Assign { targets, value } => {
                let v = self.eval(value)?;
                for t in targets {
                    self.line = s.span.line_start;
                    self.assign(t, v.clone(), s.span.line_start)?;
                }
                Ok(Flow::Normal)
            }
            StmtKind::AugAssign { target, op, value } => {
                let rhs = self.eval(value)?;
                match &target.kind {
                    ExprKind::Name(n) => {
                        let cur = self.lookup(n)?;
                        self.line = s.span.line_start;
                        let new = self.aug_binop(*op, cur, rhs)?;
                        self.bind(n, new, s.span.line_start)?;
                    }
                    ExprKind::Subscript { value: obj, index } => {
                        let container = self.eval(obj)?;
                        let idx = self.eval(index)?;
                        let cur = self.subscript(&container, &idx)?;
                        let new = self.aug_binop(*op, cur, rhs)?;
                        self.store_subscript(&container, &idx, new)?;
                    }
                    _ => return Err(self.err("illegal augmented assignment target")),
                }
                Ok(Flow::Normal)
            }
            StmtKind::If {
                test, body, orelse, ..
            } => {
                if self.eval(test)?.truthy() {
                    self.exec_block(body)
                } else {
                    self.exec_block(orelse)
                }
            }
            StmtKind::For { target, iter, body } => {
                let header = s.span.line_start;
                let iterable = self.eval(iter)?;
                let mut iteration = 0u64;
                let mut idx = 0usize;
                while let Some(item) = self.iter_next(&iterable, idx)? {
                    idx += 1;
                    self.line = header;
                    self.assign(target, item, header)?;
                    iteration += 1;
                    self.tick()?;
                    self.events.push(Event::LoopBodyEntered {
                        header_line: header,
                        iteration,
                        step: self.steps,
                    });
                    match self.exec_block(body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Normal | Flow::Continue => {}
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::While { test, body } => {
                let header = s.span.line_start;
                let mut iteration = 0u64;
                loop {
                    self.line = header;
                    if !self.eval(test)?.truthy() {
                        break;
                    }
                    iteration += 1;
                    self.tick()?;
                    self.events.push(Event::LoopBodyEntered {
                        header_line: header,
                        iteration,
                        step: self.steps,
                    });
                    match self.exec_block(body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Normal | Flow::Continue => {}
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::Return(value) => {
                let v = match value {
                    Some(e) => self.eval(e)?,
                    None => Value::None,
                };
                self.tick()?;
                self.events.push(Event::Return {
                    value: v.to_literal(),
                    line: s.span.line_start,
                    step: self.steps,
                });
                Ok(Flow::Return(v))
            }
            StmtKind::Break => Ok(Flow::Break),
            StmtKind::Continue => Ok(Flow::Continue),
            StmtKind::Pass => Ok(Flow::Normal),
            StmtKind::Expr(e) => {
                self.eval(e)?;
                Ok(Flow::Normal)
            }
            StmtKind::FunctionDef { .. } => Err(self.err("nested function definitions are not supported")),
            StmtKind::Import { module } => Err(self.err(format!("cannot import {module}"))),
        }
    }

    /// Bind a local name and record the assignment.
    fn bind(&mut self, name: &str, v: Value, line: usize) -> EvalResult<()> {
        self.tick()?;
        self.events.push(Event::Assign {
            name: name.to_string(),
            value: v.to_literal(),
            line,
            step: self.steps,
        });
        self.locals.insert(name.to_string(), v);
        Ok(())
    }

    fn assign(&mut self, target: &Expr, v: Value, line: usize) -> EvalResult<()> {
        match &target.kind {
            ExprKind::Name(n) => self.bind(n, v, line),
            ExprKind::Tuple(items) | ExprKind::List(items) => {
                let values = self.unpack(&v, items.len())?;
                for (t, item) in items.iter().zip(values) {
                    self.assign(t, item, line)?;
                }
                Ok(())
            }
            ExprKind::Subscript { value, index } => {
                let container = self.eval(value)?;
                let idx = self.eval(index)?;
                self.store_subscript(&container, &idx, v)
            }
            _ => Err(self.err("unsupported assignment target")),
        }
    }

    fn assign_comp(&mut self, target: &Expr, v: Value) -> EvalResult<()> {
        match &target.kind {
            ExprKind::Name(n) => {
                self.comp_scopes
                    .last_mut()
                    .expect("comprehension scope")
                    .insert(n.clone(), v);
                Ok(())
            }
            ExprKind::Tuple(items) | ExprKind::List(items) => {
                let values = self.unpack(&v, items.len())?;
                for (t, item) in items.iter().zip(values) {
                    self.assign_comp(t, item)?;
                }
                Ok(())
            }
            _ => Err(self.err("unsupported comprehension target")),
        }
    }

    fn unpack(&mut self, v: &Value, n: usize) -> EvalResult<Vec<Value>> {
        let items = self.collect_iter(v)?;
        if items.len() != n {
            return Err(self.err(format!(
                "cannot unpack {} values into {} targets",
                items.len(),
                n
            )));
        }
        Ok(items)
    }

    fn store_subscript(&mut self, container: &Value, idx: &Value, v: Value) -> EvalResult<()> {
        match container {
            Value::List(items) => {
                let len = items.borrow().len();
                let i = self.index(idx, len)?;
                items.borrow_mut()[i] = v;
                Ok(())
            }
            other => Err(self.err(format!(
                "'{}' object does not support item assignment",
                other.type_name()
            ))),
        }
    }

    pub fn lookup(&self, name: &str) -> EvalResult<Value> {
        for scope in self.comp_scopes.iter().rev() {
            if let Some(v) = scope.get(name) {
                return Ok(v.clone());
            }
        }
        if let Some(v) = self.locals.get(name) {
            return Ok(v.clone());
        }
        if builtins::is_builtin(name) {
            return Ok(Value::Builtin(Rc::from(name)));
        }
        Err(self.err(format!("name '{name}' is not defined")))
    }

    /// Item `idx` of an iterable, or `None` past the end.
    fn iter_next(&mut self, v: &Value, idx: usize) -> EvalResult<Option<Value>> {
        Ok(match v {
            Value::List(items) => items.borrow().get(idx).cloned(),
            Value::Tuple(items) => items.get(idx).cloned(),
            Value::Str(s) => s.chars().nth(idx).map(|c| Value::str(c.to_string())),
            Value::Range { start, step, .. } => {
                if (idx as i64) < v.range_len() {
                    Some(Value::Int(start + step * idx as i64))
                } else {
                    None
                }
            }
            other => return Err(self.err(format!("'{}' object is not iterable", other.type_name()))),
        })
    }

    pub fn collect_iter(&mut self, v: &Value) -> EvalResult<Vec<Value>> {
        let mut out = Vec::new();
        while let Some(item) = self.iter_next(v, out.len())? {
            out.push(item);
        }
        Ok(out)
    }

    pub fn eval(&mut self, e: &Expr) -> EvalResult<Value> {
        self.tick()?;
        match &e.kind {
            ExprKind::Name(n) => self.lookup(n),
            ExprKind::Int(v) => Ok(Value::Int(*v)),
            ExprKind::Float(v) => Ok(Value::Float(*v)),
            ExprKind::Str(s) => Ok(Value::str(s.as_str())),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::None => Ok(Value::None),
            ExprKind::List(items) => {
                let mut out = Vec::with_capacity(items.len());
                for i in items {
                    out.push(self.eval(i)?);
                }
                Ok(Value::list(out))
            }
            ExprKind::Tuple(items) => {
                let mut out = Vec::with_capacity(items.len());
                for i in items {
                    out.push(self.eval(i)?);
                }
                Ok(Value::Tuple(Rc::new(out)))
            }
            ExprKind::BinOp { op, left, right } => {
                let l = self.eval(left)?;
                let r = self.eval(right)?;
                self.binop(*op, l, r)
            }
            ExprKind::UnaryOp { op, operand } => {
                let v = self.eval(operand)?;
                match op {
                    UnaryOp::Not => Ok(Value::Bool(!v.truthy())),
                    UnaryOp::Neg => match v.number() {
                        Some(Num::Int(i)) => i
                            .checked_neg()
                            .map(Value::Int)
                            .ok_or_else(|| self.err("integer overflow")),
                        Some(Num::Float(f)) => Ok(Value::Float(-f)),
                        None => Err(self.err(format!("bad operand type for unary -: '{}'", v.type_name()))),
                    },
                    UnaryOp::Pos => match v.number() {
                        Some(Num::Int(i)) => Ok(Value::Int(i)),
                        Some(Num::Float(f)) => Ok(Value::Float(f)),
                        None => Err(self.err(format!("bad operand type for unary +: '{}'", v.type_name()))),
                    },
                }
            }
            ExprKind::BoolOp { op, values } => {
                let mut last = Value::None;
                for (i, ve) in values.iter().enumerate() {
                    last = self.eval(ve)?;
                    let t = last.truthy();
                    let short = match op {
                        BoolOp::And => !t,
                        BoolOp::Or => t,
                    };
                    if short || i == values.len() - 1 {
                        break;
                    }
                }
                Ok(last)
            }
            ExprKind::Compare { left, ops } => {
                let mut l = self.eval(left)?;
                for (op, re) in ops {
                    let r = self.eval(re)?;
                    if !self.compare(*op, &l, &r)? {
                        return Ok(Value::Bool(false));
                    }
                    l = r;
                }
                Ok(Value::Bool(true))
            }
            ExprKind::IfExp { test, body, orelse } => {
                if self.eval(test)?.truthy() {
                    self.eval(body)
                } else {
                    self.eval(orelse)
                }
            }
            ExprKind::Call {
                func,
                args,
                keywords,
            } => self.eval_call(func, args, keywords),
            ExprKind::Attribute { .. } => Err(self.err("attribute access outside a method call is not supported")),
            ExprKind::Subscript { value, index } => {
                let container = self.eval(value)?;
                if let ExprKind::Slice { lower, upper, step } = &index.kind {
                    let lo = self.eval_opt(lower)?;
                    let hi = self.eval_opt(upper)?;
                    let st = self.eval_opt(step)?;
                    return self.slice(&container, lo, hi, st);
                }
                let idx = self.eval(index)?;
                self.subscript(&container, &idx)
            }
            ExprKind::Slice { .. } => Err(self.err("slice outside subscript")),
            ExprKind::ListComp {
                element,
                generators,
            } => {
                let mut out = Vec::new();
                self.comp_scopes.push(HashMap::new());
                let r = self.comprehension(element, generators, &mut out);
                self.comp_scopes.pop();
                r?;
                Ok(Value::list(out))
            }
            ExprKind::GeneratorExp { .. } => Err(self.err("generator expressions are not supported")),
            ExprKind::Lambda { .. } => Err(self.err("lambda is not supported")),
        }
    }

    fn eval_opt(&mut self, e: &Option<Box<Expr>>) -> EvalResult<Option<Value>> {
        match e {
            Some(e) => Ok(Some(self.eval(e)?)),
            None => Ok(None),
        }
    }

    fn comprehension(
        &mut self,
        element: &Expr,
        gens: &[Comprehension],
        out: &mut Vec<Value>,
    ) -> EvalResult<()> {
        let Some((first, rest)) = gens.split_first() else {
            out.push(self.eval(element)?);
            return Ok(());
        };
        let iterable = self.eval(&first.iter)?;
        let mut idx = 0;
        'items: while let Some(item) = self.iter_next(&iterable, idx)? {
            idx += 1;
            self.tick()?;
            self.assign_comp(&first.target, item)?;
            for c in &first.conditions {
                if !self.eval(c)?.truthy() {
                    continue 'items;
                }
            }
            self.comprehension(element, rest, out)?;
        }
        Ok(())
    }

    fn eval_call(&mut self, func: &Expr, args: &[Expr], keywords: &[Keyword]) -> EvalResult<Value> {
        let line = self.line;
        if let ExprKind::Attribute { value, attr } = &func.kind {
            let receiver = self.eval(value)?;
            let mut argv = Vec::with_capacity(args.len());
            for a in args {
                argv.push(self.eval(a)?);
            }
            if !keywords.is_empty() && attr != "sort" {
                return Err(self.err(format!("{attr}() got unexpected keyword arguments")));
            }
            let mut kw = Vec::new();
            for k in keywords {
                kw.push((k.name.clone(), self.eval(&k.value)?));
            }
            self.line = line;
            return builtins::call_method(self, &receiver, attr, argv, kw);
        }
        let callee = self.eval(func)?;
        let mut argv = Vec::with_capacity(args.len());
        for a in args {
            argv.push(self.eval(a)?);
        }
        let mut kw = Vec::new();
        for k in keywords {
            kw.push((k.name.clone(), self.eval(&k.value)?));
        }
        self.line = line;
        match callee {
            Value::Builtin(name) => builtins::call_builtin(self, &name, argv, kw),
            other => Err(self.err(format!("'{}' object is not callable", other.type_name()))),
        }
    }

    /// Call a value used as a function (e.g. a `key=` argument).
    pub fn call_value(&mut self, f: &Value, arg: Value) -> EvalResult<Value> {
        match f {
            Value::Builtin(name) => builtins::call_builtin(self, name, vec![arg], Vec::new()),
            other => Err(self.err(format!("'{}' object is not callable", other.type_name()))),
        }
    }

    pub fn index(&self, idx: &Value, len: usize) -> EvalResult<usize> {
        let i = match idx {
            Value::Int(i) => *i,
            Value::Bool(b) => *b as i64,
            other => {
                return Err(self.err(format!(
                    "indices must be integers, not {}",
                    other.type_name()
                )))
            }
        };
        let real = if i < 0 { i + len as i64 } else { i };
        if real < 0 || real >= len as i64 {
            return Err(self.err("index out of range"));
        }
        Ok(real as usize)
    }

    fn subscript(&mut self, container: &Value, idx: &Value) -> EvalResult<Value> {
        match container {
            Value::List(items) => {
                let items = items.borrow();
                let i = self.index(idx, items.len())?;
                Ok(items[i].clone())
            }
            Value::Tuple(items) => {
                let i = self.index(idx, items.len())?;
                Ok(items[i].clone())
            }
            Value::Str(s) => {
                let chars: Vec<char> = s.chars().collect();
                let i = self.index(idx, chars.len())?;
                Ok(Value::str(chars[i].to_string()))
            }
            Value::Range { start, step, .. } => {
                let i = self.index(idx, container.range_len() as usize)?;
                Ok(Value::Int(start + step * i as i64))
            }
            other => Err(self.err(format!("'{}' object is not subscriptable", other.type_name()))),
        }
    }

    fn slice(
        &mut self,
        container: &Value,
        lo: Option<Value>,
        hi: Option<Value>,
        step: Option<Value>,
    ) -> EvalResult<Value> {
        let as_int = |v: Option<Value>, this: &Self| -> EvalResult<Option<i64>> {
            match v {
                None | Some(Value::None) => Ok(None),
                Some(Value::Int(i)) => Ok(Some(i)),
                Some(Value::Bool(b)) => Ok(Some(b as i64)),
                Some(other) => Err(this.err(format!(
                    "slice indices must be integers, not {}",
                    other.type_name()
                ))),
            }
        };
        let step = as_int(step, self)?.unwrap_or(1);
        if step == 0 {
            return Err(self.err("slice step cannot be zero"));
        }
        let lo = as_int(lo, self)?;
        let hi = as_int(hi, self)?;
        let pick = |len: usize| -> Vec<usize> { slice_indices(len as i64, lo, hi, step) };
        match container {
            Value::List(items) => {
                let items = items.borrow();
                Ok(Value::list(pick(items.len()).into_iter().map(|i| items[i].clone()).collect()))
            }
            Value::Tuple(items) => Ok(Value::Tuple(Rc::new(
                pick(items.len()).into_iter().map(|i| items[i].clone()).collect(),
            ))),
            Value::Str(s) => {
                let chars: Vec<char> = s.chars().collect();
                Ok(Value::str(
                    pick(chars.len()).into_iter().map(|i| chars[i]).collect::<String>(),
                ))
            }
            other => Err(self.err(format!("'{}' object is not subscriptable", other.type_name()))),
        }
    }

    fn compare(&mut self, op: CmpOp, l: &Value, r: &Value) -> EvalResult<bool> {
        use std::cmp::Ordering::*;
        let ord = |this: &Self| {
            l.py_cmp(r).ok_or_else(|| {
                this.err(format!(
                    "'{}' not supported between instances of '{}' and '{}'",
                    op.symbol(),
                    l.type_name(),
                    r.type_name()
                ))
            })
        };
        Ok(match op {
            CmpOp::Eq => l.py_eq(r),
            CmpOp::NotEq => !l.py_eq(r),
            CmpOp::Lt => ord(self)? == Less,
            CmpOp::LtE => ord(self)? != Greater,
            CmpOp::Gt => ord(self)? == Greater,
            CmpOp::GtE => ord(self)? != Less,
            CmpOp::In => self.contains(r, l)?,
            CmpOp::NotIn => !self.contains(r, l)?,
            CmpOp::Is => identical(l, r),
            CmpOp::IsNot => !identical(l, r),
        })
    }

    fn contains(&mut self, container: &Value, item: &Value) -> EvalResult<bool> {
        match (container, item) {
            (Value::Str(s), Value::Str(sub)) => Ok(s.contains(&**sub)),
            (Value::Str(_), other) => Err(self.err(format!(
                "'in <string>' requires string as left operand, not {}",
                other.type_name()
            ))),
            (Value::List(_) | Value::Tuple(_) | Value::Range { .. }, _) => {
                let items = self.collect_iter(container)?;
                Ok(items.iter().any(|x| x.py_eq(item)))
            }
            (other, _) => Err(self.err(format!(
                "argument of type '{}' is not iterable",
                other.type_name()
            ))),
        }
    }

    fn aug_binop(&mut self, op: BinOp, l: Value, r: Value) -> EvalResult<Value> {
        // `xs += ys` extends the list in place.
        if let (BinOp::Add, Value::List(items)) = (op, &l) {
            let extra = self.collect_iter(&r)?;
            items.borrow_mut().extend(extra);
            return Ok(l);
        }
        self.binop(op, l, r)
    }

    pub fn binop(&mut self, op: BinOp, l: Value, r: Value) -> EvalResult<Value> {
        if let (Some(a), Some(b)) = (l.number(), r.number()) {
            return self.arith(op, a, b);
        }
        match (op, &l, &r) {
            (BinOp::Add, Value::Str(a), Value::Str(b)) => Ok(Value::str(format!("{a}{b}"))),
            (BinOp::Add, Value::List(a), Value::List(b)) => {
                let mut v = a.borrow().clone();
                v.extend(b.borrow().iter().cloned());
                Ok(Value::list(v))
            }
            (BinOp::Add, Value::Tuple(a), Value::Tuple(b)) => {
                let mut v = (**a).clone();
                v.extend(b.iter().cloned());
                Ok(Value::Tuple(Rc::new(v)))
            }
            (BinOp::Mul, Value::Str(_) | Value::List(_) | Value::Tuple(_), _)
                if r.number().is_some_and(|n| matches!(n, Num::Int(_))) =>
            {
                self.repeat(&l, &r)
            }
            (BinOp::Mul, _, Value::Str(_) | Value::List(_) | Value::Tuple(_))
                if l.number().is_some_and(|n| matches!(n, Num::Int(_))) =>
            {
                self.repeat(&r, &l)
            }
            _ => Err(self.err(format!(
                "unsupported operand type(s) for {}: '{}' and '{}'",
                op.symbol(),
                l.type_name(),
                r.type_name()
            ))),
        }
    }

    fn repeat(&mut self, seq: &Value, n: &Value) -> EvalResult<Value> {
        let Some(Num::Int(n)) = n.number() else { unreachable!() };
        let n = n.max(0) as usize;
        let items_len = match seq {
            Value::Str(s) => s.chars().count(),
            Value::List(items) => items.borrow().len(),
            Value::Tuple(items) => items.len(),
            _ => 0,
        };
        if items_len.saturating_mul(n) > 10_000_000 {
            return Err(self.err("sequence repetition too large"));
        }
        // Repetition costs one step per produced element.
        for _ in 0..items_len.saturating_mul(n).min(self.limit as usize + 1) {
            self.tick()?;
        }
        Ok(match seq {
            Value::Str(s) => Value::str(s.repeat(n)),
            Value::List(items) => {
                let items = items.borrow();
                let mut v = Vec::with_capacity(items.len() * n);
                for _ in 0..n {
                    v.extend(items.iter().cloned());
                }
                Value::list(v)
            }
            Value::Tuple(items) => {
                let mut v = Vec::with_capacity(items.len() * n);
                for _ in 0..n {
                    v.extend(items.iter().cloned());
                }
                Value::Tuple(Rc::new(v))
            }
            _ => unreachable!(),
        })
    }

    fn arith(&mut self, op: BinOp, a: Num, b: Num) -> EvalResult<Value> {
        let overflow = || self.err("integer overflow");
        if let (Num::Int(x), Num::Int(y)) = (a, b) {
            return match op {
                BinOp::Add => x.checked_add(y).map(Value::Int).ok_or_else(overflow),
                BinOp::Sub => x.checked_sub(y).map(Value::Int).ok_or_else(overflow),
                BinOp::Mul => x.checked_mul(y).map(Value::Int).ok_or_else(overflow),
                BinOp::Div => {
                    if y == 0 {
                        Err(self.err("division by zero"))
                    } else {
                        Ok(Value::Float(x as f64 / y as f64))
                    }
                }
                BinOp::FloorDiv => {
                    if y == 0 {
                        return Err(self.err("integer division or modulo by zero"));
                    }
                    let q = x.checked_div(y).ok_or_else(overflow)?;
                    let adjust = (x % y != 0) && ((x < 0) != (y < 0));
                    Ok(Value::Int(if adjust { q - 1 } else { q }))
                }
                BinOp::Mod => {
                    if y == 0 {
                        return Err(self.err("integer division or modulo by zero"));
                    }
                    let m = x.checked_rem(y).ok_or_else(overflow)?;
                    Ok(Value::Int(if m != 0 && ((m < 0) != (y < 0)) { m + y } else { m }))
                }
                BinOp::Pow => {
                    if y < 0 {
                        Ok(Value::Float((x as f64).powf(y as f64)))
                    } else {
                        let e = u32::try_from(y).map_err(|_| overflow())?;
                        x.checked_pow(e).map(Value::Int).ok_or_else(overflow)
                    }
                }
            };
        }
        let (x, y) = (a.as_f64(), b.as_f64());
        let v = match op {
            BinOp::Add => x + y,
            BinOp::Sub => x - y,
            BinOp::Mul => x * y,
            BinOp::Div => {
                if y == 0.0 {
                    return Err(self.err("float division by zero"));
                }
                x / y
            }
            BinOp::FloorDiv => {
                if y == 0.0 {
                    return Err(self.err("float floor division by zero"));
                }
                (x / y).floor()
            }
            BinOp::Mod => {
                if y == 0.0 {
                    return Err(self.err("float modulo"));
                }
                let m = x % y;
                if m != 0.0 && ((m < 0.0) != (y < 0.0)) {
                    m + y
                } else {
                    m
                }
            }
            BinOp::Pow => x.powf(y),
        };
        Ok(Value::Float(v))
    }
}

fn identical(l: &Value, r: &Value) -> bool {
    match (l, r) {
        (Value::None, Value::None) => true,
        (Value::Bool(a), Value::Bool(b)) => a == b,
        (Value::List(a), Value::List(b)) => Rc::ptr_eq(a, b),
        (Value::Int(a), Value::Int(b)) => a == b && (-5..=256).contains(a),
        (Value::Str(a), Value::Str(b)) => Rc::ptr_eq(a, b) || (a.is_empty() && b.is_empty()),
        _ => false,
    }
}

/// Python slice index resolution.
pub(super) fn slice_indices(len: i64, lo: Option<i64>, hi: Option<i64>, step: i64) -> Vec<usize> {
    let clamp = |v: i64, low: i64, high: i64| v.max(low).min(high);
    let norm = |v: i64| if v < 0 { v + len } else { v };
    let mut out = Vec::new();
    if step > 0 {
        let start = lo.map(|v| clamp(norm(v), 0, len)).unwrap_or(0);
        let stop = hi.map(|v| clamp(norm(v), 0, len)).unwrap_or(len);
        let mut i = start;
        while i < stop {
            out.push(i as usize);
            i += step;
        }
    } else {
        let start = lo.map(|v| clamp(norm(v), -1, len - 1)).unwrap_or(len - 1);
        let stop = hi.map(|v| clamp(norm(v), -1, len - 1)).unwrap_or(-1);
        let mut i = start;
        while i > stop {
            out.push(i as usize);
            i += step;
        }
    }
    out
}
