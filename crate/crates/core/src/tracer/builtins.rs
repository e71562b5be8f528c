use std::cmp::Ordering;
use std::rc::Rc;

use super::interp::{EvalResult, Interpreter};
use super::value::{format_float, Num, Value};

/// Builtin functions callable from subset programs.
pub const BUILTINS: &[&str] = &[
    "abs", "bool", "enumerate", "float", "int", "len", "list", "max", "min", "print", "range",
    "reversed", "round", "sorted", "str", "sum", "zip",
];

pub fn is_builtin(name: &str) -> bool {
    BUILTINS.contains(&name)
}

fn arity(it: &Interpreter, name: &str, args: &[Value], min: usize, max: usize) -> EvalResult<()> {
    if args.len() < min || args.len() > max {
        return Err(it.err(format!(
            "{name}() takes {} arguments but {} were given",
            if min == max { min.to_string() } else { format!("{min} to {max}") },
            args.len()
        )));
    }
    Ok(())
}

fn int_arg(it: &Interpreter, v: &Value, what: &str) -> EvalResult<i64> {
    match v.number() {
        Some(Num::Int(i)) => Ok(i),
        _ => Err(it.err(format!(
            "{what}: '{}' object cannot be interpreted as an integer",
            v.type_name()
        ))),
    }
}

fn no_kwargs(it: &Interpreter, name: &str, kw: &[(String, Value)]) -> EvalResult<()> {
    if let Some((k, _)) = kw.first() {
        return Err(it.err(format!("{name}() got an unexpected keyword argument '{k}'")));
    }
    Ok(())
}

pub fn call_builtin(
    it: &mut Interpreter,
    name: &str,
    args: Vec<Value>,
    kw: Vec<(String, Value)>,
) -> EvalResult<Value> {
    match name {
        "len" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 1, 1)?;
            let n = match &args[0] {
                Value::Str(s) => s.chars().count(),
                Value::List(items) => items.borrow().len(),
                Value::Tuple(items) => items.len(),
                r @ Value::Range { .. } => r.range_len() as usize,
                other => return Err(it.err(format!("object of type '{}' has no len()", other.type_name()))),
            };
            Ok(Value::Int(n as i64))
        }
        "range" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 1, 3)?;
            let nums: Vec<i64> = args
                .iter()
                .map(|a| int_arg(it, a, "range"))
                .collect::<EvalResult<_>>()?;
            let (start, stop, step) = match nums.as_slice() {
                [stop] => (0, *stop, 1),
                [start, stop] => (*start, *stop, 1),
                [start, stop, step] => (*start, *stop, *step),
                _ => unreachable!(),
            };
            if step == 0 {
                return Err(it.err("range() arg 3 must not be zero"));
            }
            Ok(Value::Range { start, stop, step })
        }
        "sum" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 1, 2)?;
            let mut total = args.get(1).cloned().unwrap_or(Value::Int(0));
            for item in it.collect_iter(&args[0])? {
                total = it.binop(crate::parser::ast::BinOp::Add, total, item)?;
            }
            Ok(total)
        }
        "max" | "min" => {
            let mut key = None;
            let mut default = None;
            for (k, v) in kw {
                match k.as_str() {
                    "key" => key = Some(v),
                    "default" => default = Some(v),
                    _ => return Err(it.err(format!("{name}() got an unexpected keyword argument '{k}'"))),
                }
            }
            let items = if args.len() == 1 {
                it.collect_iter(&args[0])?
            } else {
                args
            };
            if items.is_empty() {
                return default.ok_or_else(|| it.err(format!("{name}() arg is an empty sequence")));
            }
            let want = if name == "max" { Ordering::Greater } else { Ordering::Less };
            let mut best = items[0].clone();
            let mut best_key = keyed(it, &key, &best)?;
            for item in items.into_iter().skip(1) {
                let k = keyed(it, &key, &item)?;
                let ord = k.py_cmp(&best_key).ok_or_else(|| {
                    it.err(format!(
                        "'{}' not supported between instances of '{}' and '{}'",
                        if name == "max" { ">" } else { "<" },
                        k.type_name(),
                        best_key.type_name()
                    ))
                })?;
                // First extreme wins on ties, as in CPython.
                if ord == want {
                    best = item;
                    best_key = k;
                }
            }
            Ok(best)
        }
        "abs" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 1, 1)?;
            match args[0].number() {
                Some(Num::Int(i)) => i.checked_abs().map(Value::Int).ok_or_else(|| it.err("integer overflow")),
                Some(Num::Float(f)) => Ok(Value::Float(f.abs())),
                None => Err(it.err(format!("bad operand type for abs(): '{}'", args[0].type_name()))),
            }
        }
        "print" => {
            let mut sep = " ".to_string();
            let mut end = "\n".to_string();
            for (k, v) in kw {
                let text = match v {
                    Value::Str(s) => s.to_string(),
                    Value::None => continue,
                    other => return Err(it.err(format!("{k} must be None or a string, not {}", other.type_name()))),
                };
                match k.as_str() {
                    "sep" => sep = text,
                    "end" => end = text,
                    _ => return Err(it.err(format!("print() got an unexpected keyword argument '{k}'"))),
                }
            }
            let parts: Vec<String> = args.iter().map(Value::to_str).collect();
            it.stdout.push_str(&parts.join(&sep));
            it.stdout.push_str(&end);
            Ok(Value::None)
        }
        "str" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 0, 1)?;
            Ok(Value::str(args.first().map(Value::to_str).unwrap_or_default()))
        }
        "int" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 0, 1)?;
            match args.first() {
                None => Ok(Value::Int(0)),
                Some(v) => match v {
                    Value::Str(s) => s
                        .trim()
                        .replace('_', "")
                        .parse::<i64>()
                        .map(Value::Int)
                        .map_err(|_| it.err(format!("invalid literal for int() with base 10: {}", v.repr()))),
                    other => match other.number() {
                        Some(Num::Int(i)) => Ok(Value::Int(i)),
                        Some(Num::Float(f)) => {
                            if !f.is_finite() || f.abs() >= 9.2e18 {
                                Err(it.err("cannot convert float to integer"))
                            } else {
                                Ok(Value::Int(f.trunc() as i64))
                            }
                        }
                        None => Err(it.err(format!(
                            "int() argument must be a string or a number, not '{}'",
                            other.type_name()
                        ))),
                    },
                },
            }
        }
        "float" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 0, 1)?;
            match args.first() {
                None => Ok(Value::Float(0.0)),
                Some(Value::Str(s)) => s
                    .trim()
                    .parse::<f64>()
                    .map(Value::Float)
                    .map_err(|_| it.err(format!("could not convert string to float: {}", args[0].repr()))),
                Some(v) => v
                    .number()
                    .map(|n| Value::Float(n.as_f64()))
                    .ok_or_else(|| it.err(format!("float() argument must be a string or a number, not '{}'", v.type_name()))),
            }
        }
        "bool" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 0, 1)?;
            Ok(Value::Bool(args.first().is_some_and(Value::truthy)))
        }
        "list" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 0, 1)?;
            match args.first() {
                None => Ok(Value::list(Vec::new())),
                Some(v) => Ok(Value::list(it.collect_iter(v)?)),
            }
        }
        "enumerate" => {
            let mut start = 0;
            for (k, v) in &kw {
                if k == "start" {
                    start = int_arg(it, v, "enumerate")?;
                } else {
                    return Err(it.err(format!("enumerate() got an unexpected keyword argument '{k}'")));
                }
            }
            arity(it, name, &args, 1, 2)?;
            if let Some(s) = args.get(1) {
                start = int_arg(it, s, "enumerate")?;
            }
            let items = it.collect_iter(&args[0])?;
            Ok(Value::list(
                items
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| Value::Tuple(Rc::new(vec![Value::Int(start + i as i64), v])))
                    .collect(),
            ))
        }
        "zip" => {
            no_kwargs(it, name, &kw)?;
            let seqs: Vec<Vec<Value>> = args.iter().map(|a| it.collect_iter(a)).collect::<EvalResult<_>>()?;
            let n = seqs.iter().map(Vec::len).min().unwrap_or(0);
            Ok(Value::list(
                (0..n)
                    .map(|i| Value::Tuple(Rc::new(seqs.iter().map(|s| s[i].clone()).collect())))
                    .collect(),
            ))
        }
        "reversed" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 1, 1)?;
            let mut items = it.collect_iter(&args[0])?;
            items.reverse();
            Ok(Value::list(items))
        }
        "sorted" => {
            arity(it, name, &args, 1, 1)?;
            let items = it.collect_iter(&args[0])?;
            sort_values(it, items, kw).map(Value::list)
        }
        "round" => {
            no_kwargs(it, name, &kw)?;
            arity(it, name, &args, 1, 2)?;
            let x = args[0]
                .number()
                .ok_or_else(|| it.err(format!("type {} doesn't define __round__ method", args[0].type_name())))?;
            match (x, args.get(1)) {
                (Num::Int(i), None) => Ok(Value::Int(i)),
                (Num::Float(f), None) => Ok(Value::Int(round_half_even(f) as i64)),
                (n, Some(d)) => {
                    let digits = int_arg(it, d, "round")?;
                    let factor = 10f64.powi(digits as i32);
                    let v = round_half_even(n.as_f64() * factor) / factor;
                    // Reparse through the shortest representation to avoid drift.
                    let v: f64 = format_float(v).parse().unwrap_or(v);
                    Ok(match n {
                        Num::Int(i) if digits >= 0 => Value::Int(i),
                        Num::Int(_) => Value::Int(v as i64),
                        Num::Float(_) => Value::Float(v),
                    })
                }
            }
        }
        _ => Err(it.err(format!("name '{name}' is not defined"))),
    }
}

fn round_half_even(f: f64) -> f64 {
    let r = f.round();
    if (f - f.trunc()).abs() == 0.5 && r % 2.0 != 0.0 {
        r - f.signum()
    } else {
        r
    }
}

fn keyed(it: &mut Interpreter, key: &Option<Value>, v: &Value) -> EvalResult<Value> {
    match key {
        Some(Value::None) | None => Ok(v.clone()),
        Some(f) => it.call_value(f, v.clone()),
    }
}

fn sort_values(it: &mut Interpreter, items: Vec<Value>, kw: Vec<(String, Value)>) -> EvalResult<Vec<Value>> {
    let mut key = None;
    let mut reverse = false;
    for (k, v) in kw {
        match k.as_str() {
            "key" => key = Some(v),
            "reverse" => reverse = v.truthy(),
            _ => return Err(it.err(format!("sort() got an unexpected keyword argument '{k}'"))),
        }
    }
    let mut keyed_items = Vec::with_capacity(items.len());
    for v in items {
        let k = keyed(it, &key, &v)?;
        keyed_items.push((k, v));
    }
    let mut failed = false;
    // Stable sort; reverse keeps equal elements in original order like CPython.
    keyed_items.sort_by(|a, b| {
        let o = a.0.py_cmp(&b.0).unwrap_or_else(|| {
            failed = true;
            Ordering::Equal
        });
        if reverse {
            o.reverse()
        } else {
            o
        }
    });
    if failed {
        return Err(it.err("'<' not supported between these types"));
    }
    Ok(keyed_items.into_iter().map(|(_, v)| v).collect())
}

fn str_arg(it: &Interpreter, v: &Value, method: &str) -> EvalResult<Rc<str>> {
    match v {
        Value::Str(s) => Ok(s.clone()),
        other => Err(it.err(format!("{method}() argument must be str, not {}", other.type_name()))),
    }
}

pub fn call_method(
    it: &mut Interpreter,
    receiver: &Value,
    method: &str,
    args: Vec<Value>,
    kw: Vec<(String, Value)>,
) -> EvalResult<Value> {
    match receiver {
        Value::Str(s) => str_method(it, s, method, args),
        Value::List(items) => {
            let items = items.clone();
            match method {
                "append" => {
                    arity(it, method, &args, 1, 1)?;
                    items.borrow_mut().push(args.into_iter().next().unwrap());
                    Ok(Value::None)
                }
                "extend" => {
                    arity(it, method, &args, 1, 1)?;
                    let extra = it.collect_iter(&args[0])?;
                    items.borrow_mut().extend(extra);
                    Ok(Value::None)
                }
                "insert" => {
                    arity(it, method, &args, 2, 2)?;
                    let len = items.borrow().len() as i64;
                    let i = int_arg(it, &args[0], "insert")?;
                    let i = if i < 0 { (i + len).max(0) } else { i.min(len) } as usize;
                    items.borrow_mut().insert(i, args[1].clone());
                    Ok(Value::None)
                }
                "pop" => {
                    arity(it, method, &args, 0, 1)?;
                    let len = items.borrow().len();
                    if len == 0 {
                        return Err(it.err("pop from empty list"));
                    }
                    let i = match args.first() {
                        Some(v) => it.index(v, len)?,
                        None => len - 1,
                    };
                    Ok(items.borrow_mut().remove(i))
                }
                "index" => {
                    arity(it, method, &args, 1, 1)?;
                    let pos = items.borrow().iter().position(|x| x.py_eq(&args[0]));
                    pos.map(|p| Value::Int(p as i64))
                        .ok_or_else(|| it.err(format!("{} is not in list", args[0].repr())))
                }
                "count" => {
                    arity(it, method, &args, 1, 1)?;
                    let n = items.borrow().iter().filter(|x| x.py_eq(&args[0])).count();
                    Ok(Value::Int(n as i64))
                }
                "remove" => {
                    arity(it, method, &args, 1, 1)?;
                    let pos = items.borrow().iter().position(|x| x.py_eq(&args[0]));
                    match pos {
                        Some(p) => {
                            items.borrow_mut().remove(p);
                            Ok(Value::None)
                        }
                        None => Err(it.err("list.remove(x): x not in list")),
                    }
                }
                "reverse" => {
                    arity(it, method, &args, 0, 0)?;
                    items.borrow_mut().reverse();
                    Ok(Value::None)
                }
                "sort" => {
                    arity(it, method, &args, 0, 0)?;
                    let current = items.borrow().clone();
                    let sorted = sort_values(it, current, kw)?;
                    *items.borrow_mut() = sorted;
                    Ok(Value::None)
                }
                "copy" => {
                    arity(it, method, &args, 0, 0)?;
                    Ok(Value::list(items.borrow().clone()))
                }
                _ => Err(it.err(format!("'list' object has no attribute '{method}'"))),
            }
        }
        other => Err(it.err(format!(
            "'{}' object has no attribute '{method}'",
            other.type_name()
        ))),
    }
}

fn str_method(it: &mut Interpreter, s: &Rc<str>, method: &str, args: Vec<Value>) -> EvalResult<Value> {
    let strs = |v: Vec<String>| Value::list(v.into_iter().map(Value::str).collect());
    match method {
        "split" => {
            arity(it, method, &args, 0, 1)?;
            match args.first() {
                None | Some(Value::None) => Ok(strs(s.split_whitespace().map(String::from).collect())),
                Some(sep) => {
                    let sep = str_arg(it, sep, method)?;
                    if sep.is_empty() {
                        return Err(it.err("empty separator"));
                    }
                    Ok(strs(s.split(&*sep).map(String::from).collect()))
                }
            }
        }
        "join" => {
            arity(it, method, &args, 1, 1)?;
            let parts = it.collect_iter(&args[0])?;
            let mut out = Vec::with_capacity(parts.len());
            for p in parts {
                match p {
                    Value::Str(x) => out.push(x.to_string()),
                    other => {
                        return Err(it.err(format!(
                            "sequence item: expected str instance, {} found",
                            other.type_name()
                        )))
                    }
                }
            }
            Ok(Value::str(out.join(s)))
        }
        "upper" => Ok(Value::str(s.to_uppercase())),
        "lower" => Ok(Value::str(s.to_lowercase())),
        "capitalize" => {
            let mut c = s.chars();
            Ok(Value::str(match c.next() {
                Some(f) => f.to_uppercase().collect::<String>() + &c.as_str().to_lowercase(),
                None => String::new(),
            }))
        }
        "strip" | "lstrip" | "rstrip" => {
            arity(it, method, &args, 0, 1)?;
            let set: Option<Vec<char>> = match args.first() {
                None | Some(Value::None) => None,
                Some(v) => Some(str_arg(it, v, method)?.chars().collect()),
            };
            let pred = |c: char| match &set {
                None => c.is_whitespace(),
                Some(cs) => cs.contains(&c),
            };
            Ok(Value::str(match method {
                "strip" => s.trim_matches(pred),
                "lstrip" => s.trim_start_matches(pred),
                _ => s.trim_end_matches(pred),
            }))
        }
        "replace" => {
            arity(it, method, &args, 2, 2)?;
            let from = str_arg(it, &args[0], method)?;
            let to = str_arg(it, &args[1], method)?;
            Ok(Value::str(s.replace(&*from, &to)))
        }
        "startswith" | "endswith" => {
            arity(it, method, &args, 1, 1)?;
            let p = str_arg(it, &args[0], method)?;
            Ok(Value::Bool(if method == "startswith" {
                s.starts_with(&*p)
            } else {
                s.ends_with(&*p)
            }))
        }
        "count" => {
            arity(it, method, &args, 1, 1)?;
            let p = str_arg(it, &args[0], method)?;
            let n = if p.is_empty() {
                s.chars().count() + 1
            } else {
                s.matches(&*p).count()
            };
            Ok(Value::Int(n as i64))
        }
        "find" | "index" => {
            arity(it, method, &args, 1, 1)?;
            let p = str_arg(it, &args[0], method)?;
            match s.find(&*p) {
                Some(byte) => Ok(Value::Int(s[..byte].chars().count() as i64)),
                None if method == "find" => Ok(Value::Int(-1)),
                None => Err(it.err("substring not found")),
            }
        }
        "isdigit" | "isalpha" | "isspace" | "isupper" | "islower" | "isalnum" => {
            arity(it, method, &args, 0, 0)?;
            let r = !s.is_empty()
                && match method {
                    "isdigit" => s.chars().all(|c| c.is_ascii_digit()),
                    "isalpha" => s.chars().all(char::is_alphabetic),
                    "isspace" => s.chars().all(char::is_whitespace),
                    "isalnum" => s.chars().all(char::is_alphanumeric),
                    "isupper" => s.chars().any(char::is_uppercase) && !s.chars().any(char::is_lowercase),
                    _ => s.chars().any(char::is_lowercase) && !s.chars().any(char::is_uppercase),
                };
            Ok(Value::Bool(r))
        }
        _ => Err(it.err(format!("'str' object has no attribute '{method}'"))),
    }
}
