use super::{ParseError, SubsetViolation, ViolationKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Name(String),
    Int(i64),
    Float(f64),
    Str(String),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

// Longest first so that `**=` wins over `**` and `*`.
const OPS: &[&str] = &[
    "**=", "//=", "->", "**", "//", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", ":=",
    "+", "-", "*", "/", "%", "<", ">", "=", "(", ")", "[", "]", "{", "}", ",", ":", ".", ";",
    "@",
];

/// Expand tabs to four spaces and drop trailing whitespace on every line.
pub fn normalize(source: &str) -> String {
    let mut out = String::with_capacity(source.len());
    for (i, line) in source.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let line = line.strip_suffix('\r').unwrap_or(line);
        out.push_str(line.replace('\t', "    ").trim_end());
    }
    out
}

/// Number of physical lines, not counting a final empty line after the last newline.
pub fn physical_lines(normalized: &str) -> usize {
    let n = normalized.split('\n').count();
    if normalized.ends_with('\n') {
        n - 1
    } else {
        n
    }
}

pub fn tokenize(normalized: &str) -> Result<Vec<Token>, ParseError> {
    Lexer::new(normalized).run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    depth: usize,
    indents: Vec<usize>,
    out: Vec<Token>,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            depth: 0,
            indents: vec![0],
            out: Vec::new(),
        }
    }

    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn push(&mut self, tok: Tok, line: usize, col: usize) {
        self.out.push(Token { tok, line, col });
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col,
            message: msg.into(),
        }
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut at_line_start = true;
        loop {
            if at_line_start && self.depth == 0 {
                // Measure indentation; skip blank and comment-only lines entirely.
                let mut width = 0;
                while self.peek(0) == Some(' ') {
                    self.bump();
                    width += 1;
                }
                match self.peek(0) {
                    None => break,
                    Some('\n') => {
                        self.bump();
                        continue;
                    }
                    Some('#') => {
                        while !matches!(self.peek(0), None | Some('\n')) {
                            self.bump();
                        }
                        continue;
                    }
                    _ => {}
                }
                let current = *self.indents.last().unwrap();
                if width > current {
                    self.indents.push(width);
                    self.push(Tok::Indent, self.line, 1);
                } else {
                    while width < *self.indents.last().unwrap() {
                        self.indents.pop();
                        self.push(Tok::Dedent, self.line, 1);
                    }
                    if width != *self.indents.last().unwrap() {
                        return Err(self.syntax("unindent does not match any outer indentation level"));
                    }
                }
                at_line_start = false;
            }

            let Some(c) = self.peek(0) else { break };
            let (line, col) = (self.line, self.col);
            match c {
                '\n' => {
                    self.bump();
                    if self.depth == 0 {
                        self.push(Tok::Newline, line, col);
                        at_line_start = true;
                    }
                }
                ' ' => {
                    self.bump();
                }
                '#' => {
                    while !matches!(self.peek(0), None | Some('\n')) {
                        self.bump();
                    }
                }
                '\\' if self.peek(1) == Some('\n') => {
                    self.bump();
                    self.bump();
                }
                '"' | '\'' => {
                    let s = self.string(c)?;
                    self.push(Tok::Str(s), line, col);
                }
                c if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) => {
                    let t = self.number()?;
                    self.push(t, line, col);
                }
                c if c.is_alphabetic() || c == '_' => {
                    let mut ident = String::new();
                    while let Some(ch) = self.peek(0) {
                        if ch.is_alphanumeric() || ch == '_' {
                            ident.push(ch);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    // String prefixes: r'', b'', f''.
                    if ident.len() <= 2 && matches!(self.peek(0), Some('"') | Some('\'')) {
                        let lower = ident.to_ascii_lowercase();
                        if lower.contains('f') || lower.contains('b') {
                            return Err(ParseError::Unsupported(SubsetViolation {
                                kind: ViolationKind::UnsupportedNode,
                                line,
                            }));
                        }
                        if lower == "r" || lower == "u" {
                            let q = self.peek(0).unwrap();
                            let s = self.raw_string(q, lower == "r")?;
                            self.push(Tok::Str(s), line, col);
                            continue;
                        }
                    }
                    self.push(Tok::Name(ident), line, col);
                }
                _ => {
                    let op = OPS
                        .iter()
                        .find(|op| op.chars().enumerate().all(|(i, oc)| self.peek(i) == Some(oc)))
                        .copied()
                        .ok_or_else(|| self.syntax(format!("unexpected character {c:?}")))?;
                    for _ in 0..op.chars().count() {
                        self.bump();
                    }
                    match op {
                        "(" | "[" | "{" => self.depth += 1,
                        ")" | "]" | "}" => {
                            if self.depth == 0 {
                                return Err(ParseError::Syntax {
                                    line,
                                    col,
                                    message: format!("unmatched '{op}'"),
                                });
                            }
                            self.depth -= 1;
                        }
                        _ => {}
                    }
                    self.push(Tok::Op(op), line, col);
                }
            }
        }
        // An unclosed bracket is left to the parser, which reports the first
        // token that does not fit rather than the end of input.
        let line = self.line;
        if !matches!(self.out.last().map(|t| &t.tok), None | Some(Tok::Newline)) {
            self.push(Tok::Newline, line, self.col);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, line, 1);
        }
        self.push(Tok::Eof, line, 1);
        Ok(self.out)
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let mut text = String::new();
        let mut is_float = false;
        while let Some(c) = self.peek(0) {
            if c.is_ascii_digit() || c == '_' {
                text.push(c);
            } else if c == '.' && !is_float {
                is_float = true;
                text.push(c);
            } else if (c == 'e' || c == 'E')
                && (self.peek(1).is_some_and(|d| d.is_ascii_digit())
                    || (matches!(self.peek(1), Some('+') | Some('-'))
                        && self.peek(2).is_some_and(|d| d.is_ascii_digit())))
            {
                is_float = true;
                text.push(c);
                self.bump();
                text.push(self.peek(0).unwrap());
            } else {
                break;
            }
            self.bump();
        }
        let clean = text.replace('_', "");
        if is_float {
            clean
                .parse::<f64>()
                .map(Tok::Float)
                .map_err(|_| self.syntax(format!("invalid float literal {text}")))
        } else {
            clean
                .parse::<i64>()
                .map(Tok::Int)
                .map_err(|_| self.syntax(format!("integer literal out of range {text}")))
        }
    }

    fn string(&mut self, quote: char) -> Result<String, ParseError> {
        self.raw_string(quote, false)
    }

    fn raw_string(&mut self, quote: char, raw: bool) -> Result<String, ParseError> {
        let triple = self.peek(1) == Some(quote) && self.peek(2) == Some(quote);
        let n = if triple { 3 } else { 1 };
        for _ in 0..n {
            self.bump();
        }
        let mut s = String::new();
        loop {
            let Some(c) = self.peek(0) else {
                return Err(self.syntax("unterminated string literal"));
            };
            if c == quote && (!triple || (self.peek(1) == Some(quote) && self.peek(2) == Some(quote))) {
                for _ in 0..n {
                    self.bump();
                }
                return Ok(s);
            }
            if c == '\n' && !triple {
                return Err(self.syntax("unterminated string literal"));
            }
            self.bump();
            if c == '\\' && !raw {
                let e = self.bump().ok_or_else(|| self.syntax("unterminated string literal"))?;
                match e {
                    'n' => s.push('\n'),
                    't' => s.push('\t'),
                    'r' => s.push('\r'),
                    '0' => s.push('\0'),
                    '\\' => s.push('\\'),
                    '\'' => s.push('\''),
                    '"' => s.push('"'),
                    '\n' => {}
                    other => {
                        s.push('\\');
                        s.push(other);
                    }
                }
            } else {
                s.push(c);
            }
        }
    }
}
