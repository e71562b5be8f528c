//! Parse a source file, print its canonical form and any subset violations.
//!
//! cargo run --example parse_and_check [path.py]

use qlc::parser::{check_subset, parse, printer::program_to_string};

fn main() {
    let source = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}")),
        None => "import math\n\ndef scale(xs):\n    f = lambda x: x * 2\n    return [f(x) for x in xs]\n".to_string(),
    };
    let program = match parse(&source) {
        Ok(p) => p,
        Err(e) => {
            println!("rejected: {e}");
            return;
        }
    };
    println!("{} lines, canonical form:\n{}", program.line_count, program_to_string(&program));
    let violations = check_subset(&program);
    if violations.is_empty() {
        println!("within the supported subset");
    }
    for v in violations {
        println!("line {}: {}", v.line, v.kind.as_str());
    }
}
