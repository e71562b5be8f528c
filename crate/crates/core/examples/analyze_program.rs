//! Static and trace-based facts about one bundled solution.
//!
//! cargo run --example analyze_program [program-id]

use qlc::analysis::{classify_line_purpose, classify_role, fingerprint, loops, resolve_scopes};
use qlc::corpus;
use qlc::tracer::DEFAULT_STEP_LIMIT;

fn main() {
    let id = std::env::args().nth(1).unwrap_or_else(|| "T4_b".into());
    let program = corpus::program(&id).unwrap_or_else(|| panic!("no bundled program {id}"));
    let ast = program.parse().expect("bundled program parses");
    let scopes = resolve_scopes(&ast);
    println!("{}", program.source);
    println!("function {} defined on line {}", scopes.function_name, scopes.def_line);
    println!("parameters: {:?}", scopes.parameters);
    for v in &scopes.variables {
        println!("variable {:<14} created on line {}, used on {:?}", v.name, v.creation_line, v.use_lines());
    }
    println!("builtins: {:?}", scopes.builtins_used);
    for l in loops(&ast) {
        println!("{:?} loop on line {} ends on line {}", l.kind, l.header_line, l.last_body_line);
    }
    for line in 1..=ast.line_count {
        if let Some(p) = classify_line_purpose(&ast, line) {
            println!("line {line}: {p:?}");
        }
    }
    let task = corpus::task(&program.task_id).expect("bundled task");
    if let Some(trace) = task.traces(&ast, DEFAULT_STEP_LIMIT).first() {
        println!("roles during {}:", trace.call.render());
        for name in scopes.variable_names() {
            match classify_role(&ast, trace, name) {
                Ok(r) => println!("  {name}: {r:?}"),
                Err(e) => println!("  {name}: unclassified ({e})"),
            }
        }
    }
    let fp = fingerprint(&ast);
    println!("shape hash {}\nidentifier hash {}", fp.shape, fp.identifiers);
}
