//! Run a bundled solution on its task's calls and print every traced event.
//!
//! cargo run --example trace_execution [program-id]

use qlc::corpus;
use qlc::tracer::{run_traced, Event, DEFAULT_STEP_LIMIT};

fn main() {
    let id = std::env::args().nth(1).unwrap_or_else(|| "T4_b".into());
    let program = corpus::program(&id).unwrap_or_else(|| panic!("no bundled program {id}"));
    let ast = program.parse().expect("bundled program parses");
    let task = corpus::task(&program.task_id).expect("bundled task");
    for call in &task.call_specs {
        println!("--- {}", call.render());
        match run_traced(&ast, call, DEFAULT_STEP_LIMIT) {
            Ok(trace) => {
                for e in &trace.events {
                    match e {
                        Event::Assign { name, value, line, .. } => println!("  line {line}: {name} = {}", value.repr()),
                        Event::LoopBodyEntered { header_line, iteration, .. } => {
                            println!("  loop on line {header_line}, iteration {iteration}")
                        }
                        Event::Return { value, line, .. } => println!("  line {line}: return {}", value.repr()),
                    }
                }
                if !trace.stdout.is_empty() {
                    print!("  stdout: {}", trace.stdout);
                }
                println!("  result {} after {} steps", trace.result.repr(), trace.steps_used);
            }
            Err(e) => println!("  failed: {e}"),
        }
    }
    let spin = qlc::parser::parse("def spin(n):\n    while n > 0:\n        n = n + 1\n    return n\n").unwrap();
    let call = qlc::tracer::CallSpec::new("spin", vec![qlc::tracer::Literal::Int(1)]);
    println!("--- {} with a 1000-step budget: {:?}", call.render(), run_traced(&spin, &call, 1000).err());
}
