"""Record reference executions of the bundled corpus under CPython.

The output is the frozen oracle for the differential test suite. Assignments
and loop-body entries are observed by rewriting the program's syntax tree with
logging calls, so the values come from CPython's own semantics.

Usage: python3 record_reference.py <corpus dir> > reference_traces.json
"""

import ast
import contextlib
import io
import json
import pathlib
import sys


def target_names(node):
    if isinstance(node, ast.Name):
        return [node.id]
    if isinstance(node, (ast.Tuple, ast.List)):
        out = []
        for elt in node.elts:
            out.extend(target_names(elt))
        return out
    return []


def log_assign(names, line):
    return [
        ast.Expr(
            ast.Call(
                func=ast.Name("__log_assign", ast.Load()),
                args=[ast.Constant(n), ast.Name(n, ast.Load()), ast.Constant(line)],
                keywords=[],
            )
        )
        for n in names
    ]


def log_loop(line):
    return ast.Expr(
        ast.Call(
            func=ast.Name("__log_loop", ast.Load()),
            args=[ast.Constant(line)],
            keywords=[],
        )
    )


def instrument_body(body):
    out = []
    for stmt in body:
        if isinstance(stmt, ast.Assign):
            out.append(stmt)
            names = []
            for t in stmt.targets:
                names.extend(target_names(t))
            out.extend(log_assign(names, stmt.lineno))
        elif isinstance(stmt, ast.AugAssign):
            out.append(stmt)
            out.extend(log_assign(target_names(stmt.target), stmt.lineno))
        elif isinstance(stmt, ast.For):
            stmt.body = (
                log_assign(target_names(stmt.target), stmt.lineno)
                + [log_loop(stmt.lineno)]
                + instrument_body(stmt.body)
            )
            out.append(stmt)
        elif isinstance(stmt, ast.While):
            stmt.body = [log_loop(stmt.lineno)] + instrument_body(stmt.body)
            out.append(stmt)
        elif isinstance(stmt, ast.If):
            stmt.body = instrument_body(stmt.body)
            stmt.orelse = instrument_body(stmt.orelse)
            out.append(stmt)
        elif isinstance(stmt, ast.FunctionDef):
            stmt.body = instrument_body(stmt.body)
            out.append(stmt)
        else:
            out.append(stmt)
    return out


def run(source, call):
    tree = ast.parse(source)
    tree.body = instrument_body(tree.body)
    ast.fix_missing_locations(tree)
    events = []
    loops = {}

    def __log_assign(name, value, line):
        events.append([name, repr(value), line])

    def __log_loop(line):
        loops[str(line)] = loops.get(str(line), 0) + 1

    env = {"__log_assign": __log_assign, "__log_loop": __log_loop}
    exec(compile(tree, "<program>", "exec"), env)
    fn = env[call["function_name"]]
    args = json.loads(json.dumps(call["arguments"]))
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        result = fn(*args)
    return {
        "result": repr(result),
        "stdout": out.getvalue(),
        "assignments": events,
        "loop_entries": loops,
    }


def check_tests(source, task):
    env = {}
    exec(compile(source, "<program>", "exec"), env)
    fn = env[task["function_name"]]
    for test in task["tests"]:
        args = json.loads(json.dumps(test["arguments"]))
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            result = fn(*args)
        if "expected_output" in test:
            assert out.getvalue() == test["expected_output"], (task["task_id"], test)
        else:
            assert result == test["expected"], (task["task_id"], test, result)


def main():
    corpus = pathlib.Path(sys.argv[1])
    tasks = {}
    for path in sorted((corpus / "tasks").glob("*.json")):
        task = json.loads(path.read_text())
        tasks[task["task_id"]] = task
    records = []
    for path in sorted((corpus / "programs").glob("*.py")):
        source = path.read_text()
        task = tasks[path.stem.split("_")[0]]
        check_tests(source, task)
        for call in task["call_specs"]:
            rec = run(source, call)
            rec["program"] = path.stem
            rec["call"] = call
            records.append(rec)
    json.dump(records, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
