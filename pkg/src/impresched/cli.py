"""Command-line entry points.

    impresched analyze TASKSET [--mode normal|imprecise] [--out REPORT.json]
    impresched experiment CONFIG [--seed N] [--n-task-sets N] [--out FILE.csv]
    impresched simulate TASKSET [--horizon T] [--trace FILE.csv]
    impresched validate TASKSET

Exit codes: 0 schedulable (or command succeeded), 2 unschedulable, 1 bad
input.  Reports are JSON, sweep tables CSV; stdout always carries a short
human-readable summary.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .analysis import (
    imprecise_schedulability_analysis,
    normal_schedulability_analysis,
)
from .errors import ImpreschedError, InputError
from .model import AnalysisReport, TaskSet, load_task_set, validate
from .simulate import simulate
from .workload import GeneratorConfig, generator_config_from_dict
from .experiments import run_experiment

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNSCHEDULABLE = 2


def _fmt(v: float) -> str:
    return "unbounded" if math.isinf(v) else f"{v:.3f}"


def _load_validated(path: str) -> TaskSet:
    ts = load_task_set(path)
    violations = validate(ts)
    if violations:
        msgs = "; ".join(f"{v.entity}: {v.rule}" for v in violations)
        raise InputError(f"invalid task set: {msgs}")
    return ts


def _print_report(task_set: TaskSet, report: AnalysisReport, mode: str) -> None:
    head = f"verdict: {report.verdict}"
    if report.reason:
        head += f" ({report.reason})"
    head += f"  mode={mode}  iterations={report.iterations}"
    print(head)
    print("task        e2e-wcrt    deadline  ok  shortage  final-error")
    for t in task_set.tasks:
        r = report.per_task[t.id]
        print(
            f"{t.id:<10}{_fmt(r.end_to_end_wcrt):>12}{t.deadline:>12.3f}  "
            f"{'y' if r.schedulable else 'n'}  {r.shortage:>8.3f}  {r.final_error:>11.6f}"
        )
    utils = " ".join(f"{pid}={u:.3f}" for pid, u in sorted(report.per_processor.items()))
    print(f"processor utilization: {utils}")


def _cmd_analyze(args) -> int:
    ts = _load_validated(args.taskset)
    if args.mode == "normal":
        verdict, report = normal_schedulability_analysis(ts)
    else:
        verdict, report = imprecise_schedulability_analysis(ts)
    _print_report(ts, report, args.mode)
    doc = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(doc)
    else:
        print(doc, end="")
    return EXIT_OK if verdict.schedulable else EXIT_UNSCHEDULABLE


def _cmd_experiment(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise InputError("experiment config must be a JSON object")
    unknown = set(doc) - {"experiment", "generator", "n_task_sets", "values", "target_fraction"}
    if unknown:
        raise InputError(f"unknown experiment config fields: {sorted(unknown)}")
    exp_id = doc.get("experiment")
    if not isinstance(exp_id, str):
        raise InputError("'experiment' must be an id string")
    config = generator_config_from_dict(doc.get("generator", {}))
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    n = doc.get("n_task_sets", 1000)
    if args.n_task_sets is not None:
        n = args.n_task_sets
    if isinstance(n, bool) or not isinstance(n, int):
        raise InputError("n_task_sets must be an integer")
    values = doc.get("values")
    if values is not None:
        if not isinstance(values, list) or not all(
            not isinstance(v, bool) and isinstance(v, (int, float)) for v in values
        ):
            raise InputError("'values' must be a list of numbers")
        values = [float(v) for v in values]
    fraction = doc.get("target_fraction", 0.5)
    if isinstance(fraction, bool) or not isinstance(fraction, (int, float)):
        raise InputError("'target_fraction' must be a number")

    result = run_experiment(exp_id, config, n, values, float(fraction))
    csv = result.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv)
        print(f"experiment {exp_id}: {len(result.values)} sweep points x "
              f"{result.n_task_sets} sets -> {args.out}")
    else:
        print(csv, end="")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    ts = _load_validated(args.taskset)
    trace = simulate(ts, horizon=args.horizon, trace=bool(args.trace))
    print(f"horizon: {trace.horizon:g}")
    print("task      released  completed  misses  max-e2e-response")
    for t in ts.tasks:
        print(
            f"{t.id:<10}{trace.released[t.id]:>8}{trace.completed[t.id]:>11}"
            f"{trace.misses_of(t.id):>8}  {trace.max_response(t.id):.3f}"
        )
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("time,event,task,subtask,processor\n")
            for time, event, tid, idx, pid in trace.events or []:
                fh.write(f"{time:g},{event},{tid},{idx},{pid}\n")
        print(f"trace -> {args.trace}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    ts = load_task_set(args.taskset)
    violations = validate(ts)
    if not violations:
        print(f"ok: {ts.n_tasks} tasks on {ts.n_processors} processors")
        return EXIT_OK
    for v in violations:
        print(f"{v.entity}: {v.rule}")
    return EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impresched",
        description="Schedulability analysis of end-to-end task chains "
        "with mandatory/optional execution parts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a task-set file")
    p.add_argument("taskset", help="task set JSON file")
    p.add_argument("--mode", choices=("normal", "imprecise"), default="imprecise")
    p.add_argument("--out", help="also write the JSON report to this path")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("experiment", help="run a sweep experiment to CSV")
    p.add_argument("config", help="experiment config JSON file")
    p.add_argument("--seed", type=int, help="override the generator seed")
    p.add_argument("--n-task-sets", type=int, help="override the set count")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("simulate", help="simulate a task-set file")
    p.add_argument("taskset", help="task set JSON file")
    p.add_argument("--horizon", type=float, help="simulation length (default: derived)")
    p.add_argument("--trace", help="write activation-level CSV to this path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("validate", help="check a task-set file's invariants")
    p.add_argument("taskset", help="task set JSON file")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ImpreschedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
