"""Experiment harness: sweeps of transient-overload severity, two analyses.

Each experiment id names a transform of a freshly generated base set:

  1   deadline reduction by a percentage
  2   balanced overload (scale every stage)
  3a  unbalanced overload of optional parts on a subset of processors
  3b  unbalanced overload of mandatory parts on a subset of processors
  4   extra high-rank tasks appended
  5   frequency increase (shrink periods, keep deadlines)

Base sets are generated once per set index and shared across every sweep
value, so movement along the sweep reflects the transform alone.  For every
(value, mode) the harness reports: failure rate, schedulability index (mean
over schedulable sets of the per-set max of end-to-end WCRT over period;
"UNS" when no set is schedulable), and the average and worst final error
over every task of every set, where an unschedulable set counts all of its
tasks at error 1.

Setting IMPRESCHED_THREADS > 1 fans the (value, set) grid out to a process
pool; aggregation order is fixed either way, so output bytes never depend on
the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .analysis import (
    Verdict,
    imprecise_schedulability_analysis,
    normal_schedulability_analysis,
)
from .errors import DomainError, InputError
from .model import AnalysisReport, TaskSet
from .workload import (
    GeneratorConfig,
    OverloadPart,
    apply_balanced_overload,
    apply_deadline_reduction,
    apply_frequency_increase,
    apply_task_set_increase,
    apply_unbalanced_overload,
    generate,
)

EXPERIMENT_IDS = ("1", "2", "3a", "3b", "4", "5")

SWEEP_LABELS = {
    "1": "deadline_reduction_percent",
    "2": "balanced_scale",
    "3a": "optional_scale",
    "3b": "mandatory_scale",
    "4": "extra_tasks",
    "5": "frequency_increase_percent",
}

DEFAULT_SWEEPS = {
    "1": [i / 10 for i in range(10)],
    "2": [float(i) for i in range(10)],
    "3a": [float(i) for i in range(10)],
    "3b": [float(i) for i in range(10)],
    "4": [float(i) for i in range(6)],
    "5": [i / 10 for i in range(10)],
}

MODES = ("normal", "imprecise")


def failure_rate(verdicts: list[Verdict]) -> float:
    if not verdicts:
        raise DomainError("no verdicts")
    return sum(1 for v in verdicts if not v.schedulable) / len(verdicts)


def schedulability_index(task_set: TaskSet, report: AnalysisReport) -> float:
    """Per-set index: max over tasks of end-to-end WCRT / period."""
    worst = 0.0
    for t in task_set.tasks:
        e2e = report.per_task[t.id].end_to_end_wcrt
        ratio = math.inf if math.isinf(e2e) else e2e / t.period
        if ratio > worst:
            worst = ratio
    return worst


def average_final_error(task_errors: list[float]) -> float:
    if not task_errors:
        raise DomainError("no task errors")
    return sum(task_errors) / len(task_errors)


def worst_final_error(task_errors: list[float]) -> float:
    if not task_errors:
        raise DomainError("no task errors")
    return max(task_errors)


@dataclass(frozen=True)
class MetricRow:
    failure_rate: float
    sched_index: float | None  # None renders as UNS
    avg_final_error: float
    worst_final_error: float


@dataclass
class ExperimentResult:
    experiment_id: str
    sweep_label: str
    values: list[float]
    rows: dict[tuple[float, str], MetricRow]  # (value, mode)
    n_task_sets: int
    seed: int

    def to_csv(self) -> str:
        lines = ["value,mode,failure_rate,sched_index,avg_final_error,worst_final_error"]
        for v in self.values:
            for mode in MODES:
                r = self.rows[(v, mode)]
                si = "UNS" if r.sched_index is None else f"{r.sched_index:.6f}"
                lines.append(
                    f"{v:g},{mode},{r.failure_rate:.6f},{si},"
                    f"{r.avg_final_error:.6f},{r.worst_final_error:.6f}"
                )
        return "\n".join(lines) + "\n"


def _set_seed(base_seed: int, idx: int) -> int:
    return base_seed * 100_003 + idx


def _transformed(
    exp_id: str,
    base: TaskSet,
    value: float,
    config: GeneratorConfig,
    target_fraction: float,
    selection_seed: int,
) -> TaskSet:
    if exp_id == "1":
        return apply_deadline_reduction(base, value)
    if exp_id == "2":
        return apply_balanced_overload(base, value)
    if exp_id == "3a":
        return apply_unbalanced_overload(
            base, value, OverloadPart.OPTIONAL_ONLY, target_fraction, selection_seed
        )
    if exp_id == "3b":
        return apply_unbalanced_overload(
            base, value, OverloadPart.MANDATORY_ONLY, target_fraction, selection_seed
        )
    if exp_id == "4":
        return apply_task_set_increase(base, int(value), config)
    if exp_id == "5":
        return apply_frequency_increase(base, value)
    raise InputError(f"unknown experiment id {exp_id!r}")


def _evaluate_point(args) -> dict[str, tuple[bool, float | None, list[float]]]:
    """(value, one set, both modes) -> per-mode (schedulable, index, errors)."""
    exp_id, config, value, target_fraction, selection_seed = args
    base = generate(config)
    ts = _transformed(exp_id, base, value, config, target_fraction, selection_seed)
    out = {}
    for mode in MODES:
        work = ts.clone()
        if mode == "normal":
            verdict, report = normal_schedulability_analysis(work)
        else:
            verdict, report = imprecise_schedulability_analysis(work)
        if verdict.schedulable:
            idx = schedulability_index(work, report)
            errors = [verdict.final_errors[t.id] for t in work.tasks]
            out[mode] = (True, idx, errors)
        else:
            out[mode] = (False, None, [1.0] * len(work.tasks))
    return out


def run_experiment(
    experiment_id: str,
    config: GeneratorConfig,
    n_task_sets: int = 1000,
    values: list[float] | None = None,
    target_fraction: float = 0.5,
) -> ExperimentResult:
    if experiment_id not in EXPERIMENT_IDS:
        raise InputError(f"unknown experiment id {experiment_id!r}")
    if n_task_sets < 1:
        raise InputError("n_task_sets must be at least 1")
    config.validated()
    if values is None:
        values = list(DEFAULT_SWEEPS[experiment_id])

    items = []
    for v in values:
        for idx in range(n_task_sets):
            seed_i = _set_seed(config.seed, idx)
            items.append(
                (
                    experiment_id,
                    replace(config, seed=seed_i),
                    v,
                    target_fraction,
                    seed_i * 31 + 7,
                )
            )

    workers = 1
    env = os.environ.get("IMPRESCHED_THREADS")
    if env:
        try:
            workers = max(1, int(env))
        except ValueError:
            raise InputError("IMPRESCHED_THREADS must be an integer") from None
    if workers > 1 and len(items) > 1:
        chunk = max(1, len(items) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_point, items, chunksize=chunk))
    else:
        results = [_evaluate_point(it) for it in items]

    rows: dict[tuple[float, str], MetricRow] = {}
    pos = 0
    for v in values:
        chunk_results = results[pos : pos + n_task_sets]
        pos += n_task_sets
        for mode in MODES:
            fails = 0
            indices: list[float] = []
            errors: list[float] = []
            for res in chunk_results:
                ok, idx, errs = res[mode]
                if ok:
                    indices.append(idx)
                else:
                    fails += 1
                errors.extend(errs)
            rows[(v, mode)] = MetricRow(
                failure_rate=fails / n_task_sets,
                sched_index=(sum(indices) / len(indices)) if indices else None,
                avg_final_error=average_final_error(errors),
                worst_final_error=worst_final_error(errors),
            )
    return ExperimentResult(
        experiment_id,
        SWEEP_LABELS[experiment_id],
        list(values),
        rows,
        n_task_sets,
        config.seed,
    )
