"""Schedulability analyses: the baseline single pass and the adaptive loop.

The baseline (normal) analysis runs every chain at full demand, ranks tasks
once, and fails on any overloaded processor or missed end-to-end deadline.

The adaptive (imprecise) analysis iterates instead of failing.  Each pass:

1. sheds optional time on overloaded processors (utilization adjustment);
   an unfixable processor ends the run as Unschedulable(ProcessorOverload)
2. re-ranks tasks and recomputes worst-case response times
3. no missed deadline: Schedulable with the current assignments
4. every task depleted while misses remain, or the best-ranked missing task
   is already depleted: Unschedulable(ResourcesExhausted)
5. otherwise the best-ranked missing task gets its demand reduced against
   the time its deadline leaves after blocking, then promoted (drop all
   optional and shrink the virtual deadline by the reported shortage, or
   deplete when the virtual deadline cannot absorb it), and the loop repeats

Runs of passes that differ only by one task's shrinking virtual deadline are
collapsed: the next rank change or depletion point is found by bisection on
the number of identical decrements, which keeps pass counts small even when
the shortage is tiny relative to the virtual deadline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import rta
from .errors import StateError
from .model import (
    EPS,
    AnalysisReport,
    CompositeTask,
    TaskReport,
    TaskSet,
    force_all_mandatory,
    total_execution,
)
from .priority import (
    PromotionOutcome,
    Scheme,
    _global_sort_key,
    assign_priorities,
    priority_index_global,
    promote,
)
from .reduction import final_error, reduce_execution_time
from .utilization import adjust_utilization, all_utilizations

RESOURCES_EXHAUSTED = "ResourcesExhausted"
PROCESSOR_OVERLOAD = "ProcessorOverload"


@dataclass(frozen=True)
class Verdict:
    outcome: str  # "Schedulable" | "Unschedulable"
    reason: str | None  # None | RESOURCES_EXHAUSTED | PROCESSOR_OVERLOAD
    iterations: int
    final_errors: dict[str, float] = field(default_factory=dict)

    @property
    def schedulable(self) -> bool:
        return self.outcome == "Schedulable"


def effective_deadline(task: CompositeTask, result: rta.RtaResult) -> float:
    """Deadline minus blocking: the time the chain's own demand may use.

    May be negative; reduction then reports the shortage."""
    return task.deadline - rta.blocking_time(task, result)


def normal_schedulability_analysis(task_set: TaskSet) -> tuple[Verdict, AnalysisReport]:
    """One pass at full demand.  Overload outranks deadline misses."""
    task_set.reset_full()
    ordering = assign_priorities(task_set, Scheme.GLOBAL)
    result = rta.analyze(task_set, ordering)
    utils = all_utilizations(task_set)
    overloaded = [pid for pid, u in sorted(utils.items()) if u > 1.0 + EPS]
    missing = rta.misses(task_set, result)
    if overloaded:
        verdict = Verdict("Unschedulable", PROCESSOR_OVERLOAD, 1, _errors(task_set))
    elif missing:
        verdict = Verdict("Unschedulable", RESOURCES_EXHAUSTED, 1, _errors(task_set))
    else:
        verdict = Verdict("Schedulable", None, 1, _errors(task_set))
    return verdict, _report(task_set, result, {}, verdict)


def imprecise_schedulability_analysis(
    task_set: TaskSet, scheme: Scheme = Scheme.GLOBAL
) -> tuple[Verdict, AnalysisReport]:
    """Iterate shed / rank / analyze / reduce / promote until settled.

    Starts from the full configuration; whatever assignments the input
    carried are analysis state, not input data.
    """
    task_set.reset_full()
    if not task_set.tasks:
        v = Verdict("Schedulable", None, 0, {})
        return v, AnalysisReport("Success", None, {}, {}, 0)

    shortages: dict[str, float] = {}
    passes = 0
    guard = 64 * task_set.n_tasks * (task_set.max_chain_length + 2) + 64

    while True:
        passes += 1
        if passes > guard:
            raise StateError("analysis loop exceeded its progress bound")

        ordering = assign_priorities(task_set, scheme)
        adj = adjust_utilization(task_set, ordering)
        if adj.outcome == "SystemFailure":
            ordering = assign_priorities(task_set, scheme)
            result = rta.analyze(task_set, ordering)
            verdict = Verdict("Unschedulable", PROCESSOR_OVERLOAD, passes, _errors(task_set))
            return verdict, _report(task_set, result, shortages, verdict)
        if adj.touched:
            ordering = assign_priorities(task_set, scheme)

        result = rta.analyze(task_set, ordering)
        missing = rta.misses(task_set, result)
        if not missing:
            verdict = Verdict("Schedulable", None, passes, _errors(task_set))
            return verdict, _report(task_set, result, shortages, verdict)

        if all(t.depleted for t in task_set.tasks):
            verdict = Verdict("Unschedulable", RESOURCES_EXHAUSTED, passes, _errors(task_set))
            return verdict, _report(task_set, result, shortages, verdict)

        target = task_set.task(min(missing, key=ordering.task_rank))
        if target.depleted:
            verdict = Verdict("Unschedulable", RESOURCES_EXHAUSTED, passes, _errors(task_set))
            return verdict, _report(task_set, result, shortages, verdict)

        e2e = result.per_task_e2e[target.id]
        if math.isinf(e2e):
            budget = 0.0
        else:
            budget = target.deadline - (e2e - total_execution(target))

        snap = _snapshot(task_set)
        red = reduce_execution_time(target, budget, task_set)
        shortages[target.id] = red.shortage
        pr = promote(target, red.shortage, red.met)

        if (
            scheme is Scheme.GLOBAL
            and pr.outcome is PromotionOutcome.VD_REDUCED
            and red.shortage > EPS
            and _only_vd_changed(snap, _snapshot(task_set), target.id)
        ):
            _fast_forward(task_set, target, red.shortage)


def mandatory_only_schedulable(task_set: TaskSet) -> bool:
    """Would the set be schedulable running nothing but mandatory parts?

    Probes a clone; the input is left untouched."""
    probe = task_set.clone()
    probe.reset_full()
    for t in probe.tasks:
        force_all_mandatory(t)
    ordering = assign_priorities(probe, Scheme.GLOBAL)
    if any(u > 1.0 + EPS for u in all_utilizations(probe).values()):
        return False
    result = rta.analyze(probe, ordering)
    return not rta.misses(probe, result)


# ---------------------------------------------------------------------------
# loop internals


def _errors(task_set: TaskSet) -> dict[str, float]:
    return {t.id: final_error(t) for t in task_set.tasks}


def _report(
    task_set: TaskSet,
    result: rta.RtaResult,
    shortages: dict[str, float],
    verdict: Verdict,
) -> AnalysisReport:
    per_task = {}
    for t in task_set.tasks:
        e2e = result.per_task_e2e[t.id]
        per_task[t.id] = TaskReport(
            end_to_end_wcrt=e2e,
            schedulable=not math.isinf(e2e) and e2e <= t.deadline + EPS,
            shortage=shortages.get(t.id, 0.0),
            final_error=final_error(t),
        )
    return AnalysisReport(
        "Success" if verdict.schedulable else "Failure",
        verdict.reason,
        per_task,
        all_utilizations(task_set),
        verdict.iterations,
    )


def _snapshot(task_set: TaskSet):
    return tuple(
        (
            t.id,
            t.virtual_deadline,
            t.depleted,
            tuple((st.assigned_optional, st.extended_mandatory) for st in t.chain),
        )
        for t in task_set.tasks
    )


def _only_vd_changed(before, after, task_id: str) -> bool:
    for b, a in zip(before, after):
        if b[0] != task_id:
            if b != a:
                return False
        elif b[2] != a[2] or b[3] != a[3]:
            return False
    return True


def _order_at(task_set: TaskSet, target: CompositeTask, vd: float) -> tuple[str, ...]:
    saved = target.virtual_deadline
    target.virtual_deadline = vd
    try:
        return tuple(t.id for t in sorted(task_set.tasks, key=_global_sort_key))
    finally:
        target.virtual_deadline = saved


def _fast_forward(task_set: TaskSet, target: CompositeTask, shortage: float) -> int:
    """Jump over passes that would only repeat VD -= shortage.

    The target just had its VD reduced once.  While the global order is the
    one the failing pass ran with and the VD can still absorb a decrement,
    the next pass is an exact repeat; bisect straight to the first decrement
    count that changes the order or forces depletion.  Returns the number of
    decrements applied.
    """
    vd = target.virtual_deadline
    s = shortage
    base = _order_at(task_set, target, vd + s)

    def interesting(i: int) -> bool:
        v = vd - i * s
        return v <= s + EPS or _order_at(task_set, target, v) != base

    if interesting(0):
        return 0
    max_i = int(math.ceil(vd / s)) + 1
    hi = 1
    while hi < max_i and not interesting(hi):
        hi *= 2
    if hi > max_i:
        hi = max_i
    lo = hi // 2  # interesting(lo) is known false
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if interesting(mid):
            hi = mid
        else:
            lo = mid
    target.virtual_deadline = vd - hi * s
    target.priority_index = priority_index_global(target)
    return hi
