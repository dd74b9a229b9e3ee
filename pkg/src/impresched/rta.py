"""Worst-case response time analysis for chains under fixed priorities.

Per subtask the level busy period is scanned instance by instance
(arbitrary-deadline analysis): each completion time is the least fixed point
of

    w = (q+1)*C_i + sum over hp of ceil((w + J_h)/P_h) * C_h

and instance q responds in w - q*P_i + J_i.  The release jitter J of a
subtask is the summed response of its chain predecessors, each measured from
its own release; those per-subtask local responses iterate to a fixed point
(holistic analysis) and their chain sum is the end-to-end WCRT.  Blocking is
whatever the end-to-end WCRT holds beyond the chain's own execution.

A result is Unbounded when the interfering set over-utilizes a processor or
the fixed point escapes the divergence guard (2^20 times the largest period,
or 1e6 iterations).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._kernels import busy_period_response
from .errors import DomainError
from .model import EPS, CompositeTask, TaskSet, total_execution
from .priority import PriorityOrdering

UNBOUNDED = math.inf

_MAX_ITER = 10**6
_BOUND_FACTOR = float(2**20)
_MAX_ROUNDS = 256


def subtask_wcrt(
    execution: float,
    period: float,
    release_jitter: float,
    higher_priority: list[tuple[float, float, float]],
    bound: float | None = None,
) -> float:
    """WCRT of one subtask, release jitter included.

    ``higher_priority`` holds (execution, period, jitter) triples for the
    interfering subtasks.  Returns UNBOUNDED when no finite bound exists.
    """
    if period <= 0:
        raise DomainError("period must be positive")
    if execution < 0 or release_jitter < 0:
        raise DomainError("negative execution or jitter")
    hp_c = [t[0] for t in higher_priority]
    hp_p = [t[1] for t in higher_priority]
    hp_j = [t[2] for t in higher_priority]
    if bound is None:
        bound = _BOUND_FACTOR * max([period] + hp_p)
    local = busy_period_response(
        execution, period, release_jitter, hp_c, hp_p, hp_j, bound, _MAX_ITER
    )
    if math.isinf(local):
        return UNBOUNDED
    return local + release_jitter


@dataclass
class RtaResult:
    per_subtask_wcrt: dict[tuple[str, int], float]
    per_task_e2e: dict[str, float]
    per_task_blocking: dict[str, float]  # UNBOUNDED tasks carry inf here too

    def e2e(self, task_id: str) -> float:
        return self.per_task_e2e[task_id]


def blocking_time(task: CompositeTask, result: RtaResult) -> float:
    """End-to-end WCRT minus the chain's own execution time."""
    e2e = result.per_task_e2e[task.id]
    if math.isinf(e2e):
        raise DomainError(f"task {task.id}: end-to-end WCRT is unbounded")
    return e2e - total_execution(task)


def end_to_end_wcrt(task_set: TaskSet, ordering: PriorityOrdering, task_id: str) -> float:
    """Convenience single-task view of analyze()."""
    return analyze(task_set, ordering).per_task_e2e[task_id]


def analyze(task_set: TaskSet, ordering: PriorityOrdering) -> RtaResult:
    """Holistic fixed-point analysis of the whole task set."""
    tasks = task_set.tasks
    if not tasks:
        return RtaResult({}, {}, {})
    bound = _BOUND_FACTOR * max(t.period for t in tasks)

    # static per-processor interference structure, priority order
    entries: list[dict] = []
    index: dict[tuple[str, int], dict] = {}
    for t in tasks:
        for st in t.chain:
            e = {
                "key": st.key,
                "task": t,
                "st": st,
                "sort": ordering.subtask_sort_key(st),
                "hp": [],
            }
            entries.append(e)
            index[st.key] = e
    by_proc: dict[str, list[dict]] = {}
    for e in entries:
        by_proc.setdefault(e["st"].spec.processor_id, []).append(e)
    for proc_entries in by_proc.values():
        proc_entries.sort(key=lambda e: e["sort"])
        for i, e in enumerate(proc_entries):
            e["hp"] = proc_entries[:i]

    local: dict[tuple[str, int], float] = {e["key"]: e["st"].execution for e in entries}
    jitter: dict[tuple[str, int], float] = {e["key"]: 0.0 for e in entries}

    for _ in range(_MAX_ROUNDS):
        changed = False
        for e in entries:
            key = e["key"]
            j_self = jitter[key]
            if math.isinf(j_self):
                new = UNBOUNDED
            else:
                hp_c, hp_p, hp_j = [], [], []
                blown = False
                for h in e["hp"]:
                    hj = jitter[h["key"]]
                    if math.isinf(hj):
                        blown = True
                        break
                    hp_c.append(h["st"].execution)
                    hp_p.append(h["task"].period)
                    hp_j.append(hj)
                if blown:
                    new = UNBOUNDED
                else:
                    new = busy_period_response(
                        e["st"].execution,
                        e["task"].period,
                        j_self,
                        hp_c,
                        hp_p,
                        hp_j,
                        bound,
                        _MAX_ITER,
                    )
            if new != local[key]:
                local[key] = new
                changed = True
        for t in tasks:
            acc = 0.0
            for st in t.chain:
                if jitter[st.key] != acc:
                    jitter[st.key] = acc
                    changed = True
                acc += local[st.key]
                if acc > bound:
                    acc = UNBOUNDED
        if not changed:
            break
    else:
        # monotone iteration did not settle: treat still-moving chains as
        # unbounded (safe side)
        for t in tasks:
            if any(math.isinf(jitter[st.key]) or math.isinf(local[st.key]) for st in t.chain):
                continue
            for st in t.chain:
                local[st.key] = UNBOUNDED

    per_subtask = {}
    for e in entries:
        key = e["key"]
        if math.isinf(local[key]) or math.isinf(jitter[key]):
            per_subtask[key] = UNBOUNDED
        else:
            per_subtask[key] = local[key] + jitter[key]

    per_e2e: dict[str, float] = {}
    per_block: dict[str, float] = {}
    for t in tasks:
        vals = [local[st.key] for st in t.chain]
        if any(math.isinf(v) for v in vals):
            per_e2e[t.id] = UNBOUNDED
            per_block[t.id] = UNBOUNDED
        else:
            e2e = sum(vals)
            per_e2e[t.id] = e2e
            per_block[t.id] = e2e - total_execution(t)
    return RtaResult(per_subtask, per_e2e, per_block)


def misses(task_set: TaskSet, result: RtaResult) -> list[str]:
    """Task ids whose end-to-end WCRT exceeds the relative deadline."""
    out = []
    for t in task_set.tasks:
        e2e = result.per_task_e2e[t.id]
        if math.isinf(e2e) or e2e > t.deadline + EPS:
            out.append(t.id)
    return out
