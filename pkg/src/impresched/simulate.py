"""Discrete-event simulation of chain executions, used as an analysis oracle.

Every task releases a job at each period boundary starting from a
synchronous instant 0.  A job walks its chain: stage j+1 becomes ready the
moment stage j completes, possibly on another processor.  Each processor runs
the ready stage with the best priority key preemptively; ties fall back to
activation time then insertion order, so equal-priority work is FIFO and
never preempts itself.

Stages execute for exactly their configured demand (mandatory plus assigned
optional).  Zero-demand stages complete the instant they are activated.
Responses are measured from the job's release to stage completion, so the
last stage's response is the job's end-to-end response.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import DomainError
from .model import EPS, CompositeTask, TaskSet
from .priority import PriorityOrdering, Scheme, assign_priorities

_TOL = 1e-9


def default_horizon(task_set: TaskSet) -> float:
    """3 hyperperiods when periods are integral and the lcm stays small,
    otherwise 1e5 times the largest period."""
    periods = [t.period for t in task_set.tasks]
    if not periods:
        raise DomainError("empty task set")
    if all(float(p).is_integer() for p in periods):
        lcm = math.lcm(*(int(p) for p in periods))
        if lcm <= 10**7:
            return float(3 * lcm)
    return 1e5 * max(periods)


class _Job:
    __slots__ = ("task", "activation", "index", "pos")

    def __init__(self, task: CompositeTask, activation: float, index: int):
        self.task = task
        self.activation = activation
        self.index = index  # 0-based release count for this task
        self.pos = 0  # completed stages


@dataclass
class SimTrace:
    horizon: float
    released: dict[str, int]
    completed: dict[str, int]
    deadline_misses: list[tuple[str, int]]  # (task id, activation index)
    per_task_max_e2e_response: dict[str, float]
    per_subtask_max_response: dict[tuple[str, int], float]
    events: list[tuple[float, str, str, int, str]] | None = None

    @property
    def any_miss(self) -> bool:
        return bool(self.deadline_misses)

    def misses_of(self, task_id: str) -> int:
        return sum(1 for tid, _ in self.deadline_misses if tid == task_id)

    def max_response(self, task_id: str) -> float:
        return self.per_task_max_e2e_response[task_id]


def simulate(
    task_set: TaskSet,
    ordering: PriorityOrdering | None = None,
    horizon: float | None = None,
    trace: bool = False,
) -> SimTrace:
    if ordering is None:
        ordering = assign_priorities(task_set, Scheme.GLOBAL)
    if horizon is None:
        horizon = default_horizon(task_set)
    if horizon <= 0:
        raise DomainError("horizon must be positive")

    released = {t.id: 0 for t in task_set.tasks}
    completed = {t.id: 0 for t in task_set.tasks}
    misses: list[tuple[str, int]] = []
    max_resp = {t.id: 0.0 for t in task_set.tasks}
    sub_resp = {st.key: 0.0 for t in task_set.tasks for st in t.chain}
    rows: list[tuple[float, str, str, int, str]] | None = [] if trace else None

    ready: dict[str, list] = {pid: [] for pid in task_set.processors}
    live: list[_Job] = []
    seq = 0

    def record(time: float, event: str, task_id: str, idx: int, pid: str) -> None:
        if rows is not None:
            rows.append((time, event, task_id, idx, pid))

    def complete_stage(job: _Job, now: float) -> None:
        st = job.task.chain[job.pos]
        job.pos += 1
        resp = now - job.activation
        if resp > sub_resp[st.key]:
            sub_resp[st.key] = resp
        record(now, "complete", job.task.id, st.spec.chain_index, st.spec.processor_id)
        if job.pos == len(job.task.chain):
            live.remove(job)
            completed[job.task.id] += 1
            if resp > max_resp[job.task.id]:
                max_resp[job.task.id] = resp
            if resp > job.task.deadline + EPS:
                misses.append((job.task.id, job.index))
        else:
            activate_stage(job, now)

    def activate_stage(job: _Job, now: float) -> None:
        nonlocal seq
        st = job.task.chain[job.pos]
        record(now, "activate", job.task.id, st.spec.chain_index, st.spec.processor_id)
        demand = st.execution
        if demand <= _TOL:
            complete_stage(job, now)
            return
        seq += 1
        cell = [demand, job]
        heapq.heappush(
            ready[st.spec.processor_id],
            (ordering.subtask_sort_key(st), now, seq, cell),
        )

    rel: list[tuple[float, int, CompositeTask]] = []
    for t in task_set.tasks:
        seq += 1
        heapq.heappush(rel, (0.0, seq, t))

    now = 0.0
    while True:
        # finish heads that ran dry exactly now before admitting arrivals at
        # now, or a same-instant release would bury the done cell in the heap
        # and its completion (and successor activation) would be stamped late
        progressed = True
        while progressed:
            progressed = False
            for pid in task_set.processors:
                heap = ready[pid]
                while heap and heap[0][3][0] <= _TOL:
                    _, _, _, cell = heapq.heappop(heap)
                    complete_stage(cell[1], now)
                    progressed = True

        while rel and rel[0][0] <= now + _TOL:
            rt, _, task = heapq.heappop(rel)
            job = _Job(task, rt, released[task.id])
            released[task.id] += 1
            live.append(job)
            record(rt, "release", task.id, 0, "")
            activate_stage(job, rt)
            nxt = rt + task.period
            if nxt < horizon - _TOL:
                seq += 1
                heapq.heappush(rel, (nxt, seq, task))

        t_next = math.inf
        if rel:
            t_next = rel[0][0]
        for pid in task_set.processors:
            heap = ready[pid]
            if heap:
                t_next = min(t_next, now + heap[0][3][0])
        if t_next >= horizon - _TOL:
            now = horizon
            break

        dt = t_next - now
        for pid in task_set.processors:
            heap = ready[pid]
            if heap:
                heap[0][3][0] -= dt
        now = t_next

    # jobs whose deadline passed inside the horizon but never finished
    leftovers = [
        (job.task.id, job.index)
        for job in live
        if job.activation + job.task.deadline <= horizon + _TOL
    ]
    misses.extend(sorted(leftovers))

    return SimTrace(horizon, released, completed, misses, max_resp, sub_resp, rows)
