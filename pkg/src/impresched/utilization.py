"""Processor utilization accounting and the overload-shedding pass.

A processor fails when its utilization strictly exceeds 1.  The adjustment
sheds optional time from the failed processor's subtasks, lowest priority
first, trimming each just enough (partial reductions are fine).  Every trim
feeds the discarded time into the chain successor, extending the successor's
mandatory and optional parts; a successor still holding its full optional
absorbs the extension (the loss is compensated), which can in turn overload
the successor's processor.  Such propagation-induced failures re-run the
shedding pass there, picking the failed processor hosting the best
(rank, chain index) subtask.  The system fails only when a processor stays
above 1 with every optional part on it already at zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError
from .model import EPS, CompositeTask, SubtaskState, TaskSet
from .priority import PriorityOrdering


def processor_utilization(task_set: TaskSet, processor_id: str) -> float:
    """Sum of execution/period over the subtasks currently on the processor."""
    total = 0.0
    for task, st in task_set.subtasks_on(processor_id):
        total += st.execution / task.period
    return total


def all_utilizations(task_set: TaskSet) -> dict[str, float]:
    return {pid: processor_utilization(task_set, pid) for pid in task_set.processors}


@dataclass(frozen=True)
class PropagationRecord:
    """Effects of pushing one discard increment down a chain."""

    extensions: tuple[tuple[tuple[str, int], float], ...]  # (subtask key, eps delta)
    residual_error_delta: float  # uncompensated time that reached the chain end
    compensated: bool  # some successor absorbed the increment


def propagate_input_error(task: CompositeTask, from_index: int, discarded: float) -> PropagationRecord:
    """Push a discard increment at chain position ``from_index`` forward.

    The successor's input error grows by the increment and its extended parts
    are recomputed.  If the successor sat at its full extended optional it
    absorbs the larger capacity (nothing new is discarded there); otherwise
    its assignment is clamped and the capacity growth k*delta becomes a fresh
    discard that continues down the chain.  An increment that reaches past
    the last subtask is the residual error at the chain end.
    """
    if not 1 <= from_index <= task.length:
        raise DomainError(f"task {task.id}: chain position {from_index} out of range")
    if discarded < 0:
        raise DomainError("discard increment must be non-negative")

    extensions: list[tuple[tuple[str, int], float]] = []
    delta = discarded
    j = from_index
    while delta > EPS and j < task.length:
        st = task.chain[j]  # successor of position j (0-based index j)
        prev = task.chain[j - 1]
        was_full = st.assigned_optional >= st.extended_optional - EPS
        st.input_error = prev.discarded
        st.extended_mandatory = st.spec.mandatory + st.spec.mandatory_error_factor * st.input_error
        st.extended_optional = st.spec.optional + st.spec.optional_error_factor * st.input_error
        extensions.append((st.key, delta))
        if was_full and not task.depleted:
            st.assigned_optional = st.extended_optional
            return PropagationRecord(tuple(extensions), 0.0, True)
        st.assigned_optional = min(st.assigned_optional, st.extended_optional)
        delta = st.spec.optional_error_factor * delta
        j += 1
    if j >= task.length:
        return PropagationRecord(tuple(extensions), delta, False)
    return PropagationRecord(tuple(extensions), 0.0, True)


@dataclass
class AdjustmentResult:
    outcome: str  # "Fixed" | "SystemFailure"
    touched: list[tuple[tuple[str, int], float]] = field(default_factory=list)
    propagated: list[tuple[tuple[str, int], float]] = field(default_factory=list)
    residual_errors: list[tuple[str, float]] = field(default_factory=list)
    visits: int = 0
    reruns: int = 0
    diagnostic: str = ""


def _failed_processors(task_set: TaskSet) -> list[str]:
    return [
        pid
        for pid in task_set.processors
        if processor_utilization(task_set, pid) > 1.0 + EPS
    ]


def _pick_processor(task_set: TaskSet, ordering: PriorityOrdering, failed: list[str]) -> str:
    """The failed processor hosting the best (rank, chain index) subtask."""
    best_pid = failed[0]
    best_key: tuple | None = None
    for pid in failed:
        for _, st in task_set.subtasks_on(pid):
            key = ordering.subtask_sort_key(st)
            if best_key is None or key < best_key:
                best_key = key
                best_pid = pid
    return best_pid

def _shed_on_processor(
    task_set: TaskSet,
    ordering: PriorityOrdering,
    pid: str,
    result: AdjustmentResult,
) -> bool:
    """Trim optional on one processor until it fits.  True when fixed.

    Passes run lowest priority first; a pass that changes nothing while the
    processor still exceeds 1 means every optional here is exhausted.
    """
    while True:
        util = processor_utilization(task_set, pid)
        if util <= 1.0 + EPS:
            return True
        hosted = task_set.subtasks_on(pid)
        hosted.sort(key=lambda pair: ordering.subtask_sort_key(pair[1]), reverse=True)
        changed = False
        for task, st in hosted:
            util = processor_utilization(task_set, pid)
            if util <= 1.0 + EPS:
                return True
            if st.assigned_optional <= EPS:
                continue
            result.visits += 1
            need = (util - 1.0) * task.period
            delta = min(st.assigned_optional, need)
            st.assigned_optional -= delta
            changed = True
            result.touched.append((st.key, delta))
            record = propagate_input_error(task, st.spec.chain_index, delta)
            result.propagated.extend(record.extensions)
            if record.residual_error_delta > EPS:
                result.residual_errors.append((task.id, record.residual_error_delta))
        if not changed:
            return False


def adjust_utilization(task_set: TaskSet, ordering: PriorityOrdering) -> AdjustmentResult:
    """Shed optional load until no processor exceeds utilization 1.

    Mutates assignments (never base mandatory parts; extended mandatories move
    only through propagation).  Returns SystemFailure when some processor
    cannot be fixed even with all hosted optional at zero, or when the
    propagation cascade exceeds the N*P re-run guard.
    """
    result = AdjustmentResult(outcome="Fixed")
    guard = max(1, task_set.n_tasks * task_set.n_processors)
    while True:
        failed = _failed_processors(task_set)
        if not failed:
            return result
        result.reruns += 1
        if result.reruns > guard:
            result.outcome = "SystemFailure"
            result.diagnostic = f"cascade exceeded {guard} re-runs"
            return result
        pid = _pick_processor(task_set, ordering, failed)
        if not _shed_on_processor(task_set, ordering, pid, result):
            result.outcome = "SystemFailure"
            result.diagnostic = (
                f"processor {pid} stays above utilization 1 with all optional shed"
            )
            return result
