"""Priority assignment for composite tasks.

Global scheme: rank whole tasks by priority index PI = MR / VD, where the
mandatory relevance MR is the mandatory share of the task's current execution
and VD is a virtual deadline used only for ranking (it starts at the relative
deadline and only ever shrinks through promotion).  Local scheme: rank
subtasks per processor by M' / ((M' + O') * VD).

Tie cascade, both schemes: shorter relative deadline, then smaller mandatory
total, then lexicographic id.  Depleted tasks outrank every non-depleted task
and are ordered among themselves by the same cascade.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError, StateError
from .model import (
    CompositeTask,
    SubtaskState,
    TaskSet,
    force_all_mandatory,
    total_execution,
    total_mandatory,
)


class Scheme(str, Enum):
    GLOBAL = "global"
    LOCAL = "local"


def mandatory_relevance(task: CompositeTask) -> float:
    """Mandatory share of the task's current execution, in [0, 1].

    A task running mandatory-only (every assigned optional zero) reports
    exactly 1.
    """
    te = total_execution(task)
    if te <= 0:
        raise DomainError(f"task {task.id}: zero total execution")
    return total_mandatory(task) / te


def priority_index_global(task: CompositeTask) -> float:
    """MR / VD; exactly 1 for a depleted task."""
    if task.depleted:
        return 1.0
    if task.virtual_deadline <= 0:
        raise DomainError(f"task {task.id}: non-positive virtual deadline")
    return mandatory_relevance(task) / task.virtual_deadline


def priority_index_local(subtask: SubtaskState, virtual_deadline: float) -> float:
    """Per-subtask index M' / ((M' + O') * VD) used by the local scheme."""
    if virtual_deadline <= 0:
        raise DomainError("non-positive virtual deadline")
    denom = (subtask.extended_mandatory + subtask.extended_optional) * virtual_deadline
    if denom <= 0:
        raise DomainError(f"subtask {subtask.key}: zero extended execution")
    return subtask.extended_mandatory / denom


def _global_sort_key(task: CompositeTask) -> tuple:
    # depleted first, then PI descending, then the tie cascade
    return (
        0 if task.depleted else 1,
        -priority_index_global(task),
        task.deadline,
        total_mandatory(task),
        task.id,
    )


@dataclass
class PriorityOrdering:
    """Result of assign_priorities; rank 1 is the highest priority.

    For the global scheme ``ranked`` holds task ids best-first and subtasks
    inherit the parent's rank, serialized by chain index on a shared
    processor.  For the local scheme ``per_processor`` holds subtask keys
    best-first per processor.
    """

    scheme: Scheme
    ranked: list[str] = field(default_factory=list)
    per_processor: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    _task_rank: dict[str, int] = field(default_factory=dict)
    _subtask_rank: dict[tuple[str, int], tuple] = field(default_factory=dict)

    def task_rank(self, task_id: str) -> int:
        return self._task_rank[task_id]

    def subtask_sort_key(self, subtask: SubtaskState) -> tuple:
        """Comparable only between subtasks placed on the same processor."""
        return self._subtask_rank[subtask.key]


def assign_priorities(task_set: TaskSet, scheme: Scheme = Scheme.GLOBAL) -> PriorityOrdering:
    """Rank tasks (global) or per-processor subtasks (local).

    Updates every task's priority_index and priority_rank in place and
    returns the ordering.  The ordering is strict and total: the cascade ends
    at the unique task id.
    """
    for t in task_set.tasks:
        t.priority_index = priority_index_global(t)

    ordered = sorted(task_set.tasks, key=_global_sort_key)
    ordering = PriorityOrdering(scheme=scheme)
    for rank, t in enumerate(ordered, start=1):
        t.priority_rank = rank
        ordering.ranked.append(t.id)
        ordering._task_rank[t.id] = rank

    if scheme is Scheme.GLOBAL:
        for t in task_set.tasks:
            for st in t.chain:
                ordering._subtask_rank[st.key] = (t.priority_rank, st.spec.chain_index)
        return ordering

    # local: rank subtasks per processor by the local index
    for pid in task_set.processors:
        entries = []
        for t, st in task_set.subtasks_on(pid):
            if t.depleted:
                pi = 1.0
            elif st.extended_mandatory + st.extended_optional <= 0:
                pi = 0.0  # zero-demand stage: runs in no time, rank it last
            else:
                pi = priority_index_local(st, t.virtual_deadline)
            entries.append(
                (
                    0 if t.depleted else 1,
                    -pi,
                    t.deadline,
                    st.extended_mandatory,
                    t.id,
                    st.spec.chain_index,
                    st,
                )
            )
        entries.sort(key=lambda e: e[:6])
        keys = []
        for pos, e in enumerate(entries, start=1):
            st = e[-1]
            keys.append(st.key)
            ordering._subtask_rank[st.key] = (pos,)
        ordering.per_processor[pid] = keys
    return ordering


class PromotionOutcome(Enum):
    RECALCULATED = "Recalculated"
    VD_REDUCED = "VDReduced"
    DEPLETED = "Depleted"


@dataclass(frozen=True)
class PromotionResult:
    outcome: PromotionOutcome
    new_virtual_deadline: float


def promote(task: CompositeTask, shortage: float, execution_reduction_succeeded: bool) -> PromotionResult:
    """Apply the promotion step after an execution-time reduction attempt.

    - reduction succeeded: nothing to force; the shrunk optional already
      raised MR, so the caller just re-ranks (Recalculated).
    - reduction failed and VD - shortage stays positive: drop every assigned
      optional (MR becomes 1) and shrink VD by the shortage (VDReduced).
    - reduction failed, the task already ran mandatory-only, and VD cannot
      absorb the shortage: the task is depleted.  PI pins to 1, VD snaps back
      to the relative deadline, and the task is frozen from then on.

    Promoting a depleted task is a logic error.
    """
    if task.depleted:
        raise StateError(f"task {task.id} is depleted and cannot be promoted")
    if execution_reduction_succeeded:
        return PromotionResult(PromotionOutcome.RECALCULATED, task.virtual_deadline)

    was_mandatory_only = all(st.assigned_optional <= 0.0 for st in task.chain)
    force_all_mandatory(task)
    remaining = task.virtual_deadline - shortage
    if remaining > 0:
        task.virtual_deadline = remaining
        task.priority_index = priority_index_global(task)
        return PromotionResult(PromotionOutcome.VD_REDUCED, remaining)
    if not was_mandatory_only:
        # forcing MR to 1 is itself a promotion; the VD decrement is skipped
        # because it would be non-positive
        task.priority_index = priority_index_global(task)
        return PromotionResult(PromotionOutcome.RECALCULATED, task.virtual_deadline)
    task.depleted = True
    task.priority_index = 1.0
    task.virtual_deadline = task.deadline
    return PromotionResult(PromotionOutcome.DEPLETED, task.deadline)
