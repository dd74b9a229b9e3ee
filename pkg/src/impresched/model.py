"""Task model: processors, composite task chains, subtask state.

A composite task is a chain of subtasks placed on (usually distinct)
processors.  Each subtask splits into a mandatory and an optional part.
Discarding optional time at one subtask feeds an input error into its
successor, which linearly extends the successor's parts:

    M' = M + h * eps_in        O' = O + k * eps_in

where eps_in is the predecessor's currently discarded optional time.  The
chain head always has eps_in = 0.  ``assigned_optional`` (sigma) is the part
of O' the subtask will actually execute; ``discarded = O' - sigma`` is what
feeds forward.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import DomainError, InputError

# Global comparison tolerance for times and utilizations.
EPS = 1e-9


def time_leq(a: float, b: float) -> bool:
    return a <= b + EPS


def time_eq(a: float, b: float) -> bool:
    return abs(a - b) <= EPS


@dataclass(frozen=True)
class SubtaskSpec:
    """Immutable description of one chain element."""

    composite_id: str
    chain_index: int  # 1-based position in the chain
    processor_id: str
    mandatory: float
    optional: float
    mandatory_error_factor: float  # h, scales eps_in into M'
    optional_error_factor: float  # k, scales eps_in into O'

    @property
    def key(self) -> tuple[str, int]:
        return (self.composite_id, self.chain_index)


@dataclass
class SubtaskState:
    """Mutable analysis state layered over a SubtaskSpec."""

    spec: SubtaskSpec
    input_error: float = 0.0
    extended_mandatory: float = 0.0
    extended_optional: float = 0.0
    assigned_optional: float = 0.0

    def __post_init__(self) -> None:
        if self.extended_mandatory == 0.0 and self.extended_optional == 0.0:
            self.reset_full()

    def reset_full(self) -> None:
        """Back to the unreduced configuration: no input error, full optional."""
        self.input_error = 0.0
        self.extended_mandatory = self.spec.mandatory
        self.extended_optional = self.spec.optional
        self.assigned_optional = self.spec.optional

    @property
    def key(self) -> tuple[str, int]:
        return self.spec.key

    @property
    def discarded(self) -> float:
        return self.extended_optional - self.assigned_optional

    @property
    def execution(self) -> float:
        return self.extended_mandatory + self.assigned_optional


@dataclass
class CompositeTask:
    id: str
    period: float
    deadline: float  # relative end-to-end deadline; may exceed the period
    chain: list[SubtaskState]
    default_h: float = 0.0
    default_k: float = 0.0
    virtual_deadline: float = field(default=0.0)
    priority_index: float = 0.0
    priority_rank: int = 0
    depleted: bool = False

    def __post_init__(self) -> None:
        if self.virtual_deadline == 0.0:
            self.virtual_deadline = self.deadline

    def __iter__(self) -> Iterator[SubtaskState]:
        return iter(self.chain)

    @property
    def length(self) -> int:
        return len(self.chain)

    def subtask(self, chain_index: int) -> SubtaskState:
        return self.chain[chain_index - 1]

    def reset_full(self) -> None:
        for st in self.chain:
            st.reset_full()
        self.virtual_deadline = self.deadline
        self.priority_index = 0.0
        self.priority_rank = 0
        self.depleted = False


@dataclass
class TaskSet:
    processors: list[str]
    tasks: list[CompositeTask]

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def n_processors(self) -> int:
        return len(self.processors)

    @property
    def max_chain_length(self) -> int:
        return max((t.length for t in self.tasks), default=0)

    def task(self, task_id: str) -> CompositeTask:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise DomainError(f"unknown task id {task_id!r}")

    def subtasks_on(self, processor_id: str) -> list[tuple[CompositeTask, SubtaskState]]:
        if processor_id not in self.processors:
            raise DomainError(f"unknown processor id {processor_id!r}")
        found = []
        for t in self.tasks:
            for st in t.chain:
                if st.spec.processor_id == processor_id:
                    found.append((t, st))
        return found

    def clone(self) -> "TaskSet":
        return copy.deepcopy(self)

    def reset_full(self) -> None:
        for t in self.tasks:
            t.reset_full()


# ---------------------------------------------------------------------------
# chain arithmetic


def total_mandatory(task: CompositeTask) -> float:
    """Sum of extended mandatory parts over the chain."""
    return sum(st.extended_mandatory for st in task.chain)


def total_execution(task: CompositeTask) -> float:
    """Sum of per-subtask execution times (extended mandatory + assigned
    optional) under the current configuration."""
    return sum(st.execution for st in task.chain)


def refresh_chain(task: CompositeTask, start_index: int = 1) -> None:
    """Re-establish the forward invariant eps_j = discarded_{j-1} from
    ``start_index`` to the chain end.

    A subtask sitting at its full extended optional absorbs capacity growth
    (compensation); one that was deliberately reduced keeps its value, clamped
    to the new capacity.  Depleted tasks never absorb: their assignment stays
    zero.
    """
    for j in range(start_index, task.length + 1):
        st = task.chain[j - 1]
        eps = 0.0 if j == 1 else task.chain[j - 2].discarded
        was_full = st.assigned_optional >= st.extended_optional - EPS
        st.input_error = eps
        st.extended_mandatory = st.spec.mandatory + st.spec.mandatory_error_factor * eps
        st.extended_optional = st.spec.optional + st.spec.optional_error_factor * eps
        if task.depleted:
            st.assigned_optional = 0.0
        elif was_full:
            st.assigned_optional = st.extended_optional
        else:
            st.assigned_optional = min(st.assigned_optional, st.extended_optional)


def force_all_mandatory(task: CompositeTask) -> None:
    """Discard every optional part, propagating extensions down the chain."""
    for j in range(1, task.length + 1):
        st = task.chain[j - 1]
        eps = 0.0 if j == 1 else task.chain[j - 2].discarded
        st.input_error = eps
        st.extended_mandatory = st.spec.mandatory + st.spec.mandatory_error_factor * eps
        st.extended_optional = st.spec.optional + st.spec.optional_error_factor * eps
        st.assigned_optional = 0.0


def apply_discards(task: CompositeTask, discards: list[float]) -> None:
    """Install a full discard vector x (one entry per chain position).

    Capacities are recomputed forward, so each x_j is clamped to the extended
    optional that results from x_{j-1}.
    """
    if len(discards) != task.length:
        raise DomainError("discard vector length != chain length")
    for j in range(1, task.length + 1):
        st = task.chain[j - 1]
        eps = 0.0 if j == 1 else task.chain[j - 2].discarded
        st.input_error = eps
        st.extended_mandatory = st.spec.mandatory + st.spec.mandatory_error_factor * eps
        st.extended_optional = st.spec.optional + st.spec.optional_error_factor * eps
        x = min(max(discards[j - 1], 0.0), st.extended_optional)
        st.assigned_optional = st.extended_optional - x


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    entity: str
    rule: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.rule}"


def validate(task_set: TaskSet) -> list[Violation]:
    """Check every structural invariant; returns an empty list when sound.

    Pure: never mutates its input.
    """
    out: list[Violation] = []
    procs = task_set.processors
    if len(set(procs)) != len(procs):
        out.append(Violation("processors", "duplicate processor ids"))

    seen_ids: set[str] = set()
    for t in task_set.tasks:
        ent = f"task {t.id}"
        if t.id in seen_ids:
            out.append(Violation(ent, "duplicate task id"))
        seen_ids.add(t.id)
        if not t.period > 0:
            out.append(Violation(ent, "period must be > 0"))
        if not t.deadline > 0:
            out.append(Violation(ent, "deadline must be > 0"))
        if not (0 < t.virtual_deadline <= t.deadline + EPS):
            out.append(Violation(ent, "virtual deadline must lie in (0, deadline]"))
        if t.depleted:
            if t.priority_index != 1.0:
                out.append(Violation(ent, "depleted task must have priority index 1"))
            if not time_eq(t.virtual_deadline, t.deadline):
                out.append(Violation(ent, "depleted task must have VD = deadline"))
        if not t.chain:
            out.append(Violation(ent, "empty chain"))
            continue
        if not any(st.spec.mandatory + st.spec.optional > 0 for st in t.chain):
            out.append(Violation(ent, "all subtasks have zero execution"))
        # mandatory relevance divides by total execution, which equals the
        # mandatory total once everything optional is shed
        if t.chain and not sum(st.spec.mandatory for st in t.chain) > 0:
            out.append(Violation(ent, "chain needs a positive mandatory total"))
        for j, st in enumerate(t.chain, start=1):
            sent = f"task {t.id} subtask {j}"
            sp = st.spec
            if sp.composite_id != t.id:
                out.append(Violation(sent, "composite id mismatch"))
            if sp.chain_index != j:
                out.append(Violation(sent, "chain indices must be 1..n without gaps"))
            if sp.processor_id not in procs:
                out.append(Violation(sent, f"unknown processor {sp.processor_id!r}"))
            if sp.mandatory < 0 or sp.optional < 0:
                out.append(Violation(sent, "negative execution time"))
            if sp.mandatory_error_factor < 0 or sp.optional_error_factor < 0:
                out.append(Violation(sent, "negative error factor"))
            if st.input_error < -EPS:
                out.append(Violation(sent, "negative input error"))
            if j == 1 and abs(st.input_error) > EPS:
                out.append(Violation(sent, "chain head must have zero input error"))
            want_m = sp.mandatory + sp.mandatory_error_factor * st.input_error
            want_o = sp.optional + sp.optional_error_factor * st.input_error
            if not time_eq(st.extended_mandatory, want_m):
                out.append(Violation(sent, "extended mandatory inconsistent with input error"))
            if not time_eq(st.extended_optional, want_o):
                out.append(Violation(sent, "extended optional inconsistent with input error"))
            if st.assigned_optional < -EPS or st.assigned_optional > st.extended_optional + EPS:
                out.append(Violation(sent, "assigned optional outside [0, extended optional]"))
            if j > 1 and not time_eq(st.input_error, t.chain[j - 2].discarded):
                out.append(Violation(sent, "input error != predecessor's discarded time"))
            if t.depleted and st.assigned_optional > EPS:
                out.append(Violation(sent, "depleted task with nonzero assigned optional"))
    return out


# ---------------------------------------------------------------------------
# JSON file format
#
# {
#   "processors": ["p1", "p2"],
#   "tasks": [
#     {"id": "t1", "period": 20, "deadline": 40,
#      "default_h": 0.25, "default_k": 0.25,
#      "chain": [{"processor": "p1", "mandatory": 2, "optional": 1},
#                {"processor": "p2", "mandatory": 3, "optional": 4,
#                 "h": 0.5, "k": 0.0}]}
#   ]
# }
#
# "h"/"k" on a chain element override the task's default_h/default_k
# (both default to 0 when omitted).  Chain order defines the chain index.


def _num(obj: dict, key: str, entity: str, default: float | None = None) -> float:
    if key not in obj:
        if default is not None:
            return default
        raise InputError(f"{entity}: missing field {key!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"{entity}: field {key!r} must be a number")
    return float(v)


def task_set_from_dict(doc: dict) -> TaskSet:
    if not isinstance(doc, dict):
        raise InputError("task set document must be a JSON object")
    procs = doc.get("processors")
    if not isinstance(procs, list) or not all(isinstance(p, str) for p in procs):
        raise InputError("'processors' must be a list of strings")
    raw_tasks = doc.get("tasks")
    if not isinstance(raw_tasks, list):
        raise InputError("'tasks' must be a list")
    tasks: list[CompositeTask] = []
    for rt in raw_tasks:
        if not isinstance(rt, dict):
            raise InputError("each task must be an object")
        tid = rt.get("id")
        if not isinstance(tid, str) or not tid:
            raise InputError("task missing string 'id'")
        ent = f"task {tid}"
        period = _num(rt, "period", ent)
        deadline = _num(rt, "deadline", ent)
        dh = _num(rt, "default_h", ent, default=0.0)
        dk = _num(rt, "default_k", ent, default=0.0)
        raw_chain = rt.get("chain")
        if not isinstance(raw_chain, list) or not raw_chain:
            raise InputError(f"{ent}: 'chain' must be a non-empty list")
        chain: list[SubtaskState] = []
        for j, rs in enumerate(raw_chain, start=1):
            if not isinstance(rs, dict):
                raise InputError(f"{ent}: chain elements must be objects")
            proc = rs.get("processor")
            if not isinstance(proc, str):
                raise InputError(f"{ent} subtask {j}: missing string 'processor'")
            sent = f"{ent} subtask {j}"
            spec = SubtaskSpec(
                composite_id=tid,
                chain_index=j,
                processor_id=proc,
                mandatory=_num(rs, "mandatory", sent),
                optional=_num(rs, "optional", sent),
                mandatory_error_factor=_num(rs, "h", sent, default=dh),
                optional_error_factor=_num(rs, "k", sent, default=dk),
            )
            chain.append(SubtaskState(spec=spec))
        tasks.append(
            CompositeTask(
                id=tid,
                period=period,
                deadline=deadline,
                chain=chain,
                default_h=dh,
                default_k=dk,
            )
        )
    return TaskSet(processors=list(procs), tasks=tasks)


def task_set_to_dict(task_set: TaskSet) -> dict:
    doc: dict = {"processors": list(task_set.processors), "tasks": []}
    for t in task_set.tasks:
        rt: dict = {
            "id": t.id,
            "period": t.period,
            "deadline": t.deadline,
            "default_h": t.default_h,
            "default_k": t.default_k,
            "chain": [],
        }
        for st in t.chain:
            sp = st.spec
            rs: dict = {
                "processor": sp.processor_id,
                "mandatory": sp.mandatory,
                "optional": sp.optional,
            }
            if sp.mandatory_error_factor != t.default_h:
                rs["h"] = sp.mandatory_error_factor
            if sp.optional_error_factor != t.default_k:
                rs["k"] = sp.optional_error_factor
            rt["chain"].append(rs)
        doc["tasks"].append(rt)
    return doc


def load_task_set(path: str) -> TaskSet:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return task_set_from_dict(doc)


def dump_task_set(task_set: TaskSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(task_set_to_dict(task_set), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# analysis report


@dataclass
class TaskReport:
    end_to_end_wcrt: float  # math.inf when unbounded
    schedulable: bool
    shortage: float
    final_error: float


@dataclass
class AnalysisReport:
    verdict: str  # "Success" | "Failure"
    reason: str | None  # None | "ResourcesExhausted" | "ProcessorOverload"
    per_task: dict[str, TaskReport]
    per_processor: dict[str, float]
    iterations: int = 0

    def to_dict(self) -> dict:
        def num(v: float):
            return "unbounded" if math.isinf(v) else v

        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "iterations": self.iterations,
            "per_task": {
                tid: {
                    "end_to_end_wcrt": num(r.end_to_end_wcrt),
                    "schedulable": r.schedulable,
                    "shortage": num(r.shortage),
                    "final_error": r.final_error,
                }
                for tid, r in self.per_task.items()
            },
            "per_processor": dict(self.per_processor),
        }


def subtask_label(key: tuple[str, int]) -> str:
    return f"{key[0]}:{key[1]}"


def iter_subtasks(task_set: TaskSet) -> Iterable[tuple[CompositeTask, SubtaskState]]:
    for t in task_set.tasks:
        for st in t.chain:
            yield t, st
