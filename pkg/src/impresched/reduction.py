"""Execution-time reduction for one chain against a time budget.

Discarding optional time at stage j feeds stage j+1 an input error equal to
the discarded amount, which extends the successor's mandatory and optional
parts by its h and k factors.  Discarding one unit at stage j therefore cuts
net chain demand by c_j = 1 - h_{j+1} - k_{j+1}; discarding at the final
stage cuts a full unit but is the only discard that shows up in the chain's
final error (discarded / extended optional of the last stage).

The solver never returns optional time that earlier phases already removed:
each stage's discard can only grow.  It first takes discards at stages whose
successor can absorb the loss (c_j > 0, best ratio first, earlier stage on
ties), which costs no final error, then settles the remainder exactly on the
last two stages: with everything upstream frozen, the error as a function of
the second-to-last discard is a piecewise ratio of affine terms, so its
minimum sits on one of a handful of candidate points which are evaluated
directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import StateError
from .model import EPS, CompositeTask, TaskSet, apply_discards
from .utilization import all_utilizations

_FEAS = 1e-7  # slack when testing whether a discard fits its capacity


def final_error(task: CompositeTask) -> float:
    """Fraction of the last stage's extended optional that was discarded."""
    last = task.chain[-1]
    cap = last.extended_optional
    if cap <= EPS:
        return 0.0
    err = last.discarded / cap
    return min(1.0, max(0.0, err))


@dataclass(frozen=True)
class ReductionResult:
    status: str  # "Met" | "Shortage"
    shortage: float
    new_assignments: dict[tuple[str, int], float]
    caused_processor_failures: tuple[str, ...] = ()
    final_error: float = 0.0

    @property
    def met(self) -> bool:
        return self.status == "Met"


def _forward(m, o, h, k, x):
    """Walk the chain with discard vector x (clamped to capacity).

    Returns extended mandatories, extended optionals, the clamped discards,
    and the resulting total demand."""
    n = len(m)
    ext_m = [0.0] * n
    ext_o = [0.0] * n
    cx = [0.0] * n
    err_in = 0.0
    for j in range(n):
        em = m[j] + h[j] * err_in
        eo = o[j] + k[j] * err_in
        xj = x[j]
        if xj < 0.0:
            xj = 0.0
        if xj > eo:
            xj = eo
        ext_m[j] = em
        ext_o[j] = eo
        cx[j] = xj
        err_in = xj
    total = sum(ext_m) + sum(ext_o) - sum(cx)
    return ext_m, ext_o, cx, total


def reduce_execution_time(
    task: CompositeTask, budget: float, task_set: TaskSet | None = None
) -> ReductionResult:
    """Reassign the chain's optional parts so total demand fits the budget
    with the least final error, then install the assignment on the task.

    With a task_set the processors are checked before and after: if the new
    assignment pushes a previously healthy processor above utilization 1 the
    assignment collapses to all-mandatory plus whatever optional the last
    stage can still take, and the overloaded processors are reported for the
    utilization-adjustment step.
    """
    if task.depleted:
        raise StateError(f"task {task.id} is depleted and cannot be reduced")
    n = len(task.chain)
    m = [st.spec.mandatory for st in task.chain]
    o = [st.spec.optional for st in task.chain]
    h = [st.spec.mandatory_error_factor for st in task.chain]
    k = [st.spec.optional_error_factor for st in task.chain]
    floors = [st.discarded for st in task.chain]

    before = all_utilizations(task_set) if task_set is not None else {}

    # everything discarded: the least demand this chain can reach
    ext_m_full, _, full_x, _ = _forward(m, o, h, k, [float("inf")] * n)
    mand_total = sum(ext_m_full)
    if mand_total > budget + EPS:
        apply_discards(task, full_x)
        return ReductionResult(
            "Shortage",
            mand_total - budget,
            {st.key: st.assigned_optional for st in task.chain},
            _overloaded(task_set),
            final_error(task),
        )

    x = list(floors)
    ext_m, ext_o, x, total = _forward(m, o, h, k, x)
    need = total - budget

    # free discards: stages whose successor absorbs more than the loss
    if need > EPS and n > 1:
        order = sorted(
            (j for j in range(n - 1) if 1.0 - h[j + 1] - k[j + 1] > EPS),
            key=lambda j: (-(1.0 - h[j + 1] - k[j + 1]), j),
        )
        for _ in range(n):
            progressed = False
            for j in order:
                if need <= EPS:
                    break
                c = 1.0 - h[j + 1] - k[j + 1]
                room = ext_o[j] - x[j]
                if room <= EPS:
                    continue
                x[j] += min(room, need / c)
                ext_m, ext_o, x, total = _forward(m, o, h, k, x)
                need = total - budget
                progressed = True
            if need <= EPS or not progressed:
                break

    if n == 1:
        if need > EPS:
            x[0] = x[0] + need
            ext_m, ext_o, x, total = _forward(m, o, h, k, x)
    else:
        # exact settle on the last two stages; also lets extra discard at
        # n-1 grow the final stage's optional when that dilutes a floor
        a0 = x[n - 2]
        cap_a = ext_o[n - 2]
        xn0 = x[n - 1]
        c = 1.0 - h[n - 1] - k[n - 1]
        cands = {a0, cap_a}
        if c > EPS and need > EPS:
            ab = a0 + need / c
            if a0 < ab < cap_a:
                cands.add(ab)
        if abs(c + k[n - 1]) > EPS:
            af = (xn0 + need + c * a0 - o[n - 1]) / (c + k[n - 1])
            if a0 <= af <= cap_a:
                cands.add(af)
        best = None
        for a in sorted(cands):
            req = xn0 + max(0.0, need - c * (a - a0))
            cap_n = o[n - 1] + k[n - 1] * a
            if req > cap_n + _FEAS:
                continue
            xn = min(req, cap_n)
            err = xn / cap_n if cap_n > EPS else 0.0
            if best is None or err < best[0] - 1e-12:
                best = (err, a, xn)
        if best is None:
            # settle needs the frozen prefix opened up: discard it all
            for j in range(n - 1):
                x[j] = float("inf")
            ext_m, ext_o, x, total = _forward(m, o, h, k, x)
            need = total - budget
            x[n - 1] = x[n - 1] + max(0.0, need)
        else:
            x[n - 2] = best[1]
            x[n - 1] = best[2]
        ext_m, ext_o, x, total = _forward(m, o, h, k, x)

    apply_discards(task, x)

    newly_failed = []
    if task_set is not None:
        after = all_utilizations(task_set)
        newly_failed = [
            pid
            for pid, u in sorted(after.items())
            if u > 1.0 + EPS and before.get(pid, 0.0) <= 1.0 + EPS
        ]
    if newly_failed:
        # keep mandatory everywhere, give the last stage what the budget
        # still covers, and let utilization adjustment clean up
        x3 = [float("inf")] * n
        ext_m3, ext_o3, x3, _ = _forward(m, o, h, k, x3)
        sigma_last = min(ext_o3[n - 1], budget - sum(ext_m3))
        if sigma_last < 0.0:
            sigma_last = 0.0
        x3[n - 1] = ext_o3[n - 1] - sigma_last
        apply_discards(task, x3)
        return ReductionResult(
            "Met",
            0.0,
            {st.key: st.assigned_optional for st in task.chain},
            _overloaded(task_set),
            final_error(task),
        )

    return ReductionResult(
        "Met",
        0.0,
        {st.key: st.assigned_optional for st in task.chain},
        (),
        final_error(task),
    )


def _overloaded(task_set: TaskSet | None) -> tuple[str, ...]:
    if task_set is None:
        return ()
    return tuple(
        pid for pid, u in sorted(all_utilizations(task_set).items()) if u > 1.0 + EPS
    )
