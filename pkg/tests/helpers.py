"""Terse constructors for hand-built task sets used across the tests."""

from __future__ import annotations

from impresched.model import CompositeTask, SubtaskSpec, SubtaskState, TaskSet


def chain_of(tid: str, specs) -> list[SubtaskState]:
    """specs: sequence of (processor, mandatory, optional[, h[, k]])."""
    out = []
    for j, s in enumerate(specs, start=1):
        proc, m, o = s[0], s[1], s[2]
        h = s[3] if len(s) > 3 else 0.0
        k = s[4] if len(s) > 4 else 0.0
        out.append(
            SubtaskState(
                SubtaskSpec(
                    composite_id=tid,
                    chain_index=j,
                    processor_id=proc,
                    mandatory=float(m),
                    optional=float(o),
                    mandatory_error_factor=float(h),
                    optional_error_factor=float(k),
                )
            )
        )
    return out


def make_task(tid: str, period, deadline, specs, vd=None) -> CompositeTask:
    t = CompositeTask(
        id=tid,
        period=float(period),
        deadline=float(deadline),
        chain=chain_of(tid, specs),
    )
    if vd is not None:
        t.virtual_deadline = float(vd)
    return t


def make_set(processors, tasks) -> TaskSet:
    return TaskSet(processors=list(processors), tasks=list(tasks))


def single(tid: str, period, deadline, proc, m, o, h=0.0, k=0.0) -> CompositeTask:
    return make_task(tid, period, deadline, [(proc, m, o, h, k)])
