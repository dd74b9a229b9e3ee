"""Seeded workload generation and the five transient-overload transforms.

Generation places each chain on consecutive distinct processors (round-robin
from a random start), splits every processor's utilization target across the
stages it hosts with an unbiased uniform simplex split, and divides each
stage's demand into mandatory and optional by a fraction drawn from the
configured range.  Everything is driven by one seeded RNG, so a seed fully
determines the set.

The transforms are pure: they rebuild the task set from scaled copies of the
raw stage parameters and return it in the full (undegraded) configuration.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, InputError
from .model import CompositeTask, SubtaskSpec, SubtaskState, TaskSet


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 1
    n_tasks: int = 6
    n_processors: int = 3
    max_chain_length: int = 3
    per_processor_target_utilization: float = 0.6
    mandatory_fraction_range: tuple[float, float] = (0.4, 0.6)
    period_range: tuple[float, float] = (20.0, 200.0)
    deadline_factor_range: tuple[float, float] = (2.0, 5.0)
    default_h: float = 0.25
    default_k: float = 0.25

    def validated(self) -> "GeneratorConfig":
        if self.n_tasks < 1 or self.n_processors < 1 or self.max_chain_length < 1:
            raise InputError("counts must be at least 1")
        if not 0 < self.per_processor_target_utilization <= 1:
            raise InputError("target utilization must lie in (0, 1]")
        for name, (lo, hi) in (
            ("mandatory_fraction_range", self.mandatory_fraction_range),
            ("period_range", self.period_range),
            ("deadline_factor_range", self.deadline_factor_range),
        ):
            if not lo <= hi:
                raise InputError(f"{name} must be ordered")
        lo, hi = self.mandatory_fraction_range
        if not 0 < lo <= hi <= 1:
            raise InputError("mandatory_fraction_range must sit inside (0, 1]")
        if self.period_range[0] <= 0:
            raise InputError("periods must be positive")
        if self.deadline_factor_range[0] <= 0:
            raise InputError("deadline factors must be positive")
        if self.default_h < 0 or self.default_k < 0:
            raise InputError("error factors must be non-negative")
        return self


def generator_config_from_dict(doc: dict) -> GeneratorConfig:
    if not isinstance(doc, dict):
        raise InputError("generator config must be a JSON object")
    kwargs = {}
    base = GeneratorConfig()
    for f in (
        "seed",
        "n_tasks",
        "n_processors",
        "max_chain_length",
    ):
        if f in doc:
            v = doc[f]
            if isinstance(v, bool) or not isinstance(v, int):
                raise InputError(f"config field {f!r} must be an integer")
            kwargs[f] = v
    for f in ("per_processor_target_utilization", "default_h", "default_k"):
        if f in doc:
            v = doc[f]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InputError(f"config field {f!r} must be a number")
            kwargs[f] = float(v)
    for f in ("mandatory_fraction_range", "period_range", "deadline_factor_range"):
        if f in doc:
            v = doc[f]
            if (
                not isinstance(v, (list, tuple))
                or len(v) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v)
            ):
                raise InputError(f"config field {f!r} must be a [lo, hi] pair")
            kwargs[f] = (float(v[0]), float(v[1]))
    unknown = set(doc) - {
        "seed",
        "n_tasks",
        "n_processors",
        "max_chain_length",
        "per_processor_target_utilization",
        "default_h",
        "default_k",
        "mandatory_fraction_range",
        "period_range",
        "deadline_factor_range",
    }
    if unknown:
        raise InputError(f"unknown config fields: {sorted(unknown)}")
    del base
    return GeneratorConfig(**kwargs).validated()


def _uunifast(rng: random.Random, n: int, total: float) -> list[float]:
    # Bini & Buttazzo's unbiased split of `total` into n shares
    shares = []
    remaining = total
    for i in range(1, n):
        nxt = remaining * rng.random() ** (1.0 / (n - i))
        shares.append(remaining - nxt)
        remaining = nxt
    shares.append(remaining)
    return shares


def generate(config: GeneratorConfig) -> TaskSet:
    """Deterministic task set for config.seed; full configuration."""
    config.validated()
    if config.max_chain_length > config.n_processors:
        raise DomainError("chains need distinct processors: max_chain_length > n_processors")
    rng = random.Random(config.seed)
    processors = [f"p{i}" for i in range(1, config.n_processors + 1)]

    plan = []  # (id, period, deadline, [processor ids])
    for i in range(1, config.n_tasks + 1):
        length = rng.randint(1, config.max_chain_length)
        period = rng.uniform(*config.period_range)
        factor = rng.uniform(*config.deadline_factor_range)
        start = rng.randrange(config.n_processors)
        hosts = [processors[(start + j) % config.n_processors] for j in range(length)]
        plan.append((f"t{i}", period, factor * period, hosts))

    # split each processor's target across the stages it hosts
    hosted: dict[str, list[tuple[int, int]]] = {pid: [] for pid in processors}
    for ti, (_, _, _, hosts) in enumerate(plan):
        for ci, pid in enumerate(hosts):
            hosted[pid].append((ti, ci))
    demand: dict[tuple[int, int], float] = {}
    for pid in processors:
        stages = hosted[pid]
        if not stages:
            continue
        shares = _uunifast(rng, len(stages), config.per_processor_target_utilization)
        for (ti, ci), share in zip(stages, shares):
            demand[(ti, ci)] = share * plan[ti][1]

    tasks = []
    for ti, (tid, period, deadline, hosts) in enumerate(plan):
        chain = []
        for ci, pid in enumerate(hosts):
            c = demand[(ti, ci)]
            f = rng.uniform(*config.mandatory_fraction_range)
            chain.append(
                SubtaskState(
                    SubtaskSpec(
                        composite_id=tid,
                        chain_index=ci + 1,
                        processor_id=pid,
                        mandatory=f * c,
                        optional=(1.0 - f) * c,
                        mandatory_error_factor=config.default_h,
                        optional_error_factor=config.default_k,
                    )
                )
            )
        tasks.append(
            CompositeTask(
                id=tid,
                period=period,
                deadline=deadline,
                chain=chain,
                default_h=config.default_h,
                default_k=config.default_k,
            )
        )
    return TaskSet(processors=processors, tasks=tasks)


def generate_integer_time(config: GeneratorConfig) -> TaskSet:
    """Like generate(), with integer periods, deadlines, and stage demands.

    Meant for simulator cross-checks, where integral times keep event
    arithmetic exact and hyperperiods reasonable.  Stage demand rounds down
    but never below 1, so tiny shares can push a processor slightly past the
    target."""
    config.validated()
    if config.max_chain_length > config.n_processors:
        raise DomainError("chains need distinct processors: max_chain_length > n_processors")
    lo, hi = config.period_range
    if math.floor(hi) < math.ceil(lo):
        raise DomainError("period_range holds no integer")
    rng = random.Random(config.seed)
    processors = [f"p{i}" for i in range(1, config.n_processors + 1)]

    plan = []
    for i in range(1, config.n_tasks + 1):
        length = rng.randint(1, config.max_chain_length)
        period = rng.randint(math.ceil(lo), math.floor(hi))
        factor = rng.uniform(*config.deadline_factor_range)
        start = rng.randrange(config.n_processors)
        hosts = [processors[(start + j) % config.n_processors] for j in range(length)]
        deadline = max(1, round(factor * period))
        plan.append((f"t{i}", float(period), float(deadline), hosts))

    hosted: dict[str, list[tuple[int, int]]] = {pid: [] for pid in processors}
    for ti, (_, _, _, hosts) in enumerate(plan):
        for ci, pid in enumerate(hosts):
            hosted[pid].append((ti, ci))
    demand: dict[tuple[int, int], float] = {}
    for pid in processors:
        stages = hosted[pid]
        if not stages:
            continue
        shares = _uunifast(rng, len(stages), config.per_processor_target_utilization)
        for (ti, ci), share in zip(stages, shares):
            demand[(ti, ci)] = float(max(1, math.floor(share * plan[ti][1])))

    tasks = []
    for ti, (tid, period, deadline, hosts) in enumerate(plan):
        chain = []
        for ci, pid in enumerate(hosts):
            c = demand[(ti, ci)]
            f = rng.uniform(*config.mandatory_fraction_range)
            m = float(max(1, min(int(c), round(f * c))))
            chain.append(
                SubtaskState(
                    SubtaskSpec(
                        composite_id=tid,
                        chain_index=ci + 1,
                        processor_id=pid,
                        mandatory=m,
                        optional=c - m,
                        mandatory_error_factor=config.default_h,
                        optional_error_factor=config.default_k,
                    )
                )
            )
        tasks.append(
            CompositeTask(
                id=tid,
                period=period,
                deadline=deadline,
                chain=chain,
                default_h=config.default_h,
                default_k=config.default_k,
            )
        )
    return TaskSet(processors=processors, tasks=tasks)


# ---------------------------------------------------------------------------
# transient-overload transforms


class OverloadPart(Enum):
    OPTIONAL_ONLY = "optional"
    MANDATORY_ONLY = "mandatory"


def _rebuild(
    task_set: TaskSet,
    stage_scale,  # (task, spec) -> (mandatory, optional)
    period_of=lambda t: t.period,
    deadline_of=lambda t: t.deadline,
) -> TaskSet:
    tasks = []
    for t in task_set.tasks:
        chain = []
        for st in t.chain:
            m, o = stage_scale(t, st.spec)
            chain.append(
                SubtaskState(
                    SubtaskSpec(
                        composite_id=st.spec.composite_id,
                        chain_index=st.spec.chain_index,
                        processor_id=st.spec.processor_id,
                        mandatory=m,
                        optional=o,
                        mandatory_error_factor=st.spec.mandatory_error_factor,
                        optional_error_factor=st.spec.optional_error_factor,
                    )
                )
            )
        tasks.append(
            CompositeTask(
                id=t.id,
                period=period_of(t),
                deadline=deadline_of(t),
                chain=chain,
                default_h=t.default_h,
                default_k=t.default_k,
            )
        )
    return TaskSet(processors=list(task_set.processors), tasks=tasks)


def apply_deadline_reduction(task_set: TaskSet, percent: float) -> TaskSet:
    if not 0 <= percent < 1:
        raise DomainError("deadline reduction percent must lie in [0, 1)")
    return _rebuild(
        task_set,
        lambda t, sp: (sp.mandatory, sp.optional),
        deadline_of=lambda t: t.deadline * (1.0 - percent),
    )


def apply_balanced_overload(task_set: TaskSet, scale: float) -> TaskSet:
    if scale < 0:
        raise DomainError("negative scale")
    s = max(scale, 1.0)
    return _rebuild(task_set, lambda t, sp: (sp.mandatory * s, sp.optional * s))


def apply_unbalanced_overload(
    task_set: TaskSet,
    scale: float,
    part: OverloadPart,
    target_fraction: float,
    selection_seed: int = 1,
) -> TaskSet:
    """Scale one part (mandatory or optional) on a seeded subset of
    processors covering ceil(target_fraction * P) of them."""
    if scale < 0:
        raise DomainError("negative scale")
    n_sel = math.ceil(target_fraction * len(task_set.processors))
    if n_sel < 1 or n_sel > len(task_set.processors):
        raise DomainError("processor selection is empty or out of range")
    rng = random.Random(selection_seed)
    chosen = set(rng.sample(sorted(task_set.processors), n_sel))
    s = max(scale, 1.0)

    def scale_stage(t, sp):
        if sp.processor_id not in chosen:
            return sp.mandatory, sp.optional
        if part is OverloadPart.OPTIONAL_ONLY:
            return sp.mandatory, sp.optional * s
        return sp.mandatory * s, sp.optional

    return _rebuild(task_set, scale_stage)


def apply_task_set_increase(
    task_set: TaskSet, extra: int, config: GeneratorConfig
) -> TaskSet:
    """Append `extra` freshly generated tasks biased toward high GMR rank.

    The new tasks draw deadline factors from the bottom decile and periods
    from the bottom third of the configured ranges, and together carry about
    extra/n_tasks of the original per-processor load.
    """
    if extra < 0:
        raise DomainError("extra must be non-negative")
    out = _rebuild(task_set, lambda t, sp: (sp.mandatory, sp.optional))
    if extra == 0:
        return out
    config.validated()
    rng = random.Random(config.seed * 1_000_003 + 10_007 * extra + 1)
    processors = list(out.processors)
    n_proc = len(processors)
    if config.max_chain_length > n_proc:
        raise DomainError("chains need distinct processors: max_chain_length > n_processors")

    d_lo, d_hi = config.deadline_factor_range
    p_lo, p_hi = config.period_range
    added_target = config.per_processor_target_utilization * extra / config.n_tasks

    existing = {t.id for t in out.tasks}
    plan = []
    for i in range(1, extra + 1):
        tid = f"t{len(task_set.tasks) + i}"
        while tid in existing:
            tid += "x"
        existing.add(tid)
        length = rng.randint(1, config.max_chain_length)
        period = rng.uniform(p_lo, p_lo + (p_hi - p_lo) / 3.0)
        factor = rng.uniform(d_lo, d_lo + (d_hi - d_lo) / 10.0)
        start = rng.randrange(n_proc)
        hosts = [processors[(start + j) % n_proc] for j in range(length)]
        plan.append((tid, period, factor * period, hosts))

    hosted: dict[str, list[tuple[int, int]]] = {pid: [] for pid in processors}
    for ti, (_, _, _, hosts) in enumerate(plan):
        for ci, pid in enumerate(hosts):
            hosted[pid].append((ti, ci))
    demand: dict[tuple[int, int], float] = {}
    for pid in processors:
        stages = hosted[pid]
        if not stages:
            continue
        shares = _uunifast(rng, len(stages), added_target)
        for (ti, ci), share in zip(stages, shares):
            demand[(ti, ci)] = share * plan[ti][1]

    for ti, (tid, period, deadline, hosts) in enumerate(plan):
        chain = []
        for ci, pid in enumerate(hosts):
            c = demand[(ti, ci)]
            f = rng.uniform(*config.mandatory_fraction_range)
            chain.append(
                SubtaskState(
                    SubtaskSpec(
                        composite_id=tid,
                        chain_index=ci + 1,
                        processor_id=pid,
                        mandatory=f * c,
                        optional=(1.0 - f) * c,
                        mandatory_error_factor=config.default_h,
                        optional_error_factor=config.default_k,
                    )
                )
            )
        out.tasks.append(
            CompositeTask(
                id=tid,
                period=period,
                deadline=deadline,
                chain=chain,
                default_h=config.default_h,
                default_k=config.default_k,
            )
        )
    return out


def apply_frequency_increase(task_set: TaskSet, percent: float) -> TaskSet:
    if not 0 <= percent < 1:
        raise DomainError("frequency increase percent must lie in [0, 1)")
    return _rebuild(
        task_set,
        lambda t, sp: (sp.mandatory, sp.optional),
        period_of=lambda t: t.period * (1.0 - percent),
    )
