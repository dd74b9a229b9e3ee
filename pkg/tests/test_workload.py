"""Seeded generation and the transient-overload transforms."""

import pytest

from helpers import make_set, make_task, single
from impresched.errors import DomainError, InputError
from impresched.model import task_set_to_dict
from impresched.priority import assign_priorities, mandatory_relevance
from impresched.utilization import all_utilizations
from impresched.workload import (
    GeneratorConfig,
    OverloadPart,
    apply_balanced_overload,
    apply_deadline_reduction,
    apply_frequency_increase,
    apply_task_set_increase,
    apply_unbalanced_overload,
    generate,
    generate_integer_time,
    generator_config_from_dict,
)


def test_seed_determinism():
    cfg = GeneratorConfig(seed=1)
    assert task_set_to_dict(generate(cfg)) == task_set_to_dict(generate(cfg))
    assert task_set_to_dict(generate_integer_time(cfg)) == task_set_to_dict(
        generate_integer_time(cfg)
    )
    other = task_set_to_dict(generate(GeneratorConfig(seed=2)))
    assert other != task_set_to_dict(generate(cfg))


def test_per_processor_target_utilization():
    cfg = GeneratorConfig(
        seed=3, n_tasks=8, n_processors=4, per_processor_target_utilization=0.6
    )
    ts = generate(cfg)
    utils = all_utilizations(ts)
    hosts = {st.spec.processor_id for t in ts.tasks for st in t.chain}
    for pid, u in utils.items():
        assert u <= 0.6 + 1e-6
        if pid in hosts:
            # the simplex split spends the target exactly
            assert u == pytest.approx(0.6)


def test_mandatory_fraction_one_means_mr_one():
    cfg = GeneratorConfig(seed=4, mandatory_fraction_range=(1.0, 1.0))
    ts = generate(cfg)
    for t in ts.tasks:
        assert mandatory_relevance(t) == pytest.approx(1.0)
        assert all(st.spec.optional == 0.0 for st in t.chain)


def test_chain_needs_distinct_processors():
    cfg = GeneratorConfig(seed=1, n_processors=2, max_chain_length=3)
    with pytest.raises(DomainError):
        generate(cfg)
    with pytest.raises(DomainError):
        generate_integer_time(cfg)


def test_config_validation():
    with pytest.raises(InputError):
        GeneratorConfig(per_processor_target_utilization=0.0).validated()
    with pytest.raises(InputError):
        GeneratorConfig(mandatory_fraction_range=(0.0, 0.5)).validated()
    with pytest.raises(InputError):
        GeneratorConfig(period_range=(5.0, 4.0)).validated()
    with pytest.raises(InputError):
        generator_config_from_dict({"seed": "x"})
    with pytest.raises(InputError):
        generator_config_from_dict({"bogus": 1})
    cfg = generator_config_from_dict({"seed": 9, "period_range": [10, 20]})
    assert cfg.seed == 9
    assert cfg.period_range == (10.0, 20.0)


def test_deadline_reduction():
    ts = make_set(["p1"], [single("t", 30, 20, "p1", 2, 1)])
    out = apply_deadline_reduction(ts, 0.3)
    assert out.task("t").deadline == pytest.approx(14.0)
    assert out.task("t").period == 30.0
    assert ts.task("t").deadline == 20.0  # input untouched
    assert apply_deadline_reduction(ts, 0.0).task("t").deadline == 20.0
    assert apply_deadline_reduction(ts, 0.9).task("t").deadline == pytest.approx(2.0)
    for bad in (-0.1, 1.0, 1.5):
        with pytest.raises(DomainError):
            apply_deadline_reduction(ts, bad)


def test_balanced_overload():
    ts = make_set(["p1"], [single("t", 10, 10, "p1", 2, 2)])
    assert task_set_to_dict(apply_balanced_overload(ts, 0.0)) == task_set_to_dict(
        apply_balanced_overload(ts, 1.0)
    )
    doubled = apply_balanced_overload(ts, 2.0)
    st = doubled.task("t").chain[0].spec
    assert (st.mandatory, st.optional) == (4.0, 4.0)
    tripled = apply_balanced_overload(ts, 3.0)
    assert all_utilizations(tripled)["p1"] == pytest.approx(1.2)
    with pytest.raises(DomainError):
        apply_balanced_overload(ts, -1.0)
    # multipliers compose
    composed = apply_balanced_overload(apply_balanced_overload(ts, 2.0), 3.0)
    assert task_set_to_dict(composed) == task_set_to_dict(
        apply_balanced_overload(ts, 6.0)
    )


def test_unbalanced_overload():
    a = single("a", 10, 10, "p1", 1, 3)
    b = single("b", 10, 10, "p2", 2, 3)
    ts = make_set(["p1", "p2"], [a, b])
    out = apply_unbalanced_overload(ts, 2.0, OverloadPart.OPTIONAL_ONLY, 1.0)
    for tid in ("a", "b"):  # fraction 1 selects every processor
        sp = out.task(tid).chain[0].spec
        assert sp.optional == ts.task(tid).chain[0].spec.optional * 2
        assert sp.mandatory == ts.task(tid).chain[0].spec.mandatory

    half = apply_unbalanced_overload(ts, 2.0, OverloadPart.OPTIONAL_ONLY, 0.5)
    touched = [
        tid
        for tid in ("a", "b")
        if half.task(tid).chain[0].spec.optional != ts.task(tid).chain[0].spec.optional
    ]
    assert len(touched) == 1
    again = apply_unbalanced_overload(ts, 2.0, OverloadPart.OPTIONAL_ONLY, 0.5)
    assert task_set_to_dict(half) == task_set_to_dict(again)

    mand_only = make_set(["p1"], [single("m", 10, 10, "p1", 3, 0)])
    out2 = apply_unbalanced_overload(mand_only, 2.0, OverloadPart.MANDATORY_ONLY, 1.0)
    assert out2.task("m").chain[0].spec.mandatory == 6.0
    assert mandatory_relevance(out2.task("m")) == 1.0

    ident = apply_unbalanced_overload(ts, 1.0, OverloadPart.MANDATORY_ONLY, 1.0)
    assert task_set_to_dict(ident) == task_set_to_dict(ts)

    with pytest.raises(DomainError):
        apply_unbalanced_overload(ts, 2.0, OverloadPart.OPTIONAL_ONLY, 0.0)
    with pytest.raises(DomainError):
        apply_unbalanced_overload(ts, 2.0, OverloadPart.OPTIONAL_ONLY, 1.5)


def test_task_set_increase():
    cfg = GeneratorConfig(seed=11, n_tasks=6)
    ts = generate(cfg)
    same = apply_task_set_increase(ts, 0, cfg)
    assert task_set_to_dict(same) == task_set_to_dict(ts)
    grown = apply_task_set_increase(ts, 3, cfg)
    assert len(grown.tasks) == 9
    assert len({t.id for t in grown.tasks}) == 9
    assert len(ts.tasks) == 6  # purity
    twice = apply_task_set_increase(ts, 3, cfg)
    assert task_set_to_dict(grown) == task_set_to_dict(twice)
    with pytest.raises(DomainError):
        apply_task_set_increase(ts, -1, cfg)


def test_added_tasks_rank_high():
    wins = 0
    for seed in range(100):
        cfg = GeneratorConfig(seed=seed, n_tasks=6)
        ts = generate(cfg)
        grown = apply_task_set_increase(ts, 2, cfg)
        ordering = assign_priorities(grown)
        orig = sorted(ordering.task_rank(t.id) for t in ts.tasks)
        median = orig[len(orig) // 2]
        added = [t.id for t in grown.tasks if all(t.id != o.id for o in ts.tasks)]
        if all(ordering.task_rank(tid) < median for tid in added):
            wins += 1
    assert wins >= 90


def test_frequency_increase():
    ts = make_set(["p1"], [single("t", 30, 20, "p1", 2, 1)])
    out = apply_frequency_increase(ts, 0.5)
    assert out.task("t").period == pytest.approx(15.0)
    assert out.task("t").deadline == 20.0
    assert all_utilizations(out)["p1"] == pytest.approx(
        2 * all_utilizations(ts)["p1"]
    )
    ident = apply_frequency_increase(ts, 0.0)
    assert task_set_to_dict(ident) == task_set_to_dict(ts)
    for bad in (-0.1, 1.0):
        with pytest.raises(DomainError):
            apply_frequency_increase(ts, bad)


def test_generated_sets_respect_config_ranges():
    cfg = GeneratorConfig(
        seed=0,
        n_tasks=5,
        n_processors=4,
        max_chain_length=4,
        per_processor_target_utilization=0.7,
        mandatory_fraction_range=(0.3, 0.8),
        period_range=(10.0, 50.0),
        deadline_factor_range=(1.5, 3.0),
    )
    for seed in range(1000):
        ts = generate(
            GeneratorConfig(**{**cfg.__dict__, "seed": seed})
        )
        assert len(ts.tasks) == 5
        for t in ts.tasks:
            assert 10.0 <= t.period <= 50.0
            assert 1.5 - 1e-9 <= t.deadline / t.period <= 3.0 + 1e-9
            assert 1 <= len(t.chain) <= 4
            procs = [st.spec.processor_id for st in t.chain]
            assert len(set(procs)) == len(procs)
            assert set(procs) <= set(ts.processors)
            assert 0.3 - 1e-9 <= mandatory_relevance(t) <= 0.8 + 1e-9
            for st in t.chain:
                assert st.spec.mandatory > 0
                assert st.spec.optional >= 0
                assert st.spec.mandatory_error_factor == cfg.default_h
                assert st.spec.optional_error_factor == cfg.default_k


def test_integer_generation_is_integral():
    for seed in range(50):
        cfg = GeneratorConfig(
            seed=seed,
            n_tasks=4,
            n_processors=3,
            period_range=(4.0, 10.0),
            deadline_factor_range=(1.0, 3.0),
        )
        ts = generate_integer_time(cfg)
        for t in ts.tasks:
            assert t.period.is_integer() and 4 <= t.period <= 10
            assert t.deadline.is_integer() and t.deadline >= 1
            for st in t.chain:
                assert st.spec.mandatory.is_integer() and st.spec.mandatory >= 1
                assert st.spec.optional.is_integer() and st.spec.optional >= 0


def test_integer_generation_needs_an_integer_period():
    cfg = GeneratorConfig(seed=1, period_range=(4.2, 4.8))
    with pytest.raises(DomainError):
        generate_integer_time(cfg)
