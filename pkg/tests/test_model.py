"""Core types: chain arithmetic, validation, serialization."""

import copy
import math

import pytest

from helpers import make_set, make_task, single
from impresched.errors import DomainError, InputError
from impresched.model import (
    EPS,
    SubtaskSpec,
    SubtaskState,
    apply_discards,
    dump_task_set,
    force_all_mandatory,
    iter_subtasks,
    load_task_set,
    refresh_chain,
    subtask_label,
    task_set_from_dict,
    task_set_to_dict,
    total_execution,
    total_mandatory,
    validate,
)


def two_task_set():
    a = make_task("a", 20, 40, [("p1", 2, 1), ("p2", 3, 4)])
    b = make_task("b", 30, 30, [("p2", 4, 0)])
    return make_set(["p1", "p2"], [a, b])


# --- totals -----------------------------------------------------------------


def test_totals_plain():
    t = make_task("t", 20, 20, [("p1", 2, 1), ("p2", 3, 4)])
    assert total_mandatory(t) == 5
    assert total_execution(t) == 10


def test_totals_all_mandatory():
    t = make_task("t", 10, 10, [("p1", 4, 0)])
    assert total_mandatory(t) == 4
    assert total_execution(t) == 4


def test_totals_with_extension():
    # input error 2 on the second stage, h=0.5 k=0.25: M' = 4, O' = 4.5
    t = make_task("t", 20, 20, [("p1", 2, 1), ("p2", 3, 4, 0.5, 0.25)])
    st = t.subtask(2)
    st.input_error = 2.0
    st.extended_mandatory = 3 + 0.5 * 2
    st.extended_optional = 4 + 0.25 * 2
    st.assigned_optional = st.extended_optional
    assert total_mandatory(t) == pytest.approx(6.0)
    assert total_execution(t) == pytest.approx(11.5)


# --- validation -------------------------------------------------------------


def test_validate_clean_set():
    assert validate(two_task_set()) == []


def test_validate_chain_gap():
    t = make_task("t", 10, 10, [("p1", 1, 0), ("p1", 1, 0)])
    object.__setattr__(t.chain[1].spec, "chain_index", 3)
    vs = validate(make_set(["p1"], [t]))
    assert any("1..n" in v.rule for v in vs)


def test_validate_negative_time():
    t = single("t", 10, 10, "p1", -1, 2)
    vs = validate(make_set(["p1"], [t]))
    assert any("negative" in v.rule for v in vs)


def test_validate_unknown_processor():
    t = single("t", 10, 10, "nowhere", 1, 0)
    vs = validate(make_set(["p1"], [t]))
    assert any("processor" in v.rule for v in vs)


def test_validate_duplicate_task_ids():
    ts = make_set(["p1"], [single("t", 10, 10, "p1", 1, 0), single("t", 8, 8, "p1", 1, 0)])
    assert any("duplicate task id" in v.rule for v in validate(ts))


def test_validate_needs_positive_mandatory_total():
    t = single("t", 10, 10, "p1", 0, 3)
    assert any("mandatory total" in v.rule for v in validate(make_set(["p1"], [t])))


def test_validate_assignment_range_and_error_links():
    ts = two_task_set()
    ts.tasks[0].chain[0].assigned_optional = 5.0  # above extended optional 1
    vs = validate(ts)
    assert any("assigned optional" in v.rule for v in vs)

    ts2 = two_task_set()
    ts2.tasks[0].chain[1].input_error = 0.5  # predecessor discarded nothing
    vs2 = validate(ts2)
    assert any("input error" in v.rule or "inconsistent" in v.rule for v in vs2)


def test_validate_depleted_shape():
    ts = two_task_set()
    t = ts.tasks[0]
    t.depleted = True  # without PI=1 / VD=deadline / zero optional
    rules = " | ".join(v.rule for v in validate(ts))
    assert "priority index 1" in rules
    assert "nonzero assigned optional" in rules


def test_validate_pure_and_scale_invariant():
    ts = two_task_set()
    before = task_set_to_dict(ts)
    r1, r2 = validate(ts), validate(ts)
    assert r1 == r2 == []
    assert task_set_to_dict(ts) == before

    bad = make_set(["p1"], [single("t", 10, 10, "p1", -1, 2)])
    for factor in (3.7, 0.25):
        scaled = bad.clone()
        for _, st in iter_subtasks(scaled):
            object.__setattr__(st.spec, "mandatory", st.spec.mandatory * factor)
            object.__setattr__(st.spec, "optional", st.spec.optional * factor)
            st.reset_full()
        assert [v.rule for v in validate(scaled)] == [v.rule for v in validate(bad)]


# --- chain state updates ----------------------------------------------------


def test_apply_discards_forward_recompute():
    t = make_task("t", 20, 20, [("p1", 2, 3), ("p2", 2, 3, 0.5, 1.0)])
    apply_discards(t, [2.0, 1.0])
    s1, s2 = t.chain
    assert s1.discarded == pytest.approx(2.0)
    assert s2.input_error == pytest.approx(2.0)
    assert s2.extended_mandatory == pytest.approx(3.0)
    assert s2.extended_optional == pytest.approx(5.0)
    assert s2.assigned_optional == pytest.approx(4.0)
    assert validate(make_set(["p1", "p2"], [t])) == []


def test_apply_discards_clamps():
    t = make_task("t", 20, 20, [("p1", 2, 3), ("p2", 2, 3)])
    apply_discards(t, [99.0, -5.0])
    assert t.chain[0].discarded == pytest.approx(3.0)
    assert t.chain[1].discarded == pytest.approx(0.0)
    with pytest.raises(DomainError):
        apply_discards(t, [1.0])


def test_refresh_chain_absorbs_only_full_stages():
    t = make_task("t", 20, 20, [("p1", 2, 3), ("p2", 2, 3, 0.0, 1.0)])
    apply_discards(t, [2.0, 0.0])  # stage 2 sits at its full capacity 5
    t.chain[0].assigned_optional = 3.0  # restore stage 1 by hand
    refresh_chain(t)
    assert t.chain[1].extended_optional == pytest.approx(3.0)
    assert t.chain[1].assigned_optional == pytest.approx(3.0)  # absorbed shrink

    t2 = make_task("t2", 20, 20, [("p1", 2, 3), ("p2", 2, 3, 0.0, 1.0)])
    apply_discards(t2, [0.0, 2.0])  # stage 2 deliberately reduced to 1
    t2.chain[0].assigned_optional = 1.0  # now stage 1 discards 2
    refresh_chain(t2)
    assert t2.chain[1].extended_optional == pytest.approx(5.0)
    assert t2.chain[1].assigned_optional == pytest.approx(1.0)  # kept, not regrown


def test_force_all_mandatory_propagates():
    t = make_task("t", 20, 20, [("p1", 2, 3), ("p2", 2, 3, 0.5, 0.25)])
    force_all_mandatory(t)
    assert [st.assigned_optional for st in t.chain] == [0.0, 0.0]
    assert t.chain[1].input_error == pytest.approx(3.0)
    assert t.chain[1].extended_mandatory == pytest.approx(3.5)
    assert total_execution(t) == pytest.approx(2 + 3.5)


def test_reset_full_restores_everything():
    t = make_task("t", 20, 15, [("p1", 2, 3), ("p2", 2, 3, 0.5, 0.25)])
    force_all_mandatory(t)
    t.virtual_deadline = 4.0
    t.depleted = True
    t.reset_full()
    assert t.virtual_deadline == 15.0
    assert not t.depleted
    assert [st.assigned_optional for st in t.chain] == [3.0, 3.0]
    assert t.chain[1].input_error == 0.0


# --- serialization ----------------------------------------------------------


def test_round_trip_dict():
    ts = two_task_set()
    clone = task_set_from_dict(task_set_to_dict(ts))
    assert task_set_to_dict(clone) == task_set_to_dict(ts)
    assert clone.processors == ts.processors
    for a, b in zip(clone.tasks, ts.tasks):
        assert (a.id, a.period, a.deadline) == (b.id, b.period, b.deadline)
        for sa, sb in zip(a.chain, b.chain):
            assert sa.spec == sb.spec


def test_round_trip_file(tmp_path):
    path = tmp_path / "set.json"
    ts = two_task_set()
    dump_task_set(ts, str(path))
    again = load_task_set(str(path))
    assert task_set_to_dict(again) == task_set_to_dict(ts)


def test_from_dict_h_k_defaults_and_overrides():
    doc = {
        "processors": ["p1"],
        "tasks": [
            {
                "id": "t",
                "period": 10,
                "deadline": 10,
                "default_h": 0.25,
                "default_k": 0.5,
                "chain": [
                    {"processor": "p1", "mandatory": 1, "optional": 1},
                    {"processor": "p1", "mandatory": 1, "optional": 1, "h": 0.0, "k": 0.0},
                ],
            }
        ],
    }
    ts = task_set_from_dict(doc)
    s1, s2 = ts.tasks[0].chain
    assert (s1.spec.mandatory_error_factor, s1.spec.optional_error_factor) == (0.25, 0.5)
    assert (s2.spec.mandatory_error_factor, s2.spec.optional_error_factor) == (0.0, 0.0)


def test_from_dict_rejects_junk():
    with pytest.raises(InputError):
        task_set_from_dict({"processors": "p1", "tasks": []})
    with pytest.raises(InputError):
        task_set_from_dict({"processors": ["p1"], "tasks": [{"id": "t", "period": 10}]})
    with pytest.raises(InputError):
        task_set_from_dict(
            {
                "processors": ["p1"],
                "tasks": [
                    {"id": "t", "period": True, "deadline": 5, "chain": [{"processor": "p1", "mandatory": 1, "optional": 0}]}
                ],
            }
        )


def test_misc_accessors():
    ts = two_task_set()
    assert ts.n_tasks == 2 and ts.n_processors == 2 and ts.max_chain_length == 2
    assert len(ts.subtasks_on("p2")) == 2
    with pytest.raises(DomainError):
        ts.subtasks_on("p9")
    with pytest.raises(DomainError):
        ts.task("zz")
    assert subtask_label(("a", 2)) == "a:2"
    assert len(list(iter_subtasks(ts))) == 3
    c = ts.clone()
    c.tasks[0].chain[0].assigned_optional = 0.0
    assert ts.tasks[0].chain[0].assigned_optional == 1.0
