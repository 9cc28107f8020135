"""Incremental engines against the reference fixpoint, audit invariants,
and the work-bound bookkeeping."""

import pytest

from cspelim import (ENGINES, MIN_LIVE, NotArcConsistentError, RULES,
                     build_instance, check_engine_precondition, enforce_ac,
                     naive_fixpoint, run_engine)
from cspelim.engines import EngineAudit
from conftest import small_random, star_instance


def ac_instance(seed, **kw):
    inst = small_random(seed, **kw)
    ac, _, ok = enforce_ac(inst)
    return ac if ok else None


def test_engine_registry():
    assert set(ENGINES) == set(RULES)
    for rule, cls in ENGINES.items():
        assert cls.rule == rule


def test_precondition_rejected(bt_inst):
    with pytest.raises(NotArcConsistentError):
        check_engine_precondition(bt_inst)
    with pytest.raises(NotArcConsistentError):
        run_engine(bt_inst, "triangle")
    with pytest.raises(ValueError):
        run_engine(bt_inst, "no-such-rule")


def test_input_instance_left_untouched(star):
    inst = star(4)
    reduced, entries = run_engine(inst, "de-snake")
    assert inst.n == 4
    assert reduced.n == 0
    assert len(entries) == 4


def test_star_eliminates_completely(star):
    # the center goes first, then the now-free leaves one by one
    for rule in ("exists-snake", "de-snake"):
        reduced, entries = run_engine(star(5), rule)
        assert [e.var for e in entries] == [0, 1, 2, 3, 4]
        assert reduced.n == 0


def test_triangle_respects_live_minimum(star):
    reduced, entries = run_engine(star(5), "triangle")
    assert reduced.n == 1
    assert len(entries) == 4
    # leaves go first (the center is justified only once leaves thin out)
    assert entries[0].var == 1


def test_engines_match_reference_fixpoint():
    checked = 0
    for seed in range(150):
        ac = ac_instance(seed, n=6, d=3, p2=0.45)
        if ac is None:
            continue
        checked += 1
        for rule in RULES:
            ref_inst, ref_entries = naive_fixpoint(ac, rule)
            eng_inst, eng_entries = run_engine(ac, rule)
            assert eng_inst == ref_inst, (seed, rule)
            assert eng_entries == ref_entries, (seed, rule)
    assert checked > 100


def test_engines_match_reference_on_denser_instances():
    for seed in range(40):
        ac = ac_instance(seed, n=7, d=4, p1=0.7, p2=0.3)
        if ac is None:
            continue
        for rule in RULES:
            ref_inst, ref_entries = naive_fixpoint(ac, rule)
            eng_inst, eng_entries = run_engine(ac, rule)
            assert eng_inst == ref_inst, (seed, rule)
            assert eng_entries == ref_entries, (seed, rule)


def test_justifiers_are_live_at_elimination_time():
    for seed in range(60):
        ac = ac_instance(seed, n=6, d=3, p2=0.5)
        if ac is None:
            continue
        _, entries = run_engine(ac, "triangle")
        gone = set()
        for entry in entries:
            assert entry.witness.justifier not in gone, seed
            gone.add(entry.var)


def test_update_branches_fire_at_most_once_per_key():
    for rule in RULES:
        seen_any = False
        for seed in range(40):
            ac = ac_instance(seed, n=6, d=3, p2=0.5)
            if ac is None:
                continue
            audit = EngineAudit()
            run_engine(ac, rule, audit=audit)
            if audit.branch_fires:
                seen_any = True
            assert all(count == 1 for count in audit.branch_fires.values()), \
                (rule, seed)
        assert seen_any, rule


def test_candidates_inserted_once(star):
    audit = EngineAudit()
    run_engine(star_instance(5), "exists-snake", audit=audit)
    # the center is certified during initialisation and never re-queued
    phases = [phase for var, phase in audit.insertions if var == 0]
    assert phases == ["init"]
    inserted = [var for var, _ in audit.insertions]
    assert sorted(inserted) == sorted(set(inserted))


def test_work_scales_with_declared_size():
    """Branch firings stay within the table sizes: roughly e*d^2 keys
    for the snake rules and n*e*d^2 for the rest, each hit once."""
    budgets = {
        "exists-snake": lambda n, e, d: e * d * d,
        "de-snake": lambda n, e, d: e * d * d,
        "triangle": lambda n, e, d: n * e * d * d,
        "bt-degree": lambda n, e, d: n * e * d * d,
        "aebtp": lambda n, e, d: n * e * d * d,
    }
    for seed in (1, 2, 3):
        ac = ac_instance(seed, n=12, d=3, p1=0.4, p2=0.4)
        if ac is None:
            continue
        n, e, d = ac.n, ac.e, ac.max_dom_size()
        for rule in RULES:
            audit = EngineAudit()
            run_engine(ac, rule, audit=audit)
            fired = sum(audit.branch_fires.values())
            assert fired <= 4 * budgets[rule](n, e, d), (rule, seed, fired)


def test_empty_and_tiny_instances():
    empty = build_instance([])
    for rule in RULES:
        reduced, entries = run_engine(empty, rule)
        assert reduced.n == 0 and entries == []
    lone = build_instance([[0, 1]])
    for rule in ("triangle", "aebtp", "bt-degree"):
        reduced, entries = run_engine(lone, rule)
        assert reduced.n == 1 and entries == []
    reduced, entries = run_engine(lone, "de-snake")
    assert reduced.n == 0 and [e.var for e in entries] == [0]
