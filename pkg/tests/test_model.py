import numpy as np
import pytest

from altplan import (
    ConditionClass,
    Instance,
    PrioritySets,
    UnknownPeriodError,
    condition_class,
    effective_set,
    priority_partition,
    validate,
)
from altplan.fixture import FAILURES, ORIGINAL_FINISH, RUN_SECONDS


def test_fixture_shape_and_times(inst):
    assert inst.n_periods == 8 and inst.n_cases == 10
    assert {p.time_limit for p in inst.periods} == {1080}
    assert [p.start for p in inst.periods] == [1080 * (j - 1) for j in range(1, 9)]
    assert inst.period(8).start == 7560
    assert inst.run_seconds[inst.row(10), inst.column(1)] == 400


def test_fixture_tables_cell_for_cell(inst):
    assert inst.failures.tolist() == [list(r) for r in FAILURES]
    assert inst.run_seconds.tolist() == [list(r) for r in RUN_SECONDS]
    assert inst.original_finish.tolist() == [list(r) for r in ORIGINAL_FINISH]


def test_fixture_is_valid(inst):
    assert validate(inst) == []


def test_fixture_run_times_fill_original_grid(inst):
    # every period's cases were originally back to back on a 1200 s grid
    for c, j in enumerate(inst.period_ids):
        assert inst.run_seconds[:, c].sum() == inst.original_finish[-1, c] - 1200 * (j - 1)


def test_fixture_precedence_and_priority(inst):
    for j in inst.period_ids:
        pairs = inst.precedence_for(j)
        assert (3, 8) in pairs
        assert {(1, k) for k in range(2, 11)} <= pairs
        assert (1, 1) not in pairs
        assert inst.priority_sets_for(j) == PrioritySets(frozenset({8}), frozenset({9, 10}))
    assert tuple(inst.priority_factors) == (4, 3, 2, 1)


def test_matrices_are_read_only(inst):
    with pytest.raises(ValueError):
        inst.failures[0, 0] = 5


@pytest.mark.parametrize("j, expected", [(1, {1, 5, 6, 8, 10}), (6, {1})])
def test_effective_set(inst, j, expected):
    assert effective_set(inst, j) == expected


def test_effective_set_matches_direct_scan(inst):
    for c, j in enumerate(inst.period_ids):
        assert effective_set(inst, j) == {i + 1 for i in range(10) if FAILURES[i][c] >= 1}


def test_effective_set_all_zero_column(inst):
    w = np.array(inst.failures)
    w[:, 2] = 0
    assert effective_set(inst.replace(failures=w), 3) == frozenset()


def test_unknown_period(inst):
    with pytest.raises(UnknownPeriodError):
        effective_set(inst, 9)
    with pytest.raises(UnknownPeriodError):
        condition_class(inst, 0)


@pytest.mark.parametrize("j, label", [(1, "LTLV"), (4, "HTHV"), (5, "LTLV"), (2, "HTLV"), (7, "LTHV")])
def test_condition_class(inst, j, label):
    assert condition_class(inst, j) == ConditionClass.parse(label)
    assert str(condition_class(inst, j)) == label


def _partition_oracle(j):
    """Set arithmetic straight from the failure table with B = {8}, Gamma = {9, 10}."""
    everyone = set(range(1, 11))
    eff = {i + 1 for i in range(10) if FAILURES[i][j - 1] > 0}
    b = {8} - eff
    g = {9, 10} - eff
    return eff, b, g, everyone - eff - b - g


def test_priority_partition_examples(inst):
    assert priority_partition(inst, 1).tiers() == ({1, 5, 6, 8, 10}, set(), {9}, {2, 3, 4, 7})
    assert priority_partition(inst, 2).tiers() == ({1}, {8}, {9, 10}, {2, 3, 4, 5, 6, 7})
    for j in inst.period_ids:
        assert priority_partition(inst, j).tiers() == _partition_oracle(j)


def test_priority_partition_all_effective(inst):
    w = np.ones_like(inst.failures)
    part = priority_partition(inst.replace(failures=w), 3)
    assert part.tiers() == (set(range(1, 11)), set(), set(), set())


def test_validate_flags_negative_failure(inst):
    w = np.array(inst.failures)
    w[0, 0] = -1
    diags = validate(inst.replace(failures=w))
    assert len(diags) == 1
    d = diags[0]
    assert (d.field, d.period, d.case) == ("failures", 1, 1)


def test_validate_flags_overlapping_priority_sets(inst):
    sets = dict(inst.priority_sets)
    sets[3] = PrioritySets(frozenset({8, 9}), frozenset({9, 10}))
    diags = validate(inst.replace(priority_sets=sets))
    assert [(d.field, d.period, d.case) for d in diags] == [("priority_sets", 3, 9)]


def test_validate_flags_cycle_and_bad_times(inst):
    prec = dict(inst.precedence)
    prec[2] = {(1, 2), (2, 1)}
    periods = list(inst.periods)
    periods[1] = periods[1].__class__(2, periods[1].condition, 0, 0)
    r = np.array(inst.run_seconds)
    r[4, 4] = 0
    diags = validate(inst.replace(precedence=prec, periods=periods, run_seconds=r))
    fields = sorted(d.field for d in diags)
    assert "precedence" in fields
    assert "periods.time_limit_s" in fields
    assert "periods.start_s" in fields
    assert "run_seconds" in fields
    cycle = next(d for d in diags if d.field == "precedence")
    assert cycle.period == 2 and "cycle" in cycle.message


def test_validate_unknown_precedence_case(inst):
    prec = {1: {(1, 42)}}
    diags = validate(inst.replace(precedence=prec))
    assert any(d.case == 42 for d in diags)


def test_validate_shape_mismatch(inst):
    diags = validate(inst.replace(failures=np.zeros((10, 7), dtype=int)))
    assert diags and diags[0].field == "failures"


def test_restrict_keeps_ids_and_filters_relations(inst):
    sub = inst.restrict(cases=[1, 3, 8], periods=[2, 7])
    assert sub.case_ids == (1, 3, 8)
    assert sub.period_ids == (2, 7)
    assert sub.period(7).start == 6480
    assert sub.precedence_for(2) == {(1, 3), (1, 8), (3, 8)}
    assert sub.priority_sets_for(7) == PrioritySets(frozenset({8}), frozenset())
    assert sub.run_seconds.tolist() == [[190, 200], [150, 200], [10, 10]]
    assert validate(sub) == []


def test_instance_equality(inst):
    assert inst == inst.replace()
    assert inst != inst.replace(priority_factors=(4, 3, 2, 0))
    assert isinstance(inst, Instance)
