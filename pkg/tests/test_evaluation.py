import json
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest

from altplan import baseline_sequence, expand_jobs, gap, run_pipeline, solve_sequencing
from altplan.evaluation import PERIOD7_NOTE, published_comparison
from altplan.formatting import fmt4, round_half_up, text_table
from altplan.selection import SelectionPlan
from altplan.sequencing import Job, JobKind, JobList

BASELINE = ("4.7700", "12.5654", "24.3896", "33.8028", "48.4722", "56.8720", "70.5882", "103.7037")
OPTIMIZED = ("1.3897", "12.5654", "21.9478", "33.8028", "38.7963", "56.8720", "41.9118", "73.8426")
SOLVER_PLAN_ROW = ("1.3897", "12.0603", "22.3473", "33.8028", "38.7963", "55.8140", "40.5797", "75.0000")


@pytest.fixture(scope="module")
def published_report(inst, published_plan):
    return run_pipeline(inst, published_plan)


def test_round_half_up():
    assert round_half_up(Fraction(1, 8), 2) == Decimal("0.13")
    assert round_half_up(Fraction(-1, 8), 2) == Decimal("-0.13")
    assert fmt4(Fraction(5, 100000)) == "0.0001"
    assert fmt4(2.5) == "2.5000"
    assert fmt4(None) == "--"


def test_text_table_aligns():
    lines = text_table(["a", "bbb"], [["xx", 1]]).splitlines()
    assert len({len(line.rstrip()) for line in lines[:1]}) == 1
    assert lines[0].split() == ["a", "bbb"]


def test_baseline_order(inst, published_plan):
    jobs = expand_jobs(inst, published_plan, 1)
    base = baseline_sequence(jobs)
    assert base.labels == ("TC1", "TC2", "TC5", "TC6", "TC8", "TC10", "TC1-", "TC8-")
    assert fmt4(base.objective_exact) == "4.7700"


def test_baseline_may_breach_precedence():
    jobs = JobList(1, 0, [Job(1, JobKind.PRIMARY, 5, 1, 5), Job(2, JobKind.PRIMARY, 5, 1, 5)], {(1, 0)})
    assert not baseline_sequence(jobs).feasible


def test_gap_values():
    assert fmt4(gap(5.9415, 1.3897)) == "76.6103"
    assert fmt4(gap(307.3171, 41.4216)) == "86.5215"
    assert gap(Fraction(10), Fraction(4)) == Fraction(60)
    assert gap(10, 10) == 0
    assert gap(0, 0) is None
    with pytest.raises(ValueError):
        gap(-1, 0)


def test_gap_with_exact_optimum():
    exact = Fraction(370 * 100, 1065 * 25)
    assert fmt4(gap(Fraction("5.9415"), exact)) == "76.6108"


def test_published_plan_report(published_report):
    assert tuple(fmt4(p.baseline.objective_exact) for p in published_report.periods) == BASELINE
    assert tuple(fmt4(p.optimized.objective_exact) for p in published_report.periods) == OPTIMIZED
    for p in published_report.periods:
        assert p.optimized.objective_exact <= p.baseline.objective_exact
        assert p.gap >= 0
        assert p.optimized.feasible


def test_published_replay(inst):
    replay = published_comparison(inst)
    assert [p.matches for p in replay] == [True] * 6 + [False, True]
    assert fmt4(replay[6].published_order_value.objective_exact) == "41.9118"


def test_solver_plan_report(inst):
    report = run_pipeline(inst)
    assert report.selection_objective == 355
    assert tuple(fmt4(p.optimized.objective_exact) for p in report.periods) == SOLVER_PLAN_ROW
    assert report.original_seconds == int(inst.run_seconds.sum())
    assert report.saved_seconds == report.original_seconds - report.selected_seconds


def test_report_text_and_tables(published_report):
    text = published_report.to_text()
    assert PERIOD7_NOTE in text
    assert "41.9118" in text and "41.4216" in text
    tables = published_report.to_csv_tables()
    assert set(tables) == {"selection", "sequencing", "comparison"}
    assert tables["selection"].splitlines()[-1] == "Total time,1065,955,1060,1065,1080,1055,1020,1080"
    assert tables["sequencing"].splitlines()[-1] == "ObjVal," + ",".join(OPTIMIZED)
    comp = tables["comparison"].splitlines()
    assert comp[1] == "without optimization," + ",".join(BASELINE)


def test_report_json(published_report):
    doc = json.loads(published_report.to_json())
    assert [p["optimized"]["objective_4dp"] for p in doc["periods"]] == list(OPTIMIZED)
    assert doc["selection"]["objective"] == 351
    assert [p["matches"] for p in doc["published"]].count(False) == 1


def test_flags_on_weightless_period(inst, published_plan):
    w = np.array(inst.failures)
    w[:, 0] = 0
    other = inst.replace(failures=w)
    counts = np.array(published_plan.counts)
    counts[:, 0] = np.minimum(counts[:, 0], 1)
    report = run_pipeline(other, SelectionPlan.from_counts(other, counts))
    first = report.periods[0]
    assert "zero_weight" in first.flags and "gap_undefined" in first.flags
    assert not report.notes


def test_pipeline_optimum_matches_solver(inst, published_plan, published_report):
    for p in published_report.periods:
        jobs = expand_jobs(inst, published_plan, p.period)
        assert p.optimized.objective_exact == solve_sequencing(jobs).objective_exact
