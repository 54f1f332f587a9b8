import random

import numpy as np
import pytest

from altplan import Instance, PeriodSpec, PriorityFactors, PrioritySets, paper_instance
from altplan.fixture import PUBLISHED_SELECTION
from altplan.model import CONDITION_CLASSES
from altplan.selection import SelectionPlan
from altplan.sequencing import Job, JobKind, JobList


@pytest.fixture(scope="session")
def inst():
    return paper_instance()


@pytest.fixture(scope="session")
def published_plan(inst):
    return SelectionPlan.from_counts(inst, PUBLISHED_SELECTION)


def random_instance(rng: random.Random, max_cases=4, max_periods=4, *, factors=None):
    """Small random instance; not guaranteed feasible."""
    n = rng.randint(1, max_cases)
    m = rng.randint(1, max_periods)
    runs = [[rng.randint(5, 60) for _ in range(m)] for _ in range(n)]
    fails = [[rng.choice((0, 0, 0, 1, 2, 5)) for _ in range(m)] for _ in range(n)]
    periods, start = [], 0
    for j in range(1, m + 1):
        col = [runs[i][j - 1] for i in range(n)]
        mandatory = sum(r for r, row in zip(col, fails) if row[j - 1] > 0)
        low = max(1, mandatory, sum(col) // 2)
        limit = rng.randint(low, max(low, sum(col) + max(col)))
        periods.append(PeriodSpec(j, rng.choice(CONDITION_CLASSES), limit, start))
        start += limit
    finish = [[periods[j].start + rng.randint(0, 2 * periods[j].time_limit) for j in range(m)]
              for _ in range(n)]
    ids = list(range(1, n + 1))
    order = ids[:]
    rng.shuffle(order)
    pairs = {(order[a], order[b]) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.3}
    sets = {}
    for j in range(1, m + 1):
        pool = ids[:]
        rng.shuffle(pool)
        cut1, cut2 = sorted(rng.randint(0, n) for _ in range(2))
        sets[j] = PrioritySets(frozenset(pool[:cut1]), frozenset(pool[cut1:cut2]))
    if factors is None:
        factors = PriorityFactors(*(rng.randint(0, 5) for _ in range(4)))
    return Instance(
        periods=periods, case_ids=ids, failures=fails, run_seconds=runs,
        original_finish=finish, precedence={j: pairs for j in range(1, m + 1)},
        priority_sets=sets, priority_factors=factors,
    )


def random_job_list(rng: random.Random, max_jobs=8) -> JobList:
    """Random jobs in (case, primary-first) order with a random precedence DAG."""
    n = rng.randint(1, max_jobs)
    start = rng.randint(0, 500)
    jobs = []
    case = 0
    while len(jobs) < n:
        case += rng.randint(1, 2)
        run = rng.randint(1, 60)
        jobs.append(Job(case, JobKind.PRIMARY, run, rng.choice((0, 0, 1, 2, 3, 7)),
                        start + rng.randint(0, 60 * n)))
        if len(jobs) < n and rng.random() < 0.3:
            jobs.append(Job(case, JobKind.DUPLICATE, run))
    topo = list(range(n))
    rng.shuffle(topo)
    prec = {(topo[a], topo[b]) for a in range(n) for b in range(a + 1, n)
            if rng.random() < 0.15 and jobs[topo[a]].kind is JobKind.PRIMARY}
    return JobList(rng.randint(1, 9), start, jobs, prec)


@pytest.fixture
def rng():
    return random.Random(20240611)


# -- acceptance summary ------------------------------------------------------

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE.items():
        number, _, title = name.removeprefix("test_ac").partition("_")
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {number}: {title.replace('_', ' ')}")


def as_array(rows):
    return np.array(rows, dtype=np.int64)
