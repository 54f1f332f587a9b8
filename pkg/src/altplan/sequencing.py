"""Ordering the selected runs of one period.

A period's jobs run back to back from the period start.  Each case chosen
once becomes one *primary* job that carries its failure count as a weight and
its original finish time as a due time; a case chosen twice adds a
*duplicate* job that only consumes run time.  The effectiveness index of an
order is

    100 * sum(weight * |completion - due|) / (sum(run) * sum(weight))

over primary jobs in the numerator and all jobs in the run-time sum.  Lower is
better.  :func:`solve_sequencing` minimises it exactly with a dynamic program
over sets of placed jobs.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .errors import GuardExceeded, PrecedenceCycleError, ShapeError
from .formatting import fmt4
from .model import Instance, find_precedence_cycle

__all__ = [
    "JobKind",
    "Job",
    "JobList",
    "Schedule",
    "MilpViolation",
    "MilpReport",
    "expand_jobs",
    "evaluate_schedule",
    "solve_sequencing",
    "brute_force_sequencing",
    "check_milp_constraints",
    "DEFAULT_SEQUENCING_GUARD",
    "MAX_DP_JOBS",
]

DEFAULT_SEQUENCING_GUARD = 10
MAX_DP_JOBS = 24


class JobKind(str, Enum):
    PRIMARY = "primary"
    DUPLICATE = "duplicate"


@dataclass(frozen=True)
class Job:
    case: int
    kind: JobKind
    run: int
    weight: int = 0
    due: int | None = None

    @property
    def label(self) -> str:
        return f"TC{self.case}" + ("-" if self.kind is JobKind.DUPLICATE else "")

    @property
    def key(self) -> tuple:
        return (self.case, self.kind is JobKind.DUPLICATE)


@dataclass(frozen=True)
class JobList:
    """The jobs of one period plus precedence as ``(before, after)`` index pairs."""

    period: int
    start: int
    jobs: tuple
    precedence: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "precedence", frozenset(self.precedence))
        n = len(self.jobs)
        for a, b in self.precedence:
            if not (0 <= a < n and 0 <= b < n):
                raise ShapeError(f"precedence pair {(a, b)} outside 0..{n - 1}")

    def __len__(self) -> int:
        return len(self.jobs)

    @property
    def total_run(self) -> int:
        return sum(job.run for job in self.jobs)

    @property
    def total_weight(self) -> int:
        return sum(job.weight for job in self.jobs)

    @property
    def labels(self) -> tuple:
        return tuple(job.label for job in self.jobs)

    def index_of(self, item) -> int:
        """Resolve a job index, :class:`Job` or label such as ``"TC3-"``."""
        if isinstance(item, Job):
            return self.jobs.index(item)
        if isinstance(item, str):
            try:
                return self.labels.index(item.strip())
            except ValueError:
                raise ShapeError(f"no job labelled {item!r} in period {self.period}") from None
        idx = int(item)
        if not 0 <= idx < len(self.jobs):
            raise ShapeError(f"job index {idx} outside 0..{len(self.jobs) - 1}")
        return idx

    def predecessor_masks(self) -> list:
        masks = [0] * len(self.jobs)
        for a, b in self.precedence:
            masks[b] |= 1 << a
        return masks

    def check_acyclic(self) -> None:
        cycle = find_precedence_cycle(self.precedence)
        if cycle:
            raise PrecedenceCycleError([self.jobs[i].label for i in cycle], period=self.period)


@dataclass(frozen=True)
class Schedule:
    """An order of a :class:`JobList` with completion times and its index value."""

    jobs: JobList
    order: tuple
    completion: tuple
    numerator: int
    denominator: int
    objective_exact: Fraction
    zero_weight: bool = False
    violations: tuple = ()

    @property
    def objective(self) -> float:
        return float(self.objective_exact)

    @property
    def feasible(self) -> bool:
        return not self.violations

    @property
    def labels(self) -> tuple:
        return tuple(self.jobs.jobs[i].label for i in self.order)

    def to_rows(self) -> list:
        return [[pos, self.jobs.jobs[i].label, t]
                for pos, (i, t) in enumerate(zip(self.order, self.completion), start=1)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["order", "job", "completion_s"])
        writer.writerows(self.to_rows())
        writer.writerow(["ObjVal", fmt4(self.objective_exact), ""])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "period": self.jobs.period,
            "order": list(self.labels),
            "completion_s": list(self.completion),
            "numerator": self.numerator,
            "denominator": self.denominator,
            "objective": self.objective,
            "objective_4dp": fmt4(self.objective_exact),
            "zero_weight": self.zero_weight,
            "precedence_violations": [
                [self.jobs.jobs[a].label, self.jobs.jobs[b].label] for a, b in self.violations
            ],
        }


# -- expansion -------------------------------------------------------------


def expand_jobs(inst: Instance, plan, j: int) -> JobList:
    """Turn the period-``j`` column of a selection plan into a job list.

    Job-level precedence: for every pair ``(i, k)`` of the period with both
    cases selected, the primary job of ``i`` precedes every job of ``k``.
    A case whose pairs reach every other case of the instance must open the
    period, so its primary also precedes its own duplicate.  Duplicates are
    never the source of a precedence pair.
    """
    if tuple(plan.case_ids) != inst.case_ids or tuple(plan.period_ids) != inst.period_ids:
        raise ShapeError("selection plan does not belong to this instance")
    col = inst.column(j)
    counts = plan.counts[:, col]
    if counts.min(initial=0) < 0 or counts.max(initial=0) > 2:
        raise ShapeError(f"period {j}: counts must lie in 0..2")

    jobs = []
    for r, cid in enumerate(inst.case_ids):
        x = int(counts[r])
        if x >= 1:
            jobs.append(Job(cid, JobKind.PRIMARY, int(inst.run_seconds[r, col]),
                            int(inst.failures[r, col]), int(inst.original_finish[r, col])))
        if x == 2:
            jobs.append(Job(cid, JobKind.DUPLICATE, int(inst.run_seconds[r, col])))

    primary = {job.case: q for q, job in enumerate(jobs) if job.kind is JobKind.PRIMARY}
    duplicate = {job.case: q for q, job in enumerate(jobs) if job.kind is JobKind.DUPLICATE}
    pairs = inst.precedence_for(j)
    prec = set()
    for a, b in pairs:
        if a == b or a not in primary or b not in primary:
            continue
        prec.add((primary[a], primary[b]))
        if b in duplicate:
            prec.add((primary[a], duplicate[b]))
    everyone = set(inst.case_ids)
    for a in primary:
        followers = {b for s, b in pairs if s == a}
        if a in duplicate and followers >= everyone - {a}:
            prec.add((primary[a], duplicate[a]))
    return JobList(j, inst.period(j).start, jobs, prec)


# -- evaluation ------------------------------------------------------------


def _normalise_order(jobs: JobList, order) -> tuple:
    idx = tuple(jobs.index_of(item) for item in order)
    if sorted(idx) != list(range(len(jobs))):
        raise ShapeError(f"order is not a permutation of the {len(jobs)} jobs of period {jobs.period}")
    return idx


def _index_value(numerator: int, total_run: int, total_weight: int):
    if total_weight == 0 or total_run == 0:
        return Fraction(0), True
    return Fraction(100 * numerator, total_run * total_weight), False


def evaluate_schedule(jobs: JobList, order: Sequence) -> Schedule:
    """Score an order; precedence breaches are reported, not rejected.

    ``order`` lists job indices, :class:`Job` objects or labels.
    """
    idx = _normalise_order(jobs, order)
    t = jobs.start
    completion = []
    numerator = 0
    for q in idx:
        job = jobs.jobs[q]
        t += job.run
        completion.append(t)
        if job.weight:
            numerator += job.weight * abs(t - job.due)
    pos = {q: p for p, q in enumerate(idx)}
    violations = tuple(sorted((a, b) for a, b in jobs.precedence if pos[a] > pos[b]))
    total_run, total_weight = jobs.total_run, jobs.total_weight
    value, zero = _index_value(numerator, total_run, total_weight)
    return Schedule(jobs, idx, tuple(completion), numerator, total_run * total_weight,
                    value, zero, violations)


# -- exact solver ----------------------------------------------------------


def solve_sequencing(jobs: JobList, *, max_jobs: int = MAX_DP_JOBS) -> Schedule:
    """Exact minimiser over precedence-feasible orders.

    Which jobs are already placed fixes the current time, so the least cost
    of finishing from a placed set depends on that set alone.  The table is
    filled over reachable sets; the order is then rebuilt by always taking
    the smallest job index that stays optimal, which yields the
    lexicographically smallest optimal order in (case, primary-first) terms
    because jobs are stored in that order by :func:`expand_jobs`.
    """
    n = len(jobs)
    if n > max_jobs:
        raise GuardExceeded(f"{n} jobs exceeds the sequencing limit of {max_jobs}")
    jobs.check_acyclic()
    preds = jobs.predecessor_masks()
    runs = [job.run for job in jobs.jobs]
    weights = [job.weight for job in jobs.jobs]
    dues = [job.due if job.due is not None else 0 for job in jobs.jobs]
    full = (1 << n) - 1
    start = jobs.start

    best: dict = {full: 0}

    def cost_to_go(mask: int, now: int) -> int:
        got = best.get(mask)
        if got is not None:
            return got
        value = None
        for q in range(n):
            bit = 1 << q
            if mask & bit or preds[q] & ~mask:
                continue
            t = now + runs[q]
            step = weights[q] * abs(t - dues[q]) if weights[q] else 0
            cand = step + cost_to_go(mask | bit, t)
            if value is None or cand < value:
                value = cand
        best[mask] = value
        return value

    cost_to_go(0, start)

    order = []
    mask, now = 0, start
    while mask != full:
        target = best[mask]
        for q in range(n):
            bit = 1 << q
            if mask & bit or preds[q] & ~mask:
                continue
            t = now + runs[q]
            step = weights[q] * abs(t - dues[q]) if weights[q] else 0
            if step + best[mask | bit] == target:
                order.append(q)
                mask, now = mask | bit, t
                break
    schedule = evaluate_schedule(jobs, order)
    assert schedule.numerator == best[0] and not schedule.violations
    return schedule


# -- exhaustive oracle -----------------------------------------------------


def _interchangeable_pairs(jobs: JobList) -> list:
    """Pairs ``(a, b)``, ``a < b``, whose swap never changes any order's value."""
    preds = [set() for _ in jobs.jobs]
    succs = [set() for _ in jobs.jobs]
    for a, b in jobs.precedence:
        preds[b].add(a)
        succs[a].add(b)
    pairs = []
    for a in range(len(jobs)):
        for b in range(a + 1, len(jobs)):
            ja, jb = jobs.jobs[a], jobs.jobs[b]
            if ja.weight or jb.weight or ja.run != jb.run:
                continue
            if preds[a] - {b} == preds[b] - {a} and succs[a] - {b} == succs[b] - {a}:
                pairs.append((a, b))
    return pairs


def brute_force_sequencing(jobs: JobList, guard: int | None = None) -> Schedule:
    """Enumerate every precedence-feasible order and keep the best.

    Orders are generated in increasing lexicographic index order and only a
    strictly better order replaces the incumbent, so ties resolve exactly as
    in :func:`solve_sequencing`.  Weightless jobs with equal run times and
    the same neighbours are interchangeable; only their index-ascending
    arrangement is visited.
    """
    from .selection import oracle_guard

    guard = oracle_guard(DEFAULT_SEQUENCING_GUARD) if guard is None else guard
    n = len(jobs)
    if n > guard:
        raise GuardExceeded(f"{n} jobs exceeds the enumeration guard of {guard}")
    jobs.check_acyclic()
    preds = jobs.predecessor_masks()
    for a, b in _interchangeable_pairs(jobs):
        preds[b] |= 1 << a
    runs = [job.run for job in jobs.jobs]

    best_cost = None
    best_order = None
    order = []

    def visit(mask, now, cost):
        nonlocal best_cost, best_order
        if len(order) == n:
            if best_cost is None or cost < best_cost:
                best_cost, best_order = cost, list(order)
            return
        for q in range(n):
            bit = 1 << q
            if mask & bit or preds[q] & ~mask:
                continue
            job = jobs.jobs[q]
            t = now + runs[q]
            order.append(q)
            visit(mask | bit, t, cost + (job.weight * abs(t - job.due) if job.weight else 0))
            order.pop()

    visit(0, jobs.start, 0)
    return evaluate_schedule(jobs, best_order)


# -- formulation checker ---------------------------------------------------


@dataclass(frozen=True)
class MilpViolation:
    constraint: str
    jobs: tuple
    detail: str

    def __str__(self) -> str:
        return f"{self.constraint} {'/'.join(self.jobs)}: {self.detail}"


@dataclass
class MilpReport:
    big_m: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def by_constraint(self, name: str) -> list:
        return [v for v in self.violations if v.constraint == name]


def check_milp_constraints(jobs: JobList, schedule: Schedule, incidence=None) -> MilpReport:
    """Check a schedule against the linear-ordering, big-M sequencing model.

    ``incidence[i][k]`` is 1 when job ``i`` runs before job ``k``; it is
    derived from ``schedule.order`` unless given.  Checked constraint
    families: ``ordering`` (exactly one direction per pair), ``transitivity``,
    ``precedence``, ``sequencing`` (big-M completion gaps), ``horizon``
    (no completion after period start plus total run time), ``integrality``
    (completion times are nonnegative integers) and ``binary``.
    """
    n = len(jobs)
    labels = jobs.labels
    big_m = jobs.total_run + jobs.start
    if incidence is None:
        pos = {q: p for p, q in enumerate(schedule.order)}
        incidence = [[1 if i != k and pos[i] < pos[k] else 0 for k in range(n)] for i in range(n)]
    x = incidence
    t = [0] * n
    for q, done in zip(schedule.order, schedule.completion):
        t[q] = done
    out = []
    add = lambda name, ids, detail: out.append(  # noqa: E731
        MilpViolation(name, tuple(labels[i] for i in ids), detail))

    for i in range(n):
        for k in range(n):
            if i != k and x[i][k] not in (0, 1):
                add("binary", (i, k), f"x = {x[i][k]}")
    for i in range(n):
        for k in range(i + 1, n):
            if x[i][k] + x[k][i] != 1:
                add("ordering", (i, k), f"x_ik + x_ki = {x[i][k] + x[k][i]}")
    for i in range(n):
        for k in range(n):
            for l in range(n):  # noqa: E741
                if len({i, k, l}) == 3 and x[i][l] < x[i][k] + x[k][l] - 1:
                    add("transitivity", (i, k, l), "x_il < x_ik + x_kl - 1")
    for a, b in sorted(jobs.precedence):
        if x[a][b] != 1:
            add("precedence", (a, b), "required order not kept")
    for i in range(n):
        for k in range(n):
            if i != k and t[k] - t[i] + big_m * (1 - x[i][k]) < jobs.jobs[k].run:
                add("sequencing", (i, k),
                    f"t_k - t_i + M(1 - x_ik) = {t[k] - t[i] + big_m * (1 - x[i][k])} < r_k = {jobs.jobs[k].run}")
    for i in range(n):
        if t[i] > big_m:
            add("horizon", (i,), f"t = {t[i]} > {big_m}")
        if not isinstance(t[i], int) or t[i] < 0:
            add("integrality", (i,), f"t = {t[i]!r}")
    return MilpReport(big_m, out)
