"""Choosing how many times each test case runs in each period.

Every case gets an integer count per period.  Effective cases (those with a
recorded failure in that period) run once or twice; all others zero or once.
Each period must fit its time budget, and every case must run at least once
under every temperature/voltage condition present in the instance.  Among
feasible plans we maximise the failure-weighted count plus a per-unit bonus
that depends on the case's priority tier.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import GuardExceeded, Infeasible, ShapeError
from .model import Instance

__all__ = [
    "SelectionPlan",
    "Violation",
    "SelectionReport",
    "selection_objective",
    "check_selection",
    "solve_selection",
    "brute_force_selection",
    "DEFAULT_SELECTION_GUARD",
    "oracle_guard",
    "plan_from_dict",
]

logger = logging.getLogger(__name__)

DEFAULT_SELECTION_GUARD = 10**8
GUARD_ENV = "ALTPLAN_GUARD"


def oracle_guard(default: int) -> int:
    """Size guard for the exhaustive oracles, overridable via ``ALTPLAN_GUARD``."""
    raw = os.environ.get(GUARD_ENV)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{GUARD_ENV} must be an integer, got {raw!r}") from None


def _exact(value):
    """Integers stay integers; other reals become exact fractions."""
    if isinstance(value, (int, np.integer)):
        return int(value)
    if float(value).is_integer():
        return int(value)
    return Fraction(value)


def _as_number(value):
    return value if isinstance(value, int) else float(value)


@dataclass(frozen=True, eq=False)
class SelectionPlan:
    """Run counts ``counts[case_row, period_col]`` with their objective and period totals."""

    case_ids: tuple
    period_ids: tuple
    counts: np.ndarray
    objective_exact: int | Fraction
    period_totals: tuple

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "case_ids", tuple(self.case_ids))
        object.__setattr__(self, "period_ids", tuple(self.period_ids))
        object.__setattr__(self, "period_totals", tuple(int(t) for t in self.period_totals))

    @classmethod
    def from_counts(cls, inst: Instance, counts) -> "SelectionPlan":
        x = _as_counts(inst, counts)
        totals = (inst.run_seconds * x).sum(axis=0)
        return cls(inst.case_ids, inst.period_ids, x,
                   selection_objective(inst, x, exact=True), tuple(totals))

    @property
    def objective(self) -> float:
        return float(self.objective_exact)

    def count(self, case: int, period: int) -> int:
        return int(self.counts[self.case_ids.index(case), self.period_ids.index(period)])

    def __eq__(self, other):
        if not isinstance(other, SelectionPlan):
            return NotImplemented
        return (self.case_ids == other.case_ids and self.period_ids == other.period_ids
                and np.array_equal(self.counts, other.counts)
                and self.objective_exact == other.objective_exact)

    __hash__ = None

    def to_rows(self) -> list[list]:
        """Table rows: one per case, then the per-period total time."""
        rows = [[f"TC{cid}", *map(int, row)] for cid, row in zip(self.case_ids, self.counts)]
        rows.append(["Total time", *self.period_totals])
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["Test Case", *(f"Period{j}" for j in self.period_ids)])
        writer.writerows(self.to_rows())
        writer.writerow(["Objective", _format_objective(self.objective_exact)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "periods": list(self.period_ids),
            "test_cases": list(self.case_ids),
            "counts": self.counts.tolist(),
            "period_totals_s": list(self.period_totals),
            "objective": _as_number(self.objective_exact),
        }


def plan_from_dict(inst: Instance, doc: dict) -> SelectionPlan:
    """Rebuild a plan written by :meth:`SelectionPlan.to_dict` for ``inst``."""
    try:
        periods, cases, counts = doc["periods"], doc["test_cases"], doc["counts"]
    except (KeyError, TypeError) as exc:
        raise ShapeError(f"plan document lacks {exc}") from None
    if tuple(periods) != inst.period_ids or tuple(cases) != inst.case_ids:
        raise ShapeError("plan periods / test cases do not match the instance")
    return SelectionPlan.from_counts(inst, counts)


def _format_objective(value) -> str:
    return str(value) if isinstance(value, int) else f"{float(value):.4f}"


def _as_counts(inst: Instance, x) -> np.ndarray:
    arr = np.asarray(x)
    if arr.shape != (inst.n_cases, inst.n_periods):
        raise ShapeError(f"counts shape {arr.shape} does not match "
                         f"({inst.n_cases} cases, {inst.n_periods} periods)")
    if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ShapeError("counts must be integers")
    arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise ShapeError("counts must be nonnegative")
    return arr


def _unit_values(inst: Instance) -> list[list]:
    """Exact objective gain per unit of each count, ``[case_row][period_col]``."""
    factors = [_exact(p) for p in inst.priority_factors]
    values = [[0] * inst.n_periods for _ in range(inst.n_cases)]
    for c, j in enumerate(inst.period_ids):
        for tier, factor in zip(inst.priority_partition(j).tiers(), factors):
            for cid in tier:
                r = inst.row(cid)
                values[r][c] = int(inst.failures[r, c]) + factor
    return values


def selection_objective(inst: Instance, x, *, exact: bool = False):
    """Failure-weighted count plus tiered priority bonus; feasibility is not checked."""
    x = _as_counts(inst, x)
    factors = [_exact(p) for p in inst.priority_factors]
    total = int((inst.failures * x).sum())
    for c, j in enumerate(inst.period_ids):
        for tier, factor in zip(inst.priority_partition(j).tiers(), factors):
            total += factor * sum(int(x[inst.row(cid), c]) for cid in tier)
    return total if exact else float(total)


@dataclass(frozen=True)
class Violation:
    """A violated constraint.  ``slack`` is negative by the amount of the violation."""

    constraint: str
    period: int | None
    case: int | None
    slack: int
    condition: str | None = None

    def __str__(self) -> str:
        parts = [self.constraint]
        if self.period is not None:
            parts.append(f"period={self.period}")
        if self.case is not None:
            parts.append(f"case={self.case}")
        if self.condition is not None:
            parts.append(f"condition={self.condition}")
        parts.append(f"slack={self.slack}")
        return " ".join(parts)


@dataclass
class SelectionReport:
    violations: list = field(default_factory=list)
    period_totals: tuple = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


def check_selection(inst: Instance, x) -> SelectionReport:
    """List every violated selection constraint.

    Constraint names: ``time_limit``, ``effective_inclusion`` (effective
    case below one run), ``coverage`` (case never run under a condition),
    ``duplicate_limit`` (effective case above two runs) and ``binary``
    (non-effective case above one run).
    """
    x = _as_counts(inst, x)
    out = []
    totals = tuple(int(t) for t in (inst.run_seconds * x).sum(axis=0))
    for c, p in enumerate(inst.periods):
        if totals[c] > p.time_limit:
            out.append(Violation("time_limit", p.index, None, p.time_limit - totals[c]))
        effective = inst.effective_set(p.index)
        for r, cid in enumerate(inst.case_ids):
            v = int(x[r, c])
            if cid in effective:
                if v < 1:
                    out.append(Violation("effective_inclusion", p.index, cid, v - 1))
                if v > 2:
                    out.append(Violation("duplicate_limit", p.index, cid, 2 - v))
            elif v > 1:
                out.append(Violation("binary", p.index, cid, 1 - v))
    for cond, js in inst.periods_by_condition().items():
        cols = [inst.column(j) for j in js]
        for r, cid in enumerate(inst.case_ids):
            got = int(x[r, cols].sum())
            if got < 1:
                out.append(Violation("coverage", None, cid, got - 1, str(cond)))
    return SelectionReport(out, totals)


# -- exact solver ---------------------------------------------------------


@dataclass
class _Prepared:
    values: list          # exact unit values [row][col]
    caps: list            # per-column capacity left after the mandatory runs
    base_value: object    # objective contributed by the mandatory runs
    lower: np.ndarray     # mandatory counts (1 for effective, else 0)
    requirements: list    # coverage requirements still open: list of var lists


def _prepare(inst: Instance) -> _Prepared:
    values = _unit_values(inst)
    lower = np.zeros((inst.n_cases, inst.n_periods), dtype=np.int64)
    caps = []
    base_value = 0
    for c, p in enumerate(inst.periods):
        used = 0
        for cid in sorted(inst.effective_set(p.index)):
            r = inst.row(cid)
            lower[r, c] = 1
            used += int(inst.run_seconds[r, c])
            base_value += values[r][c]
        if used > p.time_limit:
            raise Infeasible(
                "effective_inclusion",
                f"period {p.index}: effective cases need {used} s but the limit is {p.time_limit} s",
                period=p.index,
            )
        caps.append(p.time_limit - used)

    groups = inst.periods_by_condition()
    missing = 4 - len(groups)
    if missing > 0:
        logger.warning("%d condition class(es) have no periods; their coverage is skipped", missing)
    requirements = []
    for cond, js in groups.items():
        cols = [inst.column(j) for j in js]
        for r, cid in enumerate(inst.case_ids):
            if any(lower[r, c] for c in cols):
                continue
            reachable = [(r, c) for c in cols if inst.run_seconds[r, c] <= caps[c]]
            if not reachable:
                raise Infeasible(
                    "coverage",
                    f"case {cid} cannot run under {cond}: no period of that condition has room",
                    case=cid, condition=str(cond),
                )
            requirements.append([(r, c) for c in cols])
    return _Prepared(values, caps, base_value, lower, requirements)


def solve_selection(inst: Instance) -> SelectionPlan:
    """Exact maximiser by depth-first branch and bound.

    Coverage only ties together periods that share a condition class, while
    the objective and time limits are per period, so each condition class is
    an independent block and is solved on its own.  Within a block,
    variables are visited period by period, case by case, trying the larger
    count first.  The bound at a node is the current value plus, for every
    unfinished period, the exact 0/1 knapsack optimum of its open variables
    with coverage dropped (tabulated once up front).  Only strictly better
    plans replace the incumbent, so each block returns its lexicographically
    greatest optimum, and so does the assembled plan.
    """
    prep = _prepare(inst)
    x = prep.lower.copy()
    total = prep.base_value
    for cond, js in inst.periods_by_condition().items():
        cols = sorted(inst.column(j) for j in js)
        members = set(cols)
        reqs = [req for req in prep.requirements if req[0][1] in members]
        value, extra = _solve_block(inst, prep, cols, reqs)
        if extra is None:
            raise Infeasible(
                "coverage",
                f"no selection covers every case under {cond} within the period time limits",
                condition=str(cond),
            )
        total += value
        for (r, c), v in extra.items():
            x[r, c] += v
    plan = SelectionPlan.from_counts(inst, x)
    assert plan.objective_exact == total
    return plan


def _solve_block(inst: Instance, prep: _Prepared, cols: list, requirements: list):
    """Branch and bound over the optional runs of the given columns.

    Each (case, period) carries one binary "extra run": the second run of an
    effective case or the only run of any other case.  Returns the best
    extra value and the chosen extras, or ``(None, None)`` if infeasible.
    """
    n_rows = inst.n_cases
    run = inst.run_seconds
    order = [(r, c) for c in cols for r in range(n_rows)]
    var_of = {rc: k for k, rc in enumerate(order)}
    weight = [int(run[r, c]) for r, c in order]
    gain = [prep.values[r][c] for r, c in order]
    caps = [prep.caps[c] for c in cols]
    n_blocks = len(cols)

    # knapsack[b][q][room]: best gain from rows q.. of the b-th column
    knapsack = []
    for b in range(n_blocks):
        tables = [[0] * (caps[b] + 1)]
        for r in range(n_rows - 1, -1, -1):
            k = b * n_rows + r
            nxt = tables[-1]
            cur = list(nxt)
            w, g = weight[k], gain[k]
            for room in range(w, caps[b] + 1):
                cand = nxt[room - w] + g
                if cand > cur[room]:
                    cur[room] = cand
            tables.append(cur)
        tables.reverse()
        knapsack.append(tables)

    suffix = [0] * (n_blocks + 1)
    for b in range(n_blocks - 1, -1, -1):
        suffix[b] = suffix[b + 1] + knapsack[b][0][caps[b]]

    # per requirement: how many of its variables are still undecided / set to 1
    req_of_var = [[] for _ in order]
    open_count = []
    for q, req in enumerate(requirements):
        open_count.append(len(req))
        for rc in req:
            req_of_var[var_of[rc]].append(q)
    met = [0] * len(requirements)

    n_vars = len(order)
    choice = [0] * n_vars
    best_value = None
    best_choice = None

    def search(k, value):
        nonlocal best_value, best_choice
        if k == n_vars:
            if best_value is None or value > best_value:
                best_value, best_choice = value, list(choice)
            return
        b = k // n_rows
        if best_value is not None:
            if value + knapsack[b][k - b * n_rows][caps[b]] + suffix[b + 1] <= best_value:
                return
        reqs = req_of_var[k]
        if weight[k] <= caps[b]:
            choice[k] = 1
            caps[b] -= weight[k]
            for q in reqs:
                met[q] += 1
                open_count[q] -= 1
            search(k + 1, value + gain[k])
            for q in reqs:
                met[q] -= 1
                open_count[q] += 1
            caps[b] += weight[k]
            choice[k] = 0
        # a zero here must leave every open requirement satisfiable
        for q in reqs:
            open_count[q] -= 1
        if all(met[q] or open_count[q] > 0 for q in reqs):
            search(k + 1, value)
        for q in reqs:
            open_count[q] += 1

    search(0, 0)
    if best_choice is None:
        return None, None
    return best_value, {rc: v for rc, v in zip(order, best_choice) if v}


# -- exhaustive oracle ----------------------------------------------------


def _domains(inst: Instance):
    doms = []
    for c, j in enumerate(inst.period_ids):
        eff = inst.effective_set(j)
        doms.append([(2, 1) if cid in eff else (1, 0) for cid in inst.case_ids])
    return doms


def brute_force_selection(inst: Instance, guard: int | None = None) -> SelectionPlan:
    """Enumerate every integer point of the bounds box and keep the best feasible one.

    Points are visited in decreasing lexicographic (period, case) order, so the
    first optimum found is the one :func:`solve_selection` returns.
    """
    guard = oracle_guard(DEFAULT_SELECTION_GUARD) if guard is None else guard
    doms = _domains(inst)
    size = math.prod(len(d) for col in doms for d in col)
    if size > guard:
        raise GuardExceeded(f"selection box has {size} points, guard is {guard}")

    run = inst.run_seconds
    columns = []
    for c, p in enumerate(inst.periods):
        single = inst.restrict(periods=[p.index])
        fits = []
        for vec in itertools.product(*doms[c]):
            if sum(int(run[r, c]) * v for r, v in enumerate(vec)) <= p.time_limit:
                value = selection_objective(single, np.array(vec).reshape(-1, 1), exact=True)
                fits.append((vec, value))
        if not fits:
            raise Infeasible("effective_inclusion",
                             f"period {p.index}: effective cases do not fit the limit",
                             period=p.index)
        columns.append(fits)

    cover = [[inst.column(j) for j in js] for js in inst.periods_by_condition().values()]
    best = None
    best_cols = None
    for combo in itertools.product(*columns):
        value = sum(v for _, v in combo)
        if best is not None and value <= best:
            continue
        if any(sum(combo[c][0][r] for c in group) < 1
               for group in cover for r in range(inst.n_cases)):
            continue
        best, best_cols = value, [vec for vec, _ in combo]
    if best_cols is None:
        raise Infeasible("coverage", "no point of the bounds box satisfies coverage")
    best_x = np.array(best_cols, dtype=np.int64).T
    return SelectionPlan.from_counts(inst, best_x)
