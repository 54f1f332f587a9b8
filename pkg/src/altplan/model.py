"""Domain types for the test-plan problem and the checks that keep them honest.

An :class:`Instance` holds one accelerated cycle test: the ordered periods
(each run under one temperature/voltage condition), the test cases, and three
``[case, period]`` integer matrices -- historical failure counts, run times and
the finish time of each case in the original, unoptimised schedule.  All times
are integer seconds.
"""

from __future__ import annotations

import dataclasses
import graphlib
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import UnknownPeriodError

__all__ = [
    "Temperature",
    "Voltage",
    "ConditionClass",
    "CONDITION_CLASSES",
    "PeriodSpec",
    "PrioritySets",
    "PriorityFactors",
    "PriorityPartition",
    "Diagnostic",
    "Instance",
    "validate",
    "effective_set",
    "condition_class",
    "priority_partition",
    "find_precedence_cycle",
]


class Temperature(str, Enum):
    LT = "LT"
    HT = "HT"


class Voltage(str, Enum):
    LV = "LV"
    HV = "HV"


@dataclass(frozen=True)
class ConditionClass:
    temperature: Temperature
    voltage: Voltage

    def __post_init__(self):
        object.__setattr__(self, "temperature", Temperature(self.temperature))
        object.__setattr__(self, "voltage", Voltage(self.voltage))

    @classmethod
    def parse(cls, label: str) -> "ConditionClass":
        """Parse a four-letter label such as ``"HTLV"``."""
        label = label.strip().upper()
        if len(label) != 4:
            raise ValueError(f"bad condition label {label!r}")
        return cls(Temperature(label[:2]), Voltage(label[2:]))

    def __str__(self) -> str:
        return f"{self.temperature.value}{self.voltage.value}"


#: The four classes in the cycle order used by the reference test rig.
CONDITION_CLASSES = (
    ConditionClass(Temperature.LT, Voltage.LV),
    ConditionClass(Temperature.HT, Voltage.LV),
    ConditionClass(Temperature.LT, Voltage.HV),
    ConditionClass(Temperature.HT, Voltage.HV),
)


@dataclass(frozen=True)
class PeriodSpec:
    index: int
    condition: ConditionClass
    time_limit: int
    start: int


class PrioritySets(NamedTuple):
    """The two given priority sets of a period, as plain case ids."""

    preferred: frozenset = frozenset()
    secondary: frozenset = frozenset()


class PriorityFactors(NamedTuple):
    """Per-unit bonus for selecting a case in each priority tier."""

    effective: float
    preferred: float
    secondary: float
    remainder: float


@dataclass(frozen=True)
class PriorityPartition:
    """The four disjoint tiers that split a period's cases.

    ``effective`` are cases with at least one historical failure; the
    ``preferred`` and ``secondary`` tiers are the given priority sets minus
    the effective cases; ``remainder`` is everything else.
    """

    effective: frozenset
    preferred: frozenset
    secondary: frozenset
    remainder: frozenset

    def tiers(self):
        return (self.effective, self.preferred, self.secondary, self.remainder)


@dataclass(frozen=True)
class Diagnostic:
    field: str
    message: str
    period: int | None = None
    case: int | None = None

    def __str__(self) -> str:
        where = []
        if self.period is not None:
            where.append(f"period {self.period}")
        if self.case is not None:
            where.append(f"case {self.case}")
        loc = f" ({', '.join(where)})" if where else ""
        return f"{self.field}{loc}: {self.message}"


def _frozen_int_matrix(values) -> np.ndarray:
    arr = np.array(values, dtype=np.int64)
    if arr.ndim != 2:
        arr = arr.reshape((len(arr), -1)) if arr.size else arr.reshape((0, 0))
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """Full problem data.  Immutable once built; matrices are read-only.

    Matrices are indexed ``[row, column]`` where rows follow ``case_ids`` and
    columns follow ``periods``.  Periods and cases are addressed by their
    (1-based) ids in every public method.
    """

    periods: tuple
    case_ids: tuple
    failures: np.ndarray
    run_seconds: np.ndarray
    original_finish: np.ndarray
    precedence: Mapping = field(default_factory=dict)
    priority_sets: Mapping = field(default_factory=dict)
    priority_factors: PriorityFactors = PriorityFactors(4, 3, 2, 1)
    case_names: tuple = ()

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("periods", tuple(self.periods))
        set_("case_ids", tuple(int(c) for c in self.case_ids))
        for name in ("failures", "run_seconds", "original_finish"):
            set_(name, _frozen_int_matrix(getattr(self, name)))
        set_("precedence", MappingProxyType(
            {int(j): frozenset((int(a), int(b)) for a, b in pairs)
             for j, pairs in self.precedence.items()}))
        set_("priority_sets", MappingProxyType(
            {int(j): PrioritySets(frozenset(map(int, s[0])), frozenset(map(int, s[1])))
             for j, s in self.priority_sets.items()}))
        set_("priority_factors", PriorityFactors(*self.priority_factors))
        names = tuple(self.case_names) or (None,) * len(self.case_ids)
        set_("case_names", names)
        set_("_col", {p.index: c for c, p in enumerate(self.periods)})
        set_("_row", {cid: r for r, cid in enumerate(self.case_ids)})

    # -- equality ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.periods == other.periods
            and self.case_ids == other.case_ids
            and self.case_names == other.case_names
            and all(np.array_equal(getattr(self, m), getattr(other, m))
                    for m in ("failures", "run_seconds", "original_finish"))
            and self._nonempty(self.precedence) == self._nonempty(other.precedence)
            and self._nonempty(self.priority_sets, PrioritySets())
            == self._nonempty(other.priority_sets, PrioritySets())
            and self.priority_factors == other.priority_factors
        )

    __hash__ = None

    @staticmethod
    def _nonempty(mapping, empty=frozenset()):
        return {k: v for k, v in mapping.items() if v != empty}

    # -- indexing ---------------------------------------------------------

    @property
    def period_ids(self) -> tuple:
        return tuple(p.index for p in self.periods)

    @property
    def n_cases(self) -> int:
        return len(self.case_ids)

    @property
    def n_periods(self) -> int:
        return len(self.periods)

    def column(self, j: int) -> int:
        try:
            return self._col[j]
        except (KeyError, TypeError):
            raise UnknownPeriodError(j) from None

    def row(self, case: int) -> int:
        try:
            return self._row[case]
        except KeyError:
            raise KeyError(f"unknown test case {case!r}") from None

    def period(self, j: int) -> PeriodSpec:
        return self.periods[self.column(j)]

    def precedence_for(self, j: int) -> frozenset:
        self.column(j)
        return self.precedence.get(j, frozenset())

    def priority_sets_for(self, j: int) -> PrioritySets:
        self.column(j)
        return self.priority_sets.get(j, PrioritySets())

    # -- derived sets -----------------------------------------------------

    def effective_set(self, j: int) -> frozenset:
        col = self.failures[:, self.column(j)]
        return frozenset(cid for cid, w in zip(self.case_ids, col) if w >= 1)

    def condition_class(self, j: int) -> ConditionClass:
        return self.period(j).condition

    def priority_partition(self, j: int) -> PriorityPartition:
        everyone = frozenset(self.case_ids)
        effective = self.effective_set(j)
        sets = self.priority_sets_for(j)
        preferred = (sets.preferred & everyone) - effective
        secondary = (sets.secondary & everyone) - effective
        remainder = everyone - effective - preferred - secondary
        return PriorityPartition(effective, preferred, secondary, remainder)

    def periods_by_condition(self) -> dict:
        """Map each condition class present in the instance to its period ids."""
        groups: dict = {}
        for p in self.periods:
            groups.setdefault(p.condition, []).append(p.index)
        return groups

    # -- derivation -------------------------------------------------------

    def replace(self, **changes) -> "Instance":
        return dataclasses.replace(self, **changes)

    def restrict(self, cases: Iterable[int] | None = None,
                 periods: Iterable[int] | None = None) -> "Instance":
        """Sub-instance on a subset of cases and periods.

        Period ids, start times and limits are kept as they are; precedence
        pairs and priority sets are filtered to the surviving cases.
        """
        keep_cases = list(self.case_ids) if cases is None else [c for c in self.case_ids if c in set(cases)]
        keep_periods = list(self.period_ids) if periods is None else [p for p in self.period_ids if p in set(periods)]
        rows = [self.row(c) for c in keep_cases]
        cols = [self.column(j) for j in keep_periods]
        kept = set(keep_cases)
        sub = lambda m: m[np.ix_(rows, cols)]  # noqa: E731
        return Instance(
            periods=[self.period(j) for j in keep_periods],
            case_ids=keep_cases,
            failures=sub(self.failures),
            run_seconds=sub(self.run_seconds),
            original_finish=sub(self.original_finish),
            precedence={j: {(a, b) for a, b in self.precedence_for(j) if a in kept and b in kept}
                        for j in keep_periods},
            priority_sets={j: PrioritySets(self.priority_sets_for(j).preferred & kept,
                                           self.priority_sets_for(j).secondary & kept)
                           for j in keep_periods},
            priority_factors=self.priority_factors,
            case_names=[self.case_names[r] for r in rows],
        )


def find_precedence_cycle(pairs: Iterable[tuple]) -> list | None:
    """Return one cycle of the relation as ``[a, b, ..., a]``, or ``None``."""
    graph: dict = {}
    for a, b in pairs:
        graph.setdefault(b, set()).add(a)
        graph.setdefault(a, set())
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError as exc:
        # CycleError lists the cycle in predecessor order
        return list(reversed(exc.args[1]))
    return None


def validate(inst: Instance) -> list[Diagnostic]:
    """Check every structural invariant; an empty list means the instance is usable."""
    out: list[Diagnostic] = []
    n, m = inst.n_cases, inst.n_periods

    if len(set(inst.case_ids)) != n:
        out.append(Diagnostic("test_cases", "duplicate test case ids"))
    for cid in inst.case_ids:
        if cid < 1:
            out.append(Diagnostic("test_cases", "ids must be positive", case=cid))
    if len(set(inst.period_ids)) != m:
        out.append(Diagnostic("periods", "duplicate period indices"))
    if len(inst.case_names) != n:
        out.append(Diagnostic("test_cases", "case_names length does not match case ids"))

    prev_start = None
    for p in inst.periods:
        if p.index < 1:
            out.append(Diagnostic("periods", "index must be positive", period=p.index))
        if p.time_limit <= 0:
            out.append(Diagnostic("periods.time_limit_s", "must be > 0", period=p.index))
        if p.start < 0:
            out.append(Diagnostic("periods.start_s", "must be >= 0", period=p.index))
        if prev_start is not None and p.start <= prev_start:
            out.append(Diagnostic("periods.start_s", "start times must strictly increase",
                                  period=p.index))
        prev_start = p.start

    checks = (
        ("failures", inst.failures, lambda v: v >= 0, "must be >= 0"),
        ("run_seconds", inst.run_seconds, lambda v: v > 0, "must be > 0"),
        ("original_finish_s", inst.original_finish, lambda v: v >= 0, "must be >= 0"),
    )
    for name, mat, ok, msg in checks:
        if mat.shape != (n, m):
            out.append(Diagnostic(name, f"shape {mat.shape} does not match ({n}, {m})"))
            continue
        for r, c in zip(*np.nonzero(~ok(mat))):
            out.append(Diagnostic(name, f"{msg}, got {mat[r, c]}",
                                  period=inst.periods[c].index, case=inst.case_ids[r]))

    known = set(inst.case_ids)
    for j, pairs in sorted(inst.precedence.items()):
        if j not in inst._col:
            out.append(Diagnostic("precedence", "unknown period", period=j))
        for a, b in sorted(pairs):
            for cid in (a, b):
                if cid not in known:
                    out.append(Diagnostic("precedence", "unknown test case", period=j, case=cid))
            if a == b:
                out.append(Diagnostic("precedence", "self-precedence", period=j, case=a))
        cycle = find_precedence_cycle((a, b) for a, b in pairs if a != b)
        if cycle:
            chain = " -> ".join(map(str, cycle))
            out.append(Diagnostic("precedence", f"cycle {chain}", period=j))

    for j, sets in sorted(inst.priority_sets.items()):
        if j not in inst._col:
            out.append(Diagnostic("priority_sets", "unknown period", period=j))
        for cid in sorted(sets.preferred & sets.secondary):
            out.append(Diagnostic("priority_sets", "B and Gamma must be disjoint",
                                  period=j, case=cid))
        for cid in sorted((sets.preferred | sets.secondary) - known):
            out.append(Diagnostic("priority_sets", "unknown test case", period=j, case=cid))

    for name, value in inst.priority_factors._asdict().items():
        if not value >= 0:
            out.append(Diagnostic("priority_factors", f"{name} must be >= 0, got {value}"))
    return out


def effective_set(inst: Instance, j: int) -> frozenset:
    """Cases with at least one historical failure in period ``j``."""
    return inst.effective_set(j)


def condition_class(inst: Instance, j: int) -> ConditionClass:
    return inst.condition_class(j)


def priority_partition(inst: Instance, j: int) -> PriorityPartition:
    return inst.priority_partition(j)
