"""The two-cycle, eight-period router-board instance and its reference results.

Matrices are ``[case, period]`` with cases TC1..TC10 and periods 1..8.
"""

from __future__ import annotations

from .model import CONDITION_CLASSES, Instance, PeriodSpec, PriorityFactors, PrioritySets

__all__ = [
    "FAILURES",
    "RUN_SECONDS",
    "ORIGINAL_FINISH",
    "PUBLISHED_SELECTION",
    "PUBLISHED_SELECTION_TOTALS",
    "PUBLISHED_ORDERS",
    "PUBLISHED_OBJECTIVES",
    "PUBLISHED_BASELINE",
    "PUBLISHED_GAPS",
    "PERIOD_LIMIT_S",
    "paper_instance",
]

FAILURES = (
    (20, 20, 15, 14, 5, 3, 1, 2),
    (0, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 1, 0, 2, 0, 1, 0),
    (0, 0, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 1, 0, 0, 0),
    (1, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 0, 0, 0),
    (1, 0, 0, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 0, 0, 0, 0),
    (2, 0, 1, 0, 2, 0, 0, 1),
)

RUN_SECONDS = (
    (200, 190, 200, 190, 200, 190, 200, 190),
    (25, 20, 25, 20, 25, 20, 25, 20),
    (100, 150, 200, 210, 100, 150, 200, 210),
    (55, 65, 65, 65, 65, 65, 55, 65),
    (70, 70, 60, 70, 70, 70, 70, 60),
    (150, 140, 150, 150, 145, 140, 170, 150),
    (125, 120, 120, 110, 115, 120, 115, 110),
    (10, 10, 10, 10, 10, 10, 10, 10),
    (60, 40, 45, 50, 60, 40, 45, 50),
    (400, 350, 300, 320, 400, 350, 300, 300),
)

ORIGINAL_FINISH = (
    (200, 1390, 2600, 3790, 5000, 6190, 7400, 8590),
    (225, 1410, 2625, 3810, 5025, 6210, 7425, 8610),
    (325, 1560, 2825, 4020, 5125, 6360, 7625, 8820),
    (380, 1625, 2890, 4085, 5190, 6425, 7680, 8885),
    (450, 1695, 2950, 4155, 5260, 6495, 7750, 8945),
    (600, 1835, 3100, 4305, 5405, 6635, 7920, 9095),
    (725, 1955, 3220, 4415, 5520, 6755, 8035, 9205),
    (735, 1965, 3230, 4425, 5530, 6765, 8045, 9215),
    (795, 2005, 3275, 4475, 5590, 6805, 8090, 9265),
    (1195, 2355, 3575, 4795, 5990, 7155, 8390, 9565),
)

# Reference selection (one optimum among possibly several).
PUBLISHED_SELECTION = (
    (2, 2, 2, 2, 1, 2, 1, 2),
    (1, 1, 1, 1, 0, 1, 1, 1),
    (0, 1, 1, 1, 1, 0, 2, 0),
    (0, 1, 1, 1, 1, 1, 1, 0),
    (1, 1, 1, 1, 2, 1, 0, 1),
    (1, 1, 0, 1, 0, 0, 1, 0),
    (0, 1, 0, 1, 1, 1, 1, 0),
    (2, 1, 1, 1, 0, 1, 1, 2),
    (0, 0, 0, 1, 1, 1, 1, 0),
    (1, 0, 1, 0, 1, 1, 0, 2),
)
PUBLISHED_SELECTION_TOTALS = (1065, 955, 1060, 1065, 1080, 1055, 1020, 1080)

# Reference sequences per period; a trailing "-" marks the repeated run.
PUBLISHED_ORDERS = {
    1: ("TC1", "TC1-", "TC5", "TC6", "TC8-", "TC2", "TC8", "TC10"),
    2: ("TC1", "TC1-", "TC6", "TC3", "TC4", "TC5", "TC8", "TC2", "TC7"),
    3: ("TC1", "TC1-", "TC4", "TC3", "TC5", "TC8", "TC2", "TC10"),
    4: ("TC1", "TC4", "TC3", "TC7", "TC8", "TC6", "TC9", "TC1-", "TC5", "TC2"),
    5: ("TC1", "TC7", "TC9", "TC5-", "TC4", "TC5", "TC3", "TC10"),
    6: ("TC1", "TC7", "TC4", "TC10", "TC1-", "TC9", "TC5", "TC8", "TC2"),
    7: ("TC1", "TC2", "TC7", "TC4", "TC9", "TC3-", "TC6", "TC3", "TC8"),
    8: ("TC1", "TC2", "TC10-", "TC8-", "TC5", "TC1-", "TC10", "TC8"),
}
PUBLISHED_OBJECTIVES = (1.3897, 12.5654, 21.9478, 33.8028, 38.7963, 56.8720, 41.4216, 73.8426)
PUBLISHED_BASELINE = (5.9415, 54.9020, 95.5198, 144.0000, 162.0297, 242.7746, 307.3171, 458.6207)
PUBLISHED_GAPS = (76.6108, 77.1129, 77.0227, 76.5258, 76.0561, 76.5741, 86.5216, 83.8990)

ORIGINAL_PERIOD_S = 1200
PERIOD_LIMIT_S = 1080  # 10% below the original 20-minute period


def paper_instance() -> Instance:
    """Build the eight-period, ten-case reference instance."""
    n_periods = len(FAILURES[0])
    case_ids = range(1, len(FAILURES) + 1)
    periods = [
        PeriodSpec(index=j, condition=CONDITION_CLASSES[(j - 1) % 4],
                   time_limit=PERIOD_LIMIT_S, start=PERIOD_LIMIT_S * (j - 1))
        for j in range(1, n_periods + 1)
    ]
    # TC3 before TC8, and TC1 before every other case
    pairs = {(3, 8)} | {(1, k) for k in case_ids if k != 1}
    return Instance(
        periods=periods,
        case_ids=case_ids,
        failures=FAILURES,
        run_seconds=RUN_SECONDS,
        original_finish=ORIGINAL_FINISH,
        precedence={p.index: pairs for p in periods},
        priority_sets={p.index: PrioritySets(frozenset({8}), frozenset({9, 10})) for p in periods},
        priority_factors=PriorityFactors(4, 3, 2, 1),
        case_names=[f"TC{i}" for i in case_ids],
    )
