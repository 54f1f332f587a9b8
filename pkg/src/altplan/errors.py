"""Exception hierarchy shared by the modelling, solving and CLI layers."""

from __future__ import annotations


class AltplanError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(AltplanError, ValueError):
    """An instance document does not match the expected structure.

    ``path`` is a slash-separated pointer to the offending field, e.g.
    ``run_seconds/3/0``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class InstanceValidationError(AltplanError, ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"invalid instance: {lines}")


class UnknownPeriodError(AltplanError, KeyError):
    def __init__(self, period):
        self.period = period
        super().__init__(f"unknown period {period!r}")

    def __str__(self) -> str:
        return self.args[0]


class ShapeError(AltplanError, ValueError):
    """A counts matrix or order does not fit the instance / job list."""


class Infeasible(AltplanError):
    """The selection model has no feasible point.

    ``rung`` names the constraint that would have to be relaxed:
    ``"effective_inclusion"`` when the effective cases alone overflow a
    period budget, ``"coverage"`` when some case cannot reach a condition
    class.
    """

    def __init__(self, rung: str, message: str, *, period=None, case=None,
                 condition=None):
        self.rung = rung
        self.period = period
        self.case = case
        self.condition = condition
        super().__init__(message)


class PrecedenceCycleError(AltplanError, ValueError):
    def __init__(self, cycle, period=None):
        self.cycle = list(cycle)
        self.period = period
        where = f" in period {period}" if period is not None else ""
        chain = " -> ".join(str(c) for c in self.cycle)
        super().__init__(f"precedence cycle{where}: {chain}")


class GuardExceeded(AltplanError):
    """An exhaustive oracle was asked to enumerate more than its guard allows."""
