"""Presentation helpers: tables print every ratio with four decimals, half-up."""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction


def round_half_up(value, places: int = 4) -> Decimal:
    """Round an exact or float value to ``places`` decimals, ties away from zero.

    Fractions are rounded exactly; floats go through their shortest repr so
    that ``1.38965`` rounds the way it reads.
    """
    if isinstance(value, Fraction):
        scaled = abs(value) * 10**places
        whole, rest = divmod(scaled.numerator, scaled.denominator)
        if 2 * rest >= scaled.denominator:
            whole += 1
        digits = Decimal(whole).scaleb(-places)
        return -digits if value < 0 else digits
    return Decimal(repr(float(value))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def fmt4(value) -> str:
    if value is None:
        return "--"
    return f"{round_half_up(value):.4f}"


def text_table(header, rows) -> str:
    """Left-aligned first column, right-aligned data columns."""
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(row[c]) for row in cells if c < len(row)) for c in range(len(header))]
    lines = []
    for row in cells:
        parts = [row[0].ljust(widths[0])]
        parts += [cell.rjust(widths[c]) for c, cell in enumerate(row[1:], start=1)]
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines) + "\n"
