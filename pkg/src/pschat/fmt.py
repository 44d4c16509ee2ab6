"""Rendering rules shared by metrics and reports.

Percentages are whole numbers rounded half-up, with ``<1%`` for any positive
value below one percent and an em-dash when the denominator is zero.
Durations render as ``H:MM:SS`` from one hour upwards, ``MM:SS`` below.
Exact values travel through JSON as ``{"num", "den", "value"}`` objects.
"""

from __future__ import annotations

import math
from fractions import Fraction

UNDEFINED = "—"


def round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def format_pct(value: Fraction | None) -> str:
    if value is None:
        return UNDEFINED
    value = Fraction(value)
    if value == 0:
        return "0%"
    pct = value * 100
    if 0 < pct < 1:
        return "<1%"
    return f"{round_half_up(pct)}%"


def pct_of(count: int, total: int) -> Fraction | None:
    return Fraction(count, total) if total else None


def format_count_pct(count: int, total: int) -> str:
    return f"{count} ({format_pct(pct_of(count, total))})"


def format_duration(seconds: Fraction | float | None) -> str:
    if seconds is None:
        return UNDEFINED
    total = round_half_up(Fraction(seconds))
    sign = "-" if total < 0 else ""
    total = abs(total)
    h, rem = divmod(total, 3600)
    m, s = divmod(rem, 60)
    if h:
        return f"{sign}{h}:{m:02d}:{s:02d}"
    return f"{sign}{m:02d}:{s:02d}"


def decimal_str(value: Fraction, places: int = 6) -> str:
    """Fixed-point rendering rounded half-up, used as the human-readable twin of an exact value."""
    scaled = round_half_up(abs(value) * 10**places)
    sign = "-" if value < 0 and scaled else ""
    whole, frac = divmod(scaled, 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"


def exact(value: Fraction | int | None) -> dict | None:
    if value is None:
        return None
    value = Fraction(value)
    return {"num": value.numerator, "den": value.denominator, "value": decimal_str(value)}


def from_exact(obj: dict | None) -> Fraction | None:
    if obj is None:
        return None
    return Fraction(obj["num"], obj["den"])
