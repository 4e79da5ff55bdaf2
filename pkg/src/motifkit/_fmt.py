"""Deterministic number formatting for the toolkit's text outputs.

All file formats promise byte-identical output for identical inputs, so
every float is rendered through one of these helpers rather than through
locale- or precision-dependent formatting.
"""

from __future__ import annotations


def fmt_time(x: float) -> str:
    """Render a time in seconds: exact round-trip, at least 3 decimal places.

    Uses the shortest representation that parses back to the same float,
    zero-padded to millisecond precision for readability. Values that repr
    renders in exponent form (below 1e-4) are kept as-is; they already carry
    full precision.
    """
    s = repr(float(x))
    if "e" in s or "E" in s or "." not in s:
        return s
    decimals = len(s) - s.index(".") - 1
    if decimals < 3:
        s += "0" * (3 - decimals)
    return s


def fmt_num(x: float) -> str:
    """Render a numeric CSV cell: integral values without a fraction."""
    f = float(x)
    if f.is_integer() and abs(f) < 1e16:
        return str(int(f))
    return repr(f)


def csv_field(value: str) -> str:
    """Quote a CSV text field only when it needs it."""
    if any(c in value for c in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value
