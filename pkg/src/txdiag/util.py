"""Small shared helpers."""

from __future__ import annotations

import json
from fractions import Fraction


def ceil_log2(n: int) -> int:
    """Smallest k with 2**k >= n.  ceil_log2(1) == 0."""
    if n < 1:
        raise ValueError(f"ceil_log2 needs n >= 1, got {n}")
    return (n - 1).bit_length()


def frac_obj(x: Fraction) -> dict:
    """Exact-rational JSON form: {"num": ..., "den": ...}."""
    return {"num": x.numerator, "den": x.denominator}


def frac_text(x: Fraction) -> str:
    """Presentation form, exact ratio plus 4-digit decimal."""
    return f"{x.numerator}/{x.denominator} ({float(x):.4f})"


def to_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"
