"""Lossless text forms for exact values."""
from __future__ import annotations

import json
from fractions import Fraction


def frac_str(x) -> str:
    """Always ``num/den``, including integers (``1/1``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den or 1))


def float_str(x: float) -> str:
    return format(float(x), ".12g")


def cycle_type_json(counts) -> str:
    return json.dumps([int(c) for c in counts])
