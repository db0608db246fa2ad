"""Locale-independent encoding of scalars for JSON and CSV output."""

from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction


def encode(v):
    """Fractions become "p/q" strings, floats 17 significant digits, ints stay ints.

    Non-finite floats are written as the strings "inf", "-inf", "nan" so the
    output stays strict JSON.
    """
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if isinstance(v, dict):
        return {str(k): encode(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode(x) for x in v]
    return v


def decode_scalar(text: str):
    """Inverse of :func:`encode` for scalars: "p/q" or integer strings give Fractions."""
    text = text.strip()
    if text in ("inf", "-inf", "nan"):
        return float(text)
    if any(c in text for c in ".eE") and "/" not in text:
        return float(text)
    return Fraction(text)
