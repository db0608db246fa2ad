"""Seeded generators for random node sets and majorization pairs."""

from __future__ import annotations

import math
import random
import zlib
from fractions import Fraction
from typing import Sequence

MAX_DENOMINATOR = 64


def derive_seed(seed: int, label: str) -> int:
    """Stable per-label seed: does not depend on hash randomization or run order."""
    return (seed * 0x9E3779B1 + zlib.crc32(label.encode("utf-8"))) % (1 << 63)


def random_rational(rng: random.Random, lo, hi, max_den: int = MAX_DENOMINATOR) -> Fraction:
    """A rational in [lo, hi] with denominator at most ``max_den``."""
    lo, hi = Fraction(lo), Fraction(hi)
    den = rng.randint(1, max_den)
    a, b = math.ceil(lo * den), math.floor(hi * den)
    if a > b:
        return lo
    return Fraction(rng.randint(a, b), den)


def random_rationals(rng: random.Random, n: int, lo, hi, max_den: int = MAX_DENOMINATOR,
                     max_tries: int = 10_000) -> list[Fraction]:
    """n pairwise distinct rationals in [lo, hi], in generation order."""
    out: list[Fraction] = []
    seen = set()
    for _ in range(max_tries):
        v = random_rational(rng, lo, hi, max_den)
        if v not in seen:
            seen.add(v)
            out.append(v)
            if len(out) == n:
                return out
    raise RuntimeError(f"could not draw {n} distinct rationals from [{lo}, {hi}]")


def random_floats(rng: random.Random, n: int, lo: float, hi: float, min_gap: float = 0.0) -> list[float]:
    """n floats in [lo, hi] whose sorted gaps exceed ``min_gap * (hi - lo)``."""
    while True:
        xs = [rng.uniform(lo, hi) for _ in range(n)]
        s = sorted(xs)
        if all(b - a > min_gap * (hi - lo) for a, b in zip(s, s[1:])):
            return xs


def robin_hood_pair(rng: random.Random, y: Sequence[Fraction], max_tries: int = 1000):
    """(x, y) with x obtained from y by one Robin Hood transfer, so x is majorized by y.

    With y sorted descending, indices i < j with y_i > y_j are chosen and
    delta in (0, (y_i - y_j)/2) moves from coordinate i to coordinate j.  The
    draw is repeated until every coordinate of x is distinct.
    """
    yd = sorted((Fraction(v) for v in y), reverse=True)
    n = len(yd)
    if n < 2 or len(set(yd)) < 2:
        raise ValueError("need at least two distinct coordinates")
    for _ in range(max_tries):
        i, j = sorted(rng.sample(range(n), 2))
        gap = yd[i] - yd[j]
        if gap <= 0:
            continue
        k = rng.randint(1, MAX_DENOMINATOR - 1)
        delta = gap / 2 * Fraction(k, MAX_DENOMINATOR)
        x = list(yd)
        x[i] -= delta
        x[j] += delta
        if len(set(x)) == n:
            return x, yd
    raise RuntimeError("no collision-free transfer found")
