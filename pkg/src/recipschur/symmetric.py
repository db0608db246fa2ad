"""Complete homogeneous symmetric polynomials, Vandermonde products and the bialternant."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np

from .core import Monomial, NodeSet, Scalar
from .divdiff import divdiff


def _values(nodes) -> list:
    return list(nodes.values) if isinstance(nodes, NodeSet) else list(nodes)


def _exact(xs) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in xs)


def _one(xs):
    return Fraction(1) if _exact(xs) else 1.0


def chs_enumerate(q: int, nodes) -> Scalar:
    """h_q by summing every weakly increasing index product (the oracle path).

    Costs C(n+q-1, q) products; use :func:`chs` for anything large.
    """
    if q < 0:
        raise ValueError("q must be nonnegative")
    xs = _values(nodes)
    one = _one(xs)
    total = 0 * one
    for idx in combinations_with_replacement(range(len(xs)), q):
        term = one
        for i in idx:
            term *= xs[i]
        total += term
    return total


def chs(q: int, nodes) -> Scalar:
    """h_q by adding one variable at a time.

    h_j(x_1..x_k) = h_j(x_1..x_{k-1}) + x_k h_{j-1}(x_1..x_k).
    """
    if q < 0:
        raise ValueError("q must be nonnegative")
    xs = _values(nodes)
    one = _one(xs)
    h = [one] + [0 * one] * q
    for x in xs:
        for j in range(1, q + 1):
            h[j] = h[j] + x * h[j - 1]
    return h[q]


def chs_via_divdiff(q: int, nodes: NodeSet) -> Scalar:
    """h_q as the divided difference of t^(q+n-1) over the nodes."""
    if q < 0:
        raise ValueError("q must be nonnegative")
    return divdiff(Monomial(q + nodes.n - 1), nodes)


def vandermonde(nodes) -> Scalar:
    xs = sorted(_values(nodes))
    v = _one(xs)
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            v *= xs[j] - xs[i]
    return v


def bareiss_determinant(rows: Sequence[Sequence]) -> Fraction:
    """Fraction-free (Bareiss) elimination; exact for integer or Fraction entries."""
    m = [[Fraction(v) for v in row] for row in rows]
    n = len(m)
    if n == 0:
        return Fraction(1)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def determinant(rows) -> Scalar:
    if all(_exact(row) for row in rows):
        return bareiss_determinant(rows)
    return float(np.linalg.det(np.array(rows, dtype=float)))


def bialternant_matrix(q: int, nodes) -> list[list]:
    """Rows (1, x, ..., x^(n-2), x^(q+n-1)) in ascending node order."""
    xs = sorted(_values(nodes))
    n = len(xs)
    return [[x ** k for k in range(n - 1)] + [x ** (q + n - 1)] for x in xs]


@dataclass(frozen=True)
class BialternantCheck:
    lhs: Scalar
    rhs: Scalar
    equal: bool


def bialternant_check(q: int, nodes) -> BialternantCheck:
    """Compare h_q * V with the determinant of the bialternant matrix."""
    xs = _values(nodes)
    v = vandermonde(xs)
    lhs = chs_enumerate(q, xs) * v
    rhs = determinant(bialternant_matrix(q, xs))
    if _exact(xs):
        equal = lhs == rhs
    else:
        equal = math.isclose(lhs, rhs, rel_tol=1e-9, abs_tol=1e-12)
    return BialternantCheck(lhs, rhs, equal)


def chs_via_bialternant(q: int, nodes) -> Scalar:
    """h_q as det(bialternant matrix) / V."""
    xs = _values(nodes)
    return determinant(bialternant_matrix(q, xs)) / vandermonde(xs)


def hunter_bound(p: int, nodes) -> Scalar:
    """(x_1^2 + ... + x_n^2)^p / (2^p p!), the lower bound for h_{2p}."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    xs = _values(nodes)
    sq = sum((x * x for x in xs), 0 * _one(xs))
    if _exact(xs):
        return Fraction(sq) ** p / (2 ** p * math.factorial(p))
    return sq ** p / (2 ** p * math.factorial(p))
