"""Reference implementations used only by the tests.

Nothing here calls the package's algorithms: derivatives come from sympy,
high-precision divided differences from mpmath applied to the symmetric
sum, and function values from the formulas written out again per variant.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations_with_replacement

import mpmath
import sympy

from recipschur.core import (
    Exponential,
    Monomial,
    Polynomial,
    PowerLaw,
    RationalH,
    ReciprocalPower,
    ShiftedReciprocal,
)

T = sympy.Symbol("t", positive=True)


def _rat(v) -> sympy.Rational:
    v = Fraction(v)
    return sympy.Rational(v.numerator, v.denominator)


def sym_expr(f):
    """sympy expression in T for a catalog function."""
    if isinstance(f, Monomial):
        return T ** f.degree
    if isinstance(f, ReciprocalPower):
        return T ** (-_rat(f.s))
    if isinstance(f, PowerLaw):
        return T ** _rat(f.exponent)
    if isinstance(f, Exponential):
        base = sympy.E if f.base == Fraction(math.e) else _rat(f.base)
        return base ** T
    if isinstance(f, ShiftedReciprocal):
        return 1 / (T + _rat(f.shift))
    if isinstance(f, Polynomial):
        return sum((_rat(c) * T ** i for i, c in enumerate(f.coeffs)), sympy.Integer(0))
    if isinstance(f, RationalH):
        g = sym_expr(f.inner).subs(T, 1 / T)
        return sympy.simplify(T ** (f.n - 2) * g)
    raise TypeError(f"no symbolic form for {f!r}")


def sym_derivative(f, k: int, t) -> sympy.Expr:
    return sympy.diff(sym_expr(f), T, k).subs(T, _rat(t))


def mp_value(f, x):
    """f(x) in mpmath at the current precision, from the variant's formula."""
    x = mpmath.mpf(x) if not isinstance(x, Fraction) else mpmath.mpf(x.numerator) / x.denominator
    if isinstance(f, Monomial):
        return x ** f.degree
    if isinstance(f, ReciprocalPower):
        return x ** (-_mp(f.s))
    if isinstance(f, PowerLaw):
        return x ** _mp(f.exponent)
    if isinstance(f, Exponential):
        base = mpmath.e if f.base == Fraction(math.e) else _mp(f.base)
        return base ** x
    if isinstance(f, ShiftedReciprocal):
        return 1 / (x + _mp(f.shift))
    if isinstance(f, Polynomial):
        return sum((_mp(c) * x ** i for i, c in enumerate(f.coeffs)), mpmath.mpf(0))
    if isinstance(f, RationalH):
        return x ** (f.n - 2) * mp_value(f.inner, 1 / x)
    raise TypeError(f"no mpmath form for {f!r}")


def _mp(v):
    v = Fraction(v)
    return mpmath.mpf(v.numerator) / v.denominator


def mp_divdiff(f, nodes, dps: int = 80) -> float:
    """The symmetric sum over the nodes at ``dps`` decimal digits, rounded to float."""
    with mpmath.workdps(dps):
        xs = [Fraction(v) for v in nodes]
        total = mpmath.mpf(0)
        for j, xj in enumerate(xs):
            d = mpmath.mpf(1)
            for k, xk in enumerate(xs):
                if k != j:
                    d *= _mp(xj - xk)
            total += mp_value(f, xj) / d
        return float(total)


def exact_divdiff(values, xs) -> Fraction:
    """The symmetric sum in Fractions, for precomputed exact values."""
    total = Fraction(0)
    for j, xj in enumerate(xs):
        d = Fraction(1)
        for k, xk in enumerate(xs):
            if k != j:
                d *= xj - xk
        total += Fraction(values[j]) / d
    return total


def brute_chs(q: int, xs) -> Fraction:
    total = Fraction(0)
    for idx in combinations_with_replacement(range(len(xs)), q):
        term = Fraction(1)
        for i in idx:
            term *= Fraction(xs[i])
        total += term
    return total


def sympy_det(rows) -> Fraction:
    m = sympy.Matrix([[_rat(v) for v in row] for row in rows])
    d = m.det()
    return Fraction(int(d.p), int(d.q))
