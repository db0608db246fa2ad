"""Curry-Schoenberg B-spline density and Peano-kernel quadrature.

F(t; x_1..x_n) = (n-1)/2 * sum_j |x_j - t| (x_j - t)^(n-3) / prod_{k != j}(x_j - x_k)

is a piecewise polynomial of degree n-2 with knots at the nodes, so every
integral here is split at the knots and each piece is handled by
Gauss-Legendre with adaptive bisection as a fallback.

The closed sum cancels badly in floating point (absolute errors around 1e-9
are typical for eight spread-out nodes), so quadrature samples the density
through the two-term recursion, which has no cancellation.  The closed sum
remains the reference evaluator and is exact for rational inputs.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import FunctionSpec, NodeSet, Scalar
from .errors import DegenerateOrder, QuadratureFailure

DEFAULT_TOL = 1e-10
GL_ORDER = 20
MAX_DEPTH = 40
EPS = 2.0 ** -52
ROUNDOFF_ULPS = 64


class BSplineDensity:
    """The density F(t; nodes) with precomputed barycentric-style weights."""

    def __init__(self, nodes: NodeSet):
        self.nodes = nodes
        xs = nodes.values
        self.n = len(xs)
        weights = []
        for j, xj in enumerate(xs):
            p = Fraction(1) if nodes.exact else 1.0
            for k, xk in enumerate(xs):
                if k != j:
                    p *= xj - xk
            weights.append(1 / p)
        self._weights = weights
        self._xf = [float(x) for x in xs]
        self._wf = [float(w) for w in weights]

    @property
    def support(self) -> tuple:
        return self.nodes.values[0], self.nodes.values[-1]

    def __call__(self, t) -> Scalar:
        xs = self.nodes.values
        lo, hi = xs[0], xs[-1]
        if self.n == 2:
            if t == lo or t == hi:
                raise DegenerateOrder("two-node density is undefined at its nodes")
            if t < lo or t > hi:
                return 0 * (hi - lo)
            return 1 / (hi - lo)
        if t < lo or t > hi:
            return 0 * (hi - lo)
        e = self.n - 3
        if self.nodes.exact and isinstance(t, (int, Fraction)):
            s = sum((w * abs(x - t) * (x - t) ** e for x, w in zip(xs, self._weights)), Fraction(0))
            return Fraction(self.n - 1, 2) * s
        t = float(t)
        s = math.fsum(w * abs(x - t) * (x - t) ** e for x, w in zip(self._xf, self._wf))
        return 0.5 * (self.n - 1) * s

    def stable(self, t: float) -> float:
        """Float value via :func:`bspline_recursive` (used by quadrature)."""
        if self.n == 2:
            return self(t)
        return bspline_recursive(t, self._xf)


def bspline_eval(t, nodes: NodeSet) -> Scalar:
    """F(t; nodes) by the closed formula (n = 2 uses 1/(x_2 - x_1) inside the support)."""
    return BSplineDensity(nodes)(t)


def bspline_recursive(t: float, xs) -> float:  # xs: ascending floats
    """Independent evaluation of the same density by the Cox-de Boor style recursion.

    Uses M_1 = 1/(x_{i+1} - x_i) on [x_i, x_{i+1}) and
    M_k = k/(k-1) * ((t - x_i) M_{k-1,i} + (x_{i+k} - t) M_{k-1,i+1}) / (x_{i+k} - x_i).
    """
    n = len(xs)
    m = [1.0 / (xs[i + 1] - xs[i]) if xs[i] <= t < xs[i + 1] else 0.0 for i in range(n - 1)]
    for k in range(2, n):
        m = [
            k / (k - 1) * ((t - xs[i]) * m[i] + (xs[i + k] - t) * m[i + 1]) / (xs[i + k] - xs[i])
            for i in range(n - k)
        ]
    return m[0]


@lru_cache(maxsize=None)
def _gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return tuple(x.tolist()), tuple(w.tolist())


def _gl(g, a: float, b: float, order: int) -> tuple[float, float]:
    """Rule value and the matching integral of |g| (the roundoff scale)."""
    x, w = _gauss_legendre(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    vals = [wi * g(mid + half * xi) for xi, wi in zip(x, w)]
    return half * math.fsum(vals), half * math.fsum(abs(v) for v in vals)


def integrate_adaptive(g, a: float, b: float, tol: float, order: int = GL_ORDER,
                       max_depth: int = MAX_DEPTH) -> float:
    """Gauss-Legendre on [a, b], bisecting until halves agree with the whole within ``tol``.

    A piece is also accepted once the disagreement is at the roundoff level of
    the integrand itself, since further bisection cannot reduce it.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    whole, _ = _gl(g, a, b, order)
    stack = [(a, b, whole, tol, 0)]
    parts = []
    while stack:
        lo, hi, est, tl, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        (left, labs), (right, rabs) = _gl(g, lo, mid, order), _gl(g, mid, hi, order)
        if abs(left + right - est) <= max(tl, ROUNDOFF_ULPS * EPS * (labs + rabs)):
            parts.append((lo, left + right))
            continue
        if depth >= max_depth:
            raise QuadratureFailure(f"no convergence on [{lo}, {hi}] after {depth} bisections")
        stack.append((mid, hi, right, tl / 2, depth + 1))
        stack.append((lo, mid, left, tl / 2, depth + 1))
    parts.sort()
    return math.fsum(v for _, v in parts)


def integrate_piecewise(g, breaks, tol: float) -> float:
    """Integrate over consecutive [breaks[i], breaks[i+1]] with tolerance shared by length."""
    bs = [float(b) for b in breaks]
    total = bs[-1] - bs[0]
    pieces = [
        integrate_adaptive(g, lo, hi, tol * (hi - lo) / total)
        for lo, hi in zip(bs, bs[1:])
    ]
    return math.fsum(pieces)


def _density_moment(nodes: NodeSet, power: int, tol: float) -> float:
    if nodes.n == 2:
        a, b = float(nodes[0]), float(nodes[1])
        return integrate_adaptive(lambda t: t ** power / (b - a), a, b, tol)
    F = BSplineDensity(nodes).stable
    return integrate_piecewise(lambda t: t ** power * F(t), nodes.values, tol)


def bspline_integral(nodes: NodeSet, tol: float = DEFAULT_TOL) -> float:
    """Total mass of F over its support (should be 1)."""
    return _density_moment(nodes, 0, tol)


def bspline_mean(nodes: NodeSet, tol: float = DEFAULT_TOL) -> float:
    """First moment of F (should equal the node mean)."""
    return _density_moment(nodes, 1, tol)


def peano_divdiff(f: FunctionSpec, nodes: NodeSet, tol: float = DEFAULT_TOL) -> float:
    """f[x_1..x_n] as (1/(n-1)!) * integral of f^(n-1)(t) F(t) over [x_1, x_n]."""
    n = nodes.n
    k = n - 1
    fact = math.factorial(k)
    if n == 2:
        a, b = float(nodes[0]), float(nodes[1])
        integral = integrate_adaptive(lambda t: float(f.derivative(1, t)) / (b - a), a, b, tol)
        return integral
    F = BSplineDensity(nodes).stable
    integral = integrate_piecewise(lambda t: float(f.derivative(k, t)) * F(t), nodes.values, tol * fact)
    return integral / fact
