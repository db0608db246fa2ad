"""Sign laws, lower bounds, mean-value locators and majorization checks.

Signs are decided in exact rational arithmetic whenever the function is
rational-valued at the nodes (float nodes are read as the rationals they
are).  Otherwise values come with an a priori rounding bound, and a value
inside that band is reported as Uncertain instead of being guessed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from scipy.optimize import brentq

from .core import (
    Exponential,
    FunctionSpec,
    Interval,
    Monomial,
    NodeSet,
    ReciprocalPower,
    Scalar,
    ScalarPolicy,
    SignClass,
    SignLabel,
    as_interval,
    is_exact_eligible,
    make_node_set,
    require_exact,
    sign_of,
    to_rational,
)
from .divdiff import (
    direct_error_bound,
    divdiff,
    divdiff_direct,
    divdiff_exact,
    newton_table,
    to_float_nodes,
)
from .errors import (
    ConvexityNotGuaranteed,
    DomainError,
    LengthMismatch,
    NotComparable,
    RootNotFound,
    UncertainClassification,
)
from .symmetric import hunter_bound

DEFAULT_LOCATOR_TOL = 1e-9
SCAN_POINTS = 64

# Mean-value identities relating f[x_1..x_n] to divided differences of f'.
# "n" scales by 1/n as the identities are usually quoted; "n-1" scales by
# 1/(n-1), the factor that makes them exact for polynomials of degree n-1.
NORMALIZATIONS = ("n", "n-1")


def _factor(normalization: str, n: int) -> Fraction:
    if normalization == "n":
        return Fraction(1, n)
    if normalization == "n-1":
        return Fraction(1, n - 1)
    raise ValueError(f"normalization must be one of {NORMALIZATIONS}")


# ---------------------------------------------------------------------------
# sign laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SignPrediction:
    n: int
    s: Fraction
    predicted: SignLabel
    zero_set_member: bool


def sign_oracle(n: int, s) -> SignPrediction:
    """Analytic sign of the n-point sum for f(t) = t^(-s).

    Zero exactly for s in {0, -1, ..., -(n-2)}; otherwise the sign of
    (-1)^(n+1) s(s+1)...(s+n-2), found by counting negative factors.
    For n = 4 that makes the sum negative exactly on (-2, -1) and (0, inf).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    s = to_rational(s)
    zero = s.denominator == 1 and -(n - 2) <= s <= 0
    if zero:
        return SignPrediction(n, s, SignLabel.ZERO, True)
    negatives = sum(1 for i in range(n - 1) if s + i < 0)
    sign = (-1) ** (n + 1) * (-1) ** negatives
    return SignPrediction(n, s, SignLabel.POSITIVE if sign > 0 else SignLabel.NEGATIVE, False)


@dataclass(frozen=True)
class Classification:
    computed: SignClass
    predicted: SignLabel
    exact: bool

    @property
    def agree(self) -> bool:
        return self.computed.label == self.predicted

    @property
    def uncertain(self) -> bool:
        return self.computed.label is SignLabel.UNCERTAIN


def _classify(f: FunctionSpec, nodes: NodeSet, predicted: SignLabel,
              policy: ScalarPolicy | None, strict: bool) -> Classification:
    if policy is not None and policy.is_exact:
        require_exact(f, nodes.values)
    want_exact = policy is None or policy.is_exact
    value = divdiff_exact(f, nodes) if want_exact else None
    if value is not None:
        return Classification(SignClass.exact(value), predicted, True)
    work = to_float_nodes(nodes)
    v = divdiff_direct(f, work)
    bound = direct_error_bound(f, work)
    margin = policy.sign_margin if policy is not None else 0.0
    sc = SignClass.from_float(v, bound, predicted is SignLabel.ZERO, margin)
    if strict and sc.label is SignLabel.UNCERTAIN:
        raise UncertainClassification(f"|{v!r}| <= error bound {bound!r} for {f.label()}")
    return Classification(sc, predicted, False)


def classify_reciprocal_schur(nodes: NodeSet, s, policy: ScalarPolicy | None = None,
                              strict: bool = False) -> tuple[SignClass, SignPrediction, bool]:
    """Compute sum_j 1/(x_j^s prod_{k != j}(x_j - x_k)) and compare its sign with the oracle.

    Returns ``(computed, predicted, agree)``.  With ``strict=True`` an
    Uncertain float result raises :class:`UncertainClassification`.
    """
    if nodes[0] <= 0:
        raise DomainError("reciprocal Schur sums need positive nodes")
    pred = sign_oracle(nodes.n, s)
    c = _classify(ReciprocalPower(pred.s), nodes, pred.predicted, policy, strict)
    return c.computed, pred, c.agree


def watson_prediction(a, n: int) -> SignLabel:
    a = to_rational(a)
    if a == 1:
        return SignLabel.ZERO
    if a > 1:
        return SignLabel.POSITIVE
    return SignLabel.POSITIVE if (n + 1) % 2 == 0 else SignLabel.NEGATIVE


def watson_classify(a, nodes: NodeSet, policy: ScalarPolicy | None = None,
                    strict: bool = False) -> tuple[SignClass, SignLabel]:
    """Sign of sum_j a^(x_j)/prod(x_j - x_k): positive for a > 1, sign (-1)^(n+1) for a < 1, zero at 1."""
    pred = watson_prediction(a, nodes.n)
    c = _classify(Exponential(a), nodes, pred, policy, strict)
    return c.computed, pred


def schur_lhs(x, y, z, s) -> Scalar:
    """x^s(x-y)(x-z) + y^s(y-z)(y-x) + z^s(z-x)(z-y) for positive x, y, z."""
    if min(x, y, z) <= 0:
        raise DomainError("Schur's inequality needs positive x, y, z")
    exact = all(isinstance(v, (int, Fraction)) for v in (x, y, z)) and to_rational(s).denominator == 1
    if exact:
        x, y, z = (Fraction(v) for v in (x, y, z))
        e = int(to_rational(s))
    else:
        x, y, z = (float(v) for v in (x, y, z))
        e = float(s)
    return x ** e * (x - y) * (x - z) + y ** e * (y - z) * (y - x) + z ** e * (z - x) * (z - y)


# ---------------------------------------------------------------------------
# lower bounds
# ---------------------------------------------------------------------------

def _require_convex_derivative(f: FunctionSpec, order: int, lo, hi) -> None:
    # f^(order) is convex on [lo, hi] iff f^(order+2) >= 0 there (catalog functions are smooth)
    if f.derivative_sign(order + 2, lo, hi) not in (0, 1):
        raise ConvexityNotGuaranteed(
            f"derivative {order} of {f.label()} is not known to be convex on [{lo}, {hi}]"
        )


def _mean(values):
    return sum(values, Fraction(0) if isinstance(values[0], Fraction) else 0.0) / len(values)


def farwig_zwick_bound(f: FunctionSpec, nodes: NodeSet) -> Scalar:
    """f^(n-1)(c)/(n-1)! at the node mean c; valid when f^(n-1) is convex on the hull."""
    n = nodes.n
    _require_convex_derivative(f, n - 1, nodes[0], nodes[-1])
    c = _mean(list(nodes.values))
    d = f.derivative(n - 1, c)
    return d / math.factorial(n - 1)


@dataclass(frozen=True)
class BoundComparison:
    p: int
    divdiff: Scalar
    hunter: Scalar
    farwig_zwick: Scalar

    @property
    def larger(self) -> str:
        if self.hunter > self.farwig_zwick:
            return "hunter"
        if self.farwig_zwick > self.hunter:
            return "farwig_zwick"
        return "equal"

    @property
    def holds(self) -> bool:
        return self.divdiff >= max(self.hunter, self.farwig_zwick)


def bound_comparison(p: int, nodes: NodeSet) -> BoundComparison:
    """Both lower bounds for the divided difference of t^(2p+n-1) = h_2p."""
    f = Monomial(2 * p + nodes.n - 1)
    return BoundComparison(p, divdiff(f, nodes), hunter_bound(p, nodes), farwig_zwick_bound(f, nodes))


# ---------------------------------------------------------------------------
# mean-value locators
# ---------------------------------------------------------------------------

def _exact_target(f: FunctionSpec, nodes: NodeSet) -> Scalar:
    v = divdiff_exact(f, nodes)
    return v if v is not None else divdiff(f, to_float_nodes(nodes))


def _scan(g, a: float, b: float, points: int = SCAN_POINTS, avoid=(), gap: float = 0.0):
    """First bracketing pair on an even grid, plus the range of g seen.

    Grid points closer than ``gap`` to any value in ``avoid`` are skipped.
    """
    xs = [a + (b - a) * i / points for i in range(points + 1)]
    if avoid and gap > 0:
        xs = [x for x in xs if all(abs(x - v) > gap for v in avoid)]
    vals = []
    for x in xs:
        try:
            vals.append((x, g(x)))
        except (DomainError, ZeroDivisionError):
            continue
    if not vals:
        return None, (math.nan, math.nan)
    rng = (min(v for _, v in vals), max(v for _, v in vals))
    for (x0, v0), (x1, v1) in zip(vals, vals[1:]):
        if v0 == 0:
            return (x0, x0), rng
        if sign_of(v0) != sign_of(v1):
            return (x0, x1), rng
    if vals[-1][1] == 0:
        return (vals[-1][0],) * 2, rng
    return None, rng


def _solve(g, bracket) -> float:
    a, b = bracket
    if a == b:
        return a
    return brentq(g, a, b, xtol=1e-300, rtol=4 * 2.0 ** -52, maxiter=400)


def _relative(residual, target) -> float:
    return abs(float(residual)) / max(1.0, abs(float(target)))


@dataclass(frozen=True)
class Located:
    t: float
    residual: float  # |lhs - rhs| / max(1, |rhs|), re-evaluated exactly where possible
    inside_hull: bool = True


def schwarz_locate(f: FunctionSpec, nodes: NodeSet, tol: float = DEFAULT_LOCATOR_TOL) -> Located:
    """Find t in (x_1, x_n) with f^(n-1)(t)/(n-1)! = f[x_1..x_n].

    Raises :class:`RootNotFound` (with the residual range) if the scan finds no
    sign change; the returned residual is re-substituted, exactly when ``f``
    is rational-valued there.
    """
    n = nodes.n
    k = n - 1
    fact = math.factorial(k)
    target = _exact_target(f, nodes)
    lo, hi = float(nodes[0]), float(nodes[-1])

    def resid(t):
        tt = Fraction(t) if f.is_exact_at(Fraction(t), k) and isinstance(target, Fraction) else t
        return f.derivative(k, tt) / fact - target

    if f.derivative_sign(n, lo, hi) == 0:
        t = 0.5 * (lo + hi)
    else:
        g = lambda t: float(f.derivative(k, t)) / fact - float(target)  # noqa: E731
        bracket, rng = _scan(g, lo, hi)
        if bracket is None:
            raise RootNotFound(f"no sign change for {f.label()} on ({lo}, {hi})", rng)
        t = _solve(g, bracket)
    r = _relative(resid(t), target)
    if r > tol:
        raise RootNotFound(f"residual {r:.3g} exceeds tol at t={t!r}", (r, r))
    return Located(t, r, lo < t < hi)


def _dd_with(f: FunctionSpec, t, xs, exact: bool) -> Scalar:
    pts = sorted([t, *xs])
    if exact:
        pts = [Fraction(p) for p in pts]
    return newton_table([f.value(p) for p in pts], pts)


def hopf2_locate(f: FunctionSpec, nodes: NodeSet, tol: float = DEFAULT_LOCATOR_TOL,
                 max_expansions: int = 8, normalization: str = "n") -> Located:
    """Find t with f[t, x_1..x_m] = c * f'[x_1..x_m] for the m given nodes.

    c is 1/(m+1) for ``normalization="n"`` and 1/m for ``"n-1"``.  The search
    starts on the hull of the nodes and doubles the bracket while no sign
    change is seen; a root outside the hull is returned with
    ``inside_hull=False``.
    """
    m = nodes.n
    n = m + 1
    c = _factor(normalization, n)
    fp = f.differentiate(1)
    dtarget = _exact_target(fp, nodes)
    exact = isinstance(dtarget, Fraction) and is_exact_eligible(f, [Fraction(v) for v in nodes.values])
    target = dtarget * c if exact else float(dtarget) * float(c)
    xs = [float(v) for v in nodes.values]
    xq = [Fraction(v) for v in nodes.values]
    lo, hi = xs[0], xs[-1]

    def g(t):
        # the float Newton table cancels badly for t next to a node, so rational
        # functions are always evaluated exactly here
        if t in xs:
            t = math.nextafter(t, math.inf)
        if exact:
            return float(_dd_with(f, Fraction(t), xq, True) - target)
        return float(_dd_with(f, t, xs, False)) - float(target)

    def resid(t):
        if t in xs:
            t = math.nextafter(t, math.inf)
        if exact:
            return _dd_with(f, Fraction(t), xq, True) - target
        return _dd_with(f, t, xs, False) - target

    if f.derivative_sign(m, lo, hi) == 0:
        # f^(m) vanishes: both sides are zero for every t
        t = 0.5 * (lo + hi)
        return Located(t, _relative(resid(t), target), True)

    dom = f.domain
    width = hi - lo
    seen = (math.inf, -math.inf)
    last_bad = None
    for step in range(max_expansions + 1):
        pad = width * (2 ** step - 1) / 2
        if step == 0:
            a, b = lo, hi
        else:
            a, b = lo - pad, hi + pad
        a = max(a, 0.5 * (float(dom.lo) + lo)) if math.isfinite(dom.lo) else a
        b = min(b, 0.5 * (float(dom.hi) + hi)) if math.isfinite(dom.hi) else b
        gap = 0.0 if exact else 1e-6 * max(width, 1.0)
        bracket, rng = _scan(g, a, b, avoid=xs, gap=gap)
        seen = (min(seen[0], rng[0]), max(seen[1], rng[1]))
        if bracket is not None:
            t = _solve(g, bracket)
            r = _relative(resid(t), target)
            if r <= tol:
                return Located(t, r, lo < t < hi)
            last_bad = (t, r)
        if m == 1:
            width = max(width, 1.0)
    if last_bad is not None:
        t, r = last_bad
        raise RootNotFound(f"residual {r:.3g} exceeds tol at t={t!r}", seen)
    raise RootNotFound(f"no sign change for {f.label()} after {max_expansions} expansions", seen)


@dataclass(frozen=True)
class Hopf1Result:
    points: tuple | None
    lam: float | None
    residual: float | None
    residual_range: tuple[float, float]


def hopf1_verify(f: FunctionSpec, nodes: NodeSet, tol: float = DEFAULT_LOCATOR_TOL,
                 points: int = SCAN_POINTS, normalization: str = "n") -> Hopf1Result:
    """Search t_j = x_j + lam (x_{j+1} - x_j), lam in (0, 1), for f[x] = c * f'[t_1..t_{n-1}].

    c is 1/n or 1/(n-1) as for :func:`hopf2_locate`.  Only the diagonal
    family is searched, so ``points=None`` in the result is a legitimate
    outcome rather than a failure of the identity.
    """
    n = nodes.n
    c = _factor(normalization, n)
    fp = f.differentiate(1)
    target = _exact_target(f, nodes)
    xs = [float(v) for v in nodes.values]

    def ts(lam):
        return [xs[j] + lam * (xs[j + 1] - xs[j]) for j in range(n - 1)]

    def dd_prime(lam, exact=False):
        pts = ts(lam)
        if exact:
            pts = [Fraction(p) for p in pts]
        if len(pts) == 1:
            return fp.value(pts[0])
        return newton_table([fp.value(p) for p in pts], pts)

    def g(lam):
        return float(dd_prime(lam)) * float(c) - float(target)

    if f.derivative_sign(n - 1, xs[0], xs[-1]) == 0:
        lam = 0.5
        return Hopf1Result(tuple(ts(lam)), lam, _relative(g(lam), target), (0.0, 0.0))

    eps = 1e-12
    grid = [eps + (1 - 2 * eps) * i / points for i in range(points + 1)]
    vals = [(lam, g(lam)) for lam in grid]
    rng = (min(v for _, v in vals), max(v for _, v in vals))
    bracket = None
    for (l0, v0), (l1, v1) in zip(vals, vals[1:]):
        if v0 == 0 or sign_of(v0) != sign_of(v1):
            bracket = (l0, l0) if v0 == 0 else (l0, l1)
            break
    if bracket is None:
        return Hopf1Result(None, None, None, rng)
    lam = _solve(g, bracket)
    exact = isinstance(target, Fraction) and is_exact_eligible(fp, [Fraction(p) for p in ts(lam)])
    r = dd_prime(lam, exact) * c - target if exact else g(lam)
    return Hopf1Result(tuple(ts(lam)), lam, _relative(r, target), rng)


# ---------------------------------------------------------------------------
# majorization and Schur convexity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MajorizationPair:
    x: tuple
    y: tuple
    relation: str  # "x_precedes_y" or "incomparable"


def _desc(v) -> tuple:
    vals = list(v.values) if isinstance(v, NodeSet) else list(v)
    return tuple(sorted(vals, reverse=True))


def majorizes(x, y) -> bool:
    """True when x is majorized by y: partial sums of sorted-descending x never exceed y's, totals equal."""
    xd, yd = _desc(x), _desc(y)
    if len(xd) != len(yd):
        raise LengthMismatch(f"lengths {len(xd)} and {len(yd)} differ")
    exact = all(isinstance(v, (int, Fraction)) for v in xd + yd)
    if exact:
        sx = sy = Fraction(0)
        slack = 0
    else:
        scale = max(abs(float(v)) for v in xd + yd) * len(xd)
        sx = sy = 0.0
        slack = 8 * 2.0 ** -52 * scale
    for a, b in zip(xd[:-1], yd[:-1]):
        sx += a
        sy += b
        if sx > sy + slack:
            return False
    return abs((sx + xd[-1]) - (sy + yd[-1])) <= slack


def majorization_pair(x, y) -> MajorizationPair:
    return MajorizationPair(_desc(x), _desc(y), "x_precedes_y" if majorizes(x, y) else "incomparable")


def schur_convexity_check(f: FunctionSpec, x: NodeSet, y: NodeSet) -> bool:
    """Whether f[x] <= f[y] for x majorized by y, given f^(n-1) convex on the combined hull."""
    if not majorizes(x, y):
        raise NotComparable("x is not majorized by y")
    n = x.n
    lo, hi = min(x[0], y[0]), max(x[-1], y[-1])
    _require_convex_derivative(f, n - 1, lo, hi)
    dx, dy = divdiff_exact(f, x), divdiff_exact(f, y)
    if dx is not None and dy is not None:
        return dx <= dy
    fx = float(divdiff(f, to_float_nodes(x)))
    fy = float(divdiff(f, to_float_nodes(y)))
    slack = 1e-12 * max(1.0, abs(fx), abs(fy))
    return fx <= fy + slack


# ---------------------------------------------------------------------------
# class Q and the Stieltjes limit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QCounterexample:
    x: float
    z: float
    tau: float
    lhs: float
    rhs: float


def class_q_gap(f: FunctionSpec, x, z, tau) -> tuple[float, float]:
    """(lhs, rhs) of f((1-tau)x + tau z) <= f(x)/(1-tau) + f(z)/tau."""
    lhs = float(f.value((1 - tau) * x + tau * z))
    rhs = float(f.value(x)) / (1 - tau) + float(f.value(z)) / tau
    return lhs, rhs


def class_q_falsify(f: FunctionSpec, domain, trials: int, seed: int,
                    tau_range: tuple[float, float] = (0.01, 0.99)) -> QCounterexample | None:
    """Random search for a violation of the class-Q inequality; None if none is found."""
    if trials < 1:
        raise ValueError("trials must be positive")
    dom = as_interval(domain)
    if not dom.finite:
        raise ValueError("class-Q search needs a bounded domain")
    lo, hi = float(dom.lo), float(dom.hi)
    rnd = random.Random(seed)
    for _ in range(trials):
        a, b = rnd.uniform(lo, hi), rnd.uniform(lo, hi)
        x, z = min(a, b), max(a, b)
        if not (lo < x and z < hi):
            continue
        tau = rnd.uniform(*tau_range)
        lhs, rhs = class_q_gap(f, x, z, tau)
        if lhs > rhs + 1e-12 * (abs(lhs) + abs(rhs)):
            return QCounterexample(x, z, tau, lhs, rhs)
    return None


@dataclass(frozen=True)
class StieltjesRow:
    scale: Scalar
    value: Scalar
    ref_n_minus_1: Scalar  # f^(n-1)(t0)/(n-1)!
    ref_n: Scalar  # f^(n-1)(t0)/n!


def stieltjes_probe(f: FunctionSpec, t0, schedule: Sequence, n: int = 3,
                    offsets: Sequence | None = None) -> list[StieltjesRow]:
    """Divided differences over t0 + h * offsets for shrinking h, beside both candidate limits."""
    if offsets is None:
        offsets = [Fraction(2 * i - (n - 1), 2) for i in range(n)]
    offsets = [to_rational(o) for o in offsets]
    if len(offsets) != n or min(offsets) > 0 or max(offsets) < 0:
        raise ValueError("offsets must be n distinct values with t0 between their extremes")
    scales = [to_rational(h) for h in schedule]
    if any(h <= 0 for h in scales) or any(b >= a for a, b in zip(scales, scales[1:])):
        raise ValueError("schedule must be strictly decreasing and positive")
    t0 = to_rational(t0)
    d = f.derivative(n - 1, t0)
    ref1 = d / math.factorial(n - 1)
    ref2 = d / math.factorial(n)
    rows = []
    for h in scales:
        pts = [t0 + h * o for o in offsets]
        ns = make_node_set(pts, f.domain, ScalarPolicy.exact())
        v = divdiff_exact(f, ns)
        if v is None:
            v = divdiff(f, to_float_nodes(ns))
        rows.append(StieltjesRow(h, v, ref1, ref2))
    return rows


def stieltjes_verdict(rows: Sequence[StieltjesRow]) -> str:
    """Which normalization the finest-scale value is closer to: '(n-1)!' or 'n!'."""
    last = rows[-1]
    e1 = abs(float(last.value) - float(last.ref_n_minus_1))
    e2 = abs(float(last.value) - float(last.ref_n))
    return "(n-1)!" if e1 <= e2 else "n!"


__all__ = [
    "SignPrediction",
    "sign_oracle",
    "classify_reciprocal_schur",
    "watson_prediction",
    "watson_classify",
    "schur_lhs",
    "farwig_zwick_bound",
    "BoundComparison",
    "bound_comparison",
    "Located",
    "schwarz_locate",
    "hopf2_locate",
    "Hopf1Result",
    "hopf1_verify",
    "MajorizationPair",
    "majorizes",
    "majorization_pair",
    "schur_convexity_check",
    "QCounterexample",
    "class_q_gap",
    "class_q_falsify",
    "StieltjesRow",
    "stieltjes_probe",
    "stieltjes_verdict",
]
