"""Divided differences by several independent algorithms.

``divdiff_direct`` is the symmetric sum over nodes, ``divdiff_recurrence``
the triangular Newton table, ``divdiff_exact`` the recurrence in rational
arithmetic on the exact binary values of the nodes.  ``divdiff_report``
runs them side by side (plus the Peano quadrature and, on request, Monte Carlo)
and cross-checks the results.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .core import (
    FunctionSpec,
    NodeSet,
    Scalar,
    ScalarPolicy,
    is_exact_eligible,
    make_node_set,
    require_exact,
)
from .errors import DuplicateNodes, MethodDisagreement, NodeCollision

EPS = sys.float_info.epsilon
UNIT_ROUNDOFF = EPS / 2

# float methods may differ by this many ulps times the condition estimate
DISAGREEMENT_ULPS = 1e6

DEFAULT_METHODS = ("direct", "recurrence", "exact", "peano")


def uses_exact(f: FunctionSpec, nodes: NodeSet) -> bool:
    return nodes.exact and is_exact_eligible(f, nodes.values)


def to_float_nodes(nodes: NodeSet) -> NodeSet:
    if not nodes.exact:
        return nodes
    return NodeSet(nodes.floats(), tuple(float(v) for v in nodes.original), nodes.domain, False)


def direct_terms(f: FunctionSpec, nodes: NodeSet, exact: bool | None = None) -> list:
    """The n summands f(x_j) / prod_{k != j}(x_j - x_k)."""
    if exact is None:
        exact = uses_exact(f, nodes)
    xs = nodes.values if exact else nodes.floats()
    terms = []
    for j, xj in enumerate(xs):
        denom = Fraction(1) if exact else 1.0
        for k, xk in enumerate(xs):
            if k != j:
                denom *= xj - xk
        fx = f.value(xj)
        terms.append(fx / denom)
    return terms


def divdiff_direct(f: FunctionSpec, nodes: NodeSet) -> Scalar:
    """f[x_1..x_n] as the plain symmetric sum; exact when the inputs allow it."""
    exact = uses_exact(f, nodes)
    terms = direct_terms(f, nodes, exact)
    return sum(terms, Fraction(0)) if exact else math.fsum(terms)


def newton_table(values: list, xs) -> Scalar:
    # in-place column sweep over ascending nodes
    d = list(values)
    n = len(xs)
    for level in range(1, n):
        for i in range(n - level):
            d[i] = (d[i + 1] - d[i]) / (xs[i + level] - xs[i])
    return d[0]


def divdiff_recurrence(f: FunctionSpec, nodes: NodeSet) -> Scalar:
    """f[x_1..x_n] from the triangular recurrence on ascending nodes."""
    exact = uses_exact(f, nodes)
    xs = nodes.values if exact else nodes.floats()
    return newton_table([f.value(x) for x in xs], xs)


def divdiff_exact(f: FunctionSpec, nodes: NodeSet) -> Fraction | None:
    """Exact rational value, or None if ``f`` is not rational-valued at the nodes.

    Float nodes are read as the exact rationals they represent.
    """
    xs = [Fraction(v) for v in nodes.values]
    if not is_exact_eligible(f, xs):
        return None
    return newton_table([f.value(x) for x in xs], xs)


def divdiff(f: FunctionSpec, nodes: NodeSet) -> Scalar:
    """Recommended single value: the recurrence, run exactly when the inputs allow."""
    return divdiff_recurrence(f, nodes)


def direct_error_bound(f: FunctionSpec, nodes: NodeSet) -> float:
    """A priori rounding bound for the float evaluation of ``divdiff_direct``.

    Each term carries at most about 2n+4 roundings (differences, product,
    division, function value); the factor is doubled for headroom.  The fsum
    reduction adds one rounding of the result.
    """
    terms = direct_terms(f, nodes, exact=False)
    k = 4 * nodes.n + 8
    gamma = k * UNIT_ROUNDOFF / (1 - k * UNIT_ROUNDOFF)
    return gamma * math.fsum(abs(t) for t in terms) + UNIT_ROUNDOFF * abs(math.fsum(terms))


def condition_estimate(f: FunctionSpec, nodes: NodeSet, result) -> float | None:
    """sum |f(x_j)/prod(x_j - x_k)| / |result|; None when the result is zero."""
    if result == 0:
        return None
    terms = direct_terms(f, nodes)
    return float(sum(abs(t) for t in terms) / abs(result))


@dataclass
class EvalReport:
    function: str
    nodes: tuple
    exact: bool
    per_method: dict = field(default_factory=dict)
    spread: float = 0.0
    condition_estimate: float | None = None
    recommended: Scalar = 0

    def as_dict(self) -> dict:
        from .serialize import encode

        return {
            "function": self.function,
            "nodes": [encode(v) for v in self.nodes],
            "mode": "exact" if self.exact else "float",
            "per_method": {k: encode(v) for k, v in self.per_method.items()},
            "spread": encode(self.spread),
            "condition_estimate": encode(self.condition_estimate),
            "recommended": encode(self.recommended),
        }


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def divdiff_report(
    f: FunctionSpec,
    nodes: NodeSet,
    policy: ScalarPolicy | None = None,
    methods=DEFAULT_METHODS,
    tol: float = 1e-10,
    mc_trials: int = 10**4,
    seed: int = 0,
) -> EvalReport:
    """Evaluate ``f[nodes]`` by every requested applicable method and cross-check.

    ``policy=None`` picks exact arithmetic whenever the inputs are eligible.
    Raises :class:`MethodDisagreement` when two float methods (or a float
    method and the exact value) differ by more than the allowance.
    """
    if policy is None:
        exact = uses_exact(f, nodes)
    elif policy.is_exact:
        require_exact(f, nodes.values)
        exact = nodes.exact
    else:
        exact = False
    work = nodes if exact else to_float_nodes(nodes)

    report = EvalReport(f.label(), work.values, exact)
    pm = report.per_method
    if "direct" in methods:
        pm["direct"] = divdiff_direct(f, work)
    if "recurrence" in methods:
        pm["recurrence"] = divdiff_recurrence(f, work)
    exact_value = divdiff_exact(f, work) if "exact" in methods else None
    if exact_value is not None:
        pm["exact"] = exact_value
    if "peano" in methods:
        from .bspline import peano_divdiff

        pm["peano"] = peano_divdiff(f, work, tol)
    if "montecarlo" in methods:
        from .stochastic import divdiff_monte_carlo

        est = divdiff_monte_carlo(f, work, mc_trials, seed)
        if est is not None:
            pm["montecarlo"] = est.mean

    if exact_value is not None:
        report.recommended = exact_value
    elif "recurrence" in pm:
        report.recommended = pm["recurrence"]
    else:
        report.recommended = next(iter(pm.values()))

    float_methods = {k: v for k, v in pm.items() if isinstance(v, float) and k != "montecarlo"}
    report.spread = max((_rel(a, b) for a, b in combinations(float_methods.values(), 2)), default=0.0)
    report.condition_estimate = condition_estimate(f, work, report.recommended)

    # allowance in absolute terms: 1e6 eps * cond * |result| = 1e6 eps * sum|terms|
    mass = float(sum(abs(t) for t in direct_terms(f, work)))
    base_allow = DISAGREEMENT_ULPS * EPS * mass
    ref = float(report.recommended)

    def allowance(name):
        if name == "peano":
            return base_allow + tol + 1e-9 * abs(ref)
        return base_allow

    checks = list(combinations(float_methods, 2))
    if exact_value is not None:
        checks += [(name, "exact") for name in float_methods]
    for a, b in checks:
        gap = abs(float(pm[a]) - float(pm[b]))
        if gap > max(allowance(a), allowance(b)):
            raise MethodDisagreement(
                f"{a}={float(pm[a])!r} vs {b}={float(pm[b])!r} for {f.label()} on {list(work.values)}",
                report,
            )
    return report


@dataclass(frozen=True)
class ChainIdentity:
    """Both sides of the telescoping identity, with and without the (n-1)/n factor.

    ``lhs`` is f[x] - f[a] and ``rhs`` the telescoping sum
    sum_i (x_i - a_i) f[a_1..a_i, x_i..x_m], where m = n - 1 points per set.
    """

    lhs: Scalar
    rhs: Scalar
    residual: Scalar
    prefactor: Fraction
    prefactored_lhs: Scalar
    prefactored_residual: Scalar

    @property
    def holds(self) -> str:
        """Which normalization vanishes: 'plain', 'prefactored', 'both' or 'neither'."""
        plain = self.residual == 0
        pref = self.prefactored_residual == 0
        return {(True, True): "both", (True, False): "plain",
                (False, True): "prefactored", (False, False): "neither"}[(plain, pref)]


def chain_identity_residual(f: FunctionSpec, a_nodes: NodeSet, x_nodes: NodeSet) -> ChainIdentity:
    """Evaluate the chain identity pairing a_i with x_i in the callers' original order."""
    a = list(a_nodes.original)
    x = list(x_nodes.original)
    m = len(a)
    if len(x) != m:
        raise ValueError("a_nodes and x_nodes must have the same size")
    exact = a_nodes.exact and x_nodes.exact
    policy = ScalarPolicy.exact() if exact else ScalarPolicy.floating()

    def dd(points):
        try:
            ns = make_node_set(points, f.domain, policy)
        except DuplicateNodes as exc:
            raise NodeCollision(f"mixed node set {points} has a repeated point") from exc
        return divdiff(f, ns)

    mixed = [a[:i] + x[i - 1:] for i in range(1, m + 1)]
    mixed_vals = [dd(pts) for pts in mixed]

    lhs = divdiff(f, x_nodes) - divdiff(f, a_nodes)
    rhs = sum(((x[i] - a[i]) * mixed_vals[i] for i in range(m)), Fraction(0) if exact else 0.0)
    n = m + 1
    prefactor = Fraction(n - 1, n)
    pre_lhs = prefactor * lhs if exact else float(prefactor) * lhs
    return ChainIdentity(lhs, rhs, lhs - rhs, prefactor, pre_lhs, pre_lhs - rhs)
