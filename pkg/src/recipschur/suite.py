"""Registry of randomized property checks, grouped by module.

Each property draws its instances from a ``random.Random`` seeded by
``derive_seed(seed, name)``, so results do not depend on which other
properties run, in what order, or on how many threads run them.  The sizes
registered here are the quick defaults used by ``recipschur suite``; the
acceptance tests call the same functions with larger sizes.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .bspline import bspline_eval, bspline_integral, bspline_mean, bspline_recursive, peano_divdiff
from .core import (
    Exponential,
    FunctionSpec,
    Interval,
    Monomial,
    Polynomial,
    PowerLaw,
    RationalH,
    ReciprocalPower,
    ScalarPolicy,
    ShiftedReciprocal,
    SignLabel,
    make_node_set,
)
from .divdiff import (
    chain_identity_residual,
    direct_error_bound,
    divdiff,
    divdiff_direct,
    divdiff_exact,
    divdiff_recurrence,
    to_float_nodes,
)
from .errors import ConvexityNotGuaranteed, DuplicateNodes, NodeCollision, RootNotFound
from .inequalities import (
    _dd_with,
    bound_comparison,
    class_q_falsify,
    class_q_gap,
    classify_reciprocal_schur,
    farwig_zwick_bound,
    hopf2_locate,
    majorizes,
    schur_convexity_check,
    schur_lhs,
    schwarz_locate,
    sign_oracle,
    stieltjes_probe,
    stieltjes_verdict,
    watson_classify,
)
from .sampling import derive_seed, random_floats, random_rationals, robin_hood_pair
from .serialize import encode
from .stochastic import (
    chs_monte_carlo,
    exp_decay_closed_form,
    laplace_identity_mc,
    laplace_target,
)
from .symmetric import chs, chs_enumerate, chs_via_bialternant, chs_via_divdiff, hunter_bound

LOW, HIGH = Fraction(1, 10), Fraction(10)

# one sampler per catalog variant; every sample is defined on (0, inf)
CATALOG: dict[str, Callable[[random.Random], FunctionSpec]] = {
    "monomial": lambda r: Monomial(r.randint(0, 8)),
    "recip": lambda r: ReciprocalPower(Fraction(r.randint(-8, 8), 2)),
    "power": lambda r: PowerLaw(Fraction(r.randint(-20, 20), 7)),
    "exp": lambda r: Exponential(r.choice([Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3), math.e])),
    "shiftrecip": lambda r: ShiftedReciprocal(Fraction(r.randint(1, 5))),
    "lapH_power": lambda r: RationalH(ReciprocalPower(r.randint(1, 4)), r.randint(2, 5)),
    "lapH_exp": lambda r: RationalH(ShiftedReciprocal(1), r.randint(2, 5)),
    "poly": lambda r: Polynomial(tuple(Fraction(r.randint(-5, 5)) for _ in range(r.randint(1, 6)))),
}

EXACT_KINDS = ("monomial", "shiftrecip", "lapH_power", "lapH_exp", "poly")


def exact_catalog_sample(rng: random.Random) -> FunctionSpec:
    """A catalog function that is rational-valued at rational points."""
    kind = rng.choice(EXACT_KINDS + ("recip_int",))
    if kind == "recip_int":
        return ReciprocalPower(rng.randint(-4, 4))
    return CATALOG[kind](rng)


def positive_nodes(rng: random.Random, n: int, lo=LOW, hi=HIGH):
    return make_node_set(random_rationals(rng, n, lo, hi))


@dataclass
class Tally:
    """Running record for one property: counts, the worst metric value and one failing example."""

    metric: str
    higher_is_worse: bool = True
    checked: int = 0
    failures: int = 0
    worst: float | None = None
    example: str | None = None
    notes: dict = field(default_factory=dict)

    def observe(self, value: float) -> None:
        value = float(value)
        if self.worst is None or (value > self.worst if self.higher_is_worse else value < self.worst):
            self.worst = value

    def record(self, ok: bool, value=None, example=None) -> None:
        self.checked += 1
        if value is not None:
            self.observe(value)
        if not ok:
            self.failures += 1
            if self.example is None and example is not None:
                self.example = str(example)


@dataclass(frozen=True)
class PropertyResult:
    name: str
    module: str
    passed: bool
    checked: int
    failures: int
    metric: str
    worst: float | None
    example: str | None
    notes: dict

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "module": self.module,
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures,
            "metric": self.metric,
            "worst": encode(self.worst),
            "example": self.example,
            "notes": encode(self.notes),
        }


# ---------------------------------------------------------------------------
# core
# ---------------------------------------------------------------------------

def prop_backend_agreement(seed: int, instances: int = 150, max_order: int = 8) -> Tally:
    """Exact and float derivatives agree to 1e-12 relative for orders <= 8."""
    rng = random.Random(seed)
    t = Tally("max relative gap")
    for _ in range(instances):
        f = exact_catalog_sample(rng)
        x = random_rationals(rng, 1, LOW, HIGH)[0]
        for k in range(max_order + 1):
            ex = f.derivative(k, x)
            fl = f.derivative(k, float(x))
            gap = abs(float(ex) - fl) / max(abs(float(ex)), 1e-300) if ex != 0 else abs(fl)
            t.record(gap <= 1e-12, gap, (f.label(), k, str(x)))
    return t


_DIRECT_VALUE = {
    Monomial: lambda f, x: x ** f.degree,
    ReciprocalPower: lambda f, x: x ** -float(f.s),
    PowerLaw: lambda f, x: x ** float(f.exponent),
    Exponential: lambda f, x: float(f.base) ** x,
    ShiftedReciprocal: lambda f, x: 1.0 / (x + float(f.shift)),
}


def prop_order_zero(seed: int, instances: int = 300) -> Tally:
    """derivative(0, t) matches the function written out directly."""
    rng = random.Random(seed)
    t = Tally("max relative gap")
    kinds = ("monomial", "recip", "power", "exp", "shiftrecip")
    for _ in range(instances):
        f = CATALOG[rng.choice(kinds)](rng)
        x = float(random_rationals(rng, 1, LOW, HIGH)[0])
        got = float(f.derivative(0, x))
        want = _DIRECT_VALUE[type(f)](f, x)
        gap = abs(got - want) / max(abs(want), 1e-300)
        t.record(gap <= 1e-13, gap, (f.label(), x))
    return t


def prop_reciprocal_derivative_sign(seed: int, points: int = 12) -> Tally:
    """Sign of (t^-s)^(n-1) equals the product-formula sign for every t > 0."""
    rng = random.Random(seed)
    t = Tally("mismatches")
    for n in range(2, 7):
        for k in range(-12, 9):
            s = Fraction(k, 2)
            pred = sign_oracle(n, s).predicted
            f = ReciprocalPower(s)
            for x in random_rationals(rng, points, LOW, HIGH):
                v = f.derivative(n - 1, x if s.denominator == 1 else float(x))
                t.record(SignLabel.of(v) is pred, None, (n, str(s), str(x)))
    t.worst = float(t.failures)
    return t


# ---------------------------------------------------------------------------
# divdiff
# ---------------------------------------------------------------------------

def _direct_in_order(f: FunctionSpec, xs) -> Fraction:
    total = Fraction(0)
    for j, xj in enumerate(xs):
        d = Fraction(1)
        for k, xk in enumerate(xs):
            if k != j:
                d *= xj - xk
        total += f.value(xj) / d
    return total


def prop_permutation_symmetry(seed: int, instances: int = 200) -> Tally:
    """The symmetric sum taken in a shuffled order equals the sorted-order value exactly."""
    rng = random.Random(seed)
    t = Tally("mismatches")
    for _ in range(instances):
        f = exact_catalog_sample(rng)
        xs = random_rationals(rng, rng.randint(2, 6), LOW, HIGH)
        base = divdiff_direct(f, make_node_set(xs))
        shuffled = list(xs)
        rng.shuffle(shuffled)
        t.record(_direct_in_order(f, shuffled) == base, None, (f.label(), [str(v) for v in xs]))
    t.worst = float(t.failures)
    return t


def prop_method_equivalence(seed: int, instances: int = 200) -> Tally:
    """direct and recurrence agree to 1e-9 (float) and exactly (rational)."""
    rng = random.Random(seed)
    t = Tally("max |direct - recurrence| / max(1, |recurrence|)")
    for _ in range(instances):
        kind = rng.choice(sorted(CATALOG))
        f = CATALOG[kind](rng)
        n = rng.randint(2, 6)
        xs = random_floats(rng, n, 0.1, 10.0, min_gap=1e-3)
        ns = make_node_set(xs, f.domain, ScalarPolicy.floating())
        fl = to_float_nodes(ns)
        d, r = divdiff_direct(f, fl), divdiff_recurrence(f, fl)
        d, r = float(d), float(r)
        gap = abs(d - r) / max(1.0, abs(r))
        t.record(gap < 1e-9, gap, (f.label(), xs))
        exact_ns = make_node_set([Fraction(x) for x in xs], f.domain)
        if divdiff_exact(f, exact_ns) is not None:
            e = divdiff_exact(f, exact_ns)
            ok = divdiff_direct(f, exact_ns) == divdiff_recurrence(f, exact_ns) == e
            t.record(ok, None, ("exact", f.label(), xs))
    return t


def prop_degree_collapse(seed: int, instances: int = 200) -> Tally:
    """Monomial(d) over n nodes gives 0 for d < n-1 and 1 for d = n-1."""
    rng = random.Random(seed)
    t = Tally("mismatches")
    for _ in range(instances):
        n = rng.randint(2, 7)
        d = rng.randint(0, n - 1)
        xs = random_rationals(rng, n, -10, 10)
        v = divdiff(Monomial(d), make_node_set(xs))
        t.record(v == (1 if d == n - 1 else 0), None, (d, [str(x) for x in xs]))
    t.worst = float(t.failures)
    return t


def prop_schwarz_sandwich(seed: int, instances: int = 200) -> Tally:
    """The divided difference lies between the extremes of f^(n-1)/(n-1)! on the hull."""
    rng = random.Random(seed)
    t = Tally("min slack / scale", higher_is_worse=False)
    skipped = 0
    for _ in range(instances):
        f = CATALOG[rng.choice(sorted(CATALOG))](rng)
        n = rng.randint(2, 5)
        ns = positive_nodes(rng, n)
        lo, hi = ns[0], ns[-1]
        if f.derivative_sign(n, lo, hi) is None:
            skipped += 1  # extremes of f^(n-1) not at the ends; not checked
            continue
        fact = math.factorial(n - 1)
        ends = [f.derivative(n - 1, lo) / fact, f.derivative(n - 1, hi) / fact]
        v = divdiff_exact(f, ns)
        exact = v is not None and all(isinstance(e, Fraction) for e in ends)
        if v is None:
            v = divdiff(f, to_float_nodes(ns))
        a, b = min(ends), max(ends)
        if exact:
            slack = min(v - a, b - v)
            t.record(slack >= 0, slack / max(1, abs(b)), (f.label(), [str(x) for x in ns]))
        else:
            scale = max(1.0, abs(float(b)))
            slack = min(float(v) - float(a), float(b) - float(v)) / scale
            t.record(slack >= -1e-9, slack, (f.label(), [str(x) for x in ns]))
    t.notes["skipped_non_monotone"] = skipped
    return t


def prop_chain_identity(seed: int, instances: int = 100) -> Tally:
    """The un-prefactored telescoping identity holds exactly; the prefactored one is tallied."""
    rng = random.Random(seed)
    t = Tally("nonzero plain residuals")
    counts = {"plain": 0, "prefactored": 0, "both": 0, "neither": 0}
    while t.checked < instances:
        f = exact_catalog_sample(rng)
        m = rng.randint(2, 5)
        a = random_rationals(rng, m, LOW, HIGH)
        x = random_rationals(rng, m, LOW, HIGH)
        try:
            ci = chain_identity_residual(f, make_node_set(a), make_node_set(x))
        except (NodeCollision, DuplicateNodes):
            continue
        counts[ci.holds] += 1
        t.record(ci.residual == 0, None, (f.label(), a, x))
    t.worst = float(t.failures)
    t.notes["holds"] = counts
    return t


# ---------------------------------------------------------------------------
# symmetric
# ---------------------------------------------------------------------------

def prop_chs_triple_equivalence(seed: int, sets: int = 4, max_n: int = 6, max_q: int = 6) -> Tally:
    """Enumeration, divided difference, bialternant and the fast path give the same h_q."""
    rng = random.Random(seed)
    t = Tally("mismatches")
    for n in range(2, max_n + 1):
        for q in range(max_q + 1):
            for _ in range(sets):
                xs = random_rationals(rng, n, -5, 5)
                ns = make_node_set(xs)
                vals = (chs_enumerate(q, xs), chs_via_divdiff(q, ns), chs_via_bialternant(q, xs), chs(q, xs))
                t.record(len(set(vals)) == 1, None, (n, q, [str(v) for v in xs]))
    t.worst = float(t.failures)
    return t


def prop_hunter(seed: int, instances: int = 1000) -> Tally:
    """h_2p and the divided difference of t^(2p+n-1) both dominate the Hunter bound."""
    rng = random.Random(seed)
    t = Tally("min (h_2p - bound) / max(1, bound)", higher_is_worse=False)
    for _ in range(instances):
        n = rng.randint(2, 6)
        p = rng.randint(0, 3)
        xs = random_rationals(rng, n, -5, 5)
        b = hunter_bound(p, xs)
        h = chs(2 * p, xs)
        dd = divdiff(Monomial(2 * p + n - 1), make_node_set(xs))
        slack = min(h, dd) - b
        t.record(slack >= 0 and h == dd, slack / max(1, b), (p, [str(v) for v in xs]))
    return t


def prop_homogeneity(seed: int, instances: int = 200) -> Tally:
    """h_q(lam x) = lam^q h_q(x) exactly."""
    rng = random.Random(seed)
    t = Tally("mismatches")
    for _ in range(instances):
        n, q = rng.randint(1, 6), rng.randint(0, 6)
        xs = random_rationals(rng, n, -5, 5)
        lam = random_rationals(rng, 1, -3, 3)[0]
        t.record(chs(q, [lam * x for x in xs]) == lam ** q * chs(q, xs), None, (q, str(lam), xs))
    t.worst = float(t.failures)
    return t


# ---------------------------------------------------------------------------
# bspline
# ---------------------------------------------------------------------------

def prop_bspline_nonnegative(seed: int, instances: int = 1000) -> Tally:
    """F(t) >= 0 exactly at random rational t, and the recursion matches the formula."""
    rng = random.Random(seed)
    t = Tally("min F(t) * width", higher_is_worse=False)
    worst_gap = 0.0
    for _ in range(instances):
        n = rng.randint(3, 8)
        ns = make_node_set(random_rationals(rng, n, -10, 10))
        x = random_rationals(rng, 1, ns[0], ns[-1])[0]
        v = bspline_eval(x, ns)
        width = ns[-1] - ns[0]
        t.record(v >= 0, v * width, (str(x), [str(v) for v in ns]))
        if x != ns[-1]:
            gap = abs(bspline_recursive(float(x), ns.floats()) - float(v)) * float(width)
            worst_gap = max(worst_gap, gap)
    t.notes["max_recursion_gap_scaled"] = worst_gap
    return t


def prop_bspline_moments(seed: int, instances: int = 50, max_n: int = 8, tol: float = 1e-8,
                         what: str = "both") -> Tally:
    """|integral - 1| <= tol and |mean - sum(x)/n| <= tol."""
    rng = random.Random(seed)
    t = Tally("max moment error")
    for _ in range(instances):
        n = rng.randint(2, max_n)
        ns = make_node_set(random_rationals(rng, n, -10, 10))
        if what in ("both", "integral"):
            err = abs(bspline_integral(ns, tol / 10) - 1)
            t.record(err <= tol, err, ("integral", [str(v) for v in ns]))
        if what in ("both", "mean"):
            err = abs(bspline_mean(ns, tol / 10) - float(sum(ns.values) / n))
            t.record(err <= tol, err, ("mean", [str(v) for v in ns]))
    return t


PEANO_TOL = 1e-10


def peano_reference(f: FunctionSpec, ns) -> float:
    v = divdiff_exact(f, ns)
    return float(v) if v is not None else float(divdiff(f, to_float_nodes(ns)))


def prop_peano_agreement(seed: int, per_kind: int = 6, max_n: int = 6) -> Tally:
    """Peano quadrature matches the divided difference within tol + 1e-9 |value|."""
    rng = random.Random(seed)
    t = Tally("max |peano - ref| / (tol + 1e-9 |ref|)")
    for kind in sorted(CATALOG):
        for _ in range(per_kind):
            f = CATALOG[kind](rng)
            ns = make_node_set(random_floats(rng, rng.randint(2, max_n), 0.1, 10.0, min_gap=1e-2))
            ref = peano_reference(f, ns)
            p = peano_divdiff(f, ns, PEANO_TOL)
            ratio = abs(p - ref) / (PEANO_TOL + 1e-9 * abs(ref))
            t.record(ratio <= 1, ratio, (f.label(), ns.floats()))
    return t


def prop_jensen_chain(seed: int, instances: int = 60) -> Tally:
    """f^(n-1)(mean)/(n-1)! <= Peano integral when f^(n-1) is convex on the hull."""
    rng = random.Random(seed)
    t = Tally("min (peano - bound) / max(1, |bound|)", higher_is_worse=False)
    skipped = 0
    for _ in range(instances):
        n = rng.randint(2, 6)
        f = Monomial(rng.randint(n - 1, 9)) if rng.random() < 0.5 else ReciprocalPower(Fraction(rng.randint(1, 8), 2))
        ns = make_node_set(random_floats(rng, n, 0.5, 5.0, min_gap=1e-2))
        try:
            bound = float(farwig_zwick_bound(f, ns))
        except ConvexityNotGuaranteed:
            skipped += 1  # t^-s with n even: f^(n-1) is concave
            continue
        p = peano_divdiff(f, ns, PEANO_TOL)
        slack = (p - bound) / max(1.0, abs(bound))
        t.record(slack >= -1e-9, slack, (f.label(), ns.floats()))
    t.notes["skipped_not_convex"] = skipped
    return t


# ---------------------------------------------------------------------------
# inequalities
# ---------------------------------------------------------------------------

def prop_reciprocal_sign_law(seed: int, sets: int = 10, min_classified: float = 0.99) -> Tally:
    """Integer s: exact agreement always.  Half-integer s: >= 99% classified, all classified agree."""
    rng = random.Random(seed)
    t = Tally("disagreements")
    half_total = half_unc = 0
    exact_total = 0
    for n in range(2, 7):
        for k in range(-12, 9):
            s = Fraction(k, 2)
            for _ in range(sets):
                ns = positive_nodes(rng, n)
                computed, pred, agree = classify_reciprocal_schur(ns, s)
                if s.denominator == 1:
                    exact_total += 1
                    t.record(agree, None, (n, str(s), [str(v) for v in ns]))
                else:
                    half_total += 1
                    if computed.label is SignLabel.UNCERTAIN:
                        half_unc += 1
                        t.checked += 1
                    else:
                        t.record(agree, None, (n, str(s), [str(v) for v in ns]))
    classified = 1 - half_unc / half_total if half_total else 1.0
    t.notes.update(exact_cases=exact_total, float_cases=half_total, uncertain=half_unc,
                   classified_fraction=classified)
    if classified < min_classified:
        t.failures += 1
        t.example = t.example or f"classified fraction {classified} below {min_classified}"
    t.worst = float(t.failures)
    return t


def prop_schur_three(seed: int, instances: int = 2000) -> Tally:
    """Schur's three-term expression is >= 0, and zero only at x = y = z."""
    rng = random.Random(seed)
    t = Tally("min value (float cases scaled)", higher_is_worse=False)
    exps = (-2, -1, 0, Fraction(1, 2), 1, 2)
    for i in range(instances):
        s = exps[i % len(exps)]
        if i % 50 == 0:
            x = random_rationals(rng, 1, LOW, HIGH)[0]
            xyz = (x, x, x)
        else:
            xyz = tuple(random_rationals(rng, 1, LOW, HIGH)[0] for _ in range(3))
        v = schur_lhs(*xyz, s)
        constant = xyz[0] == xyz[1] == xyz[2]
        if isinstance(v, Fraction):
            ok = v == 0 if constant else v > 0
            t.record(ok, v, (str(s), [str(a) for a in xyz]))
        else:
            scale = max(float(a) for a in xyz) ** (float(s) + 2)
            ok = abs(v) <= 1e-12 * scale if constant else v > -1e-12 * scale
            t.record(ok, v / scale, (str(s), [str(a) for a in xyz]))
    return t


def prop_derivative_sign_forward(seed: int, instances: int = 400) -> Tally:
    """One-signed f^(n-1) on the hull gives a divided difference of that sign."""
    rng = random.Random(seed)
    t = Tally("mismatches")
    uncertain = skipped = 0
    for _ in range(instances):
        f = CATALOG[rng.choice(sorted(CATALOG))](rng)
        n = rng.randint(2, 6)
        ns = positive_nodes(rng, n)
        sign = f.derivative_sign(n - 1, ns[0], ns[-1])
        if sign not in (1, -1):
            skipped += 1
            continue
        v = divdiff_exact(f, ns)
        if v is not None:
            t.record(v * sign >= 0, None, (f.label(), [str(x) for x in ns]))
            continue
        fl = to_float_nodes(ns)
        fv, bound = float(divdiff_direct(f, fl)), direct_error_bound(f, fl)
        if abs(fv) <= bound:
            uncertain += 1
            t.checked += 1
            continue
        t.record(fv * sign > 0, None, (f.label(), ns.floats()))
    t.worst = float(t.failures)
    t.notes.update(uncertain=uncertain, skipped_not_one_signed=skipped)
    return t


def prop_convex_lower_order_forward(seed: int, instances: int = 400) -> Tally:
    """Monomial(d), d >= n-1, has nonnegative divided differences on positive nodes."""
    rng = random.Random(seed)
    t = Tally("mismatches")
    for _ in range(instances):
        n = rng.randint(3, 7)
        ns = positive_nodes(rng, n)
        v = divdiff(Monomial(rng.randint(n - 1, n + 6)), ns)
        t.record(v >= 0, None, [str(x) for x in ns])
    t.worst = float(t.failures)
    return t


def prop_bound_dominance(seed: int, instances: int = 1000, contraction: bool = True) -> Tally:
    """divided difference >= max(Hunter, Farwig-Zwick) for t^(2p+n-1); FZ tracks it as nodes contract."""
    rng = random.Random(seed)
    t = Tally("min (dd - max bound) / max(1, dd)", higher_is_worse=False)
    for _ in range(instances):
        n = rng.randint(2, 6)
        p = rng.randint(0, 3)
        ns = make_node_set(random_rationals(rng, n, -5, 5))
        bc = bound_comparison(p, ns)
        slack = bc.divdiff - max(bc.hunter, bc.farwig_zwick)
        t.record(slack >= 0, slack / max(1, bc.divdiff), (p, [str(v) for v in ns]))
    if contraction:
        ratios = []
        for p, n in ((1, 3), (2, 3), (2, 4)):
            c = Fraction(3, 2)
            offsets = [Fraction(2 * i - (n - 1), 2) for i in range(n)]
            for h in (Fraction(1, 10), Fraction(1, 1000), Fraction(1, 10 ** 5)):
                bc = bound_comparison(p, make_node_set([c + h * o for o in offsets]))
                ratios.append(float(bc.farwig_zwick / bc.divdiff))
        gap = 1 - ratios[-1]
        t.record(0 <= gap < 1e-8, None, "contraction ratio did not approach 1")
        t.notes["contraction_final_ratio_gap"] = gap
    return t


def prop_worked_example(seed: int, instances: int = 200) -> Tally:
    """t^6 on three nodes: bounds match their closed forms, and (1,2,3) gives 301 >= 240 >= 49/2."""
    rng = random.Random(seed)
    t = Tally("mismatches")
    bc = bound_comparison(2, make_node_set([1, 2, 3]))
    t.record((bc.divdiff, bc.farwig_zwick, bc.hunter) == (301, 240, Fraction(49, 2)), None,
             (bc.divdiff, bc.farwig_zwick, bc.hunter))
    t.record(bc.divdiff >= bc.farwig_zwick >= bc.hunter, None, "ordering at (1,2,3)")
    for _ in range(instances):
        xs = random_rationals(rng, 3, -5, 5)
        ns = make_node_set(xs)
        hb = hunter_bound(2, ns)
        fz = farwig_zwick_bound(Monomial(6), ns)
        sq = sum(x * x for x in xs)
        ok = hb == sq ** 2 / 8 and fz == Fraction(5, 27) * sum(xs) ** 4
        t.record(ok, None, [str(x) for x in xs])
    t.worst = float(t.failures)
    return t


def prop_majorization_monotonicity(seed: int, instances: int = 300) -> Tally:
    """Robin Hood pairs x < y give f[x] <= f[y] for t^(2p+n-1), exactly."""
    rng = random.Random(seed)
    t = Tally("min (f[y] - f[x]) / max(1, f[y])", higher_is_worse=False)
    for _ in range(instances):
        n = rng.randint(2, 5)
        p = rng.randint(0, 2)
        y = random_rationals(rng, n, -5, 5)
        x, yd = robin_hood_pair(rng, y)
        f = Monomial(2 * p + n - 1)
        if not majorizes(x, yd):
            t.record(False, None, ("generator", x, yd))
            continue
        fx = divdiff(f, make_node_set(x))
        fy = divdiff(f, make_node_set(yd))
        ok = schur_convexity_check(f, make_node_set(x), make_node_set(yd))
        t.record(ok and fx <= fy, (fy - fx) / max(1, abs(fy)), (p, [str(v) for v in x], [str(v) for v in yd]))
    return t


LOCATOR_KINDS = tuple(sorted(CATALOG))


def prop_mean_value_locators(seed: int, per_kind: int = 10, tol: float = 1e-9, max_missing: float = 0.05,
                             hopf_normalization: str = "n-1") -> Tally:
    """Located points re-substitute within tol; RootNotFound stays under 5% per catalog kind.

    The rate gate applies to the Schwarz locator and to the Hopf locator under
    ``hopf_normalization``; the other Hopf normalization is run and reported.
    """
    rng = random.Random(seed)
    t = Tally("max residual")
    other = "n" if hopf_normalization == "n-1" else "n-1"
    rates = {}
    for kind in LOCATOR_KINDS:
        miss = {"schwarz": 0, "hopf2": 0, "hopf2_" + other: 0}
        for _ in range(per_kind):
            f = CATALOG[kind](rng)
            ns = positive_nodes(rng, rng.randint(2, 5))
            runs = (("schwarz", lambda: schwarz_locate(f, ns, tol)),
                    ("hopf2", lambda: hopf2_locate(f, ns, tol, normalization=hopf_normalization)),
                    ("hopf2_" + other, lambda: hopf2_locate(f, ns, tol, normalization=other)))
            for label, run in runs:
                try:
                    loc = run()
                except RootNotFound:
                    miss[label] += 1
                    continue
                t.record(loc.residual <= tol, loc.residual, (label, f.label(), [str(v) for v in ns]))
        rates[kind] = {k: v / per_kind for k, v in miss.items()}
        for label in ("schwarz", "hopf2"):
            if rates[kind][label] > max_missing:
                t.failures += 1
                t.example = t.example or f"{label} RootNotFound rate {rates[kind][label]} for {kind}"
    t.notes["root_not_found_rate"] = rates
    t.notes["hopf_normalization"] = hopf_normalization
    return t


def prop_hopf_normalization(seed: int, instances: int = 50) -> Tally:
    """Decide exactly which scaling of f'[x_1..x_m] the identity f[t, x] = c f'[x] admits for t^m.

    For f = t^m the left side is 1 for every t while f'[x] = m, so only
    c = 1/m (that is 1/(n-1) with n = m+1 points) can hold.
    """
    rng = random.Random(seed)
    t = Tally("instances where 1/n held")
    held_n = held_n1 = 0
    for _ in range(instances):
        m = rng.randint(1, 6)
        xs = random_rationals(rng, m, LOW, HIGH)
        f = Monomial(m)
        fp = f.differentiate(1)
        dprime = divdiff_exact(fp, make_node_set(xs)) if m > 1 else fp.value(xs[0])
        tt = random_rationals(rng, 1, LOW, HIGH)[0]
        while tt in xs:
            tt += 1
        lhs = _dd_with(f, tt, xs, True)
        held_n += lhs == dprime / (m + 1)
        held_n1 += lhs == dprime / m
        t.record(lhs == dprime / m, None, (m, [str(v) for v in xs]))
    t.worst = float(held_n)
    t.notes.update(held_1_over_n=held_n, held_1_over_n_minus_1=held_n1)
    return t


def prop_watson(seed: int, instances: int = 500) -> Tally:
    """Exponential divided differences follow the three-way sign rule in a."""
    rng = random.Random(seed)
    t = Tally("disagreements")
    bases = (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4))
    for i in range(instances):
        a = bases[i % len(bases)]
        ns = make_node_set(random_rationals(rng, rng.randint(2, 5), -3, 3))
        computed, pred = watson_classify(a, ns)
        t.record(computed.label is pred, None, (str(a), [str(v) for v in ns], computed.label.value))
    t.worst = float(t.failures)
    return t


def prop_class_q(seed: int, trials: int = 2000) -> Tally:
    """Nonnegative convex or monotone functions give no violation; (t-1)^2 - 2 on (0, 2) does."""
    t = Tally("violations found where none expected")
    members = (
        (Monomial(2), Interval(Fraction(0), Fraction(2))),
        (Exponential(Fraction(2)), Interval(Fraction(0), Fraction(1))),
        (Polynomial((Fraction(1),)), Interval(Fraction(0), Fraction(1))),
        (ReciprocalPower(1), Interval(Fraction(1, 2), Fraction(4))),
    )
    for i, (f, dom) in enumerate(members):
        hit = class_q_falsify(f, dom, trials, derive_seed(seed, f"member{i}"))
        t.record(hit is None, None, (f.label(), hit))
    t.worst = float(t.failures)
    bad = Polynomial((Fraction(-1), Fraction(-2), Fraction(1)))
    hit = class_q_falsify(bad, Interval(Fraction(0), Fraction(2)), trials, derive_seed(seed, "outsider"))
    confirmed = hit is not None and class_q_gap(bad, hit.x, hit.z, hit.tau)[0] > class_q_gap(bad, hit.x, hit.z, hit.tau)[1]
    t.record(confirmed, None, "no re-verified counterexample for (t-1)^2 - 2")
    # exhaustive grid: a violation must exist independently of the random search
    grid = [Fraction(k, 20) for k in range(1, 40)]
    taus = [Fraction(k, 20) for k in range(1, 20)]
    exists = any(
        class_q_gap(bad, x, z, tau)[0] > class_q_gap(bad, x, z, tau)[1]
        for x in grid for z in grid if x <= z for tau in taus
    )
    t.record(exists, None, "grid search found no violation")
    t.notes["counterexample"] = None if hit is None else {"x": hit.x, "z": hit.z, "tau": hit.tau}
    return t


def prop_stieltjes(seed: int) -> Tally:
    """Contracting nodes drive the divided difference to f^(n-1)(t0)/(n-1)!."""
    t = Tally("final |value - f^(n-1)(t0)/(n-1)!|")
    schedule = [Fraction(1, 10 ** k) for k in range(1, 7)]
    cases = ((Monomial(2), Fraction(3), 3), (Monomial(4), Fraction(2), 3),
             (Exponential(math.e), 0.0, 2), (ReciprocalPower(2), Fraction(1), 4))
    verdicts = {}
    for f, t0, n in cases:
        sched = schedule if isinstance(t0, Fraction) else [float(h) for h in schedule]
        rows = stieltjes_probe(f, t0, sched, n=n)
        verdict = stieltjes_verdict(rows)
        verdicts[f"{f.label()}@{t0}/n={n}"] = verdict
        err = abs(float(rows[-1].value) - float(rows[-1].ref_n_minus_1))
        t.record(verdict == "(n-1)!" and err <= 1e-4 * max(1.0, abs(float(rows[-1].ref_n_minus_1))), err, f.label())
    t.notes["verdicts"] = verdicts
    return t


# ---------------------------------------------------------------------------
# stochastic
# ---------------------------------------------------------------------------

MC_CONFIGS = (("power", 1, (2, 3)), ("power", 2, (1, 2, 3)), ("power", 4, (1, -1)), ("exp_decay", None, (1, 2, 3)))


def prop_mc_unbiased(seed: int, trials: int = 10 ** 4, seeds: int = 20, z_max: float = 3.0,
                     min_fraction: float = 0.95) -> Tally:
    """At least 95% of z-scores lie in [-3, 3] for each configuration; exp_decay target is exact."""
    t = Tally("max |z|")
    inside = {}
    for kind, q, x in MC_CONFIGS:
        key = f"{kind}:{q}:{','.join(map(str, x))}"
        ok = 0
        for i in range(seeds):
            sd = derive_seed(seed, f"{key}#{i}")
            if kind == "power":
                est = chs_monte_carlo(q, x, trials, sd)
            else:
                est = laplace_identity_mc("exp_decay", make_node_set(list(x)), trials, sd)
            z = abs(est.z_score)
            t.observe(z)
            ok += z <= z_max
        t.checked += seeds
        inside[key] = ok
        if ok < min_fraction * seeds:
            t.failures += 1
            t.example = t.example or f"{key}: only {ok}/{seeds} z-scores inside"
    target = laplace_target("exp_decay", make_node_set([1, 2, 3]))
    t.record(target == exp_decay_closed_form([1, 2, 3]) == Fraction(1, 24), None, f"exp_decay target {target}")
    t.notes["inside"] = inside
    return t


def prop_mc_determinism(seed: int, trials: int = 10 ** 4) -> Tally:
    """Same seed gives identical estimates; worker count does not change them."""
    t = Tally("mismatches")
    trials = max(trials, 3 * 16384 + 7)  # several chunks, one partial
    a = chs_monte_carlo(2, (1, 2, 3), trials, seed, workers=1)
    b = chs_monte_carlo(2, (1, 2, 3), trials, seed, workers=1)
    c = chs_monte_carlo(2, (1, 2, 3), trials, seed, workers=4)
    t.record(a == b, None, "repeat run differs")
    t.record(a == c, None, "thread count changes the estimate")
    t.worst = float(t.failures)
    return t


def prop_mc_reduction(seed: int, trials: int = 10 ** 4) -> Tally:
    """The power Laplace variant reproduces chs_monte_carlo bit for bit."""
    t = Tally("mismatches")
    for q, x in ((1, (2, 3)), (2, (1, 2, 3)), (3, (1, 3, 4, 6))):
        a = laplace_identity_mc(("power", q), make_node_set(list(x)), trials, seed)
        b = chs_monte_carlo(q, x, trials, seed)
        t.record(a.mean == b.mean and a.stderr == b.stderr and a.target == b.target, None, (q, x))
    t.worst = float(t.failures)
    return t


# ---------------------------------------------------------------------------
# registry and runner
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Property:
    name: str
    fn: Callable[..., Tally]
    uses_trials: bool = False

    @property
    def module(self) -> str:
        return self.name.split(".", 1)[0]


REGISTRY: tuple[Property, ...] = (
    Property("core.backend_agreement", prop_backend_agreement),
    Property("core.order_zero_value", prop_order_zero),
    Property("core.reciprocal_derivative_sign", prop_reciprocal_derivative_sign),
    Property("divdiff.chain_identity", prop_chain_identity),
    Property("divdiff.degree_collapse", prop_degree_collapse),
    Property("divdiff.method_equivalence", prop_method_equivalence),
    Property("divdiff.permutation_symmetry", prop_permutation_symmetry),
    Property("divdiff.schwarz_sandwich", prop_schwarz_sandwich),
    Property("symmetric.homogeneity", prop_homogeneity),
    Property("symmetric.hunter", prop_hunter),
    Property("symmetric.triple_equivalence", prop_chs_triple_equivalence),
    Property("bspline.jensen_chain", prop_jensen_chain),
    Property("bspline.moments", prop_bspline_moments),
    Property("bspline.nonnegativity", prop_bspline_nonnegative),
    Property("bspline.peano_agreement", prop_peano_agreement),
    Property("inequalities.bound_dominance", prop_bound_dominance),
    Property("inequalities.class_q", prop_class_q),
    Property("inequalities.convex_lower_order", prop_convex_lower_order_forward),
    Property("inequalities.derivative_sign", prop_derivative_sign_forward),
    Property("inequalities.hopf_normalization", prop_hopf_normalization),
    Property("inequalities.majorization", prop_majorization_monotonicity),
    Property("inequalities.mean_value_locators", prop_mean_value_locators),
    Property("inequalities.reciprocal_sign_law", prop_reciprocal_sign_law),
    Property("inequalities.schur_three", prop_schur_three),
    Property("inequalities.stieltjes", prop_stieltjes),
    Property("inequalities.watson", prop_watson),
    Property("inequalities.worked_example", prop_worked_example),
    Property("stochastic.determinism", prop_mc_determinism, uses_trials=True),
    Property("stochastic.reduction", prop_mc_reduction, uses_trials=True),
    Property("stochastic.unbiased", prop_mc_unbiased, uses_trials=True),
)

MODULES = tuple(sorted({p.module for p in REGISTRY}))


def select(only=None) -> list[Property]:
    """Properties whose module or full name is listed in ``only`` (all when empty)."""
    props = sorted(REGISTRY, key=lambda p: p.name)
    if not only:
        return props
    wanted = set(only)
    unknown = wanted - {p.module for p in props} - {p.name for p in props}
    if unknown:
        raise ValueError(f"unknown property or module: {', '.join(sorted(unknown))}")
    return [p for p in props if p.module in wanted or p.name in wanted]


def run_property(prop: Property, seed: int, trials: int | None = None) -> PropertyResult:
    kwargs = {"trials": trials} if prop.uses_trials and trials is not None else {}
    tally = prop.fn(derive_seed(seed, prop.name), **kwargs)
    return PropertyResult(
        prop.name, prop.module, tally.failures == 0, tally.checked, tally.failures,
        tally.metric, tally.worst, tally.example, tally.notes,
    )


def run_suite(seed: int = 0, trials: int | None = None, only=None, workers: int = 1) -> list[PropertyResult]:
    """Run the selected properties; results come back sorted by name whatever the worker count."""
    props = select(only)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda p: run_property(p, seed, trials), props))
    else:
        results = [run_property(p, seed, trials) for p in props]
    return sorted(results, key=lambda r: r.name)
