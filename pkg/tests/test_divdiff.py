import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from recipschur.core import (
    POSITIVE,
    Constant,
    Exponential,
    Monomial,
    PowerLaw,
    RationalH,
    ReciprocalPower,
    ScalarPolicy,
    ShiftedReciprocal,
    make_node_set,
)
from recipschur.divdiff import (
    chain_identity_residual,
    condition_estimate,
    divdiff,
    divdiff_direct,
    divdiff_exact,
    divdiff_recurrence,
    divdiff_report,
)
from recipschur.errors import DomainError, ExactnessUnavailable, MethodDisagreement, NodeCollision

from oracles import exact_divdiff, mp_divdiff

distinct_rationals = st.lists(st.fractions(Fraction(-10), Fraction(10), max_denominator=50),
                              min_size=2, max_size=6, unique=True)


class TestDirect:
    def test_constant_vanishes(self):
        assert divdiff_direct(Constant(1), make_node_set([1, 2, 3])) == 0

    @given(st.lists(st.fractions(-10, 10, max_denominator=30), min_size=2, max_size=2, unique=True))
    def test_square_pair(self, xs):
        assert divdiff_direct(Monomial(2), make_node_set(xs)) == xs[0] + xs[1]

    def test_quartic(self):
        assert divdiff_direct(Monomial(4), make_node_set([1, 2, 3])) == 25

    def test_domain_error(self):
        with pytest.raises(DomainError):
            divdiff_direct(ReciprocalPower(1), make_node_set([-1, 2]))


class TestRecurrence:
    def test_slope(self):
        assert divdiff_recurrence(Monomial(1), make_node_set([5, 9])) == 1

    def test_reciprocal(self):
        v = divdiff_recurrence(ReciprocalPower(1), make_node_set([1, 2, 3]))
        assert v == Fraction(1, 6) == exact_divdiff([1, Fraction(1, 2), Fraction(1, 3)], [1, 2, 3])

    def test_exponential_pair(self):
        assert divdiff_recurrence(Exponential(2), make_node_set([0, 1])) == 1

    @given(distinct_rationals, st.integers(0, 9))
    @settings(max_examples=150, deadline=None)
    def test_rational_mode_identical(self, xs, d):
        ns = make_node_set(xs)
        f = Monomial(d)
        vals = [Fraction(x) ** d for x in ns.values]
        want = exact_divdiff(vals, ns.values)
        assert divdiff_direct(f, ns) == divdiff_recurrence(f, ns) == divdiff_exact(f, ns) == want


class TestReport:
    def test_exact_quartic(self):
        r = divdiff_report(Monomial(4), make_node_set([1, 2, 3]), ScalarPolicy.exact())
        assert r.exact and r.recommended == 25
        assert {r.per_method[k] for k in ("direct", "recurrence", "exact")} == {25}
        assert r.per_method["peano"] == pytest.approx(25, rel=1e-12)
        assert r.spread == pytest.approx(0, abs=1e-14)
        assert r.condition_estimate >= 1

    def test_constant(self):
        for policy in (None, ScalarPolicy.exact(), ScalarPolicy.floating()):
            r = divdiff_report(Constant(1), make_node_set([1, 2]), policy)
            assert r.recommended == 0
            assert r.condition_estimate is None

    def test_clustered_nodes_ill_conditioned(self):
        ns = make_node_set([1.0, 1.0 + 1e-8, 2.0], POSITIVE, ScalarPolicy.floating())
        try:
            r = divdiff_report(ReciprocalPower(2), ns, ScalarPolicy.floating(), methods=("direct", "recurrence"))
        except MethodDisagreement as exc:
            r = exc.report
        assert r.condition_estimate > 1e6

    def test_exact_policy_needs_eligibility(self):
        with pytest.raises(ExactnessUnavailable):
            divdiff_report(ReciprocalPower(Fraction(1, 2)), make_node_set([1, 2]), ScalarPolicy.exact())

    def test_float_policy_on_exact_inputs(self):
        r = divdiff_report(Monomial(4), make_node_set([1, 2, 3]), ScalarPolicy.floating())
        assert not r.exact
        assert r.recommended == 25  # the exact route still adjudicates
        assert r.per_method["direct"] == pytest.approx(25, rel=1e-14)

    def test_monte_carlo_opt_in(self):
        r = divdiff_report(Monomial(4), make_node_set([1, 2, 3]),
                           methods=("recurrence", "exact", "montecarlo"), mc_trials=10 ** 5, seed=4)
        assert abs(r.per_method["montecarlo"] - 25) < 1.0

    @pytest.mark.parametrize("f", [
        PowerLaw(Fraction(3, 2)), Exponential(math.e), ReciprocalPower(Fraction(5, 2)),
        RationalH(ShiftedReciprocal(1), 4), ShiftedReciprocal(1),
    ], ids=lambda f: f.label())
    def test_float_methods_match_high_precision(self, f):
        ns = make_node_set([0.5, 1.25, 2.0, 3.5])
        r = divdiff_report(f, ns)
        ref = mp_divdiff(f, ns.values)
        for name in ("direct", "recurrence", "peano"):
            assert r.per_method[name] == pytest.approx(ref, rel=1e-9)


def test_permutation_symmetry():
    rng = random.Random(5)
    for _ in range(50):
        xs = [Fraction(rng.randint(-40, 40), rng.randint(1, 9)) for _ in range(5)]
        if len(set(xs)) < 5:
            continue
        want = exact_divdiff([x ** 6 for x in xs], xs)
        rng.shuffle(xs)
        assert exact_divdiff([x ** 6 for x in xs], xs) == want == divdiff(Monomial(6), make_node_set(xs))


@given(distinct_rationals)
def test_degree_collapse(xs):
    n = len(xs)
    ns = make_node_set(xs)
    assert divdiff(Monomial(n - 1), ns) == 1
    for d in range(n - 1):
        assert divdiff(Monomial(d), ns) == 0


def test_condition_estimate():
    ns = make_node_set([1, 2, 3])
    # terms 1/2, -16, 81/2
    assert condition_estimate(Monomial(4), ns, 25) == pytest.approx(57 / 25, rel=1e-15)


class TestChainIdentity:
    def test_quadratic(self):
        ci = chain_identity_residual(Monomial(2), make_node_set([1, 2]), make_node_set([3, 4]))
        assert (ci.lhs, ci.rhs, ci.residual) == (4, 4, 0)

    def test_constant(self):
        ci = chain_identity_residual(Constant(3), make_node_set([1, 2]), make_node_set([5, 7]))
        assert ci.lhs == ci.rhs == 0
        assert ci.holds == "both"

    def test_prefactor_fails(self):
        ci = chain_identity_residual(Monomial(3), make_node_set([1, 2, 3]), make_node_set([4, 5, 6]))
        assert ci.residual == 0
        assert ci.prefactor == Fraction(3, 4)
        assert ci.prefactored_residual == Fraction(-9, 4)
        assert ci.holds == "plain"

    def test_collision(self):
        with pytest.raises(NodeCollision):
            # first mixed set is a_1, x_1, x_2 = 1, 1, 5
            chain_identity_residual(Monomial(3), make_node_set([1, 2]), make_node_set([1, 5]))

    @given(st.lists(st.fractions(Fraction(1, 10), 10, max_denominator=40), min_size=4, max_size=4, unique=True),
           st.integers(0, 7))
    @settings(max_examples=100, deadline=None)
    def test_plain_form_random(self, pts, d):
        a, x = pts[:2], pts[2:]
        try:
            ci = chain_identity_residual(Monomial(d), make_node_set(a), make_node_set(x))
        except NodeCollision:
            return
        assert ci.residual == 0
