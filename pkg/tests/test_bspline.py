import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from recipschur.bspline import (
    BSplineDensity,
    bspline_eval,
    bspline_integral,
    bspline_mean,
    bspline_recursive,
    integrate_adaptive,
    peano_divdiff,
)
from recipschur.core import Exponential, Monomial, ReciprocalPower, make_node_set
from recipschur.errors import DegenerateOrder, QuadratureFailure

from oracles import mp_divdiff


def hat(t, a, m, b):
    # linear B-spline density on [a, b] with knot m and area 1
    if t <= a or t >= b:
        return 0
    h = Fraction(2) / (b - a)
    return h * (t - a) / (m - a) if t <= m else h * (b - t) / (b - m)


class TestEval:
    def test_two_nodes_uniform(self):
        ns = make_node_set([2, 6])
        assert bspline_eval(Fraction(3), ns) == Fraction(1, 4)
        assert bspline_eval(7, ns) == 0
        with pytest.raises(DegenerateOrder):
            bspline_eval(2, ns)

    def test_hat_peak(self):
        assert bspline_eval(1, make_node_set([0, 1, 2])) == 1

    def test_outside(self):
        for n in range(2, 7):
            ns = make_node_set(list(range(n)))
            assert bspline_eval(-1, ns) == 0

    @given(st.lists(st.fractions(-5, 5, max_denominator=12), min_size=3, max_size=3, unique=True),
           st.fractions(-6, 6, max_denominator=17))
    def test_linear_case_matches_hat(self, xs, t):
        a, m, b = sorted(xs)
        assert bspline_eval(t, make_node_set(xs)) == hat(t, a, m, b)

    @given(st.lists(st.fractions(-10, 10, max_denominator=30), min_size=3, max_size=8, unique=True),
           st.floats(0, 1))
    @settings(max_examples=200, deadline=None)
    def test_nonnegative_and_recursion(self, xs, u):
        ns = make_node_set(xs)
        t = Fraction(ns[0]) + Fraction(u) * (ns[-1] - ns[0])
        v = bspline_eval(t, ns)
        assert v >= 0
        if t < ns[-1]:
            width = float(ns[-1] - ns[0])
            assert bspline_recursive(float(t), ns.floats()) == pytest.approx(float(v), abs=1e-12 / width)

    def test_density_object(self):
        d = BSplineDensity(make_node_set([1, 2, 4, 8]))
        assert d.support == (1, 8)
        assert d.stable(3.0) == pytest.approx(float(d(Fraction(3))), rel=1e-14)


class TestMoments:
    def test_simple(self):
        assert bspline_integral(make_node_set([0, 1])) == pytest.approx(1, abs=1e-14)
        assert bspline_integral(make_node_set([0, 1, 2])) == pytest.approx(1, abs=1e-14)
        assert bspline_integral(make_node_set([1, 2, 4, 8])) == pytest.approx(1, abs=1e-10)
        assert bspline_mean(make_node_set([0, 2])) == pytest.approx(1, abs=1e-14)
        assert bspline_mean(make_node_set([0, 1, 2])) == pytest.approx(1, abs=1e-14)
        assert bspline_mean(make_node_set([1, 2, 4])) == pytest.approx(7 / 3, abs=1e-10)

    def test_random(self):
        rng = random.Random(11)
        for _ in range(40):
            n = rng.randint(2, 8)
            xs = sorted(rng.uniform(-10, 10) for _ in range(n))
            ns = make_node_set(xs)
            assert abs(bspline_integral(ns) - 1) <= 1e-10
            assert abs(bspline_mean(ns) - sum(xs) / n) <= 1e-10

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            bspline_integral(make_node_set([0, 1]), 0)

    def test_quadrature_failure(self):
        with pytest.raises(QuadratureFailure):
            # a jump in the middle of a single piece cannot be resolved to 1e-15
            integrate_adaptive(lambda t: 0.0 if t < 1 / math.pi else 1.0, 0.0, 1.0, 1e-15, max_depth=5)


class TestPeano:
    def test_two_points(self):
        ns = make_node_set([1, 3])
        f = Exponential(math.e)
        assert peano_divdiff(f, ns) == pytest.approx((math.e ** 3 - math.e) / 2, rel=1e-13)

    def test_examples(self):
        assert peano_divdiff(Monomial(4), make_node_set([1, 2, 3])) == pytest.approx(25, abs=1e-10)
        assert peano_divdiff(ReciprocalPower(1), make_node_set([1, 2, 3])) == pytest.approx(1 / 6, abs=1e-10)

    @pytest.mark.parametrize("f", [Monomial(9), ReciprocalPower(Fraction(7, 2)), Exponential(Fraction(1, 3))],
                             ids=lambda f: f.label())
    def test_against_high_precision(self, f):
        ns = make_node_set([0.3, 0.9, 1.7, 2.2, 4.0, 5.5])
        ref = mp_divdiff(f, ns.values)
        assert abs(peano_divdiff(f, ns) - ref) <= 1e-10 + 1e-9 * abs(ref)
