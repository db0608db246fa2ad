import json

import pytest

from recipschur.suite import (
    CATALOG,
    MODULES,
    REGISTRY,
    Tally,
    prop_hopf_normalization,
    run_property,
    run_suite,
    select,
)


def test_registry_covers_every_module():
    assert MODULES == ("bspline", "core", "divdiff", "inequalities", "stochastic", "symmetric")
    names = [p.name for p in REGISTRY]
    assert len(names) == len(set(names)) == 30


def test_select():
    assert [p.name for p in select(["symmetric"])] == [
        "symmetric.homogeneity", "symmetric.hunter", "symmetric.triple_equivalence"]
    assert [p.name for p in select(["core.order_zero_value"])] == ["core.order_zero_value"]
    assert len(select()) == len(REGISTRY)
    with pytest.raises(ValueError):
        select(["nope"])


@pytest.mark.parametrize("prop", REGISTRY, ids=lambda p: p.name)
def test_property_passes_at_default_size(prop):
    r = run_property(prop, seed=0)
    assert r.passed, (r.example, r.notes)
    assert r.checked > 0
    json.dumps(r.as_dict())


def test_property_is_reproducible():
    prop = select(["inequalities.watson"])[0]
    a, b = run_property(prop, 1), run_property(prop, 1)
    assert a == b


def test_trials_override_only_for_stochastic():
    r = run_suite(seed=0, trials=2000, only=["stochastic.unbiased", "core.order_zero_value"])
    assert [x.name for x in r] == ["core.order_zero_value", "stochastic.unbiased"]
    assert all(x.passed for x in r)


def test_hopf_normalization_verdict():
    t = prop_hopf_normalization(0, instances=40)
    assert t.notes == {"held_1_over_n": 0, "held_1_over_n_minus_1": 40}


def test_tally():
    t = Tally("m", higher_is_worse=False)
    t.record(True, 3)
    t.record(False, 1, "bad")
    t.record(False, 2, "later")
    assert (t.checked, t.failures, t.worst, t.example) == (3, 2, 1.0, "bad")


def test_catalog_names():
    assert sorted(CATALOG) == ["exp", "lapH_exp", "lapH_power", "monomial", "poly", "power", "recip", "shiftrecip"]
