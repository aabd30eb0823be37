from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeuniv.errors import InputError
from treeuniv.tails import PRESETS, Distribution, exact_tail, tail_bound, tail_check


@pytest.mark.parametrize(
    "text, mean",
    [("binomial(100,0.5)", 50), ("hypergeometric(20,10,10)", 5), (" Binomial( 10 , 0.25 ) ", 2.5)],
)
def test_parse_and_mean(text, mean):
    assert Distribution.parse(text).mean == mean


@pytest.mark.parametrize(
    "text", ["binomial(10)", "poisson(3)", "binomial(10,1.5)", "hypergeometric(5,6,2)", "binomial(x,0.5)", "junk"]
)
def test_parse_rejects(text):
    with pytest.raises(InputError):
        Distribution.parse(text)


@pytest.mark.parametrize("eps", [0, -0.1, 1.6])
def test_eps_range(eps):
    with pytest.raises(InputError):
        tail_check("binomial(10,0.5)", eps, 100, 0)


def test_pmf_sums_to_one():
    for text in ["binomial(37,0.3)", "hypergeometric(30,12,9)"]:
        D = Distribution.parse(text)
        assert math.isclose(math.fsum(math.exp(D.log_pmf(k)) for k in D.support()), 1.0)


def test_exact_tail_by_hand():
    # |X - 1| > 0.5 for X ~ Bin(2, 1/2) means X in {0, 2}
    assert math.isclose(exact_tail(Distribution.parse("binomial(2,0.5)"), 0.5), 0.5)


def test_single_factor_bound_fails_for_tiny_means():
    # the one-sided-looking constant only works once the mean is large enough
    D = Distribution.parse("binomial(1,0.5)")
    assert exact_tail(D, 0.95) == 1.0 > tail_bound(D, 0.95)
    assert exact_tail(D, 0.95) <= 2 * tail_bound(D, 0.95)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 300), st.floats(0.01, 0.99), st.floats(0.05, 1.5))
def test_two_sided_bound_holds(n, p, eps):
    D = Distribution("binomial", (n, p))
    assert exact_tail(D, eps) <= 2 * tail_bound(D, eps) + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 80), st.data(), st.floats(0.05, 1.5))
def test_two_sided_bound_holds_hypergeometric(n, data, eps):
    m = data.draw(st.integers(1, n))
    l = data.draw(st.integers(1, n))  # noqa: E741
    D = Distribution("hypergeometric", (n, m, l))
    assert exact_tail(D, eps) <= 2 * tail_bound(D, eps) + 1e-12


@pytest.mark.parametrize("dist, eps", PRESETS)
def test_presets_have_no_violation(dist, eps):
    rep = tail_check(dist, eps, 20_000, 7)
    assert not rep.violation
    assert rep.exact <= rep.bound
    # the estimate sits near the exact tail
    assert abs(rep.empirical - rep.exact) <= 5 * max(rep.sigma, 1 / 20_000)


def test_report_is_deterministic_and_serialisable():
    a = tail_check("hypergeometric(64,16,32)", 0.5, 5000, 3).to_json()
    assert a == tail_check("hypergeometric(64,16,32)", 0.5, 5000, 3).to_json()
    assert set(a) == {"dist", "eps", "samples", "seed", "mean", "empirical", "sigma", "bound", "exact", "violation"}
