"""Exact exponent table, tail sums, multiplicity chain, containment search,
and the Monte Carlo estimators."""

import math
from fractions import Fraction

import numpy as np
import pytest

from sidonlab.bounds import (
    DecayEstimate,
    InsufficientDataError,
    check_prop2,
    estimate_decay,
    estimate_growth,
    exponent,
    exponent_table,
    g_chain,
    geometric_bins,
    loglog_slope,
    tail_sum,
)
from sidonlab.core import ValidationError


# --- exact exponents -------------------------------------------------------


def test_exponent_is_plain_rational_arithmetic():
    assert exponent(2, 2, 2) == Fraction(-10, 9)
    assert exponent(2, 2, 2, Fraction(1, 2)) == 0
    assert exponent(3, 2, 5, Fraction(1, 3)) == (Fraction(2, 3) - 1) * 5


def test_exponent_table_h2_hand_values():
    t = exponent_table(2)
    assert t.alpha == Fraction(2, 9)
    assert t.entry(2).s == 2 and t.entry(2).value == Fraction(-10, 9)
    assert t.entry(3).s == 10 and t.entry(3).value == Fraction(-10, 3)
    assert t.entry(4).s == 10 and t.entry(4).value == Fraction(-10, 9)
    assert {e.k for e in t.entries} == {2, 3, 4}


@pytest.mark.parametrize("h", range(2, 21))
def test_exponent_closed_forms_and_summability(h):
    t = exponent_table(h)
    assert len(t.entries) == 2 * h - 1
    for e in t.entries:
        # the closed form is the same rational, just factored differently
        assert e.value == e.closed_form
        s_expected = 2 if e.k <= h else 4 * h + 2
        assert e.s == s_expected
        assert e.value < -1
        assert e.summable


def test_exponent_table_rejects_h1():
    with pytest.raises(ValidationError):
        exponent_table(1)
    with pytest.raises(ValidationError):
        t = exponent_table(2)
        t.entry(5)


# --- tail sums --------------------------------------------------------------


def test_tail_sum_brackets_zeta2():
    # sum n^-2 from 1 is pi^2/6; the bound adds at most the first term
    true = math.pi**2 / 6
    b = tail_sum(Fraction(-2), 1)
    assert true <= b <= true + 1.0


def test_tail_sum_brackets_partial_sums():
    for e, start in [(Fraction(-2), 7), (Fraction(-3), 2), (Fraction(-3, 2), 10)]:
        n = np.arange(start, 2_000_000, dtype=np.float64)
        partial = float((n ** float(e)).sum())
        b = tail_sum(e, start)
        assert partial <= b  # upper bound on the true tail
        assert b - partial <= float(start) ** float(e) + 1e-6  # slack <= first term


def test_tail_sum_validation():
    with pytest.raises(ValidationError):
        tail_sum(Fraction(-1), 5)
    with pytest.raises(ValidationError):
        tail_sum(Fraction(-1, 2), 5)
    with pytest.raises(ValidationError):
        tail_sum(Fraction(-2), 0)


# --- multiplicity chain ------------------------------------------------------


def test_g_chain_h2_both_readings():
    lit = g_chain(2)
    assert lit.g == {1: 1, 2: 1, 3: 9, 4: 153}
    assert lit.max_g == 153
    assert lit.G == 153  # w defaults to 0

    order = g_chain(2, reading="order")
    assert order.g == {1: 1, 2: 1, 3: 9, 4: 297}
    assert order.max_g == 297


def test_g_chain_matches_recurrence():
    for h in (2, 3, 4, 5):
        for reading in ("literal", "order"):
            chain = g_chain(h, reading=reading)
            assert all(chain.g[k] == 1 for k in range(1, h + 1))
            assert chain.g[h + 1] == 4 * h + 1
            prev = 4 * h + 1
            for k in range(h + 2, 2 * h + 1):
                m = h if reading == "literal" else k
                prev = (4 * h + 1) * (m * (prev - 1) + 1)
                assert chain.g[k] == prev
            assert chain.max_g == max(chain.g[k] for k in range(2, 2 * h + 1))


def test_g_chain_cap_scales_with_deletions():
    for w in (0, 1, 3, 7):
        chain = g_chain(2, w=w)
        assert chain.G == 2**w * 153


def test_g_chain_validation():
    with pytest.raises(ValidationError):
        g_chain(1)
    with pytest.raises(ValidationError):
        g_chain(2, reading="loose")


# --- containment rule search --------------------------------------------------


def test_check_prop2_finds_no_counterexample():
    res = check_prop2(samples=80, h=2, g=1, l=1, N=60, seed=0)
    assert res.ok
    assert res.counterexample is None
    assert res.checked == 80
    assert 0 < res.premise_held <= 80


def test_check_prop2_order_reading_also_clean():
    res = check_prop2(samples=40, h=2, g=1, l=1, N=50, seed=3, reading="order")
    assert res.ok and res.premise_held > 0


def test_check_prop2_higher_order():
    res = check_prop2(samples=40, h=3, g=1, l=1, N=50, seed=1, order=3)
    assert res.ok and res.premise_held > 0


def test_check_prop2_validation():
    with pytest.raises(ValidationError):
        check_prop2(samples=5, h=2, g=1, l=1, N=20, order=1)


# --- binning and fitting -------------------------------------------------------


def test_geometric_bins_partition():
    b = geometric_bins(10, 1000, nbins=12)
    assert b.edges[0] == 10
    assert b.edges[-1] == 1001
    assert (np.diff(b.edges) > 0).all()
    assert (b.widths == np.diff(b.edges)).all()
    assert (b.centers >= b.edges[:-1]).all()
    assert (b.centers <= b.edges[1:]).all()
    assert b.nbins == len(b.widths)


def test_geometric_bins_validation():
    with pytest.raises(ValidationError):
        geometric_bins(0, 100)
    with pytest.raises(ValidationError):
        geometric_bins(50, 50)
    with pytest.raises(ValidationError):
        geometric_bins(5, 6, nbins=1)  # collapses to too few distinct edges


def test_loglog_slope_recovers_power_law():
    x = np.geomspace(1, 1e4, 50)
    y = 3.0 * x**-2.5
    slope, intercept = loglog_slope(x, y)
    assert slope == pytest.approx(-2.5, abs=1e-9)
    assert intercept == pytest.approx(math.log(3.0), abs=1e-9)


def test_loglog_slope_ignores_zero_bins():
    x = np.array([1.0, 10.0, 100.0, 1000.0])
    y = np.array([1.0, 0.0, 0.01, 0.001])
    slope, _ = loglog_slope(x, y)
    assert slope == pytest.approx(-1.0, abs=1e-9)
    with pytest.raises(ValidationError):
        loglog_slope(x, np.zeros(4))


# --- Monte Carlo estimators -----------------------------------------------------


def test_estimate_decay_smoke_and_determinism():
    kw = dict(
        h=2, k=2, s=2, N=2000, trials=30, seed=11,
        n_min=40, nbins=25, bootstrap=60, min_nonzero_bins=5,
    )
    est = estimate_decay(**kw)
    assert isinstance(est, DecayEstimate)
    assert est.theoretical == Fraction(-10, 9)
    assert est.per_trial_hits.shape == (30, est.bins.nbins)
    assert (est.hits == est.per_trial_hits.sum(axis=0)).all()
    assert np.isfinite(est.slope)
    assert est.ci_low < est.ci_high
    again = estimate_decay(**kw)
    assert again.slope == est.slope
    assert (again.per_trial_hits == est.per_trial_hits).all()


def test_estimate_decay_insufficient_data():
    with pytest.raises(InsufficientDataError):
        estimate_decay(h=2, k=2, s=40, N=500, trials=5, seed=0, n_min=50,
                       nbins=20, bootstrap=10)


def test_estimate_decay_validation():
    with pytest.raises(ValidationError):
        estimate_decay(h=2, k=2, s=0, N=500, trials=5)


def test_estimate_growth_smoke_and_determinism():
    kw = dict(h=2, k=2, N=2000, trials=20, seed=7, n_min=100, nbins=20)
    est = estimate_growth(**kw)
    assert est.theoretical == Fraction(2, 9) * 2 - 1  # k*alpha - 1
    assert 0.0 <= est.positivity_rate <= 1.0
    assert est.positive_flags.shape == (20,)
    assert est.mean_counts.shape == (est.bins.nbins,)
    assert np.isfinite(est.slope)
    again = estimate_growth(**kw)
    assert again.slope == est.slope
    assert again.positivity_rate == est.positivity_rate
