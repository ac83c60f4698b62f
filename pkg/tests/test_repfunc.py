import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sidonlab.core import BudgetExceededError, ValidationError, make_set
from sidonlab.repfunc import (
    brute_force_profile,
    count_nondecreasing,
    count_pairs_via_fft,
    count_strict,
    is_Bh_g,
    profile,
)

# Hand-derived profile for A = {1,2,3}, order 2, window 10:
#   n : tuples
#   2 : (1,1)               -> R=1, r=0
#   3 : (1,2)               -> R=1, r=1
#   4 : (1,3), (2,2)        -> R=2, r=1
#   5 : (2,3)               -> R=1, r=1
#   6 : (3,3)               -> R=1, r=0
HAND_R = [0, 0, 1, 1, 2, 1, 1, 0, 0, 0, 0]
HAND_r = [0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0]


def test_hand_profile_order2():
    A = make_set([1, 2, 3], 10)
    assert count_nondecreasing(A, 2, 10).tolist() == HAND_R
    assert count_strict(A, 2, 10).tolist() == HAND_r
    p = profile(A, 2, 10)
    assert p.Rstar.tolist() == (np.array(HAND_R) - np.array(HAND_r)).tolist()


def test_hand_profile_order3():
    # {1,2}, order 3: n=3:(1,1,1); 4:(1,1,2); 5:(1,2,2); 6:(2,2,2)
    A = make_set([1, 2], 6)
    assert count_nondecreasing(A, 3, 6).tolist() == [0, 0, 0, 1, 1, 1, 1]
    assert count_strict(A, 3, 6).tolist() == [0] * 7  # no 3 distinct elements exist


def test_single_element_and_empty():
    A = make_set([4], 20)
    R = count_nondecreasing(A, 3, 20)
    assert R[12] == 1 and R.sum() == 1
    assert count_strict(A, 3, 20).sum() == 0
    E = make_set([], 20)
    assert count_nondecreasing(E, 2, 20).sum() == 0


def test_profile_identity_and_brute_force_random():
    rng = np.random.default_rng(0)
    for _ in range(40):
        h = int(rng.integers(2, 5))
        N = int(rng.integers(10, 120))
        size = int(rng.integers(0, 12))
        els = np.unique(rng.integers(1, N + 1, size=size)).tolist()
        A = make_set(els, N)
        p = profile(A, h, N)
        assert (p.R == p.r + p.Rstar).all()
        assert (p.Rstar >= 0).all()
        bf = brute_force_profile(A, h, N)
        assert (p.R == bf.R).all()
        assert (p.r == bf.r).all()
        assert (p.Rstar == bf.Rstar).all()


def test_window_restriction_consistency():
    A = make_set([1, 4, 9, 11, 20], 40)
    full = count_nondecreasing(A, 2, 40)
    small = count_nondecreasing(A.restrict(25), 2, 25)
    assert (full[:26] == small).all()
    p = profile(A, 2, 40)
    q = p.restrict(25)
    assert (q.R == full[:26]).all()


def test_counts_monotone_under_superset():
    A = make_set([2, 5, 9], 30)
    B = A.with_element(7)
    for k in (2, 3):
        assert (count_nondecreasing(B, k, 30) >= count_nondecreasing(A, k, 30)).all()
        assert (count_strict(B, k, 30) >= count_strict(A, k, 30)).all()


def test_sidon_verdict_ok():
    v = is_Bh_g(make_set([1, 2, 5, 11], 22), 2, 1, 22)
    assert v.ok is True
    assert v.max_value == 1
    assert v.witness_n is None


def test_sidon_verdict_violation_witness():
    # {1,2,3,4}: 4 = 1+3 = 2+2 is the least doubly-represented target
    v = is_Bh_g(make_set([1, 2, 3, 4], 8), 2, 1, 8)
    assert v.ok is False
    assert v.witness_n == 4
    assert v.max_value >= 2
    got = {r.coords for r in v.witness_reps}
    assert got == {(1, 3), (2, 2)}


def test_bh_g_with_slack():
    # same set passes with multiplicity allowance 2
    v = is_Bh_g(make_set([1, 2, 3, 4], 8), 2, 2, 8)
    assert v.ok is True


def test_fft_pairs_match_dp():
    rng = np.random.default_rng(3)
    for _ in range(25):
        N = int(rng.integers(5, 200))
        els = np.unique(rng.integers(1, N + 1, size=rng.integers(0, 30))).tolist()
        A = make_set(els, N)
        assert (count_pairs_via_fft(A, N) == count_nondecreasing(A, 2, N)).all()


def test_brute_force_budget_refusal():
    A = make_set(list(range(1, 100)), 200)
    with pytest.raises(BudgetExceededError):
        brute_force_profile(A, 5, 200, budget=1000)


def test_validation_bad_order():
    A = make_set([1], 5)
    with pytest.raises(ValidationError):
        count_nondecreasing(A, 1, 5)
    with pytest.raises(ValidationError):
        count_nondecreasing(A, 2, -1)


@settings(max_examples=60, deadline=None)
@given(
    els=st.lists(st.integers(1, 60), max_size=10),
    h=st.integers(2, 4),
)
def test_identity_property(els, h):
    A = make_set(els, 60)
    p = profile(A, h, 60)
    assert (p.R == p.r + p.Rstar).all()
    assert (p.r >= 0).all() and (p.Rstar >= 0).all()


@settings(max_examples=30, deadline=None)
@given(els=st.sets(st.integers(1, 50), max_size=8))
def test_strict_counts_subsets(els):
    # r_h(n) equals the number of h-subsets summing to n
    A = make_set(sorted(els), 50)
    r = count_strict(A, 3, 50)
    expect = np.zeros(51, dtype=np.int64)
    for c in itertools.combinations(sorted(els), 3):
        if sum(c) <= 50:
            expect[sum(c)] += 1
    assert (r == expect).all()
