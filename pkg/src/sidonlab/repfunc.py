"""Representation-counting kernels over a window.

For a set A and order h, three arrays over n = 1..N:

  R(n)      number of non-decreasing h-tuples from A summing to n
            (repetition allowed; the canonical unordered count),
  r(n)      number of strictly increasing h-tuples (all terms distinct),
  Rstar(n)  representations with at least two equal terms.

The identity R = r + Rstar is asserted on every profile, in production, not
only in tests.  The fast path is an element-ordered dynamic program, exact in
64-bit integers; ``brute_force_profile`` is the independent enumeration oracle
used by the test suite.

A strictly increasing tuple of h >= 2 positive terms automatically has every
term below the total, so no separate "last term < n" handling is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from math import comb

import numpy as np

from .core import (
    BudgetExceededError,
    IntegerSet,
    InternalConsistencyError,
    RepVector,
    ValidationError,
)

# Counts are held in int64; a row whose maximum crosses this limit could
# overflow on the next in-place addition, so the kernel refuses to continue.
_OVERFLOW_LIMIT = 2**62


@dataclass(frozen=True)
class RepProfile:
    """The three count arrays for fixed (A, h, N), each of length N + 1.

    Index 0 is unused and always zero.
    """

    h: int
    N: int
    R: np.ndarray
    r: np.ndarray
    Rstar: np.ndarray

    def restrict(self, M: int) -> "RepProfile":
        if M > self.N:
            raise ValidationError("cannot restrict a profile to a larger window")
        return RepProfile(self.h, M, self.R[: M + 1], self.r[: M + 1], self.Rstar[: M + 1])


def _dp_counts(A: IntegerSet, h: int, N: int, distinct: bool) -> np.ndarray:
    """Shared DP: dp[j][n] = #{j-subsets or j-multisets of A with sum n}.

    Multiset counting updates j ascending so the current element may repeat;
    subset counting updates j descending for 0/1 semantics.
    """
    if h < 2:
        raise ValidationError(f"order h must be >= 2, got {h}")
    if N < 0:
        raise ValidationError(f"N must be >= 0, got {N}")
    dp = np.zeros((h + 1, N + 1), dtype=np.int64)
    dp[0, 0] = 1
    js = range(h, 0, -1) if distinct else range(1, h + 1)
    for a in A.elements.tolist():
        if a > N:
            break
        for j in js:
            dp[j, a:] += dp[j - 1, : N + 1 - a]
            if int(dp[j].max()) > _OVERFLOW_LIMIT:
                raise OverflowError(
                    f"representation counts exceed 64-bit budget at order {j}"
                )
    out = dp[h]
    out.setflags(write=False)
    return out


def count_nondecreasing(A: IntegerSet, h: int, N: int) -> np.ndarray:
    """R: exact counts of non-decreasing h-tuples from A per target sum <= N."""
    return _dp_counts(A, h, N, distinct=False)


def count_strict(A: IntegerSet, h: int, N: int) -> np.ndarray:
    """r: exact counts of strictly increasing h-tuples from A per target sum <= N."""
    return _dp_counts(A, h, N, distinct=True)


def profile(A: IntegerSet, h: int, N: int) -> RepProfile:
    """Assemble (R, r, Rstar) and assert the splitting identity entry-wise."""
    R = count_nondecreasing(A, h, N)
    r = count_strict(A, h, N)
    Rstar = R - r
    if Rstar.min(initial=0) < 0:
        n = int(np.argmax(Rstar < 0))
        raise InternalConsistencyError(
            f"repeated-term count negative at n={n}: R={int(R[n])} < r={int(r[n])}"
        )
    Rstar.setflags(write=False)
    return RepProfile(h=h, N=N, R=R, r=r, Rstar=Rstar)


def brute_force_profile(A: IntegerSet, h: int, N: int, budget: int = 2_000_000) -> RepProfile:
    """Enumeration oracle: count every h-multiset and h-subset directly.

    Refuses when the multiset enumeration C(|A|+h-1, h) exceeds ``budget``.
    Used by tests to cross-check the DP kernels; keep it dumb.
    """
    m = len(A)
    est = comb(m + h - 1, h)
    if est > budget:
        raise BudgetExceededError(
            f"brute force would enumerate {est} tuples, budget is {budget}"
        )
    R = np.zeros(N + 1, dtype=np.int64)
    r = np.zeros(N + 1, dtype=np.int64)
    els = A.to_list()
    for tup in combinations_with_replacement(els, h):
        s = sum(tup)
        if s <= N:
            R[s] += 1
    for tup in combinations(els, h):
        s = sum(tup)
        if s <= N:
            r[s] += 1
    Rstar = R - r
    for arr in (R, r, Rstar):
        arr.setflags(write=False)
    return RepProfile(h=h, N=N, R=R, r=r, Rstar=Rstar)


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a B_h[g]-style bound check.

    ``ok`` is None when the check could not be certified (budget exhaustion in
    a downstream solver); ``witness_n`` is the least violating target and
    ``witness_reps`` its representations, when there is a violation.
    """

    ok: bool | None
    g: int
    max_value: int
    witness_n: int | None = None
    witness_reps: tuple[RepVector, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok is True


def is_Bh_g(A: IntegerSet, h: int, g: int, N: int) -> MembershipVerdict:
    """Decide whether every n <= N has at most g order-h representations.

    On failure the least violating n is returned together with the full list
    of its representations.
    """
    if g < 1:
        raise ValidationError(f"g must be >= 1, got {g}")
    R = count_nondecreasing(A, h, N)
    max_value = int(R.max(initial=0))
    if max_value <= g:
        return MembershipVerdict(ok=True, g=g, max_value=max_value)
    n = int(np.argmax(R > g))
    from .packing import enumerate_reps  # local import; packing depends only on core

    reps = tuple(enumerate_reps(A, h, n, budget=max(1024, 4 * max_value)))
    return MembershipVerdict(ok=False, g=g, max_value=max_value, witness_n=n, witness_reps=reps)


def ordered_pair_counts(A: IntegerSet, N: int) -> np.ndarray:
    """Ordered two-term counts O2(n) = #{(a, b) in A^2 : a + b = n}, n <= N, via FFT.

    Counts are small integers, so rounding the float convolution is exact.
    """
    f = A.mask[: N + 1].astype(np.float64)
    size = 1
    while size < 2 * (N + 1):
        size *= 2
    spec = np.fft.rfft(f, size)
    conv = np.fft.irfft(spec * spec, size)[: N + 1]
    return np.rint(conv).astype(np.int64)


def count_pairs_via_fft(A: IntegerSet, N: int) -> np.ndarray:
    """Cross-check for order 2: unordered counts from the ordered convolution.

    Unordered = (ordered + diagonal) / 2, where the diagonal marks even n with
    n/2 in A.  Exactness of the halving is asserted.
    """
    O2 = ordered_pair_counts(A, N)
    diag = np.zeros(N + 1, dtype=np.int64)
    half = min(N // 2, A.window_max)
    if half >= 1:
        m = np.arange(1, half + 1)
        diag[2 * m] = A.mask[1 : half + 1]
    total = O2 + diag
    if (total % 2).any():
        raise InternalConsistencyError("ordered pair convolution has odd parity")
    return total // 2
