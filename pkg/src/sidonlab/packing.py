"""Maximum pairwise-disjoint representation families.

Two representations of the same n conflict when their coordinate supports
intersect (so (2,2) and (2,6) conflict even though they differ at one slot).
r_star(n) is the size of a maximum pairwise-disjoint subfamily: a maximum
independent set in the conflict graph over the representations of n.

Instances at window scale are tiny (a handful of vertices), so the exact
solver is a bitmask branch-and-bound with a greedy clique-cover bound,
certified exact up to ``max_vertices``.  Greedy with deterministic
tie-breaking (smaller support first, then lexicographic) supplies the initial
lower bound and the uncertified fallback.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterator

from .core import BudgetExceededError, IntegerSet, RepVector, ValidationError

DEFAULT_BUDGET = 200_000
DEFAULT_MAX_VERTICES = 500


def _iter_tuples(els: list[int], l: int, n: int) -> Iterator[tuple[int, ...]]:
    """Yield non-decreasing l-tuples from sorted ``els`` summing to n."""
    stack: list[int] = []

    def rec(start: int, remaining: int, terms: int):
        if terms == 1:
            # final coordinate must be >= the previous one and equal remaining
            i = bisect_right(els, remaining) - 1
            if i >= start and els[i] == remaining:
                stack.append(remaining)
                yield tuple(stack)
                stack.pop()
            return
        for i in range(start, len(els)):
            a = els[i]
            if a * terms > remaining:
                break
            stack.append(a)
            yield from rec(i, remaining - a, terms - 1)
            stack.pop()

    yield from rec(0, n, l)


def enumerate_reps(A: IntegerSet, l: int, n: int, budget: int = DEFAULT_BUDGET) -> list[RepVector]:
    """Complete list of non-decreasing l-tuples from A summing to n.

    Raises BudgetExceededError (with the partial list attached) if more than
    ``budget`` vectors would be produced.
    """
    if l < 2:
        raise ValidationError(f"order l must be >= 2, got {l}")
    if n < 1:
        raise ValidationError(f"target n must be >= 1, got {n}")
    out: list[RepVector] = []
    for tup in _iter_tuples(A.to_list(), l, n):
        if len(out) >= budget:
            raise BudgetExceededError(
                f"more than {budget} representations of {n}", partial=out
            )
        out.append(RepVector(tup))
    return out


@dataclass
class DisjointnessInstance:
    """Conflict structure over the representations of one target n.

    ``conflicts[i]`` is a bitmask of the representations whose support
    intersects representation i's support.  The relation is symmetric and
    irreflexive by construction.
    """

    n: int
    l: int
    reps: list[RepVector]
    conflicts: list[int]

    @classmethod
    def build(cls, n: int, l: int, reps: list[RepVector]) -> "DisjointnessInstance":
        reps = sorted(reps, key=lambda v: (len(v.support()), v.coords))
        supports = [v.support() for v in reps]
        m = len(reps)
        conflicts = [0] * m
        for i in range(m):
            si = supports[i]
            for j in range(i + 1, m):
                if si & supports[j]:
                    conflicts[i] |= 1 << j
                    conflicts[j] |= 1 << i
        return cls(n=n, l=l, reps=reps, conflicts=conflicts)

    def conflict(self, i: int, j: int) -> bool:
        return bool(self.conflicts[i] >> j & 1)


def _greedy_family(conflicts: list[int]) -> int:
    """Greedy disjoint family over vertices in stored order; returns a bitmask.

    The stored order is (support size, lexicographic), fixed at build time, so
    the result is deterministic.
    """
    chosen = 0
    blocked = 0
    for i in range(len(conflicts)):
        bit = 1 << i
        if not blocked & bit:
            chosen |= bit
            blocked |= conflicts[i] | bit
    return chosen


def _clique_cover_bound(cand: int, conflicts: list[int]) -> int:
    """Number of cliques in a greedy clique cover of the candidate subgraph.

    An upper bound for the maximum independent set restricted to ``cand``.
    """
    count = 0
    rest = cand
    while rest:
        v = (rest & -rest).bit_length() - 1
        clique_mask = 1 << v
        # members must be adjacent to every clique vertex: intersect neighborhoods
        common = conflicts[v] & rest
        rest ^= 1 << v
        while common:
            u = (common & -common).bit_length() - 1
            clique_mask |= 1 << u
            rest ^= 1 << u
            common &= conflicts[u]
            common &= rest
        count += 1
    return count


def _max_independent_set(conflicts: list[int], stop_at: int | None = None) -> tuple[int, int]:
    """Exact maximum independent set on the conflict graph, as (size, bitmask).

    Branch and bound: greedy start, clique-cover upper bound, branch on the
    highest-degree candidate.  If ``stop_at`` is given, the search returns as
    soon as a family of that size is found (decision use).
    """
    m = len(conflicts)
    best_mask = _greedy_family(conflicts)
    best = best_mask.bit_count()
    if stop_at is not None and best >= stop_at:
        return best, best_mask
    full = (1 << m) - 1

    def popcount_in(cand: int, v: int) -> int:
        return (conflicts[v] & cand).bit_count()

    def search(cand: int, cur: int, cur_mask: int):
        nonlocal best, best_mask
        if stop_at is not None and best >= stop_at:
            return
        # absorb isolated candidates for free
        while cand:
            iso = 0
            rest = cand
            while rest:
                v = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                if not conflicts[v] & cand:
                    iso |= 1 << v
            if not iso:
                break
            cur += iso.bit_count()
            cur_mask |= iso
            cand &= ~iso
        if not cand:
            if cur > best:
                best, best_mask = cur, cur_mask
            return
        if cur + _clique_cover_bound(cand, conflicts) <= best:
            return
        # branch on the candidate with the most conflicts inside cand
        v = max(_bits(cand), key=lambda u: popcount_in(cand, u))
        bit = 1 << v
        search(cand & ~(conflicts[v] | bit), cur + 1, cur_mask | bit)
        search(cand & ~bit, cur, cur_mask)

    search(full, 0, 0)
    return best, best_mask


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class RStarResult:
    """Maximum disjoint-family size with one witness family.

    ``certified`` is False when enumeration or the exact solver hit a budget,
    in which case ``value`` is only the greedy lower bound.
    """

    n: int
    l: int
    value: int
    certified: bool
    witness: tuple[RepVector, ...]


def r_star(
    A: IntegerSet,
    l: int,
    n: int,
    budget: int = DEFAULT_BUDGET,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> RStarResult:
    """Exact maximum number of pairwise disjoint representations of n.

    Falls back to the greedy lower bound, flagged non-certified, when the
    enumeration budget or the exact-solver vertex cap is exceeded.
    """
    certified = True
    try:
        reps = enumerate_reps(A, l, n, budget=budget)
    except BudgetExceededError as exc:
        reps = list(exc.partial)
        certified = False
    inst = DisjointnessInstance.build(n, l, reps)
    if certified and len(reps) <= max_vertices:
        size, mask = _max_independent_set(inst.conflicts)
    else:
        certified = False
        mask = _greedy_family(inst.conflicts)
        size = mask.bit_count()
    witness = tuple(inst.reps[i] for i in _bits(mask))
    return RStarResult(n=n, l=l, value=size, certified=certified, witness=witness)


@dataclass(frozen=True)
class BStarVerdict:
    """Outcome of a B*_l[g] window check.

    ``ok`` is None ("unknown") when some target could not be certified and no
    certified violation was found.
    """

    ok: bool | None
    g: int
    witness_n: int | None = None
    witness_value: int | None = None
    uncertified_n: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok is True


class RepCatalog:
    """All order-l representations of every n <= N from A, bucketed by target.

    One enumeration pass serves every later query; prefix deletions A \\ [1, m]
    reduce to filtering each bucket to representations whose minimum
    coordinate exceeds m, so threshold searches reuse the same catalog.
    """

    def __init__(self, A: IntegerSet, l: int, N: int, budget: int = 50_000_000):
        if l < 2:
            raise ValidationError(f"order l must be >= 2, got {l}")
        self.A = A
        self.l = l
        self.N = N
        buckets: dict[int, list[tuple[int, ...]]] = {}
        count = 0
        els = A.to_list()
        stack: list[int] = []

        def rec(start: int, acc: int, terms: int):
            nonlocal count
            if terms == 0:
                count += 1
                if count > budget:
                    raise BudgetExceededError(
                        f"catalog for l={l} exceeds {budget} representations"
                    )
                buckets.setdefault(acc, []).append(tuple(stack))
                return
            for i in range(start, len(els)):
                a = els[i]
                if acc + a * terms > N:
                    break
                stack.append(a)
                rec(i, acc + a, terms - 1)
                stack.pop()

        rec(0, 0, l)
        # sort each bucket by minimum coordinate so prefix filtering is a bisect
        self._buckets: dict[int, list[tuple[int, ...]]] = {}
        self._mins: dict[int, list[int]] = {}
        for n, reps in buckets.items():
            reps.sort(key=lambda t: t[0])
            self._buckets[n] = reps
            self._mins[n] = [t[0] for t in reps]

    def targets(self) -> list[int]:
        """Targets with at least one representation, ascending."""
        return sorted(self._buckets)

    def reps(self, n: int, above: int = 0) -> list[tuple[int, ...]]:
        """Representations of n with every coordinate > ``above``."""
        reps = self._buckets.get(n, [])
        if not reps:
            return []
        if above <= 0:
            return reps
        i = bisect_right(self._mins[n], above)
        return reps[i:]

    def min_coords(self, n: int) -> list[int]:
        return self._mins.get(n, [])

    def instance(self, n: int, above: int = 0) -> DisjointnessInstance:
        reps = [RepVector(t) for t in self.reps(n, above)]
        return DisjointnessInstance.build(n, self.l, reps)

    def r_star_value(self, n: int, above: int = 0, stop_at: int | None = None) -> int:
        """Disjoint-family size for n (exact, or >= stop_at early-exited)."""
        reps = self.reps(n, above)
        if len(reps) <= 1:
            return len(reps)
        inst = DisjointnessInstance.build(n, self.l, [RepVector(t) for t in reps])
        size, _ = _max_independent_set(inst.conflicts, stop_at=stop_at)
        return size

    def exceeds(self, n: int, bound: int, above: int = 0) -> bool:
        """True iff r_star of n, after deleting [1, above], is > bound."""
        if len(self.reps(n, above)) <= bound:
            return False
        return self.r_star_value(n, above, stop_at=bound + 1) > bound


def is_Bstar_l_g(
    A: IntegerSet,
    l: int,
    g: int,
    N: int,
    budget: int = DEFAULT_BUDGET,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    method: str = "auto",
) -> BStarVerdict:
    """Decide whether r_star(n) <= g for every n <= N.

    ``method="scan"`` walks targets in ascending order with per-target
    enumeration and exits at the first certified violation (cheap on dense
    sets, which fail early); ``method="catalog"`` enumerates every
    representation once (cheap on sparse sets).  ``"auto"`` picks by set size.
    Uncertified targets downgrade a would-be True to unknown rather than
    asserting false certainty.
    """
    if g < 1:
        raise ValidationError(f"g must be >= 1, got {g}")
    if method == "auto":
        method = "scan" if len(A) > 100 else "catalog"
    uncertified: list[int] = []
    if method == "catalog":
        catalog = RepCatalog(A, l, N, budget=budget)
        for n in catalog.targets():
            if catalog.exceeds(n, g):
                return BStarVerdict(
                    ok=False, g=g, witness_n=n, witness_value=catalog.r_star_value(n)
                )
    elif method == "scan":
        for n in range(1, N + 1):
            res = r_star(A, l, n, budget=budget, max_vertices=max_vertices)
            if res.certified and res.value > g:
                return BStarVerdict(ok=False, g=g, witness_n=n, witness_value=res.value)
            if not res.certified:
                if res.value > g:
                    # greedy lower bound already violates: certified failure
                    return BStarVerdict(ok=False, g=g, witness_n=n, witness_value=res.value)
                uncertified.append(n)
    else:
        raise ValidationError(f"unknown method {method!r}")
    if uncertified:
        return BStarVerdict(ok=None, g=g, uncertified_n=tuple(uncertified))
    return BStarVerdict(ok=True, g=g)
