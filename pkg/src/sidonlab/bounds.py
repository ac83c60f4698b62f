"""Exact-rational bound calculus and Monte Carlo exponent estimation.

The analytic side is exact: per-(k, s) tail exponents (k*alpha - 1)*s with
their closed forms, integral-test tail sums, and the g_k chain that bounds
multiplicities after deletion, in arbitrary precision.

The empirical side estimates the same exponents from sampled sets: the decay
of P(r_star_k(n) >= s) and the growth of the distinct-term count r_k(n),
both as log-log least-squares slopes over geometric bins, with bootstrap
confidence intervals over trials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import IntegerSet, Params, ValidationError
from .packing import RepCatalog
from .repfunc import count_nondecreasing, count_strict
from .sampler import SampleSpec, sample_set


def exponent(h: int, k: int, s: int, alpha: Fraction | None = None) -> Fraction:
    """Exact rational (k*alpha - 1) * s; alpha defaults to the 2/(4h+1) preset."""
    if alpha is None:
        alpha = Fraction(2, 4 * h + 1)
    return (k * alpha - 1) * s


@dataclass(frozen=True)
class ExponentEntry:
    k: int
    s: int
    value: Fraction
    closed_form: Fraction
    summable: bool  # value < -1, so the tail sum is finite


@dataclass(frozen=True)
class ExponentTable:
    """Tail-probability exponents for one h at the preset alpha.

    Low orders 2 <= k <= h pair with s = 2 and simplify to
    -(8h-4k+2)/(4h+1); high orders h < k <= 2h pair with s = 4h+2 and
    simplify to -(2h+1)(8h-4k+2)/(4h+1).  Both families stay < -1 on their
    ranges, which is what makes the tail sums finite.
    """

    h: int
    alpha: Fraction
    entries: tuple[ExponentEntry, ...]

    def entry(self, k: int) -> ExponentEntry:
        for e in self.entries:
            if e.k == k:
                return e
        raise ValidationError(f"no exponent entry for k={k}")


def exponent_table(h: int) -> ExponentTable:
    if h < 2:
        raise ValidationError(f"h must be >= 2, got {h}")
    alpha = Fraction(2, 4 * h + 1)
    entries = []
    for k in range(2, h + 1):
        val = exponent(h, k, 2, alpha)
        closed = Fraction(-(8 * h - 4 * k + 2), 4 * h + 1)
        entries.append(ExponentEntry(k, 2, val, closed, val < -1))
    for k in range(h + 1, 2 * h + 1):
        s = 4 * h + 2
        val = exponent(h, k, s, alpha)
        closed = Fraction(-(2 * h + 1) * (8 * h - 4 * k + 2), 4 * h + 1)
        entries.append(ExponentEntry(k, s, val, closed, val < -1))
    return ExponentTable(h=h, alpha=alpha, entries=tuple(entries))


def tail_sum(exp: Fraction, start: int) -> float:
    """Integral-test upper bound on sum_{n >= start} n^exp, requiring exp < -1."""
    if exp >= -1:
        raise ValidationError(f"tail diverges for exponent {exp} >= -1")
    if start < 1:
        raise ValidationError(f"start must be >= 1, got {start}")
    e = float(exp)
    return start ** (e + 1) / (-e - 1) + start**e


@dataclass(frozen=True)
class GChain:
    """Multiplicity bounds g_k surviving the deletion, and the final cap G.

    g_k = 1 for k <= h; g_{h+1} = 4h+1; each later order composes the
    containment rule with g = 4h+1 and l = previous g.  The composition
    multiplier is ambiguous between the written symbol (always h) and the
    order the rule is applied at; ``reading`` selects one, values are exact
    arbitrary-precision integers either way.
    """

    h: int
    reading: str
    g: dict[int, int] = field(repr=False)
    w: int = 0

    @property
    def max_g(self) -> int:
        return max(self.g[k] for k in self.g if k > 1)

    @property
    def G(self) -> int:
        return 2**self.w * self.max_g


def _compose_bound(g: int, l: int, multiplier_order: int) -> int:
    """Containment rule output bound: g * (m*(l-1) + 1)."""
    return g * (multiplier_order * (l - 1) + 1)


def g_chain(h: int, w: int = 0, reading: str = "literal") -> GChain:
    if h < 2:
        raise ValidationError(f"h must be >= 2, got {h}")
    if reading not in ("literal", "order"):
        raise ValidationError(f"reading must be 'literal' or 'order', got {reading!r}")
    g: dict[int, int] = {k: 1 for k in range(1, h + 1)}
    g[h + 1] = 4 * h + 1
    for k in range(h + 2, 2 * h + 1):
        m = h if reading == "literal" else k
        g[k] = _compose_bound(4 * h + 1, g[k - 1], m)
    return GChain(h=h, reading=reading, g=g, w=w)


# ---------------------------------------------------------------------------
# Containment rule check: B*_h[g] and B_{h-1}[l] together force B_h[g(m(l-1)+1)]
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Prop2Result:
    checked: int
    premise_held: int
    counterexample: dict | None

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def _random_test_set(seed: int, index: int, N: int) -> IntegerSet:
    """Diverse random sets for containment checking, deterministic per index.

    Mixes power-law samples across a range of densities with uniform random
    subsets; dense draws fail the premise fast, sparse draws exercise it.
    """
    key = np.array([seed, index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    mode = index % 4
    if mode < 3:
        a = rng.uniform(0.05, 0.95)
        p = np.arange(1, N + 1, dtype=np.float64) ** (a - 1.0)
        kept = np.flatnonzero(rng.random(N) < p) + 1
    else:
        size = int(rng.integers(0, 30))
        kept = np.sort(rng.choice(np.arange(1, N + 1), size=size, replace=False))
    return IntegerSet(kept.astype(np.int64), N)


def check_prop2(
    samples: int,
    h: int,
    g: int,
    l: int,
    N: int,
    seed: int = 0,
    reading: str = "literal",
    order: int | None = None,
) -> Prop2Result:
    """Random-set search for a counterexample to the containment rule.

    Premise (checked on [1, N]): the set is B*_order[g] and B_{order-1}[l].
    Conclusion: it is B_order[g * (m*(l-1)+1)] with m = h under the literal
    reading, m = order under the order reading.  A counterexample would mean
    an implementation bug, since the containment is proven.
    """
    from .packing import is_Bstar_l_g

    if order is None:
        order = h
    if order < 2:
        raise ValidationError(f"order must be >= 2, got {order}")
    m = h if reading == "literal" else order
    bound = _compose_bound(g, l, m)
    premise_held = 0
    for i in range(samples):
        A = _random_test_set(seed, i, N)
        # cheap DP premise first; the disjointness scan only runs if it holds
        if order >= 3:
            if int(count_nondecreasing(A, order - 1, N).max(initial=0)) > l:
                continue
        else:  # order-1 == 1: every n is hit at most once by a single element
            pass
        star = is_Bstar_l_g(A, order, g, N, method="scan")
        if star.ok is not True:
            continue
        premise_held += 1
        concl_max = int(count_nondecreasing(A, order, N).max(initial=0))
        if concl_max > bound:
            R = count_nondecreasing(A, order, N)
            witness = int(np.argmax(R > bound))
            return Prop2Result(
                checked=i + 1,
                premise_held=premise_held,
                counterexample={
                    "set": A.to_list(),
                    "N": N,
                    "order": order,
                    "g": g,
                    "l": l,
                    "reading": reading,
                    "bound": bound,
                    "witness_n": witness,
                    "witness_count": int(R[witness]),
                },
            )
    return Prop2Result(checked=samples, premise_held=premise_held, counterexample=None)


# ---------------------------------------------------------------------------
# Log-log fitting over geometric bins
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeometricBins:
    """Half-open integer bins [lo, hi) spanning [n_min, n_max] geometrically."""

    edges: np.ndarray  # int64, len nbins+1
    centers: np.ndarray  # geometric midpoints
    widths: np.ndarray  # integer counts per bin

    @property
    def nbins(self) -> int:
        return len(self.centers)


def geometric_bins(n_min: int, n_max: int, nbins: int = 40) -> GeometricBins:
    if not (1 <= n_min < n_max):
        raise ValidationError(f"need 1 <= n_min < n_max, got [{n_min}, {n_max}]")
    raw = np.geomspace(n_min, n_max + 1, nbins + 1)
    edges = np.unique(np.rint(raw).astype(np.int64))
    if len(edges) < 3:
        raise ValidationError("bin range too narrow")
    centers = np.sqrt(edges[:-1] * (edges[1:] - 1).astype(np.float64))
    widths = (edges[1:] - edges[:-1]).astype(np.int64)
    return GeometricBins(edges=edges, centers=centers, widths=widths)


def loglog_slope(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and intercept of log y against log x (y > 0 only)."""
    keep = y > 0
    if keep.sum() < 2:
        raise ValidationError("need at least two positive points for a log-log fit")
    lx, ly = np.log(x[keep]), np.log(y[keep])
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


class InsufficientDataError(ValidationError):
    """Too few nonzero bins for a meaningful exponent fit."""


@dataclass(frozen=True)
class DecayEstimate:
    h: int
    k: int
    s: int
    N: int
    trials: int
    bins: GeometricBins
    freq: np.ndarray  # per-bin event frequency
    slope: float
    intercept: float
    ci_low: float
    ci_high: float
    theoretical: Fraction
    per_trial_hits: np.ndarray = field(repr=False)  # (trials, nbins) int32

    @property
    def hits(self) -> np.ndarray:
        return self.per_trial_hits.sum(axis=0)


def _bin_index(edges: np.ndarray, n_values: np.ndarray) -> np.ndarray:
    return np.searchsorted(edges, n_values, side="right") - 1


def estimate_decay(
    h: int,
    k: int,
    s: int,
    N: int,
    trials: int,
    seed: int = 0,
    n_min: int = 100,
    nbins: int = 40,
    bootstrap: int = 1000,
    min_nonzero_bins: int = 30,
    alpha: Fraction | None = None,
) -> DecayEstimate:
    """Monte Carlo estimate of the decay exponent of P(r_star_k(n) >= s).

    For each trial a fresh set is sampled and, for every n <= N, the event
    "n has >= s pairwise disjoint order-k representations" is decided exactly
    (early-exit family search).  Event frequencies are pooled in geometric
    bins and fitted log-log; the confidence interval is a percentile bootstrap
    over trials.  Raises InsufficientDataError when fewer than
    ``min_nonzero_bins`` bins saw the event.
    """
    if s < 1:
        raise ValidationError(f"s must be >= 1, got {s}")
    params = Params(h=h, alpha=alpha or Fraction(2, 4 * h + 1), N=N, seed=seed)
    spec = SampleSpec(params)
    bins = geometric_bins(n_min, N, nbins)
    hits = np.zeros((trials, bins.nbins), dtype=np.int32)
    for t in range(trials):
        A = sample_set(spec, trial=t)
        catalog = RepCatalog(A, k, N)
        event_n = [
            n
            for n in catalog.targets()
            if n >= n_min and catalog.exceeds(n, s - 1)
        ]
        if event_n:
            idx = _bin_index(bins.edges, np.asarray(event_n, dtype=np.int64))
            valid = (idx >= 0) & (idx < bins.nbins)
            np.add.at(hits[t], idx[valid], 1)
        del catalog
    total = hits.sum(axis=0)
    freq = total / (trials * bins.widths)
    nonzero = int((freq > 0).sum())
    if nonzero < min_nonzero_bins:
        raise InsufficientDataError(
            f"only {nonzero} nonzero bins (< {min_nonzero_bins}); "
            "increase trials or lower s"
        )
    slope, intercept = loglog_slope(bins.centers, freq)
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 2**32], dtype=np.uint64)))
    boot = np.empty(bootstrap, dtype=np.float64)
    for b in range(bootstrap):
        rows = rng.integers(0, trials, size=trials)
        f = hits[rows].sum(axis=0) / (trials * bins.widths)
        boot[b], _ = loglog_slope(bins.centers, f)
    ci_low, ci_high = np.percentile(boot, [2.5, 97.5])
    return DecayEstimate(
        h=h,
        k=k,
        s=s,
        N=N,
        trials=trials,
        bins=bins,
        freq=freq,
        slope=slope,
        intercept=intercept,
        ci_low=float(ci_low),
        ci_high=float(ci_high),
        theoretical=exponent(h, k, s, alpha),
        per_trial_hits=hits,
    )


@dataclass(frozen=True)
class GrowthEstimate:
    h: int
    k: int
    N: int
    trials: int
    bins: GeometricBins
    mean_counts: np.ndarray  # pooled mean of r_k(n) per bin
    slope: float
    intercept: float
    positivity_rate: float  # fraction of trials with r_k(n) > 0 on (N/2, N]
    positive_flags: np.ndarray = field(repr=False)
    theoretical: Fraction = Fraction(0)


def estimate_growth(
    h: int,
    k: int,
    N: int,
    trials: int,
    seed: int = 0,
    n_min: int = 1000,
    nbins: int = 40,
    alpha: Fraction | None = None,
) -> GrowthEstimate:
    """Pooled growth estimate for the distinct-term count r_k(n) on sampled sets.

    Records, per trial, whether r_k(n) > 0 for every n in (N/2, N], and pools
    r_k over geometric bins spanning [n_min, N] for a log-log slope to compare
    with the exact rational k*alpha - 1.
    """
    params = Params(h=h, alpha=alpha or Fraction(2, 4 * h + 1), N=N, seed=seed)
    spec = SampleSpec(params)
    bins = geometric_bins(n_min, N, nbins)
    sums = np.zeros(bins.nbins, dtype=np.float64)
    flags = np.zeros(trials, dtype=bool)
    half = N // 2
    for t in range(trials):
        A = sample_set(spec, trial=t)
        r = count_strict(A, k, N)
        flags[t] = bool((r[half + 1 :] > 0).all())
        binned = np.add.reduceat(
            r[bins.edges[0] : bins.edges[-1]].astype(np.float64),
            bins.edges[:-1] - bins.edges[0],
        )
        sums += binned
    mean_counts = sums / (trials * bins.widths)
    slope, intercept = loglog_slope(bins.centers, mean_counts)
    return GrowthEstimate(
        h=h,
        k=k,
        N=N,
        trials=trials,
        bins=bins,
        mean_counts=mean_counts,
        slope=slope,
        intercept=intercept,
        positivity_rate=float(flags.mean()),
        positive_flags=flags,
        theoretical=exponent(h, k, 1, alpha),
    )
