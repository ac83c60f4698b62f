"""Sample, delete a finite prefix, verify: the construction made executable.

Given a sampled set A on [1, N], each order k in [2, 2h] gets a threshold
n_k: the least prefix cut m such that after deleting A intersect [1, m], no
target in (m, N] has more than the allowed number of pairwise disjoint
order-k representations (1 for k <= h, 4h+1 above).  The survivor
B = A minus the union of those prefixes is then checked directly: at most one
order-h representation per target, the full disjointness chain, the
multiplicity cap G on A, and the order-(2h+1) positivity window with a
fitted growth exponent.

Failure is a first-class outcome at window scale: reports record which check
failed rather than asserting per-seed success.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bounds import GChain, g_chain, geometric_bins, loglog_slope
from .core import IntegerSet, Params, SidonLabError, ValidationError, make_set
from .packing import RepCatalog
from .repfunc import count_nondecreasing

SCHEMA_VERSION = "1"


class ThresholdNotFoundError(SidonLabError):
    """No valid prefix cut below N/2: window too small or unlucky sample."""


def find_threshold(
    A: IntegerSet, k: int, bound: int, N: int, catalog: RepCatalog | None = None
) -> int:
    """Least m such that deleting A intersect [1, m] caps the disjoint count.

    After the cut, every n in (m, N] must have at most ``bound`` pairwise
    disjoint order-k representations.  Deletion only ever removes
    representations, so the condition is monotone in m and each violating
    target has a well-defined least fixing cut; the answer is the largest of
    those.  Raises ThresholdNotFoundError when the answer is not below N/2.
    """
    if bound < 1:
        raise ValidationError(f"bound must be >= 1, got {bound}")
    if catalog is None:
        catalog = RepCatalog(A, k, N)
    m_star = 0
    for n in catalog.targets():
        if not catalog.exceeds(n, bound):
            continue
        mins = sorted(set(catalog.min_coords(n)))
        # least cut fixing this n; cutting past the largest minimum removes
        # every representation, so the search always terminates
        lo, hi = 0, len(mins) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if catalog.exceeds(n, bound, above=mins[mid]):
                lo = mid + 1
            else:
                hi = mid
        m_star = max(m_star, mins[lo])
    if 2 * m_star >= N:
        raise ThresholdNotFoundError(
            f"order {k}: least valid cut {m_star} is not below N/2 = {N / 2:g}"
        )
    return m_star


@dataclass(frozen=True)
class BasisVerdict:
    """Positivity of the order-k count on (start, N], with a growth fit.

    ``gaps`` lists every n in (start, N] with no representation; the fit is a
    log-log least-squares line through geometric-bin means of the counts,
    with ``reference`` the exact exponent it should track.
    """

    order: int
    start: int
    N: int
    ok: bool
    gaps: list[int]
    slope: float | None
    c: float | None
    reference: Fraction | None

    @property
    def last_gap(self) -> int:
        return self.gaps[-1] if self.gaps else 0


def verify_basis(
    B: IntegerSet,
    order: int,
    start: int,
    N: int,
    reference: Fraction | None = None,
    nbins: int = 40,
) -> BasisVerdict:
    """Check R_order(n) > 0 for all n in (start, N] and fit the growth rate."""
    R = count_nondecreasing(B, order, N)
    gaps = (np.flatnonzero(R[start + 1 :] == 0) + start + 1).tolist()
    slope = c = None
    positive = np.flatnonzero(R > 0)
    if positive.size:
        lo = int(positive[0])
        if lo < N // 2:
            bins = geometric_bins(lo, N, nbins)
            means = (
                np.add.reduceat(
                    R[bins.edges[0] : bins.edges[-1]].astype(np.float64),
                    bins.edges[:-1] - bins.edges[0],
                )
                / bins.widths
            )
            try:
                slope, intercept = loglog_slope(bins.centers, means)
                c = float(np.exp(intercept))
            except ValidationError:
                pass
    return BasisVerdict(
        order=order,
        start=start,
        N=N,
        ok=not gaps,
        gaps=gaps,
        slope=slope,
        c=c,
        reference=reference,
    )


@dataclass(frozen=True)
class GBoundVerdict:
    """Multiplicity cap on the full set plus the shifted-count decomposition.

    ``ok``: max order-2h count on A stays within G = 2^w * max g_k.
    ``pigeonhole``: per deleted-part size j, the largest order-(2h-j) count
    on B reachable by shifting n below N by a sum of j deleted elements
    (repetition allowed) must stay within g_{2h-j}.  Only the smallest shift
    binds, since prefix maxima only shrink as the shift grows.
    """

    ok: bool
    max_count: int
    G: int
    w: int
    max_g: int
    pigeonhole_ok: bool
    pigeonhole: tuple[dict, ...]


def verify_G_bound(
    A: IntegerSet, B: IntegerSet, params: Params, g_table: GChain
) -> GBoundVerdict:
    """Check A within B_{2h}[G] on the window, plus the deleted-shift decomposition."""
    h = params.h
    N = params.N
    deleted = sorted(set(A.to_list()) - set(B.to_list()))
    w = len(deleted)
    if w != g_table.w:
        raise ValidationError(f"g table built for w={g_table.w}, set difference has w={w}")
    G = g_table.G
    max_count = int(count_nondecreasing(A, 2 * h, N).max(initial=0))
    main_ok = max_count <= G
    rows = []
    pigeonhole_ok = True
    if deleted:
        d_min = deleted[0]
        for j in range(1, 2 * h):
            order = 2 * h - j
            bound = g_table.g[order]
            min_shift = j * d_min
            if min_shift >= N:
                rows.append({"j": j, "order": order, "bound": bound, "max_shifted": 0, "ok": True})
                continue
            if order >= 2:
                counts = count_nondecreasing(B, order, N - min_shift)
            else:
                counts = B.mask[: N - min_shift + 1].astype(np.int64)
            max_shifted = int(counts.max(initial=0))
            ok = max_shifted <= bound
            pigeonhole_ok &= ok
            rows.append(
                {"j": j, "order": order, "bound": bound, "max_shifted": max_shifted, "ok": ok}
            )
    return GBoundVerdict(
        ok=main_ok,
        max_count=max_count,
        G=G,
        w=w,
        max_g=g_table.max_g,
        pigeonhole_ok=pigeonhole_ok,
        pigeonhole=tuple(rows),
    )


@dataclass
class RepairReport:
    """Everything the deletion run claims, re-checkable from (A, thresholds)."""

    params: Params
    trial: int
    A: IntegerSet
    thresholds: dict[int, int]
    B: IntegerSet | None
    success: bool
    failures: list[str] = field(default_factory=list)
    deleted: dict[int, list[int]] = field(default_factory=dict)
    w: int = 0
    bh1_ok: bool | None = None
    bh1_max: int | None = None
    bh1_witness: int | None = None
    bstar_chain: dict[int, dict] = field(default_factory=dict)
    high_order_forms: dict[int, dict] = field(default_factory=dict)
    reading: str = "literal"
    g_values: dict[int, int] = field(default_factory=dict)
    G: int | None = None
    gbound: GBoundVerdict | None = None
    basis: BasisVerdict | None = None
    basis_window_start: int | None = None

    @property
    def max_threshold(self) -> int:
        return max(self.thresholds.values(), default=0)

    def to_dict(self) -> dict:
        p = self.params
        out = {
            "schema_version": SCHEMA_VERSION,
            "params": {
                "h": p.h,
                "alpha": [p.alpha.numerator, p.alpha.denominator],
                "N": p.N,
                "seed": p.seed,
            },
            "trial": self.trial,
            "A": self.A.to_list(),
            "thresholds": {str(k): v for k, v in sorted(self.thresholds.items())},
            "deleted": {str(k): v for k, v in sorted(self.deleted.items())},
            "B": self.B.to_list() if self.B is not None else None,
            "w": self.w,
            "success": self.success,
            "failures": list(self.failures),
            "bh1": {"ok": self.bh1_ok, "max_count": self.bh1_max, "witness_n": self.bh1_witness},
            "bstar_chain": {str(k): v for k, v in sorted(self.bstar_chain.items())},
            "high_order_forms": {str(k): v for k, v in sorted(self.high_order_forms.items())},
            "g_table": {
                "reading": self.reading,
                "g": {str(k): v for k, v in sorted(self.g_values.items())},
                "G": self.G,
            },
        }
        if self.gbound is not None:
            gb = self.gbound
            out["g_bound"] = {
                "ok": gb.ok,
                "max_count": gb.max_count,
                "G": gb.G,
                "w": gb.w,
                "max_g": gb.max_g,
                "pigeonhole_ok": gb.pigeonhole_ok,
                "pigeonhole": list(gb.pigeonhole),
            }
        else:
            out["g_bound"] = None
        if self.basis is not None:
            b = self.basis
            out["basis"] = {
                "order": b.order,
                "window_start": self.basis_window_start,
                "gap_count": len(b.gaps),
                "last_gap": b.last_gap,
                "gaps_head": b.gaps[:50],
                "slope": b.slope,
                "c": b.c,
                "reference": [b.reference.numerator, b.reference.denominator]
                if b.reference is not None
                else None,
            }
        else:
            out["basis"] = None
        return out


def repair(
    A: IntegerSet,
    params: Params,
    trial: int = 0,
    reading: str = "literal",
    catalogs: dict[int, RepCatalog] | None = None,
) -> RepairReport:
    """Run the full deletion pipeline on one sampled set and verify the result.

    Thresholds are searched independently per order against the full A; the
    survivor B is the tail of A beyond the largest threshold and is then
    verified directly: order-h uniqueness, the per-order disjointness chain,
    and the G multiplicity cap with its shifted-count decomposition.  Any
    failed check is recorded by name; ``success`` reflects them all.
    """
    h = params.h
    N = params.N
    report = RepairReport(
        params=params, trial=trial, A=A, thresholds={}, B=None, success=False, reading=reading
    )
    if catalogs is None:
        catalogs = {}
    bounds_by_k = {k: (1 if k <= h else 4 * h + 1) for k in range(2, 2 * h + 1)}
    for k, bound in bounds_by_k.items():
        if k not in catalogs:
            catalogs[k] = RepCatalog(A, k, N)
        try:
            report.thresholds[k] = find_threshold(A, k, bound, N, catalog=catalogs[k])
        except ThresholdNotFoundError as exc:
            report.failures.append(f"threshold_not_found k={k}: {exc}")
    if report.failures:
        return report

    m_star = report.max_threshold
    report.deleted = {k: A.prefix(report.thresholds[k]) for k in bounds_by_k}
    B = A.tail(m_star)
    report.B = B
    report.w = len(A) - len(B)
    if len(B) == 0:
        report.failures.append("surviving_set_empty")
        return report

    # (a) at most one order-h representation anywhere on the window
    Rh = count_nondecreasing(B, h, N)
    report.bh1_max = int(Rh.max(initial=0))
    report.bh1_ok = report.bh1_max <= 1
    if not report.bh1_ok:
        report.bh1_witness = int(np.argmax(Rh > 1))
        report.failures.append(f"order_{h}_uniqueness_violated at n={report.bh1_witness}")

    # (b) disjointness chain for the survivor, reusing the full-set catalogs:
    # a representation from B is exactly a representation from A with every
    # coordinate beyond the cut
    for k, bound in bounds_by_k.items():
        violation = None
        for n in catalogs[k].targets():
            if n > m_star and catalogs[k].exceeds(n, bound, above=m_star):
                violation = n
                break
        ok = violation is None
        report.bstar_chain[k] = {"bound": bound, "ok": ok, "witness_n": violation}
        if not ok:
            report.failures.append(f"disjointness_bound k={k} violated at n={violation}")

    # high orders: the bound after the cut (guaranteed by the threshold) vs.
    # the same bound on the uncut set beyond the threshold; both recorded
    for k in range(h + 1, 2 * h + 1):
        bound = bounds_by_k[k]
        n_k = report.thresholds[k]
        after_cut = not any(
            catalogs[k].exceeds(n, bound, above=n_k)
            for n in catalogs[k].targets()
            if n > n_k
        )
        uncut = not any(
            catalogs[k].exceeds(n, bound) for n in catalogs[k].targets() if n > n_k
        )
        report.high_order_forms[k] = {
            "bound": bound,
            "after_deletion": after_cut,
            "uncut_beyond_threshold": uncut,
        }
        if not after_cut:
            report.failures.append(f"high_order_bound k={k} failed after deletion")

    table = g_chain(h, w=report.w, reading=reading)
    report.g_values = dict(table.g)
    report.G = table.G
    gb = verify_G_bound(A, B, params, table)
    report.gbound = gb
    if not gb.ok:
        report.failures.append(f"multiplicity_cap_exceeded: max={gb.max_count} > G={gb.G}")
    if not gb.pigeonhole_ok:
        report.failures.append("shifted_count_decomposition_failed")

    basis = verify_basis(B, 2 * h + 1, 0, N, reference=params.exponent(2 * h + 1))
    report.basis = basis
    report.basis_window_start = basis.last_gap

    report.success = not report.failures
    return report


def report_from_dict(d: dict) -> RepairReport:
    """Rebuild a RepairReport skeleton (inputs and claims) from its JSON form."""
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(f"unsupported report schema {d.get('schema_version')!r}")
    p = d["params"]
    params = Params(
        h=int(p["h"]),
        alpha=Fraction(int(p["alpha"][0]), int(p["alpha"][1])),
        N=int(p["N"]),
        seed=int(p["seed"]),
    )
    A = make_set(d["A"], params.N)
    report = RepairReport(
        params=params,
        trial=int(d.get("trial", 0)),
        A=A,
        thresholds={int(k): int(v) for k, v in d["thresholds"].items()},
        B=make_set(d["B"], params.N) if d.get("B") is not None else None,
        success=bool(d["success"]),
        failures=list(d.get("failures", [])),
        reading=d.get("g_table", {}).get("reading", "literal"),
    )
    return report


def reverify_report(d: dict, full: bool = False) -> tuple[bool, list[str]]:
    """Independently re-check a serialized report.

    Fast mode re-derives the survivor from (A, thresholds) and recomputes
    every verdict, comparing against the stored claims.  Full mode re-runs
    the entire pipeline (including threshold search) from the stored
    parameters and compares the serialized forms field by field.
    """
    from .sampler import SampleSpec, sample_set

    skeleton = report_from_dict(d)
    params = skeleton.params
    mismatches: list[str] = []

    resampled = sample_set(SampleSpec(params), trial=skeleton.trial)
    if resampled != skeleton.A:
        mismatches.append("stored A does not match the deterministic draw for (seed, trial)")

    if full:
        fresh = repair(skeleton.A, params, trial=skeleton.trial, reading=skeleton.reading)
        fd, sd = fresh.to_dict(), dict(d)
        for key in fd:
            if fd[key] != sd.get(key):
                mismatches.append(f"field {key!r} differs on full re-run")
        return (not mismatches, mismatches)

    if not skeleton.success:
        # nothing further is claimed by a failed report beyond its failure list
        return (not mismatches, mismatches)

    m_star = skeleton.max_threshold
    B = skeleton.A.tail(m_star)
    if skeleton.B is None or B != skeleton.B:
        mismatches.append("stored B is not A minus the union of threshold prefixes")
    h, N = params.h, params.N

    true_w = len(skeleton.A) - len(B)
    if int(d.get("w", -1)) != true_w:
        mismatches.append("stored deletion count w does not match |A| - |B|")
    removed = [x for x in skeleton.A.to_list() if x <= m_star]
    stored_removed = sorted({x for lst in d.get("deleted", {}).values() for x in lst})
    if stored_removed != removed:
        mismatches.append("stored deleted prefixes do not reassemble the removed part of A")

    Rh = count_nondecreasing(B, h, N)
    bh1_max = int(Rh.max(initial=0))
    if bh1_max > 1:
        mismatches.append("survivor has a target with two order-h representations")
    sb1 = d.get("bh1") or {}
    if sb1.get("ok") != (bh1_max <= 1) or sb1.get("max_count") != bh1_max:
        mismatches.append("order-h uniqueness claim differs from recomputation")
    beyond = Rh[m_star + 1 :]
    if beyond.size and int(beyond.max(initial=0)) > 1:
        mismatches.append("survivor violates uniqueness beyond the largest threshold")

    for k in range(2, 2 * h + 1):
        bound = 1 if k <= h else 4 * h + 1
        catalog = RepCatalog(B, k, N)
        bad = next((n for n in catalog.targets() if catalog.exceeds(n, bound)), None)
        claimed = d["bstar_chain"][str(k)]
        if (bad is None) != bool(claimed["ok"]):
            mismatches.append(f"disjointness chain k={k}: recomputed != stored")

    table = g_chain(h, w=true_w, reading=skeleton.reading)
    stored_g = {int(k): int(v) for k, v in d["g_table"]["g"].items()}
    if stored_g != table.g or d["g_table"]["G"] != table.G:
        mismatches.append("g table does not match its recomputation")
    gb = verify_G_bound(skeleton.A, B, params, table)
    sgb = d.get("g_bound") or {}
    if sgb.get("ok") != gb.ok or sgb.get("max_count") != gb.max_count:
        mismatches.append("multiplicity cap verdict differs")
    if sgb.get("pigeonhole_ok") != gb.pigeonhole_ok:
        mismatches.append("shifted-count decomposition verdict differs")

    sb = d.get("basis") or {}
    basis = verify_basis(B, 2 * h + 1, 0, N, reference=params.exponent(2 * h + 1))
    if sb.get("window_start") != basis.last_gap or sb.get("gap_count") != len(basis.gaps):
        mismatches.append("positivity window differs")
    if basis.gaps and basis.last_gap < N:
        window = count_nondecreasing(B, 2 * h + 1, N)[basis.last_gap + 1 :]
        if window.size and not (window > 0).all():
            mismatches.append("certified window contains a gap")

    return (not mismatches, mismatches)
