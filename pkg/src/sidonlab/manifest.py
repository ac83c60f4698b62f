"""Reproducible experiment descriptions.

A manifest pins one operation and every input it needs (window size, seed,
trial count, operation extras).  Its digest is the sha256 of the canonical
JSON of exactly those fields; build id and timestamp are carried alongside
but never hashed, so re-running the same manifest yields the same digest and
byte-identical data files.  Every CSV artifact embeds the digest as a
leading comment line and every JSON artifact carries it as a key; sets.jsonl
stays one JSON array per line, its digest lives in the sidecar files.
Figures rendered next to the data are excluded from checksums
(rasterization is not a reproducibility claim).
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from .bounds import check_prop2, estimate_decay, estimate_growth, exponent_table, g_chain
from .core import Params, SidonLabError, ValidationError, make_set
from .packing import RepCatalog
from .pipeline import RepairReport, repair
from .repfunc import profile
from .sampler import SampleSpec, sample_set

SCHEMA_VERSION = "1"

OPERATIONS = (
    "sample",
    "profile",
    "rstar",
    "repair",
    "bounds_table",
    "decay",
    "growth",
    "prop2",
)


class NondeterminismError(SidonLabError):
    """A re-run under the same manifest produced different bytes."""


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass
class ExperimentManifest:
    operation: str
    params: dict
    extras: dict = field(default_factory=dict)
    build_id: str = ""
    created_at: str = ""
    schema_version: str = SCHEMA_VERSION

    def hashed_view(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "operation": self.operation,
            "params": self.params,
            "extras": self.extras,
        }

    def digest(self) -> str:
        return _sha256_bytes(canonical_json(self.hashed_view()).encode())

    def to_dict(self) -> dict:
        d = self.hashed_view()
        d["build_id"] = self.build_id
        d["created_at"] = self.created_at
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentManifest":
        validate_manifest(d)
        return cls(
            operation=d["operation"],
            params=dict(d["params"]),
            extras=dict(d.get("extras", {})),
            build_id=d.get("build_id", ""),
            created_at=d.get("created_at", ""),
            schema_version=d.get("schema_version", SCHEMA_VERSION),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentManifest":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def validate_manifest(d: dict) -> None:
    """Reject malformed manifests with a message naming the offending field."""
    if not isinstance(d, dict):
        raise ValidationError("manifest must be a JSON object")
    if d.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ValidationError(f"unsupported manifest schema {d.get('schema_version')!r}")
    op = d.get("operation")
    if op not in OPERATIONS:
        raise ValidationError(f"unknown operation {op!r}; expected one of {OPERATIONS}")
    params = d.get("params")
    if not isinstance(params, dict):
        raise ValidationError("manifest params must be an object")
    for key in ("h", "N", "seed", "trials"):
        if key in params and not isinstance(params[key], int):
            raise ValidationError(f"params.{key} must be an integer")
    if "alpha" in params:
        a = params["alpha"]
        if (
            not isinstance(a, (list, tuple))
            or len(a) != 2
            or not all(isinstance(x, int) for x in a)
            or a[1] <= 0
        ):
            raise ValidationError("params.alpha must be a [numerator, denominator] integer pair")
        if not 0 < Fraction(a[0], a[1]) <= 1:
            raise ValidationError("params.alpha must lie in (0, 1]")
    extras = d.get("extras", {})
    if not isinstance(extras, dict):
        raise ValidationError("manifest extras must be an object")


def resolve_params(man: ExperimentManifest) -> Params:
    p = man.params
    h = int(p.get("h", 2))
    N = int(p.get("N", 1000))
    seed = int(p.get("seed", 0))
    if "alpha" in p:
        return Params(h=h, alpha=Fraction(p["alpha"][0], p["alpha"][1]), N=N, seed=seed)
    return Params.preset(h, N, seed=seed)


def _resolve_set(man: ExperimentManifest, params: Params):
    if "set" in man.extras:
        return make_set(man.extras["set"], max(params.N, max(man.extras["set"], default=1)))
    trial = int(man.extras.get("trial", 0))
    return sample_set(SampleSpec(params), trial=trial)


def _write_csv(path: Path, digest: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as f:
        f.write(f"# manifest_digest: {digest}\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Writers: one per artifact, paths explicit so the CLI can name targets
# ---------------------------------------------------------------------------


def write_sets_jsonl(man: ExperimentManifest, path: Path) -> list[Path]:
    params = resolve_params(man)
    trials = int(man.params.get("trials", 1))
    spec = SampleSpec(params)
    with open(path, "w") as f:
        for t in range(trials):
            f.write(canonical_json(sample_set(spec, trial=t).to_list()) + "\n")
    return [path]


def write_profile_csv(man: ExperimentManifest, path: Path) -> list[Path]:
    params = resolve_params(man)
    A = _resolve_set(man, params)
    prof = profile(A, params.h, params.N)
    _write_csv(
        path,
        man.digest(),
        ["n", "R", "r", "Rstar"],
        (
            (n, int(prof.R[n]), int(prof.r[n]), int(prof.Rstar[n]))
            for n in range(params.N + 1)
        ),
    )
    return [path]


def write_rstar_csv(man: ExperimentManifest, path: Path) -> list[Path]:
    params = resolve_params(man)
    A = _resolve_set(man, params)
    l = int(man.extras.get("l", 2))
    catalog = RepCatalog(A, l, params.N)
    values = {n: catalog.r_star_value(n) for n in catalog.targets()}
    _write_csv(
        path,
        man.digest(),
        ["n", "r_star", "certified"],
        ((n, values.get(n, 0), True) for n in range(1, params.N + 1)),
    )
    return [path]


def write_repair_report(man: ExperimentManifest, path: Path) -> tuple[list[Path], RepairReport]:
    params = resolve_params(man)
    trial = int(man.extras.get("trial", 0))
    reading = man.extras.get("reading", "literal")
    A = sample_set(SampleSpec(params), trial=trial)
    report = repair(A, params, trial=trial, reading=reading)
    d = report.to_dict()
    d["manifest_digest"] = man.digest()
    _write_json(path, d)
    return [path], report


def write_bounds_files(man: ExperimentManifest, csv_path: Path, json_path: Path) -> list[Path]:
    params = resolve_params(man)
    h = params.h
    w = int(man.extras.get("w", 0))
    table = exponent_table(h)
    _write_csv(
        csv_path,
        man.digest(),
        ["k", "s", "num", "den", "value", "summable"],
        (
            (e.k, e.s, e.value.numerator, e.value.denominator, float(e.value), e.summable)
            for e in table.entries
        ),
    )
    chains = {}
    for reading in ("literal", "order"):
        ch = g_chain(h, w=w, reading=reading)
        chains[reading] = {
            "g": {str(k): v for k, v in sorted(ch.g.items())},
            "max_g": ch.max_g,
            "G": ch.G,
        }
    _write_json(
        json_path,
        {"manifest_digest": man.digest(), "h": h, "w": w, "chains": chains},
    )
    return [csv_path, json_path]


def write_decay_files(man: ExperimentManifest, csv_path: Path, json_path: Path) -> list[Path]:
    params = resolve_params(man)
    trials = int(man.params.get("trials", 100))
    k = int(man.extras.get("k", 2))
    s = int(man.extras.get("s", 2))
    est = estimate_decay(
        h=params.h,
        k=k,
        s=s,
        N=params.N,
        trials=trials,
        seed=params.seed,
        n_min=int(man.extras.get("n_min", 100)),
        nbins=(nbins := int(man.extras.get("nbins", 40))),
        bootstrap=int(man.extras.get("bootstrap", 1000)),
        # the default demand of 30 live bins only makes sense when there are
        # at least that many bins to begin with
        min_nonzero_bins=min(30, nbins),
        alpha=params.alpha,
    )
    hits = est.hits
    _write_csv(
        csv_path,
        man.digest(),
        ["bin_lo", "bin_hi", "center", "hits", "freq"],
        (
            (
                int(est.bins.edges[i]),
                int(est.bins.edges[i + 1]) - 1,
                float(est.bins.centers[i]),
                int(hits[i]),
                float(est.freq[i]),
            )
            for i in range(est.bins.nbins)
        ),
    )
    _write_json(
        json_path,
        {
            "manifest_digest": man.digest(),
            "h": params.h,
            "k": k,
            "s": s,
            "N": params.N,
            "trials": trials,
            "slope": est.slope,
            "ci_low": est.ci_low,
            "ci_high": est.ci_high,
            "theoretical": [est.theoretical.numerator, est.theoretical.denominator],
            "nonzero_bins": int((hits > 0).sum()),
        },
    )
    return [csv_path, json_path]


def write_growth_files(man: ExperimentManifest, csv_path: Path, json_path: Path) -> list[Path]:
    params = resolve_params(man)
    trials = int(man.params.get("trials", 30))
    k = int(man.extras.get("k", 2 * params.h + 1))
    est = estimate_growth(
        h=params.h,
        k=k,
        N=params.N,
        trials=trials,
        seed=params.seed,
        n_min=int(man.extras.get("n_min", 1000)),
        nbins=int(man.extras.get("nbins", 40)),
        alpha=params.alpha,
    )
    _write_csv(
        csv_path,
        man.digest(),
        ["bin_lo", "bin_hi", "center", "mean_count"],
        (
            (
                int(est.bins.edges[i]),
                int(est.bins.edges[i + 1]) - 1,
                float(est.bins.centers[i]),
                float(est.mean_counts[i]),
            )
            for i in range(est.bins.nbins)
        ),
    )
    _write_json(
        json_path,
        {
            "manifest_digest": man.digest(),
            "h": params.h,
            "k": k,
            "N": params.N,
            "trials": trials,
            "slope": est.slope,
            "reference": [est.theoretical.numerator, est.theoretical.denominator],
            "positivity_rate": est.positivity_rate,
        },
    )
    return [csv_path, json_path]


def write_prop2_json(man: ExperimentManifest, path: Path) -> tuple[list[Path], object]:
    params = resolve_params(man)
    h = params.h
    g = int(man.extras.get("g", 1))
    l = int(man.extras.get("l", 1))
    reading = man.extras.get("reading", "literal")
    order = man.extras.get("order")
    samples = int(man.extras.get("samples", 100))
    result = check_prop2(
        samples=samples,
        h=h,
        g=g,
        l=l,
        N=params.N,
        seed=params.seed,
        reading=reading,
        order=int(order) if order is not None else None,
    )
    _write_json(
        path,
        {
            "manifest_digest": man.digest(),
            "h": h,
            "g": g,
            "l": l,
            "reading": reading,
            "order": order,
            "N": params.N,
            "seed": params.seed,
            "samples": samples,
            "checked": result.checked,
            "premise_held": result.premise_held,
            "counterexample": result.counterexample,
        },
    )
    return [path], result


def _registry_entry(man: ExperimentManifest, out: Path) -> list[Path]:
    op = man.operation
    if op == "sample":
        return write_sets_jsonl(man, out / "sets.jsonl")
    if op == "profile":
        return write_profile_csv(man, out / "profile.csv")
    if op == "rstar":
        return write_rstar_csv(man, out / "rstar.csv")
    if op == "repair":
        return write_repair_report(man, out / "report.json")[0]
    if op == "bounds_table":
        return write_bounds_files(man, out / "bounds.csv", out / "gchain.json")
    if op == "decay":
        return write_decay_files(man, out / "decay.csv", out / "decay.json")
    if op == "growth":
        return write_growth_files(man, out / "growth.csv", out / "growth.json")
    if op == "prop2":
        return write_prop2_json(man, out / "prop2.json")[0]
    raise ValidationError(f"unknown operation {op!r}")


def _run_into(man: ExperimentManifest, out: Path) -> dict[str, str]:
    out.mkdir(parents=True, exist_ok=True)
    written = _registry_entry(man, out)
    return {p.name: _sha256_bytes(p.read_bytes()) for p in written if p.suffix != ".png"}


def run_manifest(
    man: ExperimentManifest, out_dir: str | Path, verify: bool = False, plot: bool = False
) -> dict:
    """Execute a manifest into out_dir, or re-run and compare in verify mode.

    Normal mode writes the data files, a manifest copy (with fresh build id
    and timestamp, neither hashed), and checksums.json mapping each data
    file to its sha256.  Verify mode re-runs the operation into a scratch
    directory and raises NondeterminismError if any checksum moved.
    """
    validate_manifest(man.to_dict())
    out = Path(out_dir)
    if verify:
        stored_path = out / "checksums.json"
        if not stored_path.exists():
            raise ValidationError(f"no checksums.json under {out} to verify against")
        stored = json.loads(stored_path.read_text())
        if stored.get("manifest_digest") != man.digest():
            raise NondeterminismError("stored checksums belong to a different manifest")
        with tempfile.TemporaryDirectory() as tmp:
            fresh = _run_into(man, Path(tmp))
        if stored.get("files") != fresh:
            old = stored.get("files", {})
            diffs = sorted(
                set(old).symmetric_difference(fresh)
                | {k for k in fresh if k in old and old[k] != fresh[k]}
            )
            raise NondeterminismError(f"re-run produced different bytes for: {diffs}")
        return {"manifest_digest": man.digest(), "files": fresh, "verified": True}

    checks = _run_into(man, out)
    if plot:
        from . import plots

        plots.render_outputs(man.operation, out)
    man.build_id = os.urandom(4).hex()
    man.created_at = datetime.now(timezone.utc).isoformat()
    man.save(out / "manifest.json")
    _write_json(out / "checksums.json", {"manifest_digest": man.digest(), "files": checks})
    return {"manifest_digest": man.digest(), "files": checks, "verified": False}
