"""Command line front end.

Every data-producing command builds an ExperimentManifest internally and
routes through the same writers as `run --manifest`, so the emitted CSV/JSON
always embeds the digest of a manifest that reproduces it.  Figures are
rendered next to each output unless --no-plot is given.

Exit codes: 0 success, 2 invalid input, 3 assertion or verdict failure,
4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .core import BudgetExceededError, SidonLabError, ValidationError
from .manifest import (
    ExperimentManifest,
    NondeterminismError,
    run_manifest,
    write_bounds_files,
    write_decay_files,
    write_growth_files,
    write_profile_csv,
    write_prop2_json,
    write_repair_report,
    write_rstar_csv,
    write_sets_jsonl,
)
from .pipeline import reverify_report

from . import plots


def _alpha_pair(text: str) -> list[int]:
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad fraction {text!r}: {exc}") from None
    return [frac.numerator, frac.denominator]


def _base_params(args) -> dict:
    p = {"h": args.h, "N": args.N, "seed": getattr(args, "seed", 0)}
    if getattr(args, "alpha", None) is not None:
        p["alpha"] = args.alpha
    return p


def _load_set_arg(value: str, index: int) -> list[int]:
    path = Path(value)
    if path.exists():
        lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
        if not -len(lines) <= index < len(lines):
            raise ValidationError(f"{value} has {len(lines)} sets, index {index} out of range")
        els = json.loads(lines[index])
        if not isinstance(els, list):
            raise ValidationError(f"line {index} of {value} is not a JSON array")
        return [int(x) for x in els]
    try:
        return [int(tok) for tok in value.replace(" ", "").split(",") if tok]
    except ValueError:
        raise ValidationError(f"--set {value!r} is neither a file nor a comma list of integers")


def _maybe_plot(args, operation: str, out_dir: Path) -> None:
    if not getattr(args, "no_plot", False):
        plots.render_outputs(operation, out_dir)


def cmd_sample(args) -> int:
    man = ExperimentManifest(
        "sample", {**_base_params(args), "trials": args.trials}
    )
    out = Path(args.out)
    write_sets_jsonl(man, out)
    _maybe_plot(args, "sample", out.parent)
    print(f"wrote {args.trials} set(s) to {out}  [manifest {man.digest()[:12]}]")
    return 0


def cmd_count(args) -> int:
    extras = {"set": _load_set_arg(args.set, args.index)}
    man = ExperimentManifest("profile", _base_params(args), extras)
    out = Path(args.out)
    write_profile_csv(man, out)
    if not args.no_plot:
        plots.plot_profile(out, out.with_suffix(".png"))
    print(f"wrote {out}  [manifest {man.digest()[:12]}]")
    return 0


def cmd_rstar(args) -> int:
    extras = {"set": _load_set_arg(args.set, args.index), "l": args.l}
    man = ExperimentManifest("rstar", {"N": args.N, "h": 2, "seed": 0}, extras)
    out = Path(args.out)
    write_rstar_csv(man, out)
    if not args.no_plot:
        plots.plot_rstar(out, out.with_suffix(".png"))
    print(f"wrote {out}  [manifest {man.digest()[:12]}]")
    return 0


def cmd_repair(args) -> int:
    extras = {"trial": args.trial, "reading": args.reading}
    man = ExperimentManifest("repair", _base_params(args), extras)
    out = Path(args.out)
    _, report = write_repair_report(man, out)
    if not args.no_plot:
        plots.plot_repair(out, out.with_suffix(".png"))
    print(f"thresholds: { {k: v for k, v in sorted(report.thresholds.items())} }")
    print(f"survivor size: {len(report.B) if report.B is not None else 0} (deleted {report.w})")
    if report.success:
        print(f"success: window verified, report at {out}")
        return 0
    for f in report.failures:
        print(f"failure: {f}")
    print(f"report at {out}")
    return 3


def cmd_verify(args) -> int:
    d = json.loads(Path(args.report).read_text())
    ok, mismatches = reverify_report(d, full=args.full)
    if ok:
        print(f"report verified ({'full re-run' if args.full else 'claims re-checked'})")
        return 0
    for m in mismatches:
        print(f"mismatch: {m}")
    return 3


def cmd_bounds(args) -> int:
    from .bounds import exponent_table, g_chain, tail_sum

    table = exponent_table(args.h)
    if args.table or not args.out:
        print(f"h = {args.h}, alpha = {table.alpha}")
        print(f"{'k':>3} {'s':>4} {'exponent':>12} {'float':>9} {'summable':>9} {'tail from 2':>12}")
        for e in table.entries:
            tail = tail_sum(e.value, 2) if e.summable else float("inf")
            print(
                f"{e.k:>3} {e.s:>4} {str(e.value):>12} {float(e.value):>9.4f} "
                f"{str(e.summable):>9} {tail:>12.4g}"
            )
        for reading in ("literal", "order"):
            ch = g_chain(args.h, w=args.w, reading=reading)
            gs = ", ".join(f"g_{k}={v}" for k, v in sorted(ch.g.items()))
            print(f"[{reading}] {gs}; w={args.w}, G={ch.G}")
    if args.out:
        man = ExperimentManifest(
            "bounds_table", {"h": args.h, "N": 1, "seed": 0}, {"w": args.w}
        )
        csv_path = Path(args.out)
        json_path = csv_path.with_name("gchain.json")
        write_bounds_files(man, csv_path, json_path)
        if not args.no_plot:
            plots.plot_bounds(csv_path, csv_path.with_suffix(".png"))
        print(f"wrote {csv_path} and {json_path}  [manifest {man.digest()[:12]}]")
    return 0


def cmd_estimate(args) -> int:
    extras = {
        "k": args.k,
        "s": args.s,
        "n_min": args.n_min,
        "nbins": args.nbins,
        "bootstrap": args.bootstrap,
    }
    man = ExperimentManifest(
        "decay", {**_base_params(args), "trials": args.trials}, extras
    )
    csv_path = Path(args.out)
    json_path = csv_path.with_suffix(".json")
    write_decay_files(man, csv_path, json_path)
    meta = json.loads(json_path.read_text())
    if not args.no_plot:
        plots.plot_decay(csv_path, json_path, csv_path.with_suffix(".png"))
    print(
        f"slope {meta['slope']:.4f}  CI [{meta['ci_low']:.4f}, {meta['ci_high']:.4f}]  "
        f"exact {meta['theoretical'][0]}/{meta['theoretical'][1]}"
    )
    print(f"wrote {csv_path} and {json_path}  [manifest {man.digest()[:12]}]")
    return 0


def cmd_growth(args) -> int:
    extras = {"k": args.k, "n_min": args.n_min, "nbins": args.nbins}
    man = ExperimentManifest(
        "growth", {**_base_params(args), "trials": args.trials}, extras
    )
    csv_path = Path(args.out)
    json_path = csv_path.with_suffix(".json")
    write_growth_files(man, csv_path, json_path)
    meta = json.loads(json_path.read_text())
    if not args.no_plot:
        plots.plot_growth(csv_path, json_path, csv_path.with_suffix(".png"))
    print(
        f"slope {meta['slope']:.4f}  exact {meta['reference'][0]}/{meta['reference'][1]}  "
        f"positivity on upper half: {meta['positivity_rate']:.2%}"
    )
    print(f"wrote {csv_path} and {json_path}  [manifest {man.digest()[:12]}]")
    return 0


def cmd_prop2(args) -> int:
    extras = {
        "g": args.g,
        "l": args.l,
        "samples": args.samples,
        "reading": args.reading,
    }
    if args.order is not None:
        extras["order"] = args.order
    man = ExperimentManifest("prop2", _base_params(args), extras)
    out = Path(args.out)
    _, result = write_prop2_json(man, out)
    print(
        f"checked {result.checked} sets, premise held on {result.premise_held}; "
        f"{'counterexample found' if result.counterexample else 'no counterexample'}"
    )
    print(f"wrote {out}  [manifest {man.digest()[:12]}]")
    return 3 if result.counterexample else 0


def cmd_run(args) -> int:
    man = ExperimentManifest.load(args.manifest)
    out_dir = Path(args.out_dir)
    summary = run_manifest(man, out_dir, verify=args.verify, plot=not args.no_plot)
    mode = "verified" if summary["verified"] else "wrote"
    print(f"{mode} {len(summary['files'])} artifact(s) under {out_dir}")
    print(f"manifest digest {summary['manifest_digest']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sidonlab",
        description="Sample, count, repair, and verify representation-function experiments.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, h=True, N=True, seed=True, alpha=True):
        if h:
            sp.add_argument("--h", type=int, default=2, help="order parameter, >= 2")
        if N:
            sp.add_argument("--N", type=int, required=True, help="window maximum")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        if alpha:
            sp.add_argument(
                "--alpha",
                type=_alpha_pair,
                default=None,
                help="density exponent as a fraction, e.g. 2/9 (default: preset for h)",
            )
        sp.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    sp = sub.add_parser("sample", help="draw random sets and write one JSON array per line")
    add_common(sp)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("count", help="write the representation-count profile of one set")
    add_common(sp)
    sp.add_argument("--set", required=True, help="sets.jsonl path or comma list of integers")
    sp.add_argument("--index", type=int, default=0, help="line to use when --set is a file")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("rstar", help="write max disjoint representation counts of one set")
    add_common(sp, h=False, seed=False, alpha=False)
    sp.add_argument("--set", required=True, help="sets.jsonl path or comma list of integers")
    sp.add_argument("--index", type=int, default=0)
    sp.add_argument("--l", type=int, required=True, help="representation order")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_rstar)

    sp = sub.add_parser("repair", help="run the deletion pipeline on one sampled set")
    add_common(sp)
    sp.add_argument("--trial", type=int, default=0)
    sp.add_argument("--reading", choices=("literal", "order"), default="literal")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_repair)

    sp = sub.add_parser("verify", help="re-check every claim in a repair report")
    sp.add_argument("--report", required=True)
    sp.add_argument("--full", action="store_true", help="re-run the pipeline and diff fields")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bounds", help="print the exact exponent table and multiplicity chain")
    sp.add_argument("--h", type=int, default=2)
    sp.add_argument("--table", action="store_true", help="print the table to stdout")
    sp.add_argument("--w", type=int, default=0, help="deleted-element count for the final cap")
    sp.add_argument("--out", default=None, help="also write bounds.csv (+ gchain.json)")
    sp.add_argument("--no-plot", action="store_true")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("estimate", help="Monte Carlo decay exponent of the disjoint-count tail")
    add_common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--n-min", type=int, default=100)
    sp.add_argument("--nbins", type=int, default=40)
    sp.add_argument("--bootstrap", type=int, default=1000)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("growth", help="pooled growth of the distinct-term count")
    add_common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--trials", type=int, default=30)
    sp.add_argument("--n-min", type=int, default=1000)
    sp.add_argument("--nbins", type=int, default=40)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_growth)

    sp = sub.add_parser("prop2", help="random search for containment-rule counterexamples")
    add_common(sp)
    sp.add_argument("--g", type=int, default=1)
    sp.add_argument("--l", type=int, default=1)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--reading", choices=("literal", "order"), default="literal")
    sp.add_argument("--order", type=int, default=None)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_prop2)

    sp = sub.add_parser("run", help="execute (or verify) a manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--out-dir", default=".")
    sp.add_argument("--verify", action="store_true", help="re-run and compare checksums")
    sp.add_argument("--no-plot", action="store_true")
    sp.set_defaults(func=cmd_run)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 4
    except NondeterminismError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 3
    except SidonLabError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
