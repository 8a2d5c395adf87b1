"""Command-line surface: bases, QRAC values, scans, sweeps, shots.

Commands print human-readable summaries to stdout and write CSV or JSON
files with --out; --plot renders a PNG next to the data file.  Every
command is deterministic given its flags (stochastic ones require
--seed), so reruns produce byte-identical CSV/JSON.

Exit codes: 0 success, 2 usage or validation error, 3 numerical
failure, 4 budget exceeded.

CSV columns:
  oi-scan : mu1,mu2,mu3,P
  perturb : mu1,mu2,mu3,delta,P
  shots   : scenario,subset,trial,P_hat
Doubles in CSV/JSON files carry 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

from .errors import (BudgetExceededError, NumericalError, QraclabError,
                     ValidationError)
from .mub import galois_mubs, load_bases, save_bases
from .oiscan import scan, scan_to_csv, scan_to_json
from .perturb import SweepSpec, sweep, sweep_to_csv, sweep_to_json
from .qrac import analytic_success_probability, max_success_probability
from .shots import shot_report, shots_to_csv, shots_to_json
from .stationary import GRID_TOL, verify_stationary_structure

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_BUDGET = 4


# -- small helpers -----------------------------------------------------------


def _parse_ints(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValidationError(f"{flag} wants comma-separated integers, "
                              f"got {text!r}") from None


def _check_out(path: str | None) -> None:
    # validate the destination before any compute starts
    if path is None:
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise ValidationError(f"output directory does not exist: {parent}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {out}")


def _png_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return root + ".png"


def _json_safe(obj):
    """Recursively map non-finite floats to None so output stays JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _triplet_from(args) -> tuple:
    mubs = galois_mubs(args.dim)
    subset = _parse_ints(args.subset, "--subset")
    if len(subset) != 3:
        raise ValidationError(f"--subset wants three indices, got {subset}")
    if not all(0 <= i <= args.dim for i in subset):
        raise ValidationError(f"subset indices must lie in 0..{args.dim}")
    return subset, [mubs.bases[i] for i in subset]


# -- commands ----------------------------------------------------------------


def cmd_mub(args) -> int:
    _check_out(args.out)
    mubs = galois_mubs(args.dim)
    print(f"built {len(mubs.bases)} bases for d={args.dim} "
          f"({mubs.construction})")
    print(f"max unbiasedness deviation: {mubs.max_deviation:.3e}")
    if args.out is not None:
        save_bases(mubs, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_qrac(args) -> int:
    _check_out(args.out)
    if args.bases is not None:
        bases = load_bases(args.bases)
    else:
        bases = list(galois_mubs(args.dim).bases)
    if args.subset is not None:
        subset = _parse_ints(args.subset, "--subset")
    else:
        subset = tuple(range(args.n))
    if len(subset) != args.n:
        raise ValidationError(
            f"subset size {len(subset)} does not match --n {args.n}")
    if not all(0 <= i < len(bases) for i in subset):
        raise ValidationError(f"subset indices must lie in 0..{len(bases)-1}")
    chosen = [bases[i] for i in subset]

    values: dict[str, float] = {}
    if args.method in ("eig", "both"):
        values["eig"] = max_success_probability(chosen).value
    if args.method in ("analytic", "both"):
        if args.n != 3:
            raise ValidationError("analytic method needs --n 3")
        values["analytic"] = analytic_success_probability(chosen).value

    for name, v in values.items():
        print(f"P ({name}) = {v:.12g}")
    if len(values) == 2:
        print(f"|difference| = {abs(values['eig'] - values['analytic']):.3e}")
    if args.out is not None:
        payload = {"dim": args.dim, "n": args.n, "subset": list(subset),
                   "method": args.method, "P": values}
        _emit(json.dumps(_json_safe(payload), indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_oi_scan(args) -> int:
    _check_out(args.out)
    mubs = galois_mubs(args.dim)
    report = scan(mubs, tol=args.tol)
    print(f"d={args.dim}: N={report.n_clusters} cluster value(s): "
          + ", ".join(f"{c.value:.6f} (x{len(c.members)})"
                      for c in report.clusters))
    print(f"pattern agrees: {report.agrees} (predicted N={report.predicted_n})")
    text = scan_to_csv(report) if args.format == "csv" else scan_to_json(report)
    if args.out is not None:
        _emit(text, args.out)
    if args.plot:
        from .figures import plot_scan
        print(f"wrote {plot_scan(report, _png_path(args.out))}")
    return EXIT_OK


def cmd_perturb(args) -> int:
    _check_out(args.out)
    mubs = galois_mubs(args.dim)
    if args.delta_start is None and args.delta_end is None \
            and args.delta_step is None:
        spec = SweepSpec(dim=args.dim)
    else:
        start = 0.0 if args.delta_start is None else args.delta_start
        end = 2.0 if args.delta_end is None else args.delta_end
        step = 0.02 if args.delta_step is None else args.delta_step
        if step <= 0 or end < start:
            raise ValidationError("need delta-step > 0 and delta-end >= "
                                  "delta-start")
        count = int(math.floor((end - start) / step + 1e-9)) + 1
        spec = SweepSpec(dim=args.dim,
                         delta_grid=tuple(start + i * step for i in range(count)))
    if args.subset is not None:
        spec = SweepSpec(dim=spec.dim, delta_grid=spec.delta_grid,
                         subsets=(_parse_ints(args.subset, "--subset"),))
    report = sweep(spec, mubs)
    print(f"d={args.dim}: best P = {report.best_value:.9f} at "
          f"delta={report.best_delta:g}, subset {report.best_subset}")
    print(f"unperturbed top {report.p_plus:.9f}; "
          f"surpass (margin {report.margin:g}): {report.surpass}")
    if report.skipped_deltas:
        print(f"skipped singular delta(s): {report.skipped_deltas}")
    text = (sweep_to_csv(report) if args.format == "csv"
            else sweep_to_json(report))
    if args.out is not None:
        _emit(text, args.out)
    if args.plot:
        from .figures import plot_sweep
        print(f"wrote {plot_sweep(report, _png_path(args.out))}")
    return EXIT_OK


def cmd_shots(args) -> int:
    _check_out(args.out)
    mubs = galois_mubs(args.dim)
    report = shot_report(mubs, args.shots, args.trials, args.seed,
                         mode=args.method)
    print(f"d={args.dim} {report.mode} mode, generator: {report.generator}")
    print(f"top cluster subset {report.plus_subset}:    "
          f"{report.plus_mean:.6f} +- {report.plus_sd:.6f} "
          f"(exact {report.plus_exact:.6f})")
    print(f"bottom cluster subset {report.minus_subset}: "
          f"{report.minus_mean:.6f} +- {report.minus_sd:.6f} "
          f"(exact {report.minus_exact:.6f})")
    gap = report.sigma_gap
    print(f"separation: {gap:.3f} combined sigma" if math.isfinite(gap)
          else "separation: exact values differ, zero sampling deviation")
    text = (shots_to_csv(report) if args.format == "csv"
            else shots_to_json(report))
    if args.out is not None:
        _emit(text, args.out)
    if args.plot:
        from .figures import plot_shots
        print(f"wrote {plot_shots(report, _png_path(args.out))}")
    return EXIT_OK


def cmd_verify(args) -> int:
    _check_out(args.out)
    subset, triplet = _triplet_from(args)
    word = _parse_ints(args.word, "--word")
    report = verify_stationary_structure(triplet, word)
    print(f"word {report.word}, subset {subset}, d={args.dim}")
    print(f"Phi = {report.phi:.6f}")
    print(f"gamma0 = {report.gamma0:.6f} "
          f"({len(report.roots)} root(s): "
          + ", ".join(f"{r:.6f}" for r in report.roots) + ")")
    print(f"q_m1 = {report.q_m1:.9f}   q_m2 = {report.q_m2:.9f}")
    for (t1, t2), g, degen in zip(report.intersections,
                                  report.gradient_norms, report.degenerate):
        mark = "collapsed state norm" if degen else f"|grad q| = {g:.3e}"
        print(f"  intersection ({t1:+.6f}, {t2:+.6f}): {mark}")
    for r, var, cut in zip(report.roots, report.line_variations,
                           report.line_excluded):
        print(f"  along theta2 = {r:.6f}: q varies by {var:.3e} "
              f"({cut} samples cut)")
    print(f"grid max {report.grid_max:.9f} <= q_m1 + {GRID_TOL:g}: "
          f"{report.grid_max <= report.q_m1 + GRID_TOL}")
    if args.out is not None:
        payload = {
            "dim": args.dim, "subset": list(subset),
            "word": list(report.word), "Phi": report.phi,
            "gamma0": report.gamma0, "roots": list(report.roots),
            "q_m1": report.q_m1, "q_m2": report.q_m2,
            "intersections": [list(p) for p in report.intersections],
            "gradient_norms": list(report.gradient_norms),
            "degenerate": list(report.degenerate),
            "line_variations": list(report.line_variations),
            "line_excluded": list(report.line_excluded),
            "grid_max": report.grid_max,
        }
        _emit(json.dumps(_json_safe(payload), indent=2) + "\n", args.out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _add_common(sub, *, fmt_default="csv"):
    sub.add_argument("--dim", type=int, required=True,
                     help="prime-power dimension d")
    sub.add_argument("--out", help="output file path")
    sub.add_argument("--format", choices=("json", "csv"), default=fmt_default,
                     help=f"output file format (default {fmt_default})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qraclab",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("mub", help="build and save a certified basis set")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--out", help="basis-set JSON path")
    p.set_defaults(func=cmd_mub)

    p = subs.add_parser("qrac", help="maximum n -> 1 success probability")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=int, default=3, help="number of dits (default 3)")
    p.add_argument("--bases", help="basis-set JSON (default: construct)")
    p.add_argument("--subset", help="comma-separated basis indices")
    p.add_argument("--method", choices=("eig", "analytic", "both"),
                   default="eig")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_qrac)

    p = subs.add_parser("oi-scan",
                        help="cluster 3 -> 1 values over all basis triplets")
    _add_common(p)
    p.add_argument("--tol", type=float, default=1e-9,
                   help="cluster separation tolerance (default 1e-9)")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG next to --out")
    p.set_defaults(func=cmd_oi_scan)

    p = subs.add_parser("perturb",
                        help="sweep orthogonalized identity-shifted bases")
    _add_common(p)
    p.add_argument("--subset", help="restrict to one comma-separated triplet")
    p.add_argument("--delta-start", type=float, default=None)
    p.add_argument("--delta-end", type=float, default=None)
    p.add_argument("--delta-step", type=float, default=None)
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG next to --out")
    p.set_defaults(func=cmd_perturb)

    p = subs.add_parser("shots",
                        help="finite-statistics Monte Carlo of both scenarios")
    _add_common(p)
    p.add_argument("--shots", type=int, default=25000,
                   help="total shot budget per trial (default 25000)")
    p.add_argument("--trials", type=int, default=5,
                   help="independent trials (default 5)")
    p.add_argument("--seed", type=int, default=None,
                   help="64-bit generator seed (required for sampling)")
    p.add_argument("--method", choices=("sample", "analytic"),
                   default="sample",
                   help="sample = Monte Carlo, analytic = exact expectation")
    p.add_argument("--plot", action="store_true",
                   help="also render a PNG next to --out")
    p.set_defaults(func=cmd_shots)

    p = subs.add_parser("verify",
                        help="stationary structure of one word's q surface")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--subset", default="0,1,2",
                   help="three basis indices (default 0,1,2)")
    p.add_argument("--word", default="0,0,1",
                   help="three digits in 0..d-1 (default 0,0,1)")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "plot", False) and args.out is None:
        parser.error("--plot needs --out to name the data file")
    if getattr(args, "seed", None) is not None \
            and not 0 <= args.seed < 2 ** 64:
        parser.error("--seed must fit in 64 bits")
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except QraclabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
