"""Command line front end.

Exit codes: 0 no FAIL verdict, 1 a theorem FAIL, 2 usage or input error,
3 size cap exceeded.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import SizeCapError, get_settings
from .duality import (cauchy_dual, dual_identity_suite, is_n_dagger, mp_inverse,
                      random_generalized_inverse, verify_generalized_inverse)
from .fuzz import run_fuzz
from .linalg import FactorizationError
from .model import check_covariance
from .properties import theorem_suite
from .report import CheckReport
from .serialize import (InputError, digest, dumps, encode_matrix, load_rep, parse_weights,
                        read_json, report_to_json, save_rep, subspace_to_json, write_json)
from .shifts import (WeightedShiftSpec, build_shift, weight_scan, dirichlet_weights, make_rng,
                     random_rep, spec_from_metadata, zero_at, RANDOM_KINDS)
from .structure import (dagger_power_on_range, dagger_regularity, is_bi_regular, is_regular,
                        projection_sequence, wold_failure_witnesses, wold_report)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like A..B, got {text!r}") from None


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _tolerance(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"tolerance must be nonnegative, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="covrep", description="Finite-dimensional covariant representation lab.")
    p.add_argument("--version", action="version", version=f"covrep {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a representation file")
    gsub = gen.add_subparsers(dest="what", required=True)
    sh = gsub.add_parser("shift", help="truncated weighted shift")
    sh.add_argument("--kind", choices=["unilateral", "bilateral"], required=True)
    sh.add_argument("--n", type=_positive, required=True)
    sh.add_argument("--window", type=_window, required=True, help="index interval A..B")
    src = sh.add_mutually_exclusive_group(required=True)
    src.add_argument("--weights", help="weight table JSON file")
    src.add_argument("--unit", action="store_true", help="all weights 1")
    src.add_argument("--dirichlet", action="store_true", help="w_m = sqrt((|m|+2)/(|m|+1))")
    sh.add_argument("--zero-at", type=int, dest="zero_at")
    sh.add_argument("--out", required=True)
    rnd = gsub.add_parser("random", help="seeded random representation")
    rnd.add_argument("--kind", choices=RANDOM_KINDS, default="dense")
    rnd.add_argument("--dim-h", type=_positive, required=True, dest="dim_h")
    rnd.add_argument("--n", type=_positive, required=True)
    rnd.add_argument("--seed", type=int, default=0)
    rnd.add_argument("--trial", type=_nonneg, default=0)
    rnd.add_argument("--out", required=True)

    chk = sub.add_parser("check", help="run certifier batteries")
    chk.add_argument("--input", required=True)
    chk.add_argument("--battery", choices=["all", "duality", "structure", "properties"], default="all")
    chk.add_argument("--tolerance", type=_tolerance)
    chk.add_argument("--max-power", type=_positive, dest="max_power")
    chk.add_argument("--interior-only", action="store_true", dest="interior")
    chk.add_argument("--report")
    chk.add_argument("--format", choices=["json", "text"], default="text")

    fz = sub.add_parser("fuzz", help="seeded implication fuzzing")
    fz.add_argument("--trials", type=_nonneg, required=True)
    fz.add_argument("--seed", type=int, required=True)
    fz.add_argument("--dims", default="h<=4,n<=3")
    fz.add_argument("--kinds")
    fz.add_argument("--jobs", type=_positive, default=1)
    fz.add_argument("--tolerance", type=_tolerance)
    fz.add_argument("--report")
    fz.add_argument("--fixtures", help="directory for FAIL fixtures (default: next to the report)")

    for name, text in (("dual", "Cauchy dual as a representation file"),
                       ("pinv", "Moore-Penrose inverse of Ṽ as a matrix file"),
                       ("wold", "wandering subspace, brackets and generalized ranges")):
        c = sub.add_parser(name, help=text)
        c.add_argument("--input", required=True)
        c.add_argument("--out", required=True)
        c.add_argument("--tolerance", type=_tolerance)
    return p


def _tol(args) -> float:
    return get_settings().tol if getattr(args, "tolerance", None) is None else args.tolerance


def cmd_gen(args) -> int:
    if args.what == "random":
        if args.kind == "left-invertible" and args.n != 1:
            raise UsageError("left-invertible representations need --n 1")
        save_rep(random_rep(args.seed, args.dim_h, args.n, args.kind, args.trial), args.out)
        return EXIT_OK
    lo, hi = args.window
    if hi < lo:
        raise UsageError(f"empty window {lo}..{hi}")
    if args.unit:
        w = np.ones((args.n, hi - lo + 1))
    elif args.dirichlet:
        w = dirichlet_weights(args.n, (lo, hi))
    else:
        w = parse_weights(read_json(args.weights), args.n, (lo, hi))
    try:
        spec = WeightedShiftSpec(args.kind, args.n, (lo, hi), w)
        if args.zero_at is not None:
            spec = zero_at(spec, args.zero_at)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    save_rep(build_shift(spec).rep, args.out)
    return EXIT_OK


def run_batteries(rep, battery: str, tol: float, k_max: int | None, interior: bool) -> CheckReport:
    out = CheckReport(f"check ({battery})", tol)
    k = k_max if k_max is not None else get_settings().k_max

    def add(rep_: CheckReport) -> None:
        out.extend(rep_, prefix=f"{rep_.title}/")

    if battery in ("all", "duality"):
        add(check_covariance(rep, tol))
        add(dual_identity_suite(rep, tol=tol, k_max=k))
        add(verify_generalized_inverse(rep, mp_inverse(rep, tol), k, tol))
        ginv = random_generalized_inverse(rep, make_rng(0), tol)
        g = verify_generalized_inverse(rep, ginv, k, tol)
        g.title = "random-ginverse"
        add(g)
        nd = CheckReport("n-dagger", tol)
        for j in range(2, k + 1):
            try:
                ok, res = is_n_dagger(rep, j, tol)
            except SizeCapError:
                nd.skip(f"n-dagger[{j}]", "n-dagger-def", "size cap")
                break
            nd.measure(f"n-dagger[{j}]", "n-dagger-def", ok, res)
        add(nd)
    if battery in ("all", "structure"):
        add(is_regular(rep, k, tol))
        add(is_bi_regular(rep, k, tol))
        add(wold_report(rep, k, tol).report)
        add(wold_failure_witnesses(rep, k, tol))
        add(projection_sequence(rep, k, tol)[1])
        add(dagger_power_on_range(rep, min(k, 4), tol))
        add(dagger_regularity(rep, k, tol))
    if battery in ("all", "properties"):
        add(theorem_suite(rep, tol, interior=interior))
        spec = spec_from_metadata(rep)
        weights = rep.metadata.get("weights")
        if spec is not None and weights is not None:
            full = WeightedShiftSpec(spec.kind, spec.n, spec.window, np.array(weights))
            scan = weight_scan(full, tol, interior=True)
            dd = CheckReport("shift-weights", tol)
            dd.measure("weight-scan", "shift-concavity-weights", scan.passed, scan.max_margin,
                       detail=f"{len(scan.rows)} pairs")
            add(dd)
    return out


def cmd_check(args) -> int:
    tol = _tol(args)
    rep = load_rep(args.input)
    rep_out = run_batteries(rep, args.battery, tol, args.max_power, args.interior)
    if args.format == "json":
        text = dumps(report_to_json(rep_out, digest(rep)))
    else:
        text = rep_out.text() + "\n# counts " + " ".join(f"{k}={v}" for k, v in sorted(rep_out.counts().items()))
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_FAIL if rep_out.has_fail else EXIT_OK


def cmd_fuzz(args) -> int:
    fixtures = args.fixtures
    if fixtures is None and args.report:
        fixtures = Path(args.report).with_suffix("").as_posix() + "-fixtures"
    try:
        summary = run_fuzz(args.trials, args.seed, args.dims, args.kinds, args.jobs, _tol(args),
                           fixtures_dir=fixtures)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    summary["tool"] = "covrep"
    summary["version"] = __version__
    if args.report:
        write_json(args.report, summary)
    lines = [f"trials={summary['trials']} seed={summary['seed']} FAIL={summary['fail_count']} "
             f"informational={len(summary['informational'])}"]
    for suite, c in summary["counts"].items():
        lines.append(f"  {suite:24s} " + " ".join(f"{k}={v}" for k, v in c.items()))
    print("\n".join(lines))
    return EXIT_FAIL if summary["fail_count"] else EXIT_OK


def cmd_dual(args) -> int:
    save_rep(cauchy_dual(load_rep(args.input), _tol(args)), args.out)
    return EXIT_OK


def cmd_pinv(args) -> int:
    rep = load_rep(args.input)
    write_json(args.out, {"what": "moore-penrose inverse of v_tilde", "matrix": encode_matrix(mp_inverse(rep, _tol(args)))})
    return EXIT_OK


def cmd_wold(args) -> int:
    tol = _tol(args)
    rep = load_rep(args.input)
    w = wold_report(rep, tol=tol)
    write_json(args.out, {
        "wandering": subspace_to_json(w.wandering),
        "brackets": subspace_to_json(w.brackets),
        "generalized_range": subspace_to_json(w.gen_range),
        "generalized_range_dual": subspace_to_json(w.gen_range_dual),
        "stabilized_at": w.stabilized_at,
        "report": report_to_json(w.report, digest(rep)),
    })
    return EXIT_FAIL if w.report.has_fail else EXIT_OK


COMMANDS = {"gen": cmd_gen, "check": cmd_check, "fuzz": cmd_fuzz,
            "dual": cmd_dual, "pinv": cmd_pinv, "wold": cmd_wold}


def _join_window(argv: list[str]) -> list[str]:
    """Let ``--window -2..2`` through; argparse would take -2..2 for a flag."""
    out = list(argv)
    for k in range(len(out) - 1):
        if out[k] == "--window" and out[k + 1].startswith("-"):
            out[k:k + 2] = [f"--window={out[k + 1]}", ""]
    return [a for a in out if a != ""]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_join_window(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except SizeCapError as exc:
        print(f"covrep: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, InputError, FactorizationError) as exc:
        print(f"covrep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # malformed settings in the environment end up here
        print(f"covrep: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
