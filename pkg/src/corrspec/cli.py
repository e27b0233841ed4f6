"""Command-line front end.

Exit codes: 0 success, 1 domain or validation failure, 2 I/O or parse failure.
Global flags may appear before or after the subcommand; each can also be set
through an environment variable ``CORRSPEC_<FLAG>`` (flags win).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import bound_report
from .constructors import ConstructionRecipe, build
from .core import CorrelationMatrix, characteristic, validate_correlation
from .domains import classify
from .exceptions import CorrspecError, ExcludedInputError, InvalidCorrelationError, MatrixParseError
from .io import fmt12, format_matrix, guess_format, read_json, read_matrix, write_matrix
from .scan import Output, ScanSpec, run_scan
from .spectral import alignment_from_spectrum, eigendecompose, spectral_summary
from .verify import VerifySpec, run_verify

ENV_PREFIX = "CORRSPEC_"
EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2

GLOBALS = {
    # dest: (type, default)
    "format": (str, None),
    "seed": (int, 0),
    "psd_tol": (float, None),
    "degeneracy_tol": (float, None),
    "out": (str, None),
}


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    # SUPPRESS on the subparser copy keeps a value given before the
    # subcommand from being overwritten by the subparser's default
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--format", choices=["csv", "json"], default=d, help="matrix file format (default: from extension)")
    p.add_argument("--seed", type=int, default=d, help="64-bit seed for random ensembles")
    p.add_argument("--psd-tol", dest="psd_tol", type=float, default=d, help="allowed negative eigenvalue (default 1e-8*n)")
    p.add_argument("--degeneracy-tol", dest="degeneracy_tol", type=float, default=d, help="eigenvalue clustering gap (default 1e-7*n)")
    p.add_argument("--out", default=d, help="output file or directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corrspec", description="Spectral analysis of correlation matrices via their mean and spread of correlations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check that a file holds a correlation matrix")
    p.add_argument("path")

    p = sub.add_parser("analyze", parents=[common], help="spectrum, characteristic, bounds and alignment of a matrix file")
    p.add_argument("path")
    p.add_argument("--dump-spectrum", metavar="FILE", help="write eigenvalues, eigenvectors and weights as JSON")

    p = sub.add_parser("bounds", parents=[common], help="closed-form bounds for (n, c, sigma)")
    p.add_argument("n", type=int)
    p.add_argument("c", type=float)
    p.add_argument("sigma", type=float)

    p = sub.add_parser("scan", parents=[common], help="evaluate bounds and domains on a (c, sigma) grid, write CSV")
    p.add_argument("--spec", metavar="FILE", help="JSON scan spec; flags below override it")
    p.add_argument("--c-min", type=float)
    p.add_argument("--c-max", type=float)
    p.add_argument("--c-steps", type=int)
    p.add_argument("--sigma-min", type=float)
    p.add_argument("--sigma-max", type=float)
    p.add_argument("--sigma-steps", type=int)
    p.add_argument("--n", dest="n_list", type=int, nargs="+", metavar="N")
    p.add_argument("--outputs", nargs="+", choices=[o.value for o in Output], metavar="OUTPUT")

    p = sub.add_parser("verify", parents=[common], help="run the property checks on a seeded random ensemble")
    p.add_argument("--ensemble-size", type=int, default=1000)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--n-multiplier", type=int, default=2, help="samples per variable: N = multiplier * n")
    p.add_argument("--tol", type=float, default=1e-9, help="tolerance on the spectral identity residuals")
    p.add_argument("--inject", metavar="FILE", action="append", default=[], help="also check this matrix file")

    p = sub.add_parser("construct", parents=[common], help="build a matrix from a JSON recipe")
    p.add_argument("recipe")
    return parser


def resolve_globals(args: argparse.Namespace, environ=None) -> argparse.Namespace:
    """Fill unset global flags from the environment, then defaults."""
    environ = os.environ if environ is None else environ
    for dest, (typ, default) in GLOBALS.items():
        if getattr(args, dest, None) is not None:
            continue
        raw = environ.get(ENV_PREFIX + dest.upper())
        if raw not in (None, ""):
            try:
                setattr(args, dest, typ(raw))
            except ValueError:
                raise MatrixParseError(f"{ENV_PREFIX + dest.upper()}={raw!r} is not a valid {typ.__name__}") from None
        else:
            setattr(args, dest, default)
    if args.format not in (None, "csv", "json"):
        raise MatrixParseError(f"format must be csv or json, got {args.format!r}")
    return args


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def emit(doc, stream=None) -> None:
    stream = sys.stdout if stream is None else stream
    stream.write(json.dumps(doc, indent=2, default=_json_default, allow_nan=False) + "\n")


def _load(path, fmt):
    if not Path(path).is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return read_matrix(path, fmt)


def cmd_validate(args) -> int:
    a = _load(args.path, args.format)
    report = validate_correlation(a, args.psd_tol)
    emit(report.to_dict())
    return EXIT_OK if report.is_valid else EXIT_DOMAIN


def analyze_matrix(C, degeneracy_tol=None) -> dict:
    """Everything known about one matrix, in one JSON-ready document."""
    S = eigendecompose(C)
    ch = characteristic(C)
    summary = spectral_summary(S, degeneracy_tol)
    alignment = alignment_from_spectrum(S, degeneracy_tol)
    doc = {
        "n": ch.n,
        "characteristic": ch.to_dict(),
        "w1_vs_wmax": alignment.value,
        "w1_below_wmax": alignment.value == "W1_LESS_THAN_WMAX",
        "spectrum": summary,
        "bounds": None,
        "guarantee": None,
        "slack": None,
    }
    try:
        b = bound_report(ch.n, ch.c, ch.sigma)
    except ExcludedInputError:
        return doc
    doc["bounds"] = b.to_dict()
    doc["guarantee"] = classify(ch.n, ch.c, ch.sigma).to_dict()
    doc["slack"] = {
        "lambda1": summary["lambda1"] - b.lambda1_lb,
        "wmax": summary["wmax_eigenspace"] - b.wmax_lb,
        "w1": None if b.w1_lb is None or not summary["lambda1_simple"] else summary["w1"] - b.w1_lb,
    }
    return doc


def cmd_analyze(args) -> int:
    a = _load(args.path, args.format)
    try:
        C = CorrelationMatrix(a, args.psd_tol)
    except InvalidCorrelationError as exc:
        emit({"error": str(exc), "validation": exc.report.to_dict() if exc.report else None})
        return EXIT_DOMAIN
    doc = analyze_matrix(C, args.degeneracy_tol)
    if args.dump_spectrum:
        with open(args.dump_spectrum, "w", encoding="utf-8") as fh:
            json.dump(eigendecompose(C).to_dict(), fh, indent=2)
    emit(doc)
    return EXIT_OK


BOUND_CSV_FIELDS = ["n", "c", "sigma", "lambda1_lb", "lambda1_over_n", "wmax_lb", "w1_lb", "r_c", "phi_c", "theta_min_ub", "theta_min_relaxed"]


def cmd_bounds(args) -> int:
    report = bound_report(args.n, args.c, args.sigma).to_dict()
    report["guarantee"] = classify(args.n, args.c, args.sigma).to_dict()
    if args.format == "csv":
        sys.stdout.write(",".join(BOUND_CSV_FIELDS) + "\n")
        sys.stdout.write(",".join(fmt12(report[k]) for k in BOUND_CSV_FIELDS) + "\n")
    else:
        emit(report)
    return EXIT_OK


def scan_spec_from_args(args) -> ScanSpec:
    base = ScanSpec.from_dict(read_json(args.spec)) if args.spec else ScanSpec()
    d = base.to_dict()
    for k in ("c_min", "c_max", "c_steps", "sigma_min", "sigma_max", "sigma_steps"):
        v = getattr(args, k)
        if v is not None:
            d["grid"][k] = v
    if args.n_list:
        d["n_list"] = args.n_list
    if args.outputs:
        d["outputs"] = args.outputs
    return ScanSpec.from_dict(d)


def cmd_scan(args) -> int:
    spec = scan_spec_from_args(args)
    paths = run_scan(spec, args.out or "scan_out")
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = VerifySpec(
        ensemble_size=args.ensemble_size,
        n_min=args.n_min,
        n_max=args.n_max,
        n_multiplier=args.n_multiplier,
        seed=args.seed,
        identity_tol=args.tol,
        degeneracy_tol=args.degeneracy_tol,
    )
    extra = [_load(p, args.format) for p in args.inject]
    res = run_verify(spec, extra)
    for p in res.properties.values():
        mark = "ok  " if p.ok else "FAIL"
        print(f"{mark} {p.name:31s} checked={p.checked:6d} worst_slack={p.worst_slack:.3e}")
    print(f"simple-guarantee firing members: {res.simple_guarantee_firing}")
    for fail in res.validation_failures:
        kinds = ",".join(v["kind"] for v in fail["violations"])
        print(f"FAIL validation {kinds} at {json.dumps({k: v for k, v in fail.items() if k not in ('violations', 'matrix')})}")
    if not res.ok:
        for p in res.properties.values():
            if not p.ok:
                print(f"first {p.name} failure: {json.dumps(p.first_failure, default=_json_default)}")
        for fail in res.validation_failures:
            print("matrix dump: " + json.dumps(fail["matrix"]))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(res.to_dict(), fh, indent=2, default=_json_default)
    return EXIT_OK if res.ok else EXIT_DOMAIN


def cmd_construct(args) -> int:
    doc = read_json(args.recipe)
    recipe = ConstructionRecipe.from_dict(doc)
    C = build(recipe)
    ch = characteristic(C)
    if args.out:
        write_matrix(C, args.out, args.format)
        print(json.dumps({"kind": recipe.kind.value, "n": ch.n, "c": ch.c, "sigma": ch.sigma, "out": args.out}), file=sys.stderr)
    else:
        sys.stdout.write(format_matrix(C, guess_format("", args.format)))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "bounds": cmd_bounds,
    "scan": cmd_scan,
    "verify": cmd_verify,
    "construct": cmd_construct,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        resolve_globals(args)
        return COMMANDS[args.command](args)
    except (MatrixParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CorrspecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
