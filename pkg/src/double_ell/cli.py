"""Command-line interface; every subcommand prints one JSON document."""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from .characters import character, enumerate_characters, gauss_sum, parse_label, primitive_characters
from .dirichlet_l import l_function, truncated_product
from .double_l import EvalRequest, evaluate, theorem2_main_term
from .harness import (
    SUITES,
    ConfigError,
    SweepSpec,
    fit_exponent,
    read_table,
    run_sweep,
    verify_bounds,
    write_table,
)
from .selftest import identity_suite

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


def complex_arg(text):
    """Parse "RE,IM" or "a+bi"."""
    text = text.strip().replace(" ", "")
    if "," in text:
        re_part, im_part = text.split(",", 1)
        return complex(float(re_part), float(im_part))
    try:
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def _emit(obj):
    print(json.dumps(jsonable(obj), indent=2))


def _char_record(chi):
    g = gauss_sum(chi)
    return {
        "modulus": chi.modulus,
        "label": chi.label_str,
        "parity": chi.parity,
        "primitive": chi.primitive,
        "order": chi.order,
        "conductor": chi.conductor,
        "gauss_re": g.value.real,
        "gauss_im": g.value.imag,
    }


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------- handlers


def cmd_char(args):
    if args.action == "list":
        chars = primitive_characters(args.modulus) if args.primitive_only else enumerate_characters(args.modulus)
        _emit([_char_record(c) for c in chars])
    else:
        _emit(_char_record(character(args.modulus, parse_label(args.label))))
    return EXIT_OK


def cmd_selftest(args):
    checks = identity_suite(args.grid_size, args.seed)
    passed = all(c.passed for c in checks)
    _emit({"passed": passed, "checks": [c.as_dict() for c in checks]})
    return EXIT_OK if passed else EXIT_VIOLATION


def cmd_lfun(args):
    if args.action == "eval":
        _emit(l_function(args.s, character(args.modulus, parse_label(args.label))))
    else:
        chi1 = character(args.modulus, parse_label(args.chi1))
        chi2 = character(args.modulus, parse_label(args.chi2))
        _emit(truncated_product(args.z1, args.z2, chi1, chi2, args.tau))
    return EXIT_OK


def cmd_eval(args):
    req = EvalRequest(
        args.s1, args.s2, args.modulus, args.chi1, args.chi2, z=args.z or 0j,
        method=args.method, tolerance=args.tol, n_order=args.n_order,
    )
    _emit(evaluate(req))
    return EXIT_OK


def cmd_mainterm(args):
    chi1 = character(args.modulus, parse_label(args.chi1))
    chi2 = character(args.modulus, parse_label(args.chi2))
    _emit(theorem2_main_term(args.s1, args.s2, chi1, chi2, with_reference=args.with_reference))
    return EXIT_OK


def cmd_sweep(args):
    data = _load_json(args.config)
    if args.output:
        data["output_path"] = args.output
    spec = SweepSpec.from_dict(data)
    rows = run_sweep(spec)
    if not spec.output_path:
        sys.stdout.write(write_table(rows))
        return EXIT_OK
    failed = sum(r.failed for r in rows)
    _emit({"output_path": spec.output_path, "rows": len(rows), "failed_rows": failed})
    return EXIT_OK


def cmd_fit(args):
    rows = [r for r in read_table(args.input) if not r.failed]
    _emit(fit_exponent(rows, args.x, args.y))
    return EXIT_OK


def cmd_verify(args):
    config = _load_json(args.config) if args.config else {}
    config["suite"] = args.suite
    if args.input:
        config["input"] = args.input
    if args.output:
        config["output_path"] = args.output
    report = verify_bounds(config)
    _emit({"suite": report.suite, "passed": report.passed, "hard_failure": report.hard_failure,
           "summary": report.summary, "points": report.points if args.points else len(report.points)})
    return EXIT_OK if report.passed else EXIT_VIOLATION


# ---------------------------------------------------------------- parser


def _pair_args(p):
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--chi1", required=True, help="label of chi1, e.g. 1 or 0,1")
    p.add_argument("--chi2", required=True)


def build_parser():
    parser = argparse.ArgumentParser(prog="double-ell", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("char", help="Dirichlet characters")
    csub = p.add_subparsers(dest="action", required=True)
    c = csub.add_parser("list")
    c.add_argument("--modulus", type=int, required=True)
    c.add_argument("--primitive-only", action="store_true")
    c = csub.add_parser("gauss")
    c.add_argument("--modulus", type=int, required=True)
    c.add_argument("--label", required=True)
    p.set_defaults(func=cmd_char)

    p = sub.add_parser("selftest", help="special-function identity suite")
    ssub = p.add_subparsers(dest="action", required=True)
    c = ssub.add_parser("identities")
    c.add_argument("--grid-size", type=int, default=200)
    c.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("lfun", help="Dirichlet L-functions")
    lsub = p.add_subparsers(dest="action", required=True)
    c = lsub.add_parser("eval")
    c.add_argument("--s", type=complex_arg, required=True)
    c.add_argument("--modulus", type=int, required=True)
    c.add_argument("--label", required=True)
    c = lsub.add_parser("product-approx")
    c.add_argument("--z1", type=complex_arg, required=True)
    c.add_argument("--z2", type=complex_arg, required=True)
    c.add_argument("--tau", type=float, required=True)
    _pair_args(c)
    p.set_defaults(func=cmd_lfun)

    p = sub.add_parser("eval", help="evaluate the double L-function")
    p.add_argument("--method", choices=["direct", "psi", "integral"], default="psi")
    p.add_argument("--s1", type=complex_arg, required=True)
    p.add_argument("--s2", type=complex_arg, required=True)
    p.add_argument("--z", type=complex_arg)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--n-order", type=int, default=3)
    _pair_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mainterm", help="explicit main term in the critical strip")
    p.add_argument("--s1", type=complex_arg, required=True)
    p.add_argument("--s2", type=complex_arg, required=True)
    p.add_argument("--with-reference", action="store_true")
    _pair_args(p)
    p.set_defaults(func=cmd_mainterm)

    p = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="overrides output_path from the config")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="log-log exponent fit over a sweep CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", help="bound-verification suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--config", help="JSON overrides (sweeps, epsilon, slack, limit, ...)")
    p.add_argument("--input", help="re-verify a saved sweep CSV")
    p.add_argument("--output", help="save the sweep table as CSV")
    p.add_argument("--points", action="store_true", help="include per-point rows")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ArithmeticError, ValueError, OSError, ConfigError, RuntimeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
