"""Command line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 degenerate system,
3 search exhausted (certificate still written), 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from pathlib import Path

import mpmath
from mpmath import mpc, mpf

from .config import bundle_from_json, bundle_to_json, dumps, plan_from_json, report_to_json
from .errors import DegenerateSystem, NonConvergence, PlanError, PoleHit, SearchExhausted, ZeroWeightWarning
from .numkernel import Precision, Series, format_complex, format_real, parse_complex, poly_eval
from .pade import NodeLevel, approximant, bary_eval, contact_check, q_poles
from .search import CertificateBundle, search_mu, verify_certificate
from .svg import pole_map

EXIT_OK, EXIT_IO, EXIT_DEGENERATE, EXIT_EXHAUSTED, EXIT_VERIFY = 0, 1, 2, 3, 4


def _fail(code: int, msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _write(path, text: str) -> None:
    Path(path).write_text(text)


def _complex_list(doc, key: str, ctx: Precision) -> list:
    if isinstance(doc, dict):
        doc = doc[key]
    if not isinstance(doc, list):
        raise ValueError(f"expected a JSON list of numbers for {key}")
    return [parse_complex(x, ctx) for x in doc]


def cmd_approximate(args) -> int:
    ctx = Precision(args.prec)
    try:
        coeffs = _complex_list(_read_json(args.coeffs), "coeffs", ctx)
        nodes = _complex_list(_read_json(args.nodes), "nodes", ctx)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        return _fail(EXIT_IO, f"cannot read inputs: {exc}")
    if args.degree != len(nodes) - 1:
        return _fail(EXIT_IO, f"degree {args.degree} needs {args.degree + 1} nodes, got {len(nodes)}")
    try:
        level = NodeLevel(tuple(nodes))
        level.validate(ctx)
    except ValueError as exc:
        return _fail(EXIT_IO, str(exc))
    except Exception as exc:
        return _fail(EXIT_IO, f"{type(exc).__name__}: {exc}")
    series = Series(tuple(coeffs))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ZeroWeightWarning)
        try:
            r = approximant(series, level, ctx)
        except DegenerateSystem as exc:
            return _fail(EXIT_DEGENERATE, f"degenerate system: {exc}")
    report = contact_check(series, r, ctx)
    try:
        poles = q_poles(r, ctx)
    except NonConvergence as exc:
        return _fail(EXIT_IO, f"pole computation failed: {exc}")
    doc = {
        "degree": r.n,
        "precision": ctx.bits,
        "nodes": [format_complex(x, ctx) for x in r.nodes],
        "weights": [format_complex(w, ctx) for w in r.weights],
        "contact": {
            "pass": report.passed,
            "max_rel_residual": format_real(report.max_rel_residual, ctx),
            "residuals": [format_complex(x, ctx) for x in report.residual_coeffs],
        },
        "poles": [format_complex(p, ctx) for p in poles],
        "warnings": [str(w.message) for w in caught if issubclass(w.category, ZeroWeightWarning)],
    }
    try:
        _write(args.out, dumps(doc))
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write {args.out}: {exc}")
    return EXIT_OK


def grid_rows(bundle: CertificateBundle, box=None, points: int = 16, levels=None):
    """Rows (k, z, |r_{n_k}(z)|, |f(z)|) over a points x points grid.

    Without ``box`` each level gets a box centered at its target with
    half-width eps_{n_k}.
    """
    plan = bundle.plan
    ctx = plan.ctx
    coeffs = bundle.function.coeffs
    f = coeffs.as_poly()
    with ctx.scope():
        for k in levels if levels is not None else range(plan.K + 1):
            lv = plan.levels[k]
            if box is None:
                h = plan.eps(lv.n)
                re0, re1 = lv.target.real - h, lv.target.real + h
                im0, im1 = lv.target.imag - h, lv.target.imag + h
            else:
                re0, re1, im0, im1 = box
            r = approximant(coeffs, lv.level, ctx)
            for iy in range(points):
                y = im0 + (im1 - im0) * iy / (points - 1)
                for ix in range(points):
                    x = re0 + (re1 - re0) * ix / (points - 1)
                    z = mpc(x, y)
                    try:
                        ar = abs(bary_eval(r, z, ctx))
                    except PoleHit:
                        ar = mpmath.inf
                    yield k, z, ar, abs(poly_eval(f, z, ctx))


def write_grid(path, bundle: CertificateBundle, box=None, points: int = 16) -> None:
    ctx = bundle.plan.ctx
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "re", "im", "abs_r", "abs_f"])
        for k, z, ar, af in grid_rows(bundle, box, points):
            w.writerow([k, format_real(z.real, ctx), format_real(z.imag, ctx),
                        mpmath.nstr(ar, 20), mpmath.nstr(af, 20)])


def cmd_adversary(args) -> int:
    try:
        plan = plan_from_json(_read_json(args.config))
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(EXIT_IO, f"cannot read config: {exc}")
    except PlanError as exc:
        return _fail(EXIT_IO, str(exc))
    if args.grid_points < 2:
        return _fail(EXIT_IO, "--grid-points must be at least 2")
    box = None
    if args.grid_box is not None:
        try:
            with plan.ctx.scope():
                box = tuple(mpf(v) for v in args.grid_box)
        except ValueError as exc:
            return _fail(EXIT_IO, f"bad --grid-box: {exc}")
    code = EXIT_OK
    try:
        bundle = search_mu(plan)
    except SearchExhausted as exc:
        bundle = exc.bundle
        code = _fail(EXIT_EXHAUSTED, str(exc))
    except DegenerateSystem as exc:
        return _fail(EXIT_DEGENERATE, f"degenerate system: {exc}")
    try:
        _write(args.out, dumps(bundle_to_json(bundle)))
        if args.svg:
            _write(args.svg, pole_map(bundle))
        if args.grid:
            write_grid(args.grid, bundle, box, args.grid_points)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")
    return code


def cmd_verify(args) -> int:
    try:
        doc = _read_json(args.cert)
        bundle = bundle_from_json(doc, precision=args.prec)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(EXIT_IO, f"cannot read certificate: {exc}")
    except (PlanError, ValueError) as exc:
        return _fail(EXIT_IO, str(exc))
    report = verify_certificate(bundle)
    print(json.dumps(report_to_json(report, bundle.plan.ctx), indent=2))
    return EXIT_OK if report["all_pass"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="barypade", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approximate", help="barycentric Padé approximant of a coefficient list")
    p.add_argument("--coeffs", required=True, help="JSON list of Taylor coefficients")
    p.add_argument("--nodes", required=True, help="JSON list of interpolation nodes")
    p.add_argument("--degree", required=True, type=int)
    p.add_argument("--prec", type=int, default=1024, help="working precision in bits")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("adversary", help="build a function with certified spurious poles")
    p.add_argument("--config", required=True, help="plan config (schema v1)")
    p.add_argument("--out", required=True, help="certificate JSON")
    p.add_argument("--svg", help="pole map")
    p.add_argument("--grid", help="CSV of |r| and |f| on a grid")
    p.add_argument("--grid-box", nargs=4, metavar=("RE0", "RE1", "IM0", "IM1"),
                   help="grid box (default: per level, target +- eps_{n_k})")
    p.add_argument("--grid-points", type=int, default=16, help="points per axis")
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("verify", help="independently re-check a certificate")
    p.add_argument("--cert", required=True)
    p.add_argument("--prec", type=int, default=None, help="override the certificate's precision")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
