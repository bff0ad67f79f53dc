"""``durrmeyer-lab`` command line: ``eval``, ``verify`` and ``converge``.

Exit codes: 0 when everything passes, 1 when a verification case fails,
2 for usage, domain or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import apply_operator_exact, evaluate
from .asymptotics import voronovskaja_residual, write_csv
from .errors import DurrmeyerError
from .functions import builtin
from .kernel import OperatorParams
from .operator import EvalSettings, apply
from .report import dumps, format_float
from .suites import SUITES, SuiteOptions, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _ngrid(text: str) -> list:
    try:
        return [Fraction(s) for s in text.split(",") if s.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad n-grid {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="durrmeyer-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate (S_{n,j} f)(x)")
    ev.add_argument("--n", type=_rational, required=True)
    ev.add_argument("--j", type=int, required=True)
    ev.add_argument("--f", required=True, help="e<r>, expq, texp or gjp:<j>:<p>")
    ev.add_argument("--x", type=_rational, required=True)
    ev.add_argument("--eps", type=float, default=1e-12)
    ev.add_argument("--exact", action="store_true", help="use the exact engine and print the image")

    ve = sub.add_parser("verify", help="run a verification suite")
    ve.add_argument("--suite", choices=SUITES + ("all",), default="all")
    ve.add_argument("--jmin", type=int, default=-3)
    ve.add_argument("--jmax", type=int, default=3)
    ve.add_argument("--degree-max", type=int, default=None)
    ve.add_argument("--tol", type=float, default=1e-7)
    ve.add_argument("--out", default=None)
    ve.add_argument("--timestamp", default=None, help="fixed timestamp (epoch seconds) for reproducible output")

    co = sub.add_parser("converge", help="convergence table for the expansion in 1/n")
    co.add_argument("--j", type=int, default=0)
    co.add_argument("--f", required=True)
    co.add_argument("--x", type=_rational, default=Fraction(1))
    co.add_argument("--q", type=int, default=1)
    co.add_argument("--ngrid", type=_ngrid, default=[Fraction(n) for n in (16, 32, 64, 128)])
    co.add_argument("--engine", choices=("auto", "exact", "numeric"), default="auto")
    co.add_argument("--out", default=None)
    return parser


def _write(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_eval(args) -> int:
    fn = builtin(args.f)
    params = OperatorParams(args.n, args.j)
    out = {"n": str(params.n), "j": params.j, "f": fn.name, "x": float(args.x)}
    if args.exact:
        if fn.exact is None:
            raise DurrmeyerError(f"{fn.name} has no exact representation")
        img = apply_operator_exact(params, fn.exact)
        out["expression"] = str(img)
        out["exppoly"] = img.to_json_obj()
        if img.is_polynomial():
            value = sum((c * args.x**a for a, _, c in img.terms), Fraction(0))
            out["value_exact"] = str(value)
            out["value"] = float(value)
        else:
            out["value"] = float(evaluate(img, float(args.x)))
        out["error"] = 0.0
    else:
        settings = EvalSettings(eps_tail=args.eps, eps_quad=args.eps)
        res = apply(params, fn.spec, float(args.x), settings)
        out.update(value=float(res.value), error=float(res.error), terms=res.terms)
    sys.stdout.write(dumps(out) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    opts = SuiteOptions(args.jmin, args.jmax, args.degree_max, args.tol)
    report = run_suite(args.suite, opts, args.timestamp)
    _write(report.to_json(), args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_converge(args) -> int:
    fn = builtin(args.f)
    if args.engine == "exact" and fn.exact is None:
        raise DurrmeyerError(f"{fn.name} has no exact representation")
    use_exact = fn.exact is not None and args.engine != "numeric"
    f = fn.exact if use_exact else fn.spec
    x = args.x if use_exact else float(args.x)
    est = voronovskaja_residual(args.j, f, x, args.q, args.ngrid)
    _write(write_csv(est), args.out)
    order = est.status if est.slope is None else format_float(est.slope)
    r2 = "" if est.r_squared is None else f" r_squared={format_float(est.r_squared)}"
    sys.stdout.write(f"# fitted_order={order} status={est.status}{r2}\n")
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "converge": cmd_converge}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (DurrmeyerError, ValueError) as exc:
        sys.stderr.write(f"durrmeyer-lab: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"durrmeyer-lab: I/O error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
