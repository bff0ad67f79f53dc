"""Default verification suites run by ``durrmeyer-lab verify``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .algebra import ExpPoly, monomial
from .diffop import (
    D2l_explicit_exact,
    D2l_factorized_exact,
    D2l_iterated_exact,
    Jet,
    apply_D2l_explicit,
    apply_D2l_iterated,
)
from .errors import DomainError
from .functions import EXPQ, TEXP, exppoly_spec
from .kernel import OperatorParams
from .operator import EvalSettings
from .parallel import ordered_map
from .report import CaseRecord, VerificationReport, grid_summary, timestamp_string
from .semigroup import (
    IdentityResult,
    commutativity_residual,
    composition_residual,
    diff_commute_residual,
    iterate_residual,
    iterative_combination_residual,
    scale_chain_residual,
)
from .spectral import (
    EigenParams,
    diffop_eigen_residual,
    eigenfunction,
    eigenfunction_closed_form,
    operator_eigen_residual,
)

__all__ = ["SUITES", "SuiteOptions", "run_suite"]

SUITES = ("composition", "commutativity", "iterates", "combination", "diffcommute", "eigen", "diffop")
SCALES = (2, 3, 4, 6, 8)
NUMERIC_GRID = (0.0, 0.5, 1.0, 2.0, 3.0, 4.0)
EIGEN_X = (0.5, 1.0, 2.0, 4.0)
EIGEN_P = (-2.0, -1.0, 1.0, 2.0)


@dataclass(frozen=True)
class SuiteOptions:
    jmin: int = -3
    jmax: int = 3
    degree_max: Optional[int] = None
    tol: float = 1e-7

    def degrees(self, default: int) -> range:
        return range((default if self.degree_max is None else self.degree_max) + 1)

    @property
    def js(self) -> range:
        return range(self.jmin, self.jmax + 1)


def _semigroup_record(res: IdentityResult, name: Optional[str] = None) -> CaseRecord:
    case = res.case
    detail = {}
    if case.exact and res.exact_difference:
        detail["difference"] = str(res.exact_difference)
    return CaseRecord(
        identity=name or case.identity,
        params=case.summary(),
        function=case.label,
        grid=grid_summary(case.grid),
        max_residual=res.max_residual,
        tolerance=0.0 if case.exact else case.tolerance,
        status=res.status,
        exact=case.exact,
        detail=detail,
    )


def _exact_functions(opts: SuiteOptions, default_degree: int = 8):
    fs = [(f"e{r}", monomial(r)) for r in opts.degrees(default_degree)]
    return fs + [("expq", EXPQ), ("texp", TEXP)]


def _numeric_functions():
    return [exppoly_spec(EXPQ, "expq"), exppoly_spec(TEXP, "texp")]


def _composition_tasks(opts: SuiteOptions):
    tasks = []
    for j in opts.js:
        for m, n in itertools.product(SCALES, SCALES):
            for _, f in _exact_functions(opts):
                tasks.append(lambda m=m, n=n, j=j, f=f: _semigroup_record(composition_residual(m, n, j, f)))
        for m, n in ((4, 4), (6, 3), (2, 8)):
            for g in _numeric_functions():
                tasks.append(
                    lambda m=m, n=n, j=j, g=g: _semigroup_record(
                        composition_residual(m, n, j, g, NUMERIC_GRID, opts.tol)
                    )
                )
        for scales in ((2, 3, 4), (3, 6, 8)):
            for _, f in _exact_functions(opts):
                tasks.append(lambda s=scales, j=j, f=f: _semigroup_record(scale_chain_residual(s, j, f)))
        g = exppoly_spec(EXPQ, "expq")
        tasks.append(
            lambda j=j, g=g: _semigroup_record(scale_chain_residual((2, 3, 4), j, g, NUMERIC_GRID, opts.tol))
        )
    return tasks


def _commutativity_tasks(opts: SuiteOptions):
    tasks = []
    for j in opts.js:
        for m, n in itertools.product(SCALES, SCALES):
            for _, f in _exact_functions(opts):
                tasks.append(lambda m=m, n=n, j=j, f=f: _semigroup_record(commutativity_residual(m, n, j, f)))
        for m, n in ((3, 5), (2, 8)):
            for g in _numeric_functions():
                tasks.append(
                    lambda m=m, n=n, j=j, g=g: _semigroup_record(
                        commutativity_residual(m, n, j, g, NUMERIC_GRID, opts.tol)
                    )
                )
    return tasks


def _iterate_tasks(opts: SuiteOptions):
    tasks = []
    for j in opts.js:
        for l, m in itertools.product((1, 2, 3), (6, 8, 12)):
            for _, f in _exact_functions(opts):
                tasks.append(lambda m=m, l=l, j=j, f=f: _semigroup_record(iterate_residual(m, l, j, f)))
        for g in _numeric_functions():
            tasks.append(
                lambda j=j, g=g: _semigroup_record(iterate_residual(8, 2, j, g, NUMERIC_GRID, opts.tol))
            )
    return tasks


def _combination_tasks(opts: SuiteOptions):
    tasks = []
    for j in opts.js:
        for mm, n in itertools.product((0, 1, 2), (6, 9, 12)):
            for _, f in _exact_functions(opts):
                tasks.append(
                    lambda n=n, mm=mm, j=j, f=f: _semigroup_record(iterative_combination_residual(n, mm, j, f))
                )
        for g in _numeric_functions():
            tasks.append(
                lambda j=j, g=g: _semigroup_record(
                    iterative_combination_residual(9, 2, j, g, NUMERIC_GRID, opts.tol)
                )
            )
    return tasks


def _diffcommute_tasks(opts: SuiteOptions):
    tasks = []
    for j in opts.js:
        for n in (2, 3, 5):
            for r in opts.degrees(8):
                f = monomial(r)
                probe = j >= 2 and r == 1
                tasks.append(
                    lambda n=n, j=j, f=f, probe=probe: _semigroup_record(
                        diff_commute_residual(n, j, f, probe=probe),
                        "diff_commute_probe" if probe else None,
                    )
                )
    return tasks


def _diffop_case(j: int, l: int, r: int) -> CaseRecord:
    f = monomial(r)
    explicit = D2l_explicit_exact(j, l, f)
    iterated = D2l_iterated_exact(j, l, f)
    factorized = D2l_factorized_exact(j, l, f)
    # pointwise jets at rational points, exact arithmetic
    pts = [Fraction(0), Fraction(1, 2), Fraction(3)]
    jet_diff = 0
    for x0 in pts:
        jet = Jet.from_exppoly(f, x0, 2 * l)
        jet_diff = max(jet_diff, abs(apply_D2l_explicit(j, l, jet) - apply_D2l_iterated(j, l, jet)))
    ok = (explicit - iterated).is_zero() and (factorized - explicit).is_zero() and jet_diff == 0
    return CaseRecord(
        identity="diffop_powers",
        params={"j": j, "l": l},
        function=f"e{r}",
        grid=grid_summary([float(p) for p in pts]),
        max_residual=float(jet_diff),
        tolerance=0.0,
        status="pass" if ok else "fail",
        exact=True,
    )


def _diffop_tasks(opts: SuiteOptions):
    return [
        lambda j=j, l=l, r=r: _diffop_case(j, l, r)
        for j in opts.js
        for l in range(1, 5)
        for r in opts.degrees(10)
    ]


def _eigen_operator_case(j: int, p: float, n: int, tol: float) -> CaseRecord:
    ep = EigenParams(j, p)
    x = np.array(EIGEN_X)
    res = operator_eigen_residual(OperatorParams(n, j), ep, x)
    ratio = np.asarray(res.image) / np.asarray(res.expected) * ep.eigenvalue(n)
    spread = float(np.max(ratio) - np.min(ratio))
    worst = float(np.max(res.residual))
    return CaseRecord(
        identity="operator_eigen",
        params={"j": j, "p": p, "n": n},
        function=f"gjp:{j}:{p:g}",
        grid=grid_summary(EIGEN_X),
        max_residual=worst,
        tolerance=tol,
        status="pass" if worst <= tol and spread <= tol else "fail",
        detail={"ratio_spread": spread, "error_estimate": float(np.max(res.error))},
    )


def _eigen_closed_form_case(j: int, p: float) -> CaseRecord:
    ep = EigenParams(j, p)
    x = np.array(EIGEN_X)
    series = np.asarray(eigenfunction(ep, x))
    closed = np.asarray(eigenfunction_closed_form(ep, x))
    rel = float(np.max(np.abs(series - closed) / np.abs(closed)))
    return CaseRecord(
        identity="bessel_closed_form",
        params={"j": j, "p": p},
        function=f"gjp:{j}:{p:g}",
        grid=grid_summary(EIGEN_X),
        max_residual=rel,
        tolerance=1e-10,
        status="pass" if rel <= 1e-10 else "fail",
    )


def _eigen_diffop_case(j: int, p: float) -> CaseRecord:
    res = float(np.max(diffop_eigen_residual(EigenParams(j, p), np.array(EIGEN_X))))
    return CaseRecord(
        identity="diffop_eigen",
        params={"j": j, "p": p},
        function=f"gjp:{j}:{p:g}",
        grid=grid_summary(EIGEN_X),
        max_residual=res,
        tolerance=1e-10,
        status="pass" if res <= 1e-10 else "fail",
    )


def _eigen_tasks(opts: SuiteOptions):
    tasks = []
    for j in opts.js:
        for p in EIGEN_P:
            for n in (4, 8):
                tasks.append(lambda j=j, p=p, n=n: _eigen_operator_case(j, p, n, opts.tol))
            tasks.append(lambda j=j, p=p: _eigen_closed_form_case(j, p))
            tasks.append(lambda j=j, p=p: _eigen_diffop_case(j, p))
    return tasks


_BUILDERS: dict[str, Callable] = {
    "composition": _composition_tasks,
    "commutativity": _commutativity_tasks,
    "iterates": _iterate_tasks,
    "combination": _combination_tasks,
    "diffcommute": _diffcommute_tasks,
    "eigen": _eigen_tasks,
    "diffop": _diffop_tasks,
}


def run_suite(suite: str, opts: SuiteOptions = SuiteOptions(), timestamp: Optional[str] = None) -> VerificationReport:
    """Run one suite (or ``all``) and return the ordered report."""
    if opts.jmin > opts.jmax:
        raise DomainError("jmin must not exceed jmax")
    names = SUITES if suite == "all" else (suite,)
    tasks = []
    for name in names:
        if name not in _BUILDERS:
            raise DomainError(f"unknown suite {name!r}")
        tasks.extend(_BUILDERS[name](opts))
    cases = ordered_map(lambda t: t(), tasks)
    settings = {"options": asdict(opts), "engine": asdict(EvalSettings())}
    return VerificationReport(suite, cases, timestamp_string(timestamp), settings)
