"""Residual checks for the composition law and its consequences.

Every check accepts either an :class:`~durrmeyer_lab.algebra.ExpPoly`
(verified exactly: the difference of both sides must be the zero ExpPoly)
or a :class:`~durrmeyer_lab.operator.FunctionSpec` (verified numerically on
a grid of points against a tolerance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .algebra import ExpPoly, apply_D2_exact, apply_operator_exact, evaluate
from .errors import DomainError
from .kernel import GrowthClass, OperatorParams
from .operator import EvalSettings, FunctionSpec, OperatorImage, compose_numeric

__all__ = [
    "IDENTITIES",
    "HypothesisError",
    "IdentityCase",
    "IdentityResult",
    "composition_residual",
    "commutativity_residual",
    "iterate_residual",
    "iterative_combination_residual",
    "diff_commute_residual",
    "scale_chain_residual",
]

IDENTITIES = ("composition", "commutativity", "iterate", "iterative_combination", "diff_commute")

Func = Union[ExpPoly, FunctionSpec]
DEFAULT_GRID = (0.0, 0.5, 1.0, 2.0, 3.0, 4.0)


class HypothesisError(DomainError):
    """The parameters violate the hypotheses of the identity being checked."""


def growth_exponent(f: Func) -> Fraction:
    if isinstance(f, ExpPoly):
        return max(f.max_rate(), Fraction(0))
    return Fraction(f.growth.A)


def _label(f: Func) -> str:
    return str(f) if isinstance(f, ExpPoly) else f.label


@dataclass(frozen=True)
class IdentityCase:
    """One identity instance; hypotheses are checked on construction."""

    identity: str
    params: dict
    f: Func
    grid: tuple = DEFAULT_GRID
    tolerance: float = 1e-7
    probe: bool = False
    label: str = ""

    def __post_init__(self):
        if self.identity not in IDENTITIES and self.identity != "scale_chain":
            raise DomainError(f"unknown identity {self.identity!r}")
        params = {k: (Fraction(v) if k in ("m", "n") else v) for k, v in self.params.items()}
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
        if not self.label:
            object.__setattr__(self, "label", _label(self.f))
        self._check()

    @property
    def exact(self) -> bool:
        return isinstance(self.f, ExpPoly)

    def _check(self):
        p = self.params
        A = growth_exponent(self.f)
        kind = self.identity
        if kind == "composition":
            m, n = p["m"], p["n"]
            if not (n > A and m > A * n / (n - A)):
                raise HypothesisError(f"composition needs n > A and m > An/(n-A) (m={m}, n={n}, A={A})")
        elif kind == "commutativity":
            m, n = p["m"], p["n"]
            ok = m > 2 * A and n > 2 * A
            ok = ok and m > A * n / (n - A) and n > A * m / (m - A)
            if not ok:
                raise HypothesisError(f"commutativity needs m, n > 2A (m={m}, n={n}, A={A})")
        elif kind == "iterate":
            m, l = p["m"], p["l"]
            if l < 1 or not m > l * A:
                raise HypothesisError(f"iterate needs l >= 1 and m > lA (m={m}, l={l}, A={A})")
        elif kind == "iterative_combination":
            n, mm = p["n"], p["m"]
            if mm < 0 or not n / (mm + 1) > A:
                raise HypothesisError(f"iterative combination needs n/(m+1) > A (n={n}, m={mm}, A={A})")
        elif kind == "diff_commute":
            if not isinstance(self.f, ExpPoly):
                raise HypothesisError("operator/diffop commutation is checked on ExpPoly inputs only")
            if not p["n"] > A:
                raise HypothesisError("need n > A")
            if p["j"] >= 2 and self.f.derivative().value_at_zero() != 0 and not self.probe:
                raise HypothesisError("j >= 2 requires f'(0) = 0")
        elif kind == "scale_chain":
            scales = [Fraction(s) for s in p["scales"]]
            acc = A
            for s in reversed(scales):
                if not s > acc:
                    raise HypothesisError("scale chain leaves the admissible range")
                acc = s * acc / (s - acc)

    def summary(self) -> dict:
        out = {}
        for k, v in self.params.items():
            if isinstance(v, Fraction):
                out[k] = str(v)
            elif isinstance(v, (list, tuple)):
                out[k] = [str(Fraction(s)) for s in v]
            else:
                out[k] = v
        return out


@dataclass
class IdentityResult:
    case: IdentityCase
    exact_difference: Optional[ExpPoly] = None
    residuals: Optional[np.ndarray] = None
    errors: Optional[np.ndarray] = None
    notes: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        if self.residuals is None or len(self.residuals) == 0:
            return 0.0
        return float(np.max(self.residuals))

    @property
    def holds(self) -> bool:
        if self.exact_difference is not None:
            return self.exact_difference.is_zero()
        return self.max_residual <= self.case.tolerance

    @property
    def status(self) -> str:
        if self.case.probe:
            return "expected-failure" if not self.holds else "fail"
        return "pass" if self.holds else "fail"


def _finish(case: IdentityCase, lhs, rhs) -> IdentityResult:
    grid = np.array(case.grid)
    if case.exact:
        diff = lhs - rhs
        res = np.abs(np.asarray(evaluate(diff, grid), dtype=float)) if diff else np.zeros_like(grid)
        return IdentityResult(case, exact_difference=diff, residuals=res)
    res = np.abs(np.asarray(lhs.value) - np.asarray(rhs.value))
    return IdentityResult(case, residuals=res, errors=np.asarray(lhs.error) + np.asarray(rhs.error))


def _S(n, j, f: ExpPoly) -> ExpPoly:
    return apply_operator_exact(OperatorParams(n, j), f)


def _image(n, j, f: FunctionSpec, settings) -> OperatorImage:
    return OperatorImage(OperatorParams(n, j), f, settings)


def _nested(scales: Sequence, j: int, f: FunctionSpec, grid, settings):
    # scales applied innermost first
    g = f
    for s in scales[:-1]:
        g = _image(s, j, g, settings).as_function()
    return _image(scales[-1], j, g, settings).evaluate(grid)


def composition_residual(m, n, j: int, f: Func, grid=DEFAULT_GRID, tol: float = 1e-7, settings=None):
    """``S_{m,j}(S_{n,j} f) - S_{mn/(m+n),j} f``."""
    case = IdentityCase("composition", {"m": m, "n": n, "j": j}, f, grid, tol)
    m, n = case.params["m"], case.params["n"]
    h = m * n / (m + n)
    if case.exact:
        return _finish(case, _S(m, j, _S(n, j, f)), _S(h, j, f))
    x = np.array(case.grid)
    lhs = compose_numeric(OperatorParams(m, j), OperatorParams(n, j), f, x, settings)
    rhs = _image(h, j, f, settings).evaluate(x)
    return _finish(case, lhs, rhs)


def commutativity_residual(m, n, j: int, f: Func, grid=DEFAULT_GRID, tol: float = 1e-7, settings=None):
    """``S_{m,j}(S_{n,j} f) - S_{n,j}(S_{m,j} f)``."""
    case = IdentityCase("commutativity", {"m": m, "n": n, "j": j}, f, grid, tol)
    m, n = case.params["m"], case.params["n"]
    if case.exact:
        return _finish(case, _S(m, j, _S(n, j, f)), _S(n, j, _S(m, j, f)))
    x = np.array(case.grid)
    lhs = compose_numeric(OperatorParams(m, j), OperatorParams(n, j), f, x, settings)
    rhs = compose_numeric(OperatorParams(n, j), OperatorParams(m, j), f, x, settings)
    return _finish(case, lhs, rhs)


def iterate_residual(m, l: int, j: int, f: Func, grid=DEFAULT_GRID, tol: float = 1e-7, settings=None):
    """``S_{m,j}^l f - S_{m/l,j} f`` with the left side applied ``l`` times."""
    case = IdentityCase("iterate", {"m": m, "l": l, "j": j}, f, grid, tol)
    m = case.params["m"]
    if case.exact:
        g = f
        for _ in range(l):
            g = _S(m, j, g)
        return _finish(case, g, _S(m / l, j, f))
    x = np.array(case.grid)
    lhs = _nested([m] * l, j, f, x, settings)
    rhs = _image(m / l, j, f, settings).evaluate(x)
    return _finish(case, lhs, rhs)


def _difference_spec(g: FunctionSpec, img: OperatorImage) -> FunctionSpec:
    ig = img.as_function()
    return FunctionSpec(
        eval=lambda t: g.values(t) - ig.values(t),
        error=lambda t: g.errors(t) + ig.errors(t),
        growth=GrowthClass(max(g.growth.A, ig.growth.A), g.growth.K + ig.growth.K),
        poly_degree=max(g.poly_degree, ig.poly_degree),
        label=f"({g.label} - S {g.label})",
        validate=False,
    )


def iterative_combination_residual(n, m: int, j: int, f: Func, grid=DEFAULT_GRID, tol: float = 1e-7, settings=None):
    """``(I - (I - S_{n,j})^{m+1}) f`` against ``sum_i (-1)^i C(m+1, i+1) S_{n/(i+1),j} f``.

    The left side is built by ``m+1`` nested applications of ``I - S_{n,j}``.
    """
    case = IdentityCase("iterative_combination", {"n": n, "m": m, "j": j}, f, grid, tol)
    n = case.params["n"]
    coeffs = [(-1) ** i * math.comb(m + 1, i + 1) for i in range(m + 1)]
    if case.exact:
        g = f
        for _ in range(m + 1):
            g = g - _S(n, j, g)
        lhs = f - g
        rhs = ExpPoly()
        for i, c in enumerate(coeffs):
            rhs = rhs + _S(n / (i + 1), j, f) * c
        return _finish(case, lhs, rhs)
    x = np.array(case.grid)
    g = f
    for _ in range(m):
        g = _difference_spec(g, _image(n, j, g, settings))
    last = _image(n, j, g, settings).evaluate(x)
    # f - (g - S g) = f - g + S g
    lhs_val = f.values(x) - g.values(x) + last.value
    lhs_err = g.errors(x) + last.error
    rhs_val = np.zeros_like(x)
    rhs_err = np.zeros_like(x)
    for i, c in enumerate(coeffs):
        ev = _image(n / (i + 1), j, f, settings).evaluate(x)
        rhs_val = rhs_val + c * ev.value
        rhs_err = rhs_err + abs(c) * ev.error
    res = np.abs(lhs_val - rhs_val)
    return IdentityResult(case, residuals=res, errors=lhs_err + rhs_err)


def diff_commute_residual(n, j: int, f: ExpPoly, grid=DEFAULT_GRID, probe: bool = False):
    """``D_j^2(S_{n,j} f) - S_{n,j}(D_j^2 f)``, exactly.

    With ``probe=True`` the hypothesis ``f'(0) = 0`` (needed for ``j >= 2``)
    may be violated; the case then reports ``expected-failure`` when the
    difference is nonzero.
    """
    case = IdentityCase("diff_commute", {"n": n, "j": j}, f, grid, 0.0, probe=probe)
    n = case.params["n"]
    lhs = apply_D2_exact(j, _S(n, j, f))
    rhs = _S(n, j, apply_D2_exact(j, f))
    return _finish(case, lhs, rhs)


def scale_chain_residual(scales: Sequence, j: int, f: Func, grid=DEFAULT_GRID, tol: float = 1e-7, settings=None):
    """``S_a(S_b(S_c f))`` against ``S_h f`` with ``1/h = 1/a + 1/b + 1/c``.

    ``scales`` lists the outermost operator first.
    """
    case = IdentityCase("scale_chain", {"scales": list(scales), "j": j}, f, grid, tol)
    sc = [Fraction(s) for s in scales]
    h = 1 / sum(1 / s for s in sc)
    if case.exact:
        g = f
        for s in reversed(sc):
            g = _S(s, j, g)
        return _finish(case, g, _S(h, j, f))
    x = np.array(case.grid)
    lhs = _nested(list(reversed(sc)), j, f, x, settings)
    rhs = _image(h, j, f, settings).evaluate(x)
    return _finish(case, lhs, rhs)
