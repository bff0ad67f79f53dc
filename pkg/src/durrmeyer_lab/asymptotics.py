"""Convergence-order estimates for the asymptotic expansion in ``1/n``.

``R_q(n) = |S_{n,j} f(x) - sum_{k<=q} n^{-k}/k! (D_j^{2k} f)(x)|`` is
computed over a geometric grid of scales and its log-log slope is fitted.
A decay claim of order ``c`` is accepted when the slope exceeds ``c`` or
when every residual already sits at the error floor of the evaluation.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .algebra import ExpPoly, apply_operator_exact, evaluate
from .diffop import D2l_explicit_exact, Jet, apply_D2l_explicit
from .errors import DomainError
from .kernel import OperatorParams
from .operator import EvalSettings, FunctionSpec, apply
from .parallel import ordered_map
from .spectral import EigenParams, eigenfunction, eigenfunction_spec

__all__ = [
    "OrderEstimate",
    "ExpansionRow",
    "fit_order",
    "voronovskaja_residual",
    "eigen_asymptotic_residual",
    "expansion_term_table",
    "expansion_sum_exact",
    "finite_expansion_order",
    "write_csv",
    "R_SQUARED_MIN",
]

R_SQUARED_MIN = 0.99
FLOOR_FACTOR = 10.0
# relative rounding floor for values computed in double precision
ROUNDING = 64 * np.finfo(float).eps

Func = Union[ExpPoly, FunctionSpec]


@dataclass(frozen=True)
class OrderEstimate:
    """Fitted decay ``R(n) ~ C n^{-slope}``.

    ``status`` is one of ``exact`` (all residuals are exactly zero),
    ``floor-limited`` (all residuals within ``10 x floor``), ``fit`` or
    ``inconclusive`` (``r_squared`` below 0.99). ``slope`` is ``None``
    unless a fit was made.
    """

    slope: Optional[float]
    intercept: Optional[float]
    r_squared: Optional[float]
    n_grid: tuple
    residuals: tuple
    status: str
    floor: tuple
    predicted_order: Optional[float] = None
    used: int = 0

    def certifies(self, order: float) -> bool:
        """True when the data support ``R(n) = o(n^{-order})`` on the grid."""
        if self.status in ("exact", "floor-limited"):
            return True
        return self.status == "fit" and self.slope > order

    def running_slopes(self) -> list:
        out = [None]
        for i in range(1, len(self.n_grid)):
            r0, r1 = self.residuals[i - 1], self.residuals[i]
            if r0 > 0 and r1 > 0:
                out.append(-math.log(r1 / r0) / math.log(self.n_grid[i] / self.n_grid[i - 1]))
            else:
                out.append(None)
        return out


def _check_grid(n_grid) -> tuple:
    grid = tuple(Fraction(n) for n in n_grid)
    if len(grid) < 4:
        raise DomainError("an n-grid needs at least 4 points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("the n-grid must be strictly increasing")
    if grid[0] <= 0:
        raise DomainError("scales must be positive")
    return grid


def fit_order(n_grid, residuals, floor=None, predicted_order=None) -> OrderEstimate:
    """Least-squares slope of ``log R`` against ``log n``.

    ``floor`` (scalar or per point) is the size below which a residual
    cannot be distinguished from evaluation error. Up to two of the
    largest-``n`` points are dropped from the fit when they lie within
    ten times the floor.
    """
    grid = _check_grid(n_grid)
    res = np.abs(np.asarray(residuals, dtype=float))
    if res.shape != (len(grid),):
        raise DomainError("one residual per grid point is required")
    fl = np.broadcast_to(np.asarray(0.0 if floor is None else floor, dtype=float), res.shape).copy()
    common = dict(
        n_grid=tuple(float(n) for n in grid),
        residuals=tuple(float(r) for r in res),
        floor=tuple(float(f) for f in fl),
        predicted_order=predicted_order,
    )
    if np.all(res == 0):
        return OrderEstimate(None, None, None, status="exact", **common)
    near = res <= FLOOR_FACTOR * fl
    if np.all(near):
        return OrderEstimate(None, None, None, status="floor-limited", **common)
    keep = len(res)
    for _ in range(2):
        if keep > 2 and near[keep - 1]:
            keep -= 1
    mask = np.zeros(len(res), dtype=bool)
    mask[:keep] = True
    mask &= res > 0
    if mask.sum() < 2:
        return OrderEstimate(None, None, None, status="floor-limited", **common)
    lx = np.log(np.array([float(n) for n in grid]))[mask]
    ly = np.log(res[mask])
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    status = "fit" if r2 >= R_SQUARED_MIN else "inconclusive"
    return OrderEstimate(-float(slope), float(intercept), r2, status=status, used=int(mask.sum()), **common)


def expansion_sum_exact(j: int, f: ExpPoly, n, q: int) -> ExpPoly:
    """``sum_{k=0}^q n^{-k}/k! D_j^{2k} f`` as an ExpPoly in ``x``."""
    n = Fraction(n)
    out = ExpPoly()
    for k in range(q + 1):
        out = out + D2l_explicit_exact(j, k, f) * (1 / (n**k * math.factorial(k)))
    return out


def finite_expansion_order(j: int, f: ExpPoly, limit: int = 64) -> int:
    """Smallest ``q`` with ``D_j^{2k} f = 0`` for all ``k > q`` (polynomials only)."""
    if not f.is_polynomial():
        raise DomainError("the expansion is finite only for polynomials")
    g = f
    for q in range(limit + 1):
        nxt = D2l_explicit_exact(j, 1, g)
        if nxt.is_zero():
            return q
        g = nxt
    raise DomainError("expansion did not terminate")


def _value(f: ExpPoly, x):
    # Fraction when the value is rational, float otherwise
    if f.is_polynomial() and isinstance(x, (int, Fraction)):
        xf = Fraction(x)
        return sum((c * xf**a for a, _, c in f.terms), Fraction(0))
    return float(evaluate(f, float(x)))


def _floor(value: float, engine_error: float = 0.0) -> float:
    return engine_error + ROUNDING * max(abs(value), 1.0)


def _exact_residual(j, f: ExpPoly, x, q, n):
    img = apply_operator_exact(OperatorParams(n, j), f)
    diff = img - expansion_sum_exact(j, f, n, q)
    if diff.is_zero():
        return 0.0, 0.0
    v = _value(diff, x)
    if isinstance(v, Fraction):
        return abs(float(v)), 0.0
    # float evaluation of both sides separately bounds the rounding
    scale = abs(float(evaluate(img, float(x)))) + sum(
        abs(float(c)) * abs(float(x)) ** a * math.exp(float(b) * float(x)) for a, b, c in diff.terms
    )
    return abs(v), ROUNDING * max(scale, 1.0)


def _numeric_residual(j, f: FunctionSpec, x, q, n, settings):
    jet = Jet.from_function(f, float(x), 2 * q)
    partial = sum(
        apply_D2l_explicit(j, k, jet) / (float(n) ** k * math.factorial(k)) for k in range(q + 1)
    )
    ev = apply(OperatorParams(n, j), f, float(x), settings)
    return abs(ev.value - partial), _floor(ev.value, ev.error)


def voronovskaja_residual(
    j: int, f: Func, x, q: int, n_grid: Sequence = (16, 32, 64, 128), settings: EvalSettings | None = None
) -> OrderEstimate:
    """Fit the decay of ``R_q(n)`` over ``n_grid``.

    ExpPoly inputs use the exact image and exact derivatives; FunctionSpec
    inputs use the numeric engine and a Taylor jet from the derivative
    oracle (``2q`` derivatives are required).
    """
    if q < 0:
        raise DomainError("q must be nonnegative")
    if float(x) <= 0:
        raise DomainError("x must be positive")
    grid = _check_grid(n_grid)
    settings = settings or EvalSettings(eps_tail=1e-14, eps_quad=1e-14)
    if isinstance(f, ExpPoly):
        rows = ordered_map(lambda n: _exact_residual(j, f, x, q, n), grid)
    else:
        f.derivative(2 * q, np.zeros(1))
        rows = ordered_map(lambda n: _numeric_residual(j, f, x, q, n, settings), grid)
    res, floor = zip(*rows)
    return fit_order(grid, res, floor, predicted_order=float(q + 1))


def eigen_asymptotic_residual(
    j: int, p: float, x: float, c: float, n_grid: Sequence = (4, 8, 16, 32), settings: EvalSettings | None = None
) -> OrderEstimate:
    """Residuals ``|S_{n,j} g_{j,p}(x) - e^{p/n} g_{j,p}(x)|`` fitted against ``n^{-c}``.

    The equality is exact, so the residuals should all be floor-limited.
    """
    if x <= 0:
        raise DomainError("x must be positive")
    grid = _check_grid(n_grid)
    ep = EigenParams(j, p)
    spec = eigenfunction_spec(ep)
    g = float(eigenfunction(ep, x))

    def one(n):
        ev = apply(OperatorParams(n, j), spec, float(x), settings)
        expected = ep.eigenvalue(n) * g
        return abs(ev.value - expected), _floor(expected, ev.error)

    res, floor = zip(*ordered_map(one, grid))
    return fit_order(grid, res, floor, predicted_order=float(c))


@dataclass(frozen=True)
class ExpansionRow:
    q: int
    partial_sum: float
    residual: float
    ratio: Optional[float]
    exact_zero: bool


def expansion_term_table(j: int, f: ExpPoly, x, q_max: int, n) -> list:
    """Rows ``q = 0..q_max``: partial sum at ``x``, ``R_q(n)`` and ``R_q(2n)/R_q(n)``.

    ``exact_zero`` is set when the image and the partial sum agree as
    functions (for ``1 <= deg f < j`` only the polynomial parts are
    compared; the rest is an ``e^{-nx}`` remainder smaller than any power
    of ``1/n``).
    """
    n = Fraction(n)
    img = apply_operator_exact(OperatorParams(n, j), f)
    img2 = apply_operator_exact(OperatorParams(2 * n, j), f)
    rows = []
    for q in range(q_max + 1):
        part = expansion_sum_exact(j, f, n, q)
        part2 = expansion_sum_exact(j, f, 2 * n, q)
        d1 = img - part
        d2 = img2 - part2
        r1 = abs(float(_value(d1, x)))
        r2 = abs(float(_value(d2, x)))
        zero = d1.is_zero() or (
            f.is_polynomial() and not d1.polynomial_part() and d1.max_rate() < 0
        )
        rows.append(
            ExpansionRow(q, float(_value(part, x)), r1, (r2 / r1) if r1 > 0 else None, bool(zero))
        )
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    return format(float(v), ".17g")


def write_csv(est: OrderEstimate, stream=None) -> str:
    """CSV with columns ``n, residual, running_slope, predicted_order``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "residual", "running_slope", "predicted_order"])
    for n, r, s in zip(est.n_grid, est.residuals, est.running_slopes()):
        w.writerow([_fmt(n), _fmt(r), _fmt(s), _fmt(est.predicted_order)])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
