"""Eigenfunctions ``g_{j,p}`` of ``S_{n,j}`` and their Bessel form.

``g_{j,p}(x) = sum_{m >= max(0,-j)} p^m x^{m+j} / (m! (m+j)!)`` satisfies
``S_{n,j} g = e^{p/n} g`` for every admissible ``n`` and
``D_j^2 g = p g``. Term-wise differentiation gives ``g_{j,p}' = g_{j-1,p}``,
which the residual checks exploit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import iv, jv

from .errors import DomainError
from .kernel import GrowthClass, OperatorParams, bessel_i
from .operator import EvalSettings, FunctionSpec, apply

__all__ = [
    "EigenParams",
    "eigenfunction",
    "eigenfunction_derivative",
    "eigenfunction_bessel",
    "remark_bessel_form",
    "eigenfunction_closed_form",
    "eigenfunction_spec",
    "EigenResidual",
    "operator_eigen_residual",
    "diffop_eigen_residual",
]

#: Growth exponent declared for every eigenfunction (they grow like ``e^{2 sqrt(|p| x)}``).
EIGEN_GROWTH_A = 1.0


@dataclass(frozen=True)
class EigenParams:
    j: int
    p: float

    def __post_init__(self):
        if not math.isfinite(self.p):
            raise DomainError("p must be finite")
        object.__setattr__(self, "j", int(self.j))

    @property
    def eigenvalue_diffop(self) -> float:
        return float(self.p)

    def eigenvalue(self, n) -> float:
        """Eigenvalue ``e^{p/n}`` of ``S_{n,j}``."""
        return math.exp(self.p / float(n))


def _series(j: int, p: float, x, eps: float, extra_weight: int = 0):
    # sum_{m >= m0} p^m x^{m+j} / (m! (m+j)!), stopping on a geometric tail bound
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be nonnegative")
    m0 = max(0, -j)
    if p == 0:
        if j < 0:
            return np.zeros_like(x)
        return x**j / math.factorial(j)
    term = p**m0 * x ** (m0 + j) / (math.factorial(m0) * math.factorial(m0 + j))
    total = term.copy()
    ap = abs(p)
    m = m0
    while True:
        term = term * (p * x / ((m + 1) * (m + j + 1)))
        m += 1
        total = total + term
        r_next = ap * x / ((m + 1) * (m + j + 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = np.where(r_next < 1, np.abs(term) * r_next / (1 - r_next), np.inf)
        if np.all(bound * (m + 1) ** extra_weight < eps) or m > 100_000:
            break
    return total


def eigenfunction(ep: EigenParams, x, eps: float = 1e-15):
    """``g_{j,p}(x)`` summed until the absolute tail bound drops below ``eps``."""
    out = _series(ep.j, float(ep.p), x, eps)
    return float(out) if np.ndim(out) == 0 else out


def eigenfunction_derivative(ep: EigenParams, order: int, x, eps: float = 1e-15):
    """``g_{j,p}^{(order)}(x)`` by term-wise differentiation of the series.

    Differentiating ``x^{m+j}/(m+j)!`` lowers the factorial index, so the
    result is the same series with ``j`` replaced by ``j - order`` and the
    summation still starting at ``max(0, -j)``.
    """
    if order == 0:
        return eigenfunction(ep, x, eps)
    # surviving terms start at max(0, -j, order - j) = max(0, -(j - order))
    out = _series(ep.j - order, float(ep.p), x, eps, extra_weight=order)
    return float(out) if np.ndim(out) == 0 else out


def eigenfunction_bessel(ep: EigenParams, x):
    """Closed form ``(x/p)^{j/2} I_j(2 sqrt(p x))`` of ``g_{j,p}``.

    Requires ``p x > 0``. This is ``p^{-j}`` times
    :func:`remark_bessel_form`; the extra factor makes it coincide with the
    series normalization of :func:`eigenfunction`.
    """
    x = np.asarray(x, dtype=float)
    p = float(ep.p)
    if p == 0 or np.any(p * x <= 0):
        raise DomainError("the Bessel form needs p * x > 0")
    out = (x / p) ** (ep.j / 2.0) * bessel_i(ep.j, 2.0 * np.sqrt(p * x))
    return float(out) if np.ndim(out) == 0 else out


def remark_bessel_form(ep: EigenParams, x):
    """``(p x)^{j/2} I_j(2 sqrt(p x))``: an eigenfunction equal to ``p^j g_{j,p}``."""
    x = np.asarray(x, dtype=float)
    p = float(ep.p)
    if p == 0 or np.any(p * x <= 0):
        raise DomainError("the Bessel form needs p * x > 0")
    out = (p * x) ** (ep.j / 2.0) * bessel_i(ep.j, 2.0 * np.sqrt(p * x))
    return float(out) if np.ndim(out) == 0 else out


def eigenfunction_closed_form(ep: EigenParams, x):
    """``g_{j,p}`` from scipy's Bessel functions, for either sign of ``p``.

    ``(x/p)^{j/2} I_j(2 sqrt(p x))`` for ``p > 0`` and
    ``(x/|p|)^{j/2} J_j(2 sqrt(|p| x))`` for ``p < 0``; needs ``x > 0``.
    """
    x = np.asarray(x, dtype=float)
    p = float(ep.p)
    if p == 0 or np.any(x <= 0):
        raise DomainError("the closed form needs p != 0 and x > 0")
    q = abs(p)
    bessel = iv if p > 0 else jv
    out = (x / q) ** (ep.j / 2.0) * bessel(ep.j, 2.0 * np.sqrt(q * x))
    return float(out) if np.ndim(out) == 0 else out


def _growth_constant(ep: EigenParams, A: float) -> float:
    # |g_{j,p}| <= g_{j,|p|} termwise; sup of g_{j,|p|}(t) e^{-A t} on a fine grid
    t = np.linspace(0.0, 400.0, 8001)
    dominating = EigenParams(ep.j, abs(ep.p))
    vals = _series(dominating.j, dominating.p, t, 1e-14) * np.exp(-A * t)
    return 2.0 * max(float(np.max(vals)), 1e-300) + 1e-12


def eigenfunction_spec(ep: EigenParams, A: float = EIGEN_GROWTH_A, max_derivative: int = 4) -> FunctionSpec:
    """``g_{j,p}`` as a :class:`FunctionSpec` with growth ``(A, K)``."""
    return FunctionSpec(
        eval=lambda t: _series(ep.j, float(ep.p), t, 1e-15),
        growth=GrowthClass(A, _growth_constant(ep, A)),
        derivatives=lambda order, t: eigenfunction_derivative(ep, order, t),
        max_derivative=max_derivative,
        label=f"g[{ep.j},{ep.p}]",
    )


class EigenResidual(NamedTuple):
    residual: float
    error: float
    image: float
    expected: float


def operator_eigen_residual(
    params: OperatorParams, ep: EigenParams, x, settings: EvalSettings | None = None
) -> EigenResidual:
    """``|S_{n,j} g_{j,p}(x) - e^{p/n} g_{j,p}(x)|`` with the engine's error estimate."""
    if params.j != ep.j:
        raise DomainError("operator and eigenfunction must share j")
    spec = eigenfunction_spec(ep)
    ev = apply(params, spec, x, settings)
    expected = ep.eigenvalue(params.n) * np.asarray(eigenfunction(ep, x))
    res = np.abs(np.asarray(ev.value) - expected)
    if np.ndim(res) == 0:
        return EigenResidual(float(res), float(ev.error), float(ev.value), float(expected))
    return EigenResidual(res, ev.error, ev.value, expected)


def diffop_eigen_residual(ep: EigenParams, x, eps: float = 1e-15):
    """``|(1-j) g' + x g'' - p g|`` from term-wise differentiated series."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("x must be positive")
    g = np.asarray(eigenfunction(ep, x, eps))
    g1 = np.asarray(eigenfunction_derivative(ep, 1, x, eps))
    g2 = np.asarray(eigenfunction_derivative(ep, 2, x, eps))
    out = np.abs((1 - ep.j) * g1 + x * g2 - ep.p * g)
    return float(out) if out.ndim == 0 else out
