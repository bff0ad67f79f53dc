"""Floating-point evaluation of ``(S_{n,j} f)(x)`` for declared-growth functions.

Each inner integral ``n * int s_{n,m}(t) f(t) dt`` is the mean of
``f(U/n)`` with ``U ~ Gamma(m+1)``, computed by generalized Gauss-Laguerre
quadrature on the weight ``u^m e^{-u}``. When ``f`` grows like ``e^{At}``
the weight is tilted by ``e^{-At}`` first, which makes pure exponentials
integrate exactly. The outer series is truncated with a Poisson tail
bound derived from the growth declaration, and every value comes with an
error estimate (tail bound plus quadrature differences).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import CapabilityError, DivergenceError, DomainError, TruncationError
from .kernel import (
    GrowthClass,
    OperatorParams,
    _basis_values,
    basis_derivative_order,
    poisson_tail_bound,
    truncation_index,
)

__all__ = [
    "FunctionSpec",
    "EvalSettings",
    "Evaluation",
    "OperatorImage",
    "laguerre_rule",
    "gamma_mean",
    "apply",
    "image",
    "apply_derivative_representation",
    "compose_numeric",
]


@dataclass(frozen=True)
class FunctionSpec:
    """A vectorized real function on ``[0, inf)`` with a growth declaration.

    The declaration is ``|f(t)| <= K (1+t)^poly_degree e^{A t}``. ``eval``
    must accept and return numpy arrays and be safe to call from several
    threads. ``derivatives(order, t)`` is optional and is checked against
    finite differences of ``eval`` on construction. ``error`` optionally
    gives a pointwise bound on the error already present in ``eval``
    (used when ``f`` is itself a numerically computed image).
    """

    eval: Callable
    growth: GrowthClass = field(default_factory=GrowthClass)
    derivatives: Optional[Callable] = None
    max_derivative: int = 0
    label: str = "f"
    poly_degree: int = 0
    error: Optional[Callable] = None
    validate: bool = True

    def __post_init__(self):
        if self.poly_degree < 0:
            raise DomainError("poly_degree must be nonnegative")
        if self.derivatives is None and self.max_derivative:
            raise CapabilityError("max_derivative given without a derivative oracle")
        if self.validate:
            self._check_growth()
            if self.derivatives is not None:
                self._check_derivatives()

    def __call__(self, t):
        return self.values(t)

    def values(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.eval(t), dtype=float) * np.ones_like(t)

    def errors(self, t):
        t = np.asarray(t, dtype=float)
        if self.error is None:
            return np.zeros_like(t)
        return np.abs(np.asarray(self.error(t), dtype=float)) * np.ones_like(t)

    def bound(self, t):
        t = np.asarray(t, dtype=float)
        return self.growth.K * (1.0 + t) ** self.poly_degree * np.exp(self.growth.A * t)

    def derivative(self, order: int, t):
        if order == 0:
            return self.values(t)
        if self.derivatives is None or order > self.max_derivative:
            raise CapabilityError(
                f"{self.label}: derivative of order {order} not available"
                f" (max {self.max_derivative if self.derivatives else 0})"
            )
        t = np.asarray(t, dtype=float)
        return np.asarray(self.derivatives(order, t), dtype=float) * np.ones_like(t)

    def derivative_spec(self, order: int) -> "FunctionSpec":
        """The ``order``-th derivative as its own spec.

        Growth is declared as ``K (d + A + 1)^order`` with the same ``A``
        and degree, which holds for exp-poly type functions with
        nonnegative rates.
        """
        if order == 0:
            return self
        self.derivative(order, np.zeros(1))
        g = self.growth
        d = self.poly_degree
        return FunctionSpec(
            eval=lambda t: self.derivative(order, t),
            growth=GrowthClass(g.A, g.K * (d + g.A + 1.0) ** order),
            label=f"{self.label}^({order})",
            poly_degree=max(d - order, 0) if self.growth.A == 0 else d,
            validate=False,
        )

    def _check_growth(self):
        t = np.linspace(0.0, 20.0, 81)
        v = np.abs(self.values(t))
        if np.any(~np.isfinite(v)) or np.any(v > self.bound(t) * (1 + 1e-9) + 1e-300):
            raise DomainError(f"{self.label}: values exceed the declared growth bound")

    def _check_derivatives(self):
        rng = np.random.default_rng(20240601)
        pts = np.sort(rng.uniform(0.1, 3.0, size=10))
        h = 1e-5
        for order in range(1, self.max_derivative + 1):
            lower = (lambda t: self.values(t)) if order == 1 else (
                lambda t, o=order - 1: self.derivative(o, t)
            )
            fd = (lower(pts + h) - lower(pts - h)) / (2 * h)
            exact = self.derivative(order, pts)
            if np.any(np.abs(fd - exact) > 1e-5 * (1 + np.abs(exact))):
                raise DomainError(
                    f"{self.label}: derivative oracle of order {order} disagrees"
                    " with finite differences"
                )


@dataclass(frozen=True)
class EvalSettings:
    eps_tail: float = 1e-12
    eps_quad: float = 1e-12
    max_terms: int = 20000
    min_order: int = 20
    max_order: int = 640

    def __post_init__(self):
        if self.eps_tail <= 0 or self.eps_quad <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_terms <= 0:
            raise DomainError("max_terms must be positive")

    def halved(self) -> "EvalSettings":
        return EvalSettings(
            self.eps_tail / 2, self.eps_quad / 2, self.max_terms, self.min_order, self.max_order
        )


class Evaluation(NamedTuple):
    value: float
    error: float
    terms: int


@lru_cache(maxsize=8192)
def laguerre_rule(order: int, alpha: float):
    """Gauss rule for the weight ``u^alpha e^{-u}`` normalized to total mass 1.

    Golub-Welsch on the Jacobi matrix of the generalized Laguerre
    polynomials; normalizing avoids the overflow of ``Gamma(alpha+1)``.
    """
    i = np.arange(order, dtype=float)
    diag = 2.0 * i + alpha + 1.0
    off = np.sqrt((i[1:]) * (i[1:] + alpha))
    nodes, vecs = eigh_tridiagonal(diag, off)
    weights = vecs[0, :] ** 2
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _tilted_mean(g: FunctionSpec, n: float, m: int, settings: EvalSettings):
    # n * int s_{n,m} g dt divided by rho^{m+1}, rho = n/(n-A); the
    # division keeps values O(1) when rho^{m+1} alone would overflow
    A = g.growth.A
    c = A / n
    if c >= 1:
        raise DivergenceError(f"n={n} must exceed the growth exponent A={A}")
    scale = 1.0 / (n * (1.0 - c))
    log_factor = -(m + 1) * math.log1p(-c) if c else 0.0
    inv_factor = math.exp(-log_factor)
    budget = settings.eps_quad * 1e-3 * max(inv_factor, g.growth.K)
    order = settings.min_order
    prev = None
    best = math.inf
    while True:
        v, w = laguerre_rule(order, float(m))
        y = v * scale
        damp = np.exp(-c * v / (1.0 - c)) if c else 1.0
        # drop far nodes whose total possible contribution is negligible
        contrib = w * g.growth.K * (1.0 + y) ** g.poly_degree
        tail = np.cumsum(contrib[::-1])[::-1]
        keep = int(np.searchsorted(-tail, -budget, side="left"))
        keep = max(keep, 1)
        dropped = float(tail[keep]) if keep < len(tail) else 0.0
        yk = y[:keep]
        dk = damp[:keep] if c else 1.0
        vals = g.values(yk)
        if not np.all(np.isfinite(vals)):
            raise DivergenceError(
                f"{g.label}: non-finite values at quadrature nodes up to t={yk[-1]:.4g};"
                f" n={n} is too close to the growth exponent A={A} for double precision"
            )
        q = float(np.sum(w[:keep] * dk * vals))
        if prev is not None:
            best = min(best, abs(q - prev))
            if best <= settings.eps_quad * max(inv_factor, abs(q)):
                break
        if order >= settings.max_order:
            break
        prev = q
        order *= 2
    prop = 0.0
    if g.error is not None:
        prop = float(np.sum(w[:keep] * dk * g.errors(yk)))
    return q, best + dropped, prop, log_factor


def gamma_mean(g: FunctionSpec, n: float, m: int, settings: EvalSettings):
    """``n * int_0^inf s_{n,m}(t) g(t) dt`` with error estimates.

    Returns ``(value, quadrature_error, propagated_error)``; the last term
    carries ``g.errors`` through the same quadrature.
    """
    q, qe, pe, log_factor = _tilted_mean(g, n, m, settings)
    f = math.exp(log_factor)
    return q * f, qe * f, pe * f


class _PoissonSeries:
    """``sum_{k >= k_start} s_{n,k}(x) * gamma_mean(g, n, k - shift)``.

    Inner means are stored divided by ``rho^{k-shift+1}``; since
    ``s_{n,k}(x) rho^k = s_{n rho,k}(x) e^{n(rho-1)x}`` the series is summed
    against the basis at scale ``n rho`` and rescaled once at the end.
    """

    def __init__(self, n, shift: int, k_start: int, g: FunctionSpec, settings: EvalSettings):
        self.n = float(n)
        self.shift = shift
        self.k_start = k_start
        self.g = g
        self.settings = settings
        A = g.growth.A
        if not self.n > A:
            raise DivergenceError(f"scale n={n} must exceed growth exponent A={A}")
        lam = self.n - A
        self.rho = self.n / lam
        d = g.poly_degree
        self.c1 = max(1.0, 1.0 / lam) * (1 + abs(shift) + d)
        self.pref0 = g.growth.K * self.rho ** (1 - shift) * (2.0 * self.c1) ** d
        self.a_out = self.n * A / lam
        self._vals: list[float] = []
        self._errs: list[float] = []
        self._lock = threading.Lock()

    def _prefactor(self, x):
        return self.pref0 * np.exp(self.a_out * np.asarray(x, dtype=float))

    def tail(self, K: int, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        d = self.g.poly_degree
        pb = np.array([poisson_tail_bound(self.n * self.rho * xi, K, d) for xi in x])
        return self._prefactor(x) * pb

    def index_for(self, x_max: float) -> int:
        if x_max <= 0:
            return self.k_start
        eps = self.settings.eps_tail / float(self._prefactor(x_max))
        K = truncation_index(self.n * self.rho, x_max, eps, self.g.poly_degree)
        return max(K, self.k_start)

    def _ensure(self, K: int):
        with self._lock:
            start = self.k_start + len(self._vals)
            for k in range(start, K + 1):
                q, qe, pe, _ = _tilted_mean(self.g, self.n, k - self.shift, self.settings)
                self._vals.append(q)
                self._errs.append(qe + pe)

    def evaluate(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0):
            raise DomainError("x must be nonnegative")
        K = self.index_for(float(x.max()) if x.size else 0.0)
        over = K - self.k_start + 1 > self.settings.max_terms
        if over:
            K = self.k_start + self.settings.max_terms - 1
        self._ensure(K)
        ks = np.arange(self.k_start, K + 1)
        vals = np.asarray(self._vals[: len(ks)])
        errs = np.asarray(self._errs[: len(ks)])
        B = _basis_values(self.n * self.rho, ks[:, None], x[None, :])
        outer = self.rho ** (1 - self.shift) * np.exp(self.a_out * x)
        value = (vals @ B) * outer
        if over:
            raise TruncationError(
                f"outer series needs more than max_terms={self.settings.max_terms} terms",
                partial=value,
            )
        error = (errs @ B) * outer + self.tail(K, x)
        return value, error, len(ks)


class OperatorImage:
    """Lazily evaluated ``S_{n,j} f``; inner integrals are computed once and reused."""

    def __init__(self, params: OperatorParams, f: FunctionSpec, settings: EvalSettings | None = None):
        self.params = params
        self.f = f
        self.settings = settings or EvalSettings()
        j = params.j
        self._series = _PoissonSeries(params.n, j, max(j, 0), f, self.settings)
        self._f0 = None
        self._cache_key = None
        self._cache_val = None
        self._cache_lock = threading.Lock()

    @property
    def f0(self):
        if self._f0 is None:
            z = np.zeros(1)
            self._f0 = (float(self.f.values(z)[0]), float(self.f.errors(z)[0]))
        return self._f0

    def evaluate(self, x):
        """``(value, error, terms)``; value and error have the shape of ``x``."""
        xa = np.asarray(x, dtype=float)
        flat = np.atleast_1d(xa).ravel()
        value, error, terms = self._series.evaluate(flat)
        j = self.params.j
        if j > 0:
            f0, e0 = self.f0
            ks = np.arange(0, j)
            boundary = _basis_values(float(self.params.n), ks[:, None], flat[None, :]).sum(axis=0)
            value = value + f0 * boundary
            error = error + e0 * boundary
        if xa.ndim == 0:
            return Evaluation(float(value[0]), float(error[0]), terms)
        return Evaluation(value.reshape(xa.shape), error.reshape(xa.shape), terms)

    def growth(self) -> tuple[GrowthClass, int]:
        """Growth declaration of the image, ``(GrowthClass, poly_degree)``."""
        s = self._series
        d = self.f.poly_degree
        K = self.f.growth.K
        extra = s.rho ** (1 - self.params.j) * s.c1**d * math.factorial(d)
        extra *= max(1.0, s.n * s.rho) ** d
        return GrowthClass(s.a_out, K * (1.0 + extra)), d

    def _cached(self, t):
        key = (t.shape, t.tobytes())
        with self._cache_lock:
            if self._cache_key == key:
                return self._cache_val
        res = self.evaluate(t)
        with self._cache_lock:
            self._cache_key, self._cache_val = key, res
        return res

    def as_function(self, label: str | None = None) -> FunctionSpec:
        growth, d = self.growth()
        return FunctionSpec(
            eval=lambda t: self._cached(np.asarray(t, dtype=float)).value,
            error=lambda t: self._cached(np.asarray(t, dtype=float)).error,
            growth=growth,
            poly_degree=d,
            label=label or f"S[{self.params.n},{self.params.j}]({self.f.label})",
            validate=False,
        )


def image(params: OperatorParams, f: FunctionSpec, settings: EvalSettings | None = None) -> OperatorImage:
    return OperatorImage(params, f, settings)


def apply(params: OperatorParams, f: FunctionSpec, x, settings: EvalSettings | None = None) -> Evaluation:
    """Value of ``(S_{n,j} f)(x)`` with an error estimate.

    Requires ``n > A``. ``x`` may be a scalar or an array.
    """
    if not float(params.n) > f.growth.A:
        raise DivergenceError(f"n={params.n} must exceed the growth exponent A={f.growth.A}")
    return OperatorImage(params, f, settings).evaluate(x)


def apply_derivative_representation(
    params: OperatorParams, f: FunctionSpec, x, l: int, settings: EvalSettings | None = None
) -> Evaluation:
    """``(S_{n,j} f)^{(l)}(x)`` through the derivative representation.

    Boundary terms use ``f^{(nu)}(0)`` for ``1 <= nu <= min(j-1, l-1)``;
    the series part integrates ``f^{(l)}`` against ``s_{n,k+l-j}``.
    """
    if l < 1:
        raise DomainError("derivative order l must be positive")
    settings = settings or EvalSettings()
    g = f.derivative_spec(l)
    n, j = params.n, params.j
    nf = float(n)
    series = _PoissonSeries(n, j - l, max(0, j - l), g, settings)
    xa = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xa).ravel()
    value, error, terms = series.evaluate(flat)
    zero = np.zeros(1)
    for nu in range(1, min(j - 1, l - 1) + 1):
        fnu0 = float(f.derivative(nu, zero)[0])
        value = value + nf * basis_derivative_order(n, j - 1 - nu, flat, l - 1 - nu) * fnu0
    if xa.ndim == 0:
        return Evaluation(float(value[0]), float(error[0]), terms)
    return Evaluation(value.reshape(xa.shape), error.reshape(xa.shape), terms)


def _admissible_composition(outer_n: Fraction, inner_n: Fraction, A) -> bool:
    A = Fraction(A)
    return inner_n > A and outer_n > A * inner_n / (inner_n - A)


def compose_numeric(
    outer: OperatorParams, inner: OperatorParams, f: FunctionSpec, x, settings: EvalSettings | None = None
) -> Evaluation:
    """``S_{m,j}(S_{n,j} f)(x)``, applying the outer operator to the numeric inner image."""
    if outer.j != inner.j:
        raise DomainError("composition requires the same shift j on both operators")
    if not _admissible_composition(outer.n, inner.n, f.growth.A):
        raise DomainError(
            f"composition needs n > A and m > A n/(n-A); got m={outer.n}, n={inner.n}, A={f.growth.A}"
        )
    mid = OperatorImage(inner, f, settings).as_function()
    return apply(outer, mid, x, settings)
