"""Poisson-type basis functions, moment integrals and modified Bessel values.

Everything here is a pure function of its arguments. Rational inputs
(``int`` or ``fractions.Fraction``) give exact rational results in the
integral formulas; floats give floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, ExactnessError

__all__ = [
    "OperatorParams",
    "GrowthClass",
    "FACTORIAL_LIMIT",
    "exact_factorial",
    "basis",
    "basis_derivative",
    "basis_derivative_order",
    "moment_integral",
    "cross_integral",
    "bessel_i",
    "poisson_tail_bound",
    "truncation_index",
]

#: Largest index for which the exact engine computes factorials.
FACTORIAL_LIMIT = 170


def _as_rational(value, name):
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"{name} must be rational, got {type(value).__name__}")


@dataclass(frozen=True)
class OperatorParams:
    """The pair ``(n, j)`` identifying one operator ``S_{n,j}``.

    ``n`` is stored as a :class:`~fractions.Fraction` so that scale
    arithmetic such as ``mn/(m+n)`` stays exact. Strings like ``"3/2"``
    are accepted.
    """

    n: Fraction
    j: int

    def __post_init__(self):
        n = _as_rational(self.n, "n")
        if n <= 0:
            raise DomainError(f"operator scale must be positive, got n={n}")
        if int(self.j) != self.j:
            raise DomainError(f"shift j must be an integer, got {self.j!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "j", int(self.j))

    def with_scale(self, n) -> "OperatorParams":
        return OperatorParams(n, self.j)

    def __str__(self):
        return f"S(n={self.n}, j={self.j})"


@dataclass(frozen=True)
class GrowthClass:
    """Declaration ``|f(t)| <= K * e^{A t}`` for ``t >= 0``."""

    A: float = 0.0
    K: float = 1.0

    def __post_init__(self):
        if self.A < 0:
            raise DomainError(f"growth exponent must be nonnegative, got A={self.A}")
        if self.K <= 0:
            raise DomainError(f"growth amplitude must be positive, got K={self.K}")


def exact_factorial(k: int) -> int:
    if k < 0:
        raise DomainError(f"factorial of negative integer {k}")
    if k > FACTORIAL_LIMIT:
        raise ExactnessError(
            f"factorial index {k} exceeds the exact limit {FACTORIAL_LIMIT}"
        )
    return math.factorial(k)


def _check_basis_args(n, x):
    if float(n) <= 0:
        raise DomainError(f"n must be positive, got {n}")
    if np.any(np.asarray(x, dtype=float) < 0):
        raise DomainError("x must be nonnegative")


def _basis_values(nf, k, x):
    # log-space: (nx)^k and k! overflow long before their ratio does
    x = np.asarray(x, dtype=float)
    k = np.asarray(k)
    out = np.zeros(np.broadcast(k, x).shape)
    kk, xx = np.broadcast_arrays(k, x)
    pos = (kk >= 0) & (xx > 0)
    if np.any(pos):
        kp = kk[pos].astype(float)
        nx = nf * xx[pos]
        out[pos] = np.exp(kp * np.log(nx) - nx - gammaln(kp + 1.0))
    out[(kk == 0) & (xx == 0)] = 1.0
    return out


def basis(n, k, x):
    """Basis value ``s_{n,k}(x) = (nx)^k e^{-nx} / k!``, zero for ``k < 0``.

    ``k`` and ``x`` broadcast as numpy arrays; scalar inputs give a float.
    """
    _check_basis_args(n, x)
    out = _basis_values(float(n), k, x)
    return float(out) if out.ndim == 0 else out


def basis_derivative(n, k, x):
    """First derivative ``n (s_{n,k-1}(x) - s_{n,k}(x))``."""
    _check_basis_args(n, x)
    k = np.asarray(k)
    nf = float(n)
    out = nf * (_basis_values(nf, k - 1, x) - _basis_values(nf, k, x))
    return float(out) if out.ndim == 0 else out


def basis_derivative_order(n, k: int, x, order: int):
    """Derivative of order ``order`` obtained by repeating the first-order rule.

    Each application of ``d/dx`` maps ``s_{n,k}`` to ``n (s_{n,k-1} - s_{n,k})``,
    so the result is a signed combination of shifted basis values.
    """
    if order < 0:
        raise DomainError("derivative order must be nonnegative")
    _check_basis_args(n, x)
    # coefficients on s_{n,k-i}, i = 0..order
    coeffs = {0: 1}
    for _ in range(order):
        nxt = {}
        for shift, c in coeffs.items():
            nxt[shift + 1] = nxt.get(shift + 1, 0) + c
            nxt[shift] = nxt.get(shift, 0) - c
        coeffs = nxt
    nf = float(n)
    out = sum(c * _basis_values(nf, k - shift, x) for shift, c in coeffs.items() if c)
    out = np.asarray(out, dtype=float) * nf**order
    return float(out) if out.ndim == 0 else out


def moment_integral(n, l: int, r: int):
    """``int_0^inf s_{n,l}(t) t^r dt = (l+r)!/l! * n^{-r-1}``.

    Exact when ``n`` is an ``int`` or ``Fraction``.
    """
    if l < 0 or r < 0:
        raise DomainError(f"indices must be nonnegative, got l={l}, r={r}")
    rising = math.perm(l + r, r)
    if isinstance(n, float):
        if n <= 0:
            raise DomainError("n must be positive")
        return rising * n ** (-r - 1)
    n = _as_rational(n, "n")
    if n <= 0:
        raise DomainError("n must be positive")
    return rising / n ** (r + 1)


def cross_integral(m, r: int, n, l: int):
    """``int_0^inf s_{m,r}(t) s_{n,l}(t) dt``.

    Equals ``m^r n^l (r+l)! / ((m+n)^{r+l+1} r! l!)``.
    """
    if r < 0 or l < 0:
        raise DomainError(f"indices must be nonnegative, got r={r}, l={l}")
    binom = math.comb(r + l, r)
    if isinstance(m, float) or isinstance(n, float):
        m, n = float(m), float(n)
        if m <= 0 or n <= 0:
            raise DomainError("scales must be positive")
        return binom * m**r * n**l / (m + n) ** (r + l + 1)
    m = _as_rational(m, "m")
    n = _as_rational(n, "n")
    if m <= 0 or n <= 0:
        raise DomainError("scales must be positive")
    return binom * m**r * n**l / (m + n) ** (r + l + 1)


def bessel_i(j: int, z, tol: float = 1e-16):
    """Modified Bessel function ``I_j(z)`` of integer order by its ascending series.

    Only the series is used, so keep ``z`` moderate (up to about 30).
    """
    nu = abs(int(j))
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("bessel_i is implemented for z >= 0 only")
    half = z / 2.0
    term = half**nu / math.factorial(nu)
    total = term.copy()
    q = half * half
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + nu))
        total = total + term
        if np.all(term <= tol * np.abs(total)) or k > 10_000:
            break
    return float(total) if total.ndim == 0 else total


def _log_weighted_term(mean: float, k: int, d: int) -> float:
    return k * math.log(mean) - mean - math.lgamma(k + 1) + d * math.log(k)


def poisson_tail_bound(mean: float, K: int, weight_degree: int = 0) -> float:
    """Upper bound on ``sum_{k>K} e^{-mean} mean^k / k! * k^d``.

    Bounds the tail by a geometric series using the ratio of consecutive
    terms at ``k = K+1``; the ratio decreases in ``k`` so the bound is safe.
    Returns ``inf`` while the ratio is still >= 1.
    """
    if mean < 0:
        raise DomainError("mean must be nonnegative")
    if mean == 0:
        return 0.0
    k = K + 1
    ratio = mean / (k + 1) * ((k + 1) / k) ** weight_degree
    if ratio >= 1.0:
        return math.inf
    return math.exp(_log_weighted_term(mean, k, weight_degree)) / (1.0 - ratio)


def truncation_index(n, x: float, eps: float, weight_degree: int = 0) -> int:
    """Smallest ``K`` whose weighted Poisson tail bound is below ``eps``.

    The Poisson mean is ``n*x``; the tail is
    ``sum_{k>K} s_{n,k}(x) k^weight_degree``.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    if float(n) <= 0 or x < 0:
        raise DomainError("need n > 0 and x >= 0")
    mean = float(n) * float(x)
    if mean == 0:
        return 0
    K = max(int(mean), 0)
    while poisson_tail_bound(mean, K, weight_degree) >= eps:
        K += 1
    return K
