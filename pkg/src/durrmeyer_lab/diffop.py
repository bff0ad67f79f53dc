"""The differential operators ``D_j^2 = (1-j) D + x D^2`` and their powers.

Three routes to ``D_j^{2l}`` are provided and compared in the test-suite:

* the explicit sum ``sum_i C(l,i) (l-j)^(l-i falling) x^i D^{l+i}``,
* ``l`` successive applications of ``D_j^2`` on a truncated Taylor jet,
* the factorized form ``x^j D^l (x^{l-j} D^l f)`` expanded in the Laurent
  extension of :class:`~durrmeyer_lab.algebra.ExpPoly`.

Jets built from polynomials at rational points carry ``Fraction``
coefficients, so the first two routes can be compared exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import ExpPoly, apply_D2_exact, differentiate, evaluate
from .errors import CapabilityError, DomainError, UnsupportedInputError
from .operator import FunctionSpec

__all__ = [
    "Jet",
    "falling_factorial",
    "apply_D2",
    "apply_D2l_explicit",
    "apply_D2l_iterated",
    "D2l_explicit_exact",
    "D2l_iterated_exact",
    "D2l_factorized_exact",
    "factorized_form_residual",
]


def falling_factorial(a: int, k: int) -> int:
    """``a (a-1) ... (a-k+1)``; 1 for ``k = 0``."""
    if k < 0:
        raise DomainError("falling factorial needs k >= 0")
    out = 1
    for i in range(k):
        out *= a - i
    return out


@dataclass(frozen=True)
class Jet:
    """Taylor data ``coeffs[i] = f^(i)(x0) / i!`` truncated at order ``len(coeffs)-1``."""

    x0: object
    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise DomainError("a jet needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def derivative_value(self, i: int):
        """``f^(i)(x0)``."""
        if i > self.order:
            raise CapabilityError(f"jet of order {self.order} has no derivative {i}")
        return self.coeffs[i] * math.factorial(i)

    @property
    def value(self):
        return self.coeffs[0]

    def _same_point(self, other: "Jet"):
        if other.x0 != self.x0:
            raise DomainError("jets expanded at different points")

    def __add__(self, other: "Jet") -> "Jet":
        self._same_point(other)
        L = min(self.order, other.order)
        return Jet(self.x0, tuple(a + b for a, b in zip(self.coeffs[: L + 1], other.coeffs[: L + 1])))

    def __sub__(self, other: "Jet") -> "Jet":
        return self + other.scale(-1)

    def scale(self, s) -> "Jet":
        return Jet(self.x0, tuple(s * c for c in self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        self._same_point(other)
        L = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        return Jet(self.x0, tuple(sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(L + 1)))

    __rmul__ = __mul__

    def derivative(self) -> "Jet":
        """Jet of ``f'``; the order drops by one."""
        if self.order < 1:
            raise CapabilityError("cannot differentiate a jet of order 0")
        return Jet(self.x0, tuple((i + 1) * self.coeffs[i + 1] for i in range(self.order)))

    def times_x(self) -> "Jet":
        """Jet of ``x f(x)`` (``x = x0 + h``)."""
        c = self.coeffs
        return Jet(self.x0, tuple(self.x0 * c[i] + (c[i - 1] if i else 0) for i in range(len(c))))

    @classmethod
    def from_exppoly(cls, f: ExpPoly, x0, order: int) -> "Jet":
        """Exact for polynomials at rational ``x0``; floating otherwise."""
        exact = f.is_polynomial() and isinstance(x0, (int, Fraction))
        coeffs = []
        g = f
        for i in range(order + 1):
            if exact:
                x = Fraction(x0)
                v = sum((c * x**a for a, _, c in g.terms), Fraction(0))
                coeffs.append(v / math.factorial(i))
            else:
                coeffs.append(evaluate(g, float(x0)) / math.factorial(i))
            g = differentiate(g)
        return cls(Fraction(x0) if exact else float(x0), tuple(coeffs))

    @classmethod
    def from_function(cls, f: FunctionSpec, x0: float, order: int) -> "Jet":
        """Floating jet from a spec's derivative oracle."""
        x = np.array([float(x0)])
        coeffs = [float(f.derivative(i, x)[0]) / math.factorial(i) for i in range(order + 1)]
        return cls(float(x0), tuple(coeffs))


def _need(jet: Jet, order: int):
    if jet.order < order:
        raise CapabilityError(f"need a jet of order >= {order}, got {jet.order}")


def apply_D2(j: int, f: Jet):
    """``(1-j) f'(x0) + x0 f''(x0)``."""
    _need(f, 2)
    return (1 - j) * f.derivative_value(1) + f.x0 * f.derivative_value(2)


def apply_D2l_explicit(j: int, l: int, f: Jet):
    """Explicit sum for ``D_j^{2l}`` at ``x0``; ``l = 0`` is the identity."""
    if l < 0:
        raise DomainError("l must be nonnegative")
    if l == 0:
        return f.value
    _need(f, 2 * l)
    x0 = f.x0
    return sum(
        math.comb(l, i) * falling_factorial(l - j, l - i) * x0**i * f.derivative_value(l + i)
        for i in range(l + 1)
    )


def _D2_jet(j: int, f: Jet) -> Jet:
    d1 = f.derivative()
    d2 = d1.derivative()
    trimmed = Jet(f.x0, d1.coeffs[: d2.order + 1])
    return trimmed.scale(1 - j) + d2.times_x()


def apply_D2l_iterated(j: int, l: int, f: Jet):
    """``D_j^2`` applied ``l`` times on the jet; each pass consumes two orders."""
    if l < 0:
        raise DomainError("l must be nonnegative")
    _need(f, 2 * l)
    g = f
    for _ in range(l):
        g = _D2_jet(j, g)
    return g.value


def D2l_explicit_exact(j: int, l: int, f: ExpPoly) -> ExpPoly:
    """Explicit sum applied to an :class:`ExpPoly`."""
    if l == 0:
        return f
    derivs = [f]
    for _ in range(2 * l):
        derivs.append(differentiate(derivs[-1]))
    out = ExpPoly()
    for i in range(l + 1):
        coef = math.comb(l, i) * falling_factorial(l - j, l - i)
        if coef:
            out = out + derivs[l + i].shift_power(i) * coef
    return out


def D2l_iterated_exact(j: int, l: int, f: ExpPoly) -> ExpPoly:
    g = f
    for _ in range(l):
        g = apply_D2_exact(j, g)
    return g


def D2l_factorized_exact(j: int, l: int, f: ExpPoly) -> ExpPoly:
    """``x^j D^l (x^{l-j} D^l f)`` in the Laurent extension.

    Raises :class:`UnsupportedInputError` when negative powers survive
    the final multiplication by ``x^j``.
    """
    if l == 0:
        return f
    inner = f.derivative(l).shift_power(l - j)
    out = inner.derivative(l).shift_power(j)
    if out.has_negative_powers():
        raise UnsupportedInputError(
            f"factorized form left negative powers of x for j={j}, l={l}"
        )
    return out


def factorized_form_residual(j: int, l: int, f: ExpPoly) -> ExpPoly:
    """Exact difference between the factorized and explicit forms (the zero ExpPoly)."""
    return D2l_factorized_exact(j, l, f) - D2l_explicit_exact(j, l, f)
