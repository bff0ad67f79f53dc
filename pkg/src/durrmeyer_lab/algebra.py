"""Exact calculus on finite sums ``c * x^a * e^{b x}`` with rational ``c``, ``b``.

The class is closed under the operators ``S_{n,j}`` (as long as every
exponential rate ``b`` stays below ``n``), under differentiation and under
multiplication, so identity checks reduce to structural equality of
:class:`ExpPoly` values.

Powers ``a`` may be negative (a Laurent extension) so that factorized
differential operators can be expanded; the operators themselves refuse
such terms.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, ExactnessError, UnsupportedInputError
from .kernel import FACTORIAL_LIMIT, OperatorParams, exact_factorial

__all__ = [
    "ExpPoly",
    "monomial",
    "exp_term",
    "apply_operator_exact",
    "differentiate",
    "evaluate",
    "evaluate_exact",
    "apply_D2_exact",
]


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value)
    return Fraction(value)


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class ExpPoly:
    """Immutable canonical sum of terms ``c x^a e^{b x}``.

    Terms are stored as a tuple of ``(a, b, c)`` sorted by ``(b, a)`` with
    unique ``(a, b)`` pairs and nonzero ``c``; two values are equal iff
    they represent the same function.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | Iterable = ()):
        acc: dict[tuple[int, Fraction], Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for item in items:
            if isinstance(terms, Mapping):
                (a, b), c = item
            else:
                a, b, c = item
            a = int(a)
            key = (a, _frac(b))
            acc[key] = acc.get(key, Fraction(0)) + _frac(c)
        self._terms = tuple(
            (a, b, c) for (a, b), c in sorted(acc.items(), key=lambda kv: (kv[0][1], kv[0][0])) if c != 0
        )
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def zero(cls) -> "ExpPoly":
        return cls()

    @classmethod
    def polynomial(cls, coeffs: Iterable) -> "ExpPoly":
        """Polynomial from ascending coefficients ``[c0, c1, ...]``."""
        return cls((a, 0, c) for a, c in enumerate(coeffs))

    # structure -------------------------------------------------------------

    @property
    def terms(self) -> tuple:
        return self._terms

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_polynomial(self) -> bool:
        return all(b == 0 and a >= 0 for a, b, _ in self._terms)

    def has_negative_powers(self) -> bool:
        return any(a < 0 for a, _, _ in self._terms)

    def polynomial_part(self) -> "ExpPoly":
        return ExpPoly((a, b, c) for a, b, c in self._terms if b == 0)

    def exponential_part(self) -> "ExpPoly":
        return ExpPoly((a, b, c) for a, b, c in self._terms if b != 0)

    def degree(self) -> int:
        """Largest power among the terms, ``-1`` for the zero function."""
        return max((a for a, _, _ in self._terms), default=-1)

    def rates(self) -> tuple:
        return tuple(sorted({b for _, b, _ in self._terms}))

    def max_rate(self) -> Fraction:
        """Largest exponential rate, or 0 for polynomials and zero."""
        return max((b for _, b, _ in self._terms), default=Fraction(0))

    def coefficient(self, a: int, b=0) -> Fraction:
        b = _frac(b)
        for ta, tb, c in self._terms:
            if ta == a and tb == b:
                return c
        return Fraction(0)

    def value_at_zero(self) -> Fraction:
        """Exact ``f(0)``; only defined without negative powers."""
        if self.has_negative_powers():
            raise UnsupportedInputError("f(0) undefined with negative powers")
        return sum((c for a, _, c in self._terms if a == 0), Fraction(0))

    # arithmetic ------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ExpPoly):
            other = ExpPoly([(0, 0, other)])
        return ExpPoly(list(self._terms) + list(other._terms))

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly((a, b, -c) for a, b, c in self._terms)

    def __sub__(self, other):
        if not isinstance(other, ExpPoly):
            other = ExpPoly([(0, 0, other)])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            return ExpPoly(
                (a1 + a2, b1 + b2, c1 * c2)
                for a1, b1, c1 in self._terms
                for a2, b2, c2 in other._terms
            )
        s = _frac(other)
        return ExpPoly((a, b, c * s) for a, b, c in self._terms)

    __rmul__ = __mul__

    def shift_power(self, k: int) -> "ExpPoly":
        """Multiply by ``x^k`` (``k`` may be negative)."""
        return ExpPoly((a + k, b, c) for a, b, c in self._terms)

    def __eq__(self, other):
        if isinstance(other, ExpPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == ExpPoly([(0, 0, other)])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    # calculus and evaluation ---------------------------------------------

    def derivative(self, order: int = 1) -> "ExpPoly":
        f = self
        for _ in range(order):
            f = differentiate(f)
        return f

    def __call__(self, x):
        return evaluate(self, x)

    # serialization --------------------------------------------------------

    def to_json_obj(self) -> list:
        """Canonical JSON form: list of ``{"c": "p/q", "a": int, "b": "p/q"}``."""
        return [{"c": _fmt_frac(c), "a": a, "b": _fmt_frac(b)} for a, b, c in self._terms]

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj) -> "ExpPoly":
        return cls((int(t["a"]), Fraction(t["b"]), Fraction(t["c"])) for t in obj)

    @classmethod
    def from_json(cls, text: str) -> "ExpPoly":
        return cls.from_json_obj(json.loads(text))

    def __repr__(self):
        return f"ExpPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        # highest powers first within each rate reads more naturally
        for a, b, c in sorted(self._terms, key=lambda t: (t[1] != 0, t[1], -t[0])):
            mag = abs(c)
            factors = []
            if a != 0:
                factors.append("x" if a == 1 else f"x^{a}")
            if b != 0:
                factors.append(f"exp({_fmt_frac(b)}*x)")
            if mag != 1 or not factors:
                factors.insert(0, _fmt_frac(mag))
            body = "*".join(factors)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)


def monomial(r: int, c=1) -> ExpPoly:
    """``c * x^r``."""
    return ExpPoly([(r, 0, c)])


def exp_term(b, a: int = 0, c=1) -> ExpPoly:
    """``c * x^a * e^{b x}``."""
    return ExpPoly([(a, b, c)])


def differentiate(f: ExpPoly) -> ExpPoly:
    out = []
    for a, b, c in f.terms:
        if a != 0:
            out.append((a - 1, b, c * a))
        if b != 0:
            out.append((a, b, c * b))
    return ExpPoly(out)


def evaluate(f: ExpPoly, x):
    """Floating-point value of ``f`` at ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    total = np.zeros_like(xa)
    with np.errstate(over="ignore"):
        for a, b, c in f.terms:
            term = float(c) * np.power(xa, a) if a else np.full_like(xa, float(c))
            if b != 0:
                term = term * np.exp(float(b) * xa)
            total = total + term
    return float(total) if total.ndim == 0 else total


def evaluate_exact(f: ExpPoly, x) -> list[tuple[Fraction, Fraction]]:
    """Exact value at rational ``x`` as ``[(coefficient, exponent), ...]``.

    The value is ``sum coefficient * e^{exponent}``; pairs are merged by
    exponent, sorted, and zero coefficients dropped.
    """
    x = _frac(x)
    acc: dict[Fraction, Fraction] = {}
    for a, b, c in f.terms:
        if x == 0 and a < 0:
            raise DomainError("negative power evaluated at x = 0")
        e = b * x
        acc[e] = acc.get(e, Fraction(0)) + c * x**a
    return sorted(((c, e) for e, c in acc.items() if c != 0), key=lambda t: t[1])


def _falling_factorial_coeffs(values: list[int]) -> list[Fraction]:
    # Newton forward differences: P(k) = sum_q Delta^q P(0)/q! * k^(q falling)
    diffs = list(values)
    out = []
    for q in range(len(values)):
        out.append(Fraction(diffs[0], math.factorial(q)))
        diffs = [diffs[i + 1] - diffs[i] for i in range(len(diffs) - 1)]
    return out


def _apply_term(n: Fraction, j: int, a: int, b: Fraction, c: Fraction) -> list:
    lam = n - b
    rho = n / lam
    zeta = n * n / lam
    beta = n * b / lam
    # P(k) = (k-j+a)!/(k-j)!, the inner moment of index k-j against t^a
    P = [math.prod(k - j + i for i in range(1, a + 1)) for k in range(max(a + 1, j))]
    cq = _falling_factorial_coeffs(P[: a + 1])
    scale = c * rho ** (1 - j) / lam**a
    out = [(q, beta, scale * cq[q] * zeta**q) for q in range(a + 1)]
    for k in range(max(j, 0)):
        if P[k]:
            out.append((k, -n, -scale * P[k] * zeta**k / exact_factorial(k)))
    return out


def apply_operator_exact(params: OperatorParams, f: ExpPoly) -> ExpPoly:
    """Exact image ``S_{n,j} f`` for ``f`` in the exp-poly class.

    For a term ``c t^a e^{bt}`` with ``b < n`` put ``lam = n - b``. The
    inner integral of index ``m = k - j`` is ``(n/lam)^{m+1} lam^{-a}
    (m+a)!/m!``, a polynomial in ``k`` times a geometric factor; expanding
    that polynomial in falling factorials of ``k`` sums the outer Poisson
    series in closed form. Indices ``k < j`` are subtracted back, and the
    boundary term ``f(0) sum_{k<j} s_{n,k}`` is added.
    """
    if not isinstance(f, ExpPoly):
        raise UnsupportedInputError("exact engine needs an ExpPoly input")
    n, j = params.n, params.j
    if j > FACTORIAL_LIMIT + 1:
        raise ExactnessError(f"shift j={j} exceeds the exact factorial limit")
    out = []
    for a, b, c in f.terms:
        if a < 0:
            raise UnsupportedInputError("operator applied to a negative power of t")
        if a > FACTORIAL_LIMIT:
            raise ExactnessError(f"degree {a} exceeds the exact factorial limit")
        if b >= n:
            raise DomainError(f"rate b={b} not below scale n={n}: integrals diverge")
        out.extend(_apply_term(n, j, a, b, c))
    f0 = f.value_at_zero()
    if f0 and j > 0:
        out.extend((k, -n, f0 * n**k / exact_factorial(k)) for k in range(j))
    return ExpPoly(out)


def apply_D2_exact(j: int, f: ExpPoly) -> ExpPoly:
    """``(1-j) f' + x f''``."""
    d1 = differentiate(f)
    return d1 * (1 - j) + differentiate(d1).shift_power(1)
