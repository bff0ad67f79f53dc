"""Built-in test functions shared by the verification suites and the CLI.

Names: ``e0``, ``e1``, ... (monomials), ``expq`` (``e^{t/4}``), ``texp``
(``t e^{t/8}``) and ``gjp:<j>:<p>`` (operator eigenfunctions).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .algebra import ExpPoly, evaluate, exp_term, monomial
from .errors import DomainError
from .kernel import GrowthClass
from .operator import FunctionSpec

__all__ = ["Builtin", "exppoly_spec", "monomial_spec", "builtin", "EXPQ", "TEXP"]

EXPQ = exp_term(Fraction(1, 4))
TEXP = exp_term(Fraction(1, 8), a=1)


def exppoly_spec(f: ExpPoly, label: str = "f", max_derivative: int = 12) -> FunctionSpec:
    """Numeric view of an :class:`ExpPoly` with exact derivative oracle.

    Growth: ``K = sum |c|``, ``A = max(0, max rate)``, degree ``max a``.
    """
    if f.has_negative_powers():
        raise DomainError("negative powers are not functions on [0, inf)")

    @lru_cache(maxsize=None)
    def deriv(order):
        return f.derivative(order)

    K = float(sum(abs(c) for _, _, c in f.terms)) or 1.0
    return FunctionSpec(
        eval=lambda t: evaluate(f, t),
        growth=GrowthClass(float(max(f.max_rate(), 0)), K),
        derivatives=lambda order, t: evaluate(deriv(order), t),
        max_derivative=max_derivative,
        label=label,
        poly_degree=max(f.degree(), 0),
    )


def monomial_spec(r: int) -> FunctionSpec:
    return exppoly_spec(monomial(r), label=f"e{r}")


@dataclass(frozen=True)
class Builtin:
    name: str
    spec: FunctionSpec
    exact: Optional[ExpPoly] = None


def builtin(name: str) -> Builtin:
    """Look up a built-in function by CLI name."""
    from .spectral import EigenParams, eigenfunction_spec

    key = name.strip()
    if key.startswith("e") and key[1:].isdigit():
        r = int(key[1:])
        f = monomial(r)
        return Builtin(key, exppoly_spec(f, key), f)
    if key == "expq":
        return Builtin(key, exppoly_spec(EXPQ, key), EXPQ)
    if key == "texp":
        return Builtin(key, exppoly_spec(TEXP, key), TEXP)
    if key.startswith("gjp:"):
        try:
            _, js, ps = key.split(":")
            ep = EigenParams(int(js), float(ps))
        except ValueError as exc:
            raise DomainError(f"malformed eigenfunction name {name!r}; use gjp:<j>:<p>") from exc
        return Builtin(key, eigenfunction_spec(ep))
    raise DomainError(f"unknown function {name!r}; expected e<r>, expq, texp or gjp:<j>:<p>")


def sample(f, t) -> np.ndarray:
    """Evaluate either an ExpPoly or a FunctionSpec on an array."""
    if isinstance(f, ExpPoly):
        return np.asarray(evaluate(f, np.asarray(t, dtype=float)))
    return f.values(t)
