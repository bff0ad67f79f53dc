"""Generalized Szasz-Mirakjan-Durrmeyer operators ``S_{n,j}``, exact and numeric.

The exact engine works on exp-poly functions (:class:`ExpPoly`); the
numeric engine evaluates any :class:`FunctionSpec` with a declared growth
bound and returns an error estimate with every value.
"""

from .algebra import ExpPoly, apply_D2_exact, apply_operator_exact, evaluate, exp_term, monomial
from .asymptotics import (
    OrderEstimate,
    eigen_asymptotic_residual,
    expansion_term_table,
    fit_order,
    voronovskaja_residual,
)
from .diffop import Jet, apply_D2, apply_D2l_explicit, apply_D2l_iterated
from .errors import (
    CapabilityError,
    DivergenceError,
    DomainError,
    DurrmeyerError,
    ExactnessError,
    TruncationError,
    UnsupportedInputError,
)
from .functions import builtin, exppoly_spec, monomial_spec
from .kernel import GrowthClass, OperatorParams, basis, bessel_i, cross_integral, moment_integral
from .operator import EvalSettings, Evaluation, FunctionSpec, apply, compose_numeric, image
from .semigroup import (
    IdentityCase,
    commutativity_residual,
    composition_residual,
    diff_commute_residual,
    iterate_residual,
    iterative_combination_residual,
    scale_chain_residual,
)
from .spectral import EigenParams, eigenfunction, eigenfunction_bessel, operator_eigen_residual

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
