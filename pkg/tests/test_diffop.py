from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from durrmeyer_lab.algebra import ExpPoly, apply_D2_exact, exp_term, monomial
from durrmeyer_lab.diffop import (
    D2l_explicit_exact,
    D2l_factorized_exact,
    D2l_iterated_exact,
    Jet,
    apply_D2,
    apply_D2l_explicit,
    apply_D2l_iterated,
    factorized_form_residual,
    falling_factorial,
)
from durrmeyer_lab.errors import CapabilityError, DomainError, UnsupportedInputError
from durrmeyer_lab.functions import EXPQ, exppoly_spec, monomial_spec


@pytest.mark.parametrize("a,k,expected", [(3, 2, 6), (5, 0, 1), (-1, 2, 2), (4, 5, 0)])
def test_falling_factorial(a, k, expected):
    assert falling_factorial(a, k) == expected


def test_falling_factorial_rejects_negative_steps():
    with pytest.raises(DomainError):
        falling_factorial(3, -1)


def test_jet_arithmetic_exact():
    x0 = Fraction(1, 2)
    f = Jet.from_exppoly(monomial(2), x0, 4)
    assert f.coeffs == (Fraction(1, 4), Fraction(1), Fraction(1), 0, 0)
    g = Jet.from_exppoly(monomial(1), x0, 4)
    assert (g * g).coeffs == f.coeffs
    assert (f - g * g).coeffs == (0,) * 5
    assert f.derivative().coeffs == Jet.from_exppoly(monomial(1, 2), x0, 3).coeffs
    assert g.times_x().coeffs == f.coeffs
    assert f.derivative_value(2) == 2


def test_jet_errors():
    j = Jet(0.0, (1.0, 2.0))
    with pytest.raises(CapabilityError):
        j.derivative_value(2)
    with pytest.raises(CapabilityError):
        apply_D2(0, j)
    with pytest.raises(DomainError):
        j + Jet(1.0, (1.0, 2.0))
    with pytest.raises(DomainError):
        Jet(0.0, ())


def test_apply_D2_examples():
    for j in range(0, 6):
        for x0 in (Fraction(0), Fraction(3, 2), Fraction(4)):
            assert apply_D2(j, Jet.from_exppoly(monomial(j), x0, 2)) == 0
    assert apply_D2(1, Jet.from_exppoly(monomial(1), Fraction(2), 2)) == 0
    assert apply_D2(0, Jet.from_exppoly(monomial(2), Fraction(3), 2)) == 12


def test_apply_D2l_explicit_examples():
    for j in range(-3, 4):
        jet = Jet.from_exppoly(monomial(5), Fraction(7, 3), 8)
        assert apply_D2l_explicit(j, 1, jet) == apply_D2(j, jet)
    assert apply_D2l_explicit(0, 2, Jet.from_exppoly(monomial(2), Fraction(5), 4)) == 4
    for j in range(0, 5):
        for l in range(1, 5):
            assert apply_D2l_explicit(j, l, Jet.from_exppoly(monomial(j), Fraction(3, 2), 2 * l)) == 0
    jet = Jet.from_exppoly(monomial(3), Fraction(2), 3)
    assert apply_D2l_explicit(0, 0, jet) == 8
    with pytest.raises(CapabilityError):
        apply_D2l_explicit(0, 2, jet)


def test_apply_D2l_iterated_examples():
    jet = Jet.from_exppoly(monomial(5), Fraction(3, 4), 6)
    assert apply_D2l_iterated(2, 3, jet) == apply_D2l_explicit(2, 3, jet)
    assert isinstance(apply_D2l_iterated(2, 3, jet), Fraction)
    for j in range(-3, 4):
        assert apply_D2l_iterated(j, 1, jet) == apply_D2(j, jet)
        assert apply_D2l_iterated(j, 2, Jet.from_exppoly(monomial(0), Fraction(1), 4)) == 0


def test_explicit_equals_iterated_exactly():
    for j in range(-3, 4):
        for l in range(1, 5):
            for r in range(11):
                for x0 in (Fraction(0), Fraction(1, 2), Fraction(2)):
                    jet = Jet.from_exppoly(monomial(r), x0, 2 * l)
                    assert apply_D2l_explicit(j, l, jet) == apply_D2l_iterated(j, l, jet)


def test_exact_routes_agree_on_exppoly():
    for j in range(-3, 4):
        for l in range(1, 5):
            for r in range(11):
                f = monomial(r)
                ex = D2l_explicit_exact(j, l, f)
                assert ex == D2l_iterated_exact(j, l, f)
                assert factorized_form_residual(j, l, f).is_zero()
            g = EXPQ + exp_term(Fraction(1, 8), a=1)
            assert D2l_explicit_exact(j, l, g) == D2l_iterated_exact(j, l, g)


@pytest.mark.parametrize("j,l,r", [(0, 1, 2), (2, 2, 4), (1, 1, 1)])
def test_factorized_examples(j, l, r):
    assert factorized_form_residual(j, l, monomial(r)) == ExpPoly()


def test_factorized_cancels_intermediate_negative_powers():
    # for j > l the inner factor x^{l-j} D^l f has negative powers
    f = monomial(7) + EXPQ
    for j, l in ((3, 1), (5, 2), (4, 3)):
        inner = f.derivative(l).shift_power(l - j)
        assert inner.has_negative_powers()
        out = D2l_factorized_exact(j, l, f)
        assert not out.has_negative_powers()
        assert out == D2l_explicit_exact(j, l, f)


def test_factorized_reports_surviving_negative_powers():
    with pytest.raises(UnsupportedInputError):
        D2l_factorized_exact(0, 1, monomial(-1))


def test_D2_exact_matches_first_power():
    for j in range(-3, 4):
        f = monomial(6) + EXPQ
        assert D2l_explicit_exact(j, 1, f) == apply_D2_exact(j, f)
        assert D2l_explicit_exact(j, 0, f) == f


@given(st.integers(-3, 3), st.integers(1, 4), st.lists(st.fractions(-5, 5), min_size=1, max_size=9), st.fractions(0, 5))
def test_explicit_iterated_property(j, l, coeffs, x0):
    jet = Jet.from_exppoly(ExpPoly.polynomial(coeffs), x0, 2 * l)
    assert apply_D2l_explicit(j, l, jet) == apply_D2l_iterated(j, l, jet)


def test_jet_from_function_matches_finite_differences():
    h = 1e-4
    for spec in (exppoly_spec(EXPQ), monomial_spec(3)):
        for j in (-1, 0, 2):
            for x0 in (0.5, 1.5, 3.0):
                jet = Jet.from_function(spec, x0, 2)
                xs = np.array([x0 - h, x0, x0 + h])
                v = spec.values(xs)
                d1 = (v[2] - v[0]) / (2 * h)
                d2 = (v[2] - 2 * v[1] + v[0]) / h**2
                assert apply_D2(j, jet) == pytest.approx((1 - j) * d1 + x0 * d2, abs=1e-5)
