import json
import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from durrmeyer_lab.algebra import (
    ExpPoly,
    apply_D2_exact,
    apply_operator_exact,
    differentiate,
    evaluate,
    evaluate_exact,
    exp_term,
    monomial,
)
from durrmeyer_lab.errors import DomainError, ExactnessError, UnsupportedInputError
from durrmeyer_lab.kernel import OperatorParams

mp.mp.dps = 40


def series_oracle(n, j, f: ExpPoly, x, terms=None):
    """Direct summation of the defining series with closed-form inner integrals (mpmath)."""
    n = mp.mpf(n.numerator) / n.denominator if isinstance(n, Fraction) else mp.mpf(n)
    x = mp.mpf(x)
    if terms is None:
        mean = float(n * x)
        terms = int(mean + 25 * math.sqrt(mean + 1) + 60) + abs(j)

    def s(k):
        if k < 0:
            return mp.mpf(0)
        return (n * x) ** k * mp.e ** (-n * x) / mp.factorial(k)

    def inner(m):
        # n * int s_{n,m}(t) t^a e^{bt} dt
        tot = mp.mpf(0)
        for a, b, c in f.terms:
            bb = mp.mpf(b.numerator) / b.denominator
            cc = mp.mpf(c.numerator) / c.denominator
            tot += cc * n ** (m + 1) / mp.factorial(m) * mp.factorial(m + a) / (n - bb) ** (m + a + 1)
        return tot

    f0 = sum((mp.mpf(c.numerator) / c.denominator for a, _, c in f.terms if a == 0), mp.mpf(0))
    total = f0 * sum((s(k) for k in range(max(j, 0))), mp.mpf(0))
    for k in range(max(j, 0), terms):
        total += s(k) * inner(k - j)
    return total


def test_canonical_form_and_equality():
    f = ExpPoly([(1, 0, 1), (0, 0, 2), (1, 0, -1), (2, -1, 3)])
    assert f.terms == ((2, Fraction(-1), Fraction(3)), (0, Fraction(0), Fraction(2)))
    assert ExpPoly([(0, 0, 0)]).is_zero()
    assert monomial(0) == 1
    assert str(monomial(1) + Fraction(1, 2)) == "x + 1/2"
    assert str(ExpPoly()) == "0"


def test_arithmetic():
    x = monomial(1)
    assert (x + 1) * (x - 1) == monomial(2) - 1
    assert (x * 3 - x * 3).is_zero()
    assert -(x) + x == ExpPoly()
    assert (exp_term(2) * exp_term(-2)) == 1
    assert x.shift_power(2) == monomial(3)


@pytest.mark.parametrize(
    "f,expected",
    [
        (monomial(0), ExpPoly()),
        (monomial(3), monomial(2, 3)),
        (exp_term(-1, a=1), exp_term(-1) - exp_term(-1, a=1)),
    ],
)
def test_differentiate_examples(f, expected):
    assert differentiate(f) == expected


def test_evaluate_examples():
    assert evaluate(monomial(0), 7.3) == 1.0
    assert evaluate(monomial(2), 3.0) == 9.0
    assert evaluate(exp_term(-2), 1.0) == pytest.approx(0.1353352832366127, rel=1e-15)
    assert np.allclose(evaluate(monomial(2), np.array([1.0, 2.0])), [1.0, 4.0])


def test_evaluate_exact_structure():
    f = monomial(2) + exp_term(-2, a=1, c=3)
    assert evaluate_exact(f, Fraction(1, 2)) == [(Fraction(3, 2), Fraction(-1)), (Fraction(1, 4), Fraction(0))]


def test_json_roundtrip():
    f = monomial(3, Fraction(-2, 7)) + exp_term(Fraction(1, 4), a=2, c=5)
    text = f.to_json()
    assert ExpPoly.from_json(text) == f
    obj = json.loads(text)
    assert obj[0] == {"c": "-2/7", "a": 3, "b": "0"}


@pytest.mark.parametrize("n", [1, 2, 5])
@pytest.mark.parametrize("j", [1, 2, 3, 4, 5])
def test_preserves_e0_and_ej(n, j):
    p = OperatorParams(n, j)
    assert apply_operator_exact(p, monomial(0)) == monomial(0)
    assert apply_operator_exact(p, monomial(j)) == monomial(j)


def test_documented_images():
    for n in (1, 2, Fraction(7, 3)):
        n = Fraction(n)
        assert apply_operator_exact(OperatorParams(n, 0), monomial(1)) == monomial(1) + 1 / n
        assert apply_operator_exact(OperatorParams(n, 1), monomial(2)) == monomial(2) + monomial(1, 2 / n)


@pytest.mark.parametrize("j", range(-3, 5))
@pytest.mark.parametrize("r", range(0, 7))
def test_monomial_images_against_series(j, r):
    n = Fraction(3)
    img = apply_operator_exact(OperatorParams(n, j), monomial(r))
    for x in np.linspace(0.0, 3.0, 20):
        ref = series_oracle(n, j, monomial(r), x)
        assert abs(evaluate(img, x) - float(ref)) <= 1e-12 * (1 + abs(float(ref)))


@pytest.mark.parametrize("j", [-2, 0, 1, 3])
def test_exponential_images_against_series(j):
    n = Fraction(4)
    for f in (exp_term(Fraction(1, 4)), exp_term(Fraction(1, 8), a=1), exp_term(-1, a=2, c=3) + monomial(1)):
        img = apply_operator_exact(OperatorParams(n, j), f)
        for x in (0.0, 0.4, 1.3, 2.5):
            ref = series_oracle(n, j, f, x)
            assert abs(evaluate(img, x) - float(ref)) <= 1e-12 * (1 + abs(float(ref)))


def test_pure_exponential_closed_form_j0():
    n, A = Fraction(5), Fraction(1, 4)
    img = apply_operator_exact(OperatorParams(n, 0), exp_term(A))
    assert img == exp_term(A * n / (n - A), c=n / (n - A))


@given(st.integers(-3, 6), st.integers(0, 8), st.fractions(min_value=Fraction(1, 3), max_value=9))
@settings(max_examples=80, deadline=None)
def test_degree_preserved(j, r, n):
    img = apply_operator_exact(OperatorParams(n, j), monomial(r))
    assert img.polynomial_part().degree() == r
    assert img.coefficient(r) == 1


@given(st.integers(1, 6), st.lists(st.fractions(-5, 5), min_size=1, max_size=6), st.integers(1, 8))
@settings(max_examples=60, deadline=None)
def test_endpoint_interpolation(j, coeffs, n):
    f = ExpPoly.polynomial(coeffs)
    img = apply_operator_exact(OperatorParams(n, j), f)
    assert img.value_at_zero() == f.value_at_zero()


def test_negative_j_gives_pure_polynomial():
    for j in (-1, -3):
        assert apply_operator_exact(OperatorParams(2, j), monomial(4)).is_polynomial()


def test_exact_engine_errors():
    with pytest.raises(UnsupportedInputError):
        apply_operator_exact(OperatorParams(2, 0), monomial(-1))
    with pytest.raises(ExactnessError):
        apply_operator_exact(OperatorParams(2, 0), monomial(171))
    with pytest.raises(DomainError):
        apply_operator_exact(OperatorParams(2, 0), exp_term(2))
    with pytest.raises(UnsupportedInputError):
        apply_operator_exact(OperatorParams(2, 0), [1, 2])


def test_D2_examples():
    for j in range(0, 6):
        assert apply_D2_exact(j, monomial(j)).is_zero()
        assert apply_D2_exact(j, monomial(0)).is_zero()
    assert apply_D2_exact(0, monomial(1)) == monomial(0)


@given(st.integers(1, 6), st.fractions(-9, 9), st.fractions(-9, 9))
def test_D2_kernel(j, c0, cj):
    assert apply_D2_exact(j, monomial(0, c0) + monomial(j, cj)).is_zero()


def test_D2_monomial_rule():
    for j in range(-3, 4):
        for r in range(1, 9):
            assert apply_D2_exact(j, monomial(r)) == monomial(r - 1, r * (r - j))
