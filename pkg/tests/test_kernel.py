import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.special import iv

from durrmeyer_lab.errors import DomainError, ExactnessError
from durrmeyer_lab.kernel import (
    GrowthClass,
    OperatorParams,
    basis,
    basis_derivative,
    basis_derivative_order,
    bessel_i,
    cross_integral,
    exact_factorial,
    moment_integral,
    poisson_tail_bound,
    truncation_index,
)


def test_operator_params_coerce_rational():
    p = OperatorParams("3/2", 1)
    assert p.n == Fraction(3, 2) and p.j == 1
    assert OperatorParams(2, -3).j == -3
    with pytest.raises(DomainError):
        OperatorParams(0, 0)
    with pytest.raises(DomainError):
        OperatorParams(-1, 2)


def test_growth_class_validation():
    with pytest.raises(DomainError):
        GrowthClass(-1.0, 1.0)
    with pytest.raises(DomainError):
        GrowthClass(0.0, 0.0)


@pytest.mark.parametrize(
    "n,k,x,expected",
    [(1, 0, 0.0, 1.0), (3, -2, 1.7, 0.0), (1, 1, 1.0, math.exp(-1))],
)
def test_basis_examples(n, k, x, expected):
    assert basis(n, k, x) == pytest.approx(expected, rel=1e-14, abs=0)


def test_basis_large_index_no_overflow():
    v = basis(10, 500, 50.0)
    ref = math.exp(500 * math.log(500) - 500 - math.lgamma(501))
    assert v == pytest.approx(ref, rel=1e-12)


def test_basis_rejects_bad_domain():
    with pytest.raises(DomainError):
        basis(1, 0, -0.1)
    with pytest.raises(DomainError):
        basis(0, 1, 1.0)


@pytest.mark.parametrize("n,k,x,expected", [(1, 0, 0.0, -1.0), (2, 1, 0.0, 2.0), (1, 5, 0.0, 0.0)])
def test_basis_derivative_examples(n, k, x, expected):
    assert basis_derivative(n, k, x) == pytest.approx(expected, abs=1e-15)


def test_basis_derivative_matches_finite_difference():
    h = 1e-6
    xs = np.linspace(h, 5.0, 41)
    for n in (1, 2, 3.5):
        for k in range(21):
            fd = (basis(n, k, xs + h) - basis(n, k, xs - h)) / (2 * h)
            assert np.max(np.abs(fd - basis_derivative(n, k, xs))) < 1e-6


def test_higher_basis_derivative_matches_repeated_first():
    xs = np.linspace(0.05, 4.0, 17)
    h = 1e-4
    for order in (2, 3):
        for k in range(6):
            lower = lambda t: basis_derivative_order(2, k, t, order - 1)
            fd = (lower(xs + h) - lower(xs - h)) / (2 * h)
            assert np.allclose(basis_derivative_order(2, k, xs, order), fd, atol=1e-5)
    assert basis_derivative_order(3, 4, 1.2, 0) == pytest.approx(basis(3, 4, 1.2))


def test_partition_of_unity():
    for n in (1, 2, 5):
        for x in (0.0, 0.3, 2.0, 7.5):
            K = truncation_index(n, x, 1e-13)
            total = basis(n, np.arange(K + 1), x).sum()
            assert abs(total - 1.0) < 1e-12


@pytest.mark.parametrize("n,l,r,expected", [(1, 0, 0, 1), (2, 1, 2, Fraction(3, 4)), (1, 3, 1, 4)])
def test_moment_integral_examples(n, l, r, expected):
    assert moment_integral(n, l, r) == expected


@pytest.mark.parametrize("m,r,n,l,expected", [(1, 0, 1, 0, Fraction(1, 2)), (2, 1, 3, 0, Fraction(2, 25))])
def test_cross_integral_examples(m, r, n, l, expected):
    assert cross_integral(m, r, n, l) == expected


def test_integrals_against_quadrature():
    for n in (1, 2, 3, 5):
        for l in range(9):
            for r in range(9):
                ref, _ = integrate.quad(lambda t: basis(n, l, t) * t**r, 0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
                assert float(moment_integral(n, l, r)) == pytest.approx(ref, rel=1e-10)
    for m in (1, 2, 3, 5):
        for n in (1, 2, 3, 5):
            for r in range(0, 9, 2):
                for l in range(0, 9, 3):
                    ref, _ = integrate.quad(
                        lambda t: basis(m, r, t) * basis(n, l, t), 0, np.inf, epsabs=0, epsrel=1e-13, limit=200
                    )
                    assert float(cross_integral(m, r, n, l)) == pytest.approx(ref, rel=1e-10)


@given(
    st.fractions(min_value=Fraction(1, 10), max_value=10),
    st.integers(0, 10),
    st.fractions(min_value=Fraction(1, 10), max_value=10),
    st.integers(0, 10),
)
def test_cross_integral_symmetry(m, r, n, l):
    assert cross_integral(m, r, n, l) == cross_integral(n, l, m, r)


def test_integral_domain_errors():
    with pytest.raises(DomainError):
        moment_integral(1, -1, 0)
    with pytest.raises(DomainError):
        cross_integral(1, 0, 1, -2)


def test_exact_factorial_limit():
    assert exact_factorial(170) == math.factorial(170)
    with pytest.raises(ExactnessError):
        exact_factorial(171)


@pytest.mark.parametrize("j,z,expected", [(0, 0.0, 1.0), (1, 0.0, 0.0), (0, 2.0, 2.2795853023360673)])
def test_bessel_examples(j, z, expected):
    assert bessel_i(j, z) == pytest.approx(expected, rel=1e-14, abs=1e-300)


def test_bessel_recurrence_and_scipy():
    z = np.linspace(0.5, 10.0, 40)
    for j in range(-5, 6):
        lhs = bessel_i(j - 1, z) - bessel_i(j + 1, z)
        rhs = 2 * j / z * bessel_i(j, z)
        assert np.max(np.abs(lhs - rhs) / np.maximum(np.abs(bessel_i(j - 1, z)), 1e-300)) < 1e-10
        assert np.allclose(bessel_i(j, z), iv(j, z), rtol=1e-13)


def test_truncation_index_examples():
    assert truncation_index(1, 0.0, 1e-12) == 0
    K = truncation_index(4, 2.0, 1e-12)
    assert K >= 8
    ks = np.arange(K + 1, K + 400)
    assert basis(4, ks, 2.0).sum() < 1e-12


@given(st.floats(0.01, 60), st.integers(0, 4))
@settings(max_examples=60, deadline=None)
def test_tail_bound_dominates_direct_sum(mean, d):
    K = truncation_index(1, mean, 1e-9, d)
    ks = np.arange(K + 1, K + 2000)
    direct = float(np.sum(basis(1, ks, mean) * ks.astype(float) ** d))
    assert direct <= poisson_tail_bound(mean, K, d) * (1 + 1e-9)


@given(st.floats(0.0, 40), st.floats(1e-14, 1e-2), st.floats(1.0, 1e6))
@settings(max_examples=60, deadline=None)
def test_truncation_monotone_in_eps(x, eps, factor):
    assert truncation_index(2, x, eps * factor) <= truncation_index(2, x, eps)
