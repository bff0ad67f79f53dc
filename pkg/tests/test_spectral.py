import math

import mpmath as mp
import numpy as np
import pytest
from scipy.special import iv

from durrmeyer_lab.errors import DomainError
from durrmeyer_lab.kernel import OperatorParams
from durrmeyer_lab.operator import apply, compose_numeric
from durrmeyer_lab.spectral import (
    EIGEN_GROWTH_A,
    EigenParams,
    diffop_eigen_residual,
    eigenfunction,
    eigenfunction_bessel,
    eigenfunction_closed_form,
    eigenfunction_derivative,
    eigenfunction_spec,
    operator_eigen_residual,
    remark_bessel_form,
)

mp.mp.dps = 40


def series_mp(j, p, x, order=0):
    """High-precision g_{j,p}^{(order)} from the defining series."""
    x = mp.mpf(x)
    p = mp.mpf(p)
    total = mp.mpf(0)
    for m in range(max(0, -j), 400):
        e = m + j
        if e - order < 0:
            continue
        total += p**m * mp.ff(e, order) * x ** (e - order) / (mp.factorial(m) * mp.factorial(e))
    return total


def test_eigenfunction_examples():
    assert eigenfunction(EigenParams(2, 0), 3.0) == pytest.approx(4.5, rel=1e-15)
    assert eigenfunction(EigenParams(0, 1), 1.0) == pytest.approx(iv(0, 2.0), rel=1e-14)
    # the m = 1 term of g_{-1,1} is x^0
    assert eigenfunction(EigenParams(-1, 1), 0.0) == 1.0
    assert eigenfunction(EigenParams(-2, 1), 0.0) == 0.5


def test_series_against_high_precision():
    for j in range(-3, 4):
        for p in (-2.0, -0.5, 1.0, 5.0):
            for x in (0.0, 0.3, 2.0, 9.0):
                ref = float(series_mp(j, p, x))
                # alternating series for p < 0: rounding scales with the sum of |terms|
                mass = float(series_mp(j, abs(p), x))
                got = eigenfunction(EigenParams(j, p), x)
                assert abs(got - ref) <= 1e-13 * abs(ref) + 64 * np.finfo(float).eps * mass


def test_derivatives_against_high_precision():
    for j in (-2, 0, 3):
        for p in (-1.0, 2.0):
            for order in (1, 2, 3):
                for x in (0.5, 2.0):
                    ref = float(series_mp(j, p, x, order))
                    got = eigenfunction_derivative(EigenParams(j, p), order, x)
                    assert got == pytest.approx(ref, rel=1e-12, abs=1e-14)


def test_bessel_examples():
    assert eigenfunction_bessel(EigenParams(0, 1), 1.0) == pytest.approx(iv(0, 2.0), rel=1e-14)
    assert eigenfunction_bessel(EigenParams(1, 1), 1.0) == pytest.approx(1.5906368546373291, rel=1e-14)
    # series normalization: (x/p)^{j/2} I_j(2 sqrt(px)) = I_2(4)/4 at (2, 4, 1)
    assert eigenfunction_bessel(EigenParams(2, 4), 1.0) == pytest.approx(iv(2, 4.0) / 4, rel=1e-14)
    assert eigenfunction(EigenParams(2, 4), 1.0) == pytest.approx(iv(2, 4.0) / 4, rel=1e-14)
    # the (px)^{j/2} I_j form differs by p^j
    assert remark_bessel_form(EigenParams(2, 4), 1.0) == pytest.approx(4 * iv(2, 4.0), rel=1e-14)


def test_bessel_domain():
    with pytest.raises(DomainError):
        eigenfunction_bessel(EigenParams(0, -1), 1.0)
    with pytest.raises(DomainError):
        eigenfunction_bessel(EigenParams(0, 1), 0.0)
    with pytest.raises(DomainError):
        eigenfunction(EigenParams(0, 1), -1.0)


def test_series_bessel_agreement():
    xs = np.linspace(0.05, 10.0, 60)
    for p in (1.0, 2.0, 5.0):
        for j in range(-3, 4):
            ep = EigenParams(j, p)
            g = eigenfunction(ep, xs)
            assert np.max(np.abs(g - eigenfunction_bessel(ep, xs)) / np.abs(g)) < 1e-10
            assert np.max(np.abs(g - eigenfunction_closed_form(ep, xs)) / np.abs(g)) < 1e-10
    for p in (-1.0, -2.0):
        for j in range(-3, 4):
            ep = EigenParams(j, p)
            xs = np.array([0.5, 1.0, 2.0, 4.0])
            g = eigenfunction(ep, xs)
            assert np.max(np.abs(g - eigenfunction_closed_form(ep, xs)) / np.abs(g)) < 1e-10


def test_operator_eigen_examples():
    assert operator_eigen_residual(OperatorParams(4, 0), EigenParams(0, 1), 1.0).residual <= 1e-8
    assert operator_eigen_residual(OperatorParams(8, -2), EigenParams(-2, 2), 3.0).residual <= 1e-8
    for j in range(0, 4):
        for n in (2, 5):
            r = operator_eigen_residual(OperatorParams(n, j), EigenParams(j, 0), np.array([0.5, 2.0]))
            assert np.all(r.residual <= 1e-10)


def test_operator_eigen_against_high_precision():
    # both sides from 40-digit series
    for j, p, n, x in ((-2, 2.0, 8, 3.0), (1, -1.0, 4, 2.0)):
        ref = math.exp(p / n) * float(series_mp(j, p, x))
        ev = apply(OperatorParams(n, j), eigenfunction_spec(EigenParams(j, p)), x)
        assert ev.value == pytest.approx(ref, rel=1e-10)


def test_requires_matching_j():
    with pytest.raises(DomainError):
        operator_eigen_residual(OperatorParams(4, 1), EigenParams(0, 1), 1.0)


def test_eigenvalue_recovery():
    xs = np.array([0.5, 1.0, 2.0, 4.0])
    for j in (-1, 0, 2):
        for p in (-1.0, 2.0):
            ep = EigenParams(j, p)
            n = 4
            ev = apply(OperatorParams(n, j), eigenfunction_spec(ep), xs)
            ratio = ev.value / eigenfunction(ep, xs)
            assert np.ptp(ratio) < 1e-7
            assert np.max(np.abs(ratio - ep.eigenvalue(n))) < 1e-7


def test_diffop_eigen_examples():
    xs = np.array([0.5, 1.0, 3.0])
    for j in range(0, 4):
        assert np.all(diffop_eigen_residual(EigenParams(j, 0), xs) == 0)
    assert diffop_eigen_residual(EigenParams(0, 1), 1.0) <= 1e-10
    assert diffop_eigen_residual(EigenParams(-1, 3), 0.5) <= 1e-10


def test_composition_multiplies_eigenvalues():
    for j, p in ((0, 1.0), (2, -1.0)):
        ep = EigenParams(j, p)
        spec = eigenfunction_spec(ep)
        xs = np.array([0.5, 2.0])
        m, n = 4, 6
        assert n > EIGEN_GROWTH_A and m > EIGEN_GROWTH_A * n / (n - EIGEN_GROWTH_A)
        ev = compose_numeric(OperatorParams(m, j), OperatorParams(n, j), spec, xs)
        expected = math.exp(p * (m + n) / (m * n)) * eigenfunction(ep, xs)
        assert np.max(np.abs(ev.value - expected)) < 1e-7


def test_spec_growth_declaration_holds():
    for j in (-3, 0, 3):
        for p in (-2.0, 2.0):
            spec = eigenfunction_spec(EigenParams(j, p))
            t = np.linspace(0, 200, 2001)
            assert np.all(np.abs(spec.values(t)) <= spec.bound(t))
