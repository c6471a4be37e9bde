import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from sliding_spectral import specfun as sf

from oracles import m0_integral, w0_integral_scaled


# -- log_gamma ----------------------------------------------------------------


@pytest.mark.parametrize("z, expected", [(1, 0.0), (5, math.log(24)), (0.5, 0.5 * math.log(math.pi))])
def test_log_gamma_examples(z, expected):
    assert abs(sf.log_gamma(z) - expected) < 1e-14


@pytest.mark.parametrize("z", [0, -1, -7])
def test_log_gamma_pole(z):
    with pytest.raises(ValueError):
        sf.log_gamma(z)


@settings(max_examples=200, deadline=None)
@given(st.floats(-30, 60), st.floats(-40, 40))
def test_log_gamma_matches_principal_branch(x, y):
    z = complex(x, y)
    if abs(y) < 1e-3 and x < 0.5 and abs(x - round(x)) < 1e-3:
        return
    ref = complex(special.loggamma(z))
    got = sf.log_gamma(z)
    assert abs(got - ref) < 1e-12 * max(1.0, abs(ref))


def test_log_gamma_integral_representation():
    # Gamma(z) = int_0^inf e^-s s^(z-1) ds for Re z > 0
    from scipy import integrate

    for z in (0.7, 2.5 + 1.0j, 4.0 - 2.0j):
        re, _ = integrate.quad(lambda s: (cmath.exp(-s) * s ** (z - 1)).real, 0, np.inf, epsrel=1e-12, limit=400)
        im, _ = integrate.quad(lambda s: (cmath.exp(-s) * s ** (z - 1)).imag, 0, np.inf, epsrel=1e-12, limit=400)
        assert abs(cmath.exp(sf.log_gamma(z)) - complex(re, im)) < 1e-9


# -- Kummer Phi and Tricomi Psi ------------------------------------------------

_param = st.floats(-8, 8)


@pytest.mark.parametrize("alpha, c", [(1, 1), (0.3 + 2j, 4.5), (-3, 2), (7, 1.5 - 1j)])
def test_kummer_at_zero(alpha, c):
    assert sf.kummer_phi(alpha, c, 0) == 1


def test_kummer_examples():
    assert abs(sf.kummer_phi(1, 1, 1) - math.e) < 1e-15
    assert abs(sf.kummer_phi(1, 2, 1) - (math.e - 1)) < 1e-15


def test_kummer_rejects_pole_parameter():
    with pytest.raises(ValueError):
        sf.kummer_phi(1.0, -2, 0.5)


@settings(max_examples=60, deadline=None)
@given(_param, st.floats(-5, 5), st.floats(0.1, 12), st.floats(0.5, 30))
def test_kummer_reflection_imaginary_axis(ar, ai, c, y):
    # on Re x = 0 neither side is reflected internally, so both routes are exercised
    alpha = complex(ar, ai)
    for x in (1j * y, -1j * y):
        lhs = sf.kummer_phi(alpha, c, x)
        rhs = cmath.exp(x) * sf.kummer_phi(c - alpha, c, -x)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_kummer_iteration_cap():
    with pytest.raises(sf.ConvergenceError):
        sf.kummer_phi(0.5, 1.5, 30.0, max_terms=5)


@settings(max_examples=200, deadline=None)
@given(_param, st.floats(-5, 5), st.floats(0.1, 12), st.floats(-30, 30), st.floats(-30, 30))
def test_kummer_reflection(ar, ai, c, xr, xi):
    alpha, x = complex(ar, ai), complex(xr, xi)
    lhs = sf.kummer_phi(alpha, c, x)
    rhs = cmath.exp(x) * sf.kummer_phi(c - alpha, c, -x)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(cmath.exp(x)) * abs(sf.kummer_phi(c - alpha, c, -x)))


@settings(max_examples=100, deadline=None)
@given(_param, st.floats(-3, 3), st.floats(0.2, 8), st.floats(-40, 40), st.floats(-40, 40))
def test_kummer_against_mpmath(ar, ai, c, xr, xi):
    alpha, x = complex(ar, ai), complex(xr, xi)
    ref = complex(mpmath.hyp1f1(alpha, c, x))
    got = sf.kummer_phi(alpha, c, x)
    assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref))


def test_kummer_large_imaginary_argument():
    for x in (200j, 1000j, 3000j):
        ref = complex(mpmath.hyp1f1(2.4 - 0.3j, 4.8, x))
        assert abs(sf.kummer_phi(2.4 - 0.3j, 4.8, x) - ref) < 1e-11 * abs(ref)


@pytest.mark.parametrize("a, b, x", [(1, 2, 0.5), (3, 6, 4 + 2j), (2.3 - 0.4j, 5.1, 10j), (0.5 + 1j, 2.0, 60j),
                                     (1.7, 3.4, 0.05), (-2, 3, 1.5)])
def test_tricomi_u_against_mpmath(a, b, x):
    ref = complex(mpmath.hyperu(a, b, x))
    assert abs(sf.tricomi_u(a, b, x) - ref) < 1e-10 * abs(ref)


@pytest.mark.parametrize("alpha, c", [(2, 4), (3, 6), (0.7 + 0.3j, 3)])
def test_small_argument_laws(alpha, c):
    ks = np.arange(2, 7)
    err_phi, err_psi = [], []
    target = cmath.exp(sf.log_gamma(c - 1) - sf.log_gamma(alpha))
    for k in ks:
        x = 10.0 ** -k
        err_phi.append(abs(sf.kummer_phi(alpha, c, x) - 1))
        err_psi.append(abs(x ** (c - 1) * sf.tricomi_u(alpha, c, x) - target))
    for err in (err_phi, err_psi):
        assert err[-1] < 1e-5
        slope = np.polyfit(ks, -np.log10(err), 1)[0]
        assert slope > 0.999


# -- closed-form W and Whittaker M ---------------------------------------------


def test_psi_closed_ell0():
    for x in (0.3, 2.0, 1 + 4j, -3j):
        assert abs(sf.tricomi_psi_closed(0, x) - cmath.exp(-x / 2)) < 1e-15 * max(1, abs(cmath.exp(-x / 2)))


def test_psi_closed_ell1_value():
    assert abs(sf.tricomi_psi_closed(1, 2.0) - 2 * math.exp(-1)) < 1e-15


def test_psi_closed_domain():
    with pytest.raises(ValueError):
        sf.tricomi_psi_closed(2, 0)


@pytest.mark.parametrize("x", [1.0, 5.0, 10.0])
def test_psi_closed_ell2_quadrature(x):
    ref = w0_integral_scaled(2, x)
    assert abs(sf.tricomi_psi_closed(2, x) - ref) < 1e-10 * abs(ref)


@pytest.mark.parametrize("ell", range(7))
def test_psi_closed_against_integral_grid(ell):
    for x in np.geomspace(0.1, 50, 9):
        ref = w0_integral_scaled(ell, x)
        assert abs(sf.tricomi_psi_closed(ell, x) - ref) < 1e-9 * abs(ref)


def test_psi_closed_matches_general_w():
    for ell in range(4):
        for x in (0.4, 3 + 1j, 25j):
            w = sf.whittaker_w(0, ell, x) * math.gamma(ell + 1)
            assert abs(sf.tricomi_psi_closed(ell, x) - w) < 1e-11 * abs(w)


def test_whittaker_m_ell0_is_sinh():
    for x in (0.5, 3.0, 2 + 1j):
        assert abs(sf.whittaker_m(0, 0, x) - 2 * cmath.sinh(x / 2)) < 1e-14 * max(1, abs(x))


def test_whittaker_m_ell1_quadrature():
    ref = m0_integral(1, 1.0)
    assert abs(sf.whittaker_m(0, 1, 1.0) - ref) < 1e-10 * abs(ref)


def test_whittaker_m_root_on_imaginary_axis():
    assert abs(sf.whittaker_m(0, 0, 2j * math.pi)) < 1e-14


@pytest.mark.parametrize("kappa, ell, x", [(0.3, 1, 2.0), (-1.2 + 0.5j, 2, 4 + 3j), (0.05j, 0, 12j), (2.0, 3, 0.7)])
def test_whittaker_against_mpmath(kappa, ell, x):
    refm = complex(mpmath.whitm(kappa, ell + 0.5, x))
    refw = complex(mpmath.whitw(kappa, ell + 0.5, x))
    assert abs(sf.whittaker_m(kappa, ell, x) - refm) < 1e-11 * abs(refm)
    assert abs(sf.whittaker_w(kappa, ell, x) - refw) < 1e-10 * abs(refw)


def test_whittaker_m_quadrature_complex():
    for ell in (0, 2, 3):
        for x in (3j, 1.5 - 2j):
            ref = m0_integral(ell, x)
            assert abs(sf.whittaker_m(0, ell, x) - ref) < 1e-10 * abs(ref)


# -- large argument ------------------------------------------------------------


@pytest.mark.parametrize("r, eps, ell, expected", [(1.0, 1.0, 0, 1.0), (1.0, 1.0, 1, 2.0), (1.0, 3j, 2, 1 - 1j)])
def test_phi_factor_examples(r, eps, ell, expected):
    assert abs(sf.phi_asymptotic_factor(r, eps, ell) - expected) < 1e-15


def test_phi_factor_domain():
    with pytest.raises(ValueError):
        sf.phi_asymptotic_factor(0.0, 1j, 1)


def _two_exponential(ell, r, eps):
    x = 2 * r * eps
    C = 2.0 ** -(2 * ell + 1) * math.gamma(2 * ell + 2) / math.gamma(ell + 1) ** 2
    I = (r * eps) ** -(ell + 1) * 2 ** ell * math.gamma(ell + 1) * (
        (-1) ** (ell + 1) * cmath.exp(-r * eps) * sf.phi_asymptotic_factor(r, eps, ell)
        + cmath.exp(r * eps) * sf.phi_asymptotic_factor(r, -eps, ell))
    return C * x ** (ell + 1) * I


@pytest.mark.parametrize("ell", [2, 3, 4])
@pytest.mark.parametrize("r", [0.7, 1.0])
def test_large_argument_error_ratio(ell, r):
    errs = []
    for mod in (50, 100, 200):
        eps = 1j * mod / r
        m = sf.whittaker_m(0, ell, 2 * r * eps)
        errs.append(abs(m - _two_exponential(ell, r, eps)) / abs(m))
    assert errs[0] / errs[1] >= 3
    assert errs[1] / errs[2] >= 3


def test_large_argument_exact_for_low_ell():
    # for l <= 1 the two-term factor is the whole expansion
    for ell in (0, 1):
        eps = 70j
        m = sf.whittaker_m(0, ell, 2 * eps)
        assert abs(m - _two_exponential(ell, 1.0, eps)) < 1e-13 * abs(m)
