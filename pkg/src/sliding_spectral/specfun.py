"""Gamma, confluent hypergeometric and Whittaker functions on the complex plane.

Conventions: ``kummer_phi(a, c, x)`` is Kummer's M(a, c, x) = 1F1(a; c; x),
``tricomi_u(a, c, x)`` is Tricomi's U(a, c, x) and the Whittaker functions are

    M_{k, l+1/2}(x) = exp(-x/2) x^(l+1) M(l+1-k, 2l+2, x)
    W_{k, l+1/2}(x) = exp(-x/2) x^(l+1) U(l+1-k, 2l+2, x)

All powers use the principal branch, arg x in (-pi, pi].
"""
from __future__ import annotations

import cmath
import math
import warnings

import numpy as np
from scipy import integrate

__all__ = [
    "log_gamma",
    "gamma",
    "rgamma",
    "kummer_phi",
    "tricomi_u",
    "tricomi_psi_closed",
    "whittaker_m",
    "whittaker_w",
    "phi_asymptotic_factor",
    "ConvergenceError",
]


class ConvergenceError(ArithmeticError):
    pass


# Lanczos coefficients, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _is_nonpos_int(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _lanczos_log(z: complex) -> complex:
    # valid for Re z >= 0.5
    z = z - 1.0
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def log_gamma(z) -> complex:
    """Analytic log Gamma(z) with its cut on the negative real axis.

    Agrees with log Gamma for z > 0 and is continued by the recurrence
    log Gamma(z) = log Gamma(z + n) - sum log(z + k) into Re z < 1/2.
    """
    z = complex(z)
    if _is_nonpos_int(z):
        raise ValueError(f"Gamma has a pole at {z.real:g}")
    if z.real >= 0.5:
        return _lanczos_log(z)
    n = int(math.ceil(0.5 - z.real))
    shift = 0j
    for k in range(n):
        shift += cmath.log(z + k)
    return _lanczos_log(z + n) - shift


def gamma(z):
    """Gamma function; real input gives a real result."""
    if isinstance(z, (int, float, np.floating, np.integer)):
        x = float(z)
        if x <= 0 and x == math.floor(x):
            raise ValueError(f"Gamma has a pole at {x:g}")
        val = cmath.exp(log_gamma(x))
        return math.copysign(abs(val), val.real)
    return cmath.exp(log_gamma(z))


def rgamma(z) -> complex:
    """1 / Gamma(z), zero at the poles."""
    z = complex(z)
    if _is_nonpos_int(z):
        return 0j
    return cmath.exp(-log_gamma(z))


# ---------------------------------------------------------------------------
# Kummer M


def _kummer_series(a: complex, c: complex, x: complex, tol: float, max_terms: int):
    term = 1.0 + 0j
    total = 1.0 + 0j
    biggest = 1.0
    for k in range(max_terms):
        term *= (a + k) / ((c + k) * (k + 1)) * x
        total += term
        mag = abs(term)
        if mag > biggest:
            biggest = mag
        if mag == 0.0:
            return total, biggest / max(abs(total), 1e-300)
        ratio = abs((a + k + 1) * x / ((c + k + 1) * (k + 2)))
        if mag < tol * abs(total) and ratio < 0.5:
            return total, biggest / max(abs(total), 1e-300)
    raise ConvergenceError(f"Kummer series did not converge within {max_terms} terms")


def _kummer_series_extended(a: complex, c: complex, x: complex, max_terms: int) -> complex:
    # same series in extended precision, for arguments where the double sum cancels
    a, c, x = np.clongdouble(a), np.clongdouble(c), np.clongdouble(x)
    term = np.clongdouble(1.0)
    total = np.clongdouble(1.0)
    eps = np.finfo(np.longdouble).eps
    for k in range(max_terms):
        term = term * (a + k) / ((c + k) * (k + 1)) * x
        total = total + term
        if abs(term) < eps * abs(total) * 1e-2 and abs((a + k + 1) * x / ((c + k + 1) * (k + 2))) < 0.5:
            return complex(total)
    raise ConvergenceError(f"Kummer series did not converge within {max_terms} terms")


def _kummer_connection(a: complex, c: complex, x: complex) -> complex:
    # M(a,c,x)/Gamma(c) = e^{-+i pi a} U(a,c,x)/Gamma(c-a) + e^{+-i pi (c-a)} e^x U(c-a,c,e^{+-i pi} x)/Gamma(a)
    sign = -1.0 if x.imag > 0 else 1.0
    minus_x = complex(-x.real, -x.imag if x.imag != 0 else 0.0)
    first = cmath.exp(-sign * 1j * math.pi * a) * tricomi_u(a, c, x) * rgamma(c - a)
    second = cmath.exp(sign * 1j * math.pi * (c - a)) * cmath.exp(x) * tricomi_u(c - a, c, minus_x) * rgamma(a)
    return (first + second) * cmath.exp(log_gamma(c))


def kummer_phi(alpha, c, x, *, tol: float = 1e-16, max_terms: int = 10000) -> complex:
    """Kummer's confluent hypergeometric function M(alpha, c, x).

    The power series is summed until the last term falls below
    ``tol`` times the partial sum.  For Re x < 0 the reflection
    M(a, c, x) = e^x M(c - a, c, -x) is applied first.  When the series
    suffers cancellation (large |Im x|) the sum is repeated in extended
    precision, and when even that would lose too much the value is rebuilt
    from the Tricomi connection formula.
    """
    a = complex(alpha)
    c = complex(c)
    x = complex(x)
    if _is_nonpos_int(c):
        raise ValueError("second Kummer parameter must not be a non-positive integer")
    if x == 0:
        return 1.0 + 0j
    if x.real < 0:
        return cmath.exp(x) * kummer_phi(c - a, c, -x, tol=tol, max_terms=max_terms)
    if _is_nonpos_int(a):
        return _kummer_series(a, c, x, tol, max_terms)[0]
    if x.imag != 0.0 and abs(x) > 40.0 + abs(a) + abs(c):
        # far out the series only cancels; the connection formula is exact
        return _kummer_connection(a, c, x)
    try:
        value, loss = _kummer_series(a, c, x, tol, max_terms)
    except (ConvergenceError, OverflowError):
        if x.imag == 0.0:
            raise
        return _kummer_connection(a, c, x)
    if loss <= 1e2 or x.imag == 0.0:
        return value
    # cancellation: redo the sum in extended precision while that still keeps
    # about 1e-13, otherwise rebuild from the connection formula
    if loss * float(np.finfo(np.longdouble).eps) < 1e-13:
        return _kummer_series_extended(a, c, x, max_terms)
    return _kummer_connection(a, c, x)


# ---------------------------------------------------------------------------
# Tricomi U


def _u_asymptotic(a: complex, b: complex, x: complex, max_terms: int = 400, terminating: bool = False):
    """Sum x^-a sum_k (a)_k (a-b+1)_k / k! (-x)^-k; exact when it terminates.

    With ``terminating=True`` every term up to the polynomial degree is
    summed regardless of size.  Returns (value, error_estimate, terminated);
    the estimate covers both the truncation and the rounding of large terms."""
    a2 = a - b + 1.0
    term = 1.0 + 0j
    total = 1.0 + 0j
    inv = -1.0 / x
    prev = math.inf
    biggest = 1.0

    def done(tail, terminated):
        scale = max(abs(total), 1e-300)
        return x ** (-a) * total, max(tail / scale, 1.1e-16 * biggest / scale), terminated

    for k in range(max_terms):
        term = term * (a + k) * (a2 + k) / (k + 1) * inv
        mag = abs(term)
        if mag == 0.0:
            return done(0.0, True)
        if terminating:
            total += term
            continue
        if mag > prev:
            # asymptotic series starts to diverge: stop before the smallest term
            return done(prev, False)
        total += term
        biggest = max(biggest, mag)
        if mag < 1e-17 * abs(total):
            return done(mag, False)
        prev = mag
    return done(prev, False)


def _u_laplace(a: complex, b: complex, x: complex) -> complex:
    # U = x^-a / Gamma(a) * int_0^inf e^-u u^(a-1) (1 + u/x)^(b-a-1) du, Re a > 0, |arg x| < pi
    p = b - a - 1.0
    inv_x = 1.0 / x

    def f(u):
        if u <= 0.0:
            return 1.0 + 0j if a == 1 else 0j
        if u > 800.0:
            return 0j
        return math.exp(-u) * u ** (a - 1.0) * (1.0 + u * inv_x) ** p

    breaks = sorted({0.0, min(abs(x), 1.0), 1.0, max(4.0, 2 * a.real), 30.0 + 2 * a.real + abs(p), math.inf})
    total = 0j
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(f, lo, hi, complex_func=True, epsabs=0.0, epsrel=1e-13, limit=400)
        total += val
    return x ** (-a) * rgamma(a) * total


def _u_stepped(a: complex, b: complex, x: complex) -> complex:
    # U(a-1) = (2a - b + x) U(a) - a (a - b + 1) U(a+1); U grows as a decreases,
    # so stepping down is stable.  The quadratures start from Re a >= 2, where
    # the factor u^(a-1) is smooth enough at the origin even for large Im a.
    k = max(int(math.ceil(2.0 - a.real)), 0)
    if k == 0:
        return _u_laplace(a, b, x)
    hi, lo = _u_laplace(a + k + 1, b, x), _u_laplace(a + k, b, x)
    for j in range(k, 0, -1):
        s = a + j
        hi, lo = lo, (2 * s - b + x) * lo - s * (s - b + 1.0) * hi
    return lo


def tricomi_u(a, b, x) -> complex:
    """Tricomi's confluent hypergeometric function U(a, b, x), principal branch.

    Uses the terminating sum when a or a - b + 1 is a non-positive integer,
    the large-|x| asymptotic series when it reaches full precision, and the
    Laplace integral otherwise (after shifting a by the contiguous relation
    when Re a < 1).
    """
    a = complex(a)
    b = complex(b)
    x = complex(x)
    if x == 0:
        raise ValueError("U(a, b, x) is singular at x = 0")
    if _is_nonpos_int(a) or _is_nonpos_int(a - b + 1.0):
        return _u_asymptotic(a, b, x, max_terms=10**6, terminating=True)[0]
    if abs(x) > 12.0 + abs(a) + abs(b):
        val, err, _ = _u_asymptotic(a, b, x)
        if err < 1e-15:
            return val
    if x.imag == 0.0 and x.real < 0:
        raise ValueError("U on its branch cut needs an explicit side (give x a signed imaginary part)")
    a2 = a - b + 1.0
    if a.real >= a2.real:
        return _u_stepped(a, b, x)
    # Kummer transformation U(a, b, x) = x^(1-b) U(a-b+1, 2-b, x)
    return x ** (1.0 - b) * _u_stepped(a2, 2.0 - b, x)


# ---------------------------------------------------------------------------
# Whittaker functions


def tricomi_psi_closed(ell: int, x) -> complex:
    """Gamma(l+1) W_{0,l+1/2}(x) from the finite binomial sum.

    exp(-x/2) x^-l sum_{p=0}^{l} C(l, p) Gamma(2l - p + 1) x^p, exact for any x != 0.
    """
    ell = _check_ell(ell)
    x = complex(x)
    if x == 0:
        raise ValueError("x must be non-zero")
    total = 0j
    for p in range(ell + 1):
        total += math.comb(ell, p) * math.factorial(2 * ell - p) * x ** p
    return cmath.exp(-0.5 * x) * x ** (-ell) * total


def whittaker_m(kappa, ell: int, x) -> complex:
    """M_{kappa, l+1/2}(x) = exp(-x/2) x^(l+1) M(l+1-kappa, 2l+2, x)."""
    ell = _check_ell(ell)
    x = complex(x)
    if x == 0:
        raise ValueError("x must be non-zero")
    return cmath.exp(-0.5 * x) * x ** (ell + 1) * kummer_phi(ell + 1 - complex(kappa), 2 * ell + 2, x)


def whittaker_w(kappa, ell: int, x) -> complex:
    """W_{kappa, l+1/2}(x) = exp(-x/2) x^(l+1) U(l+1-kappa, 2l+2, x)."""
    ell = _check_ell(ell)
    x = complex(x)
    if x == 0:
        raise ValueError("x must be non-zero")
    return cmath.exp(-0.5 * x) * x ** (ell + 1) * tricomi_u(ell + 1 - complex(kappa), 2 * ell + 2, x)


def phi_asymptotic_factor(r: float, eps, ell: int) -> complex:
    """Two-term large-|eps| factor 1 + l(l+1) / (2 r eps)."""
    ell = _check_ell(ell)
    re = r * complex(eps)
    if re == 0:
        raise ValueError("r * eps must be non-zero")
    return 1.0 + ell * (ell + 1) / (2.0 * re)


def _check_ell(ell) -> int:
    if int(ell) != ell or ell < 0:
        raise ValueError("angular number must be a non-negative integer")
    return int(ell)
