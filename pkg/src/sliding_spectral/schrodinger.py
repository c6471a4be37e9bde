"""Radial Schrodinger equation on [0, a] with Dirichlet conditions.

    -u'' + (l(l+1)/r^2 + q(r)) u = z u,     u(0) = u(a) = 0

Eigenvalues are located with a scaled Prufer phase: writing u = R sin(theta)
and u' = S R cos(theta) with S = sqrt(max(z, s_min)) gives

    theta' = S cos^2(theta) + (z - V(r)) / S sin^2(theta),

and the n-th Dirichlet eigenvalue is the z with theta(a) = n pi.  The
integrated variable is phi = theta - S r, which stays slowly varying for
large z so a single adaptive solve handles a whole batch of energies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import specfun
from ._roots import find_monotone_roots
from .potentials import PotentialSpec
from .types import DefectEstimate, EigenSpectrum, InsufficientDataError, SolutionSample, SolverError

__all__ = [
    "RadialProblem",
    "integrate_regular",
    "eigenvalues_dirichlet",
    "asymptotic_sqrt_z",
    "estimate_defect",
    "whittaker_zero_asymptotic",
    "whittaker_zeros",
    "prufer_phase",
]

RTOL = 1e-12
ATOL = 1e-12
S_MIN = 1.0


@dataclass(frozen=True, eq=False)
class RadialProblem:
    potential: PotentialSpec
    ell: int
    a: float

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell < 0:
            raise ValueError("ell must be a non-negative integer")
        if not self.a > 0:
            raise ValueError("endpoint a must be positive")
        pot = self.potential
        if pot.closed_form_tag is None and self.a > pot.grid[-1] * (1 + 1e-12):
            raise ValueError(f"endpoint a={self.a} lies beyond the potential grid (max {pot.grid[-1]})")

    @property
    def r0(self) -> float:
        return start_radius(self.a)

    def effective(self, r):
        """q(r) + l(l+1)/r^2."""
        r = np.asarray(r, dtype=float)
        return self.potential(r) + self.ell * (self.ell + 1) / (r * r)


def start_radius(a: float) -> float:
    return max(1e-6, 1e-4 * a)


def frobenius_start(potential: PotentialSpec, ell: int, z: float, r0: float, max_terms: int = 40):
    """Value and slope at r0 of the solution ~ r^(l+1), normalised so u(r0) = r0^(l+1).

    Uses u = r^(l+1) sum c_k r^k with c_0 = 1, q expanded linearly at the
    origin, and the recurrence c_k k(k + 2l + 1) = Q0 c_{k-2} + Q1 c_{k-3}
    (Q = q - z), summed until the terms are below rounding level.
    """
    qr, dq = potential.taylor_at(r0)
    Q0 = qr - dq * r0 - z
    Q1 = dq
    c = [1.0, 0.0]
    base, dbase = 1.0, float(ell + 1)
    for k in range(2, max_terms):
        ck = (Q0 * c[k - 2] + (Q1 * c[k - 3] if k >= 3 else 0.0)) / (k * (k + 2 * ell + 1))
        c.append(ck)
        t = ck * r0**k
        base += t
        dbase += (k + ell + 1) * t
        if k > 3 and abs(t) < 1e-18 * abs(base) and abs(c[k - 1] * r0 ** (k - 1)) < 1e-18 * abs(base):
            break
    u = r0 ** (ell + 1)
    du = r0**ell * dbase / base
    return u, du


def prufer_phase(V, z, r0: float, r1: float, theta0, *, s_min: float = S_MIN, rtol: float = RTOL, atol: float = ATOL):
    """theta(r1) for every energy in ``z`` given theta(r0) = theta0.

    ``V`` is the scalar effective potential r -> V(r).  All energies share one
    adaptive solve.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    S = np.sqrt(np.maximum(z, s_min))
    gap = (z - S * S) / S

    def rhs(r, phi):
        th = phi + S * r
        s = np.sin(th)
        return (gap - V(r) / S) * s * s

    phi0 = np.asarray(theta0, dtype=float) - S * r0
    sol = solve_ivp(rhs, (r0, r1), phi0, method="DOP853", rtol=rtol, atol=atol)
    if sol.status != 0:
        raise SolverError(f"phase integration failed: {sol.message}")
    return sol.y[:, -1] + S * r1


def _start_phase(problem: RadialProblem, z: np.ndarray):
    r0 = problem.r0
    th = np.empty_like(z)
    for i, zi in enumerate(z):
        u, du = frobenius_start(problem.potential, problem.ell, zi, r0)
        S = math.sqrt(max(zi, S_MIN))
        th[i] = math.atan2(S * u, du)
    return th


def _end_phase(problem: RadialProblem, z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    theta0 = _start_phase(problem, z)
    pot = problem.potential
    c = problem.ell * (problem.ell + 1)

    def V(r):
        return float(pot(r)) + c / (r * r)

    return prufer_phase(V, z, problem.r0, problem.a, theta0)


def integrate_regular(problem: RadialProblem, z: float, r=None, n_points: int = 401) -> SolutionSample:
    """Regular solution on [r0, a] with u(r0) = r0^(l+1).

    ``r`` may give the evaluation radii (inside [r0, a]); otherwise a uniform
    grid of ``n_points`` points is used.
    """
    z = float(z)
    if not math.isfinite(z):
        raise ValueError("energy must be finite")
    r0, a = problem.r0, problem.a
    r_eval = np.linspace(r0, a, n_points) if r is None else np.asarray(r, dtype=float)
    if r_eval.min() < r0 * (1 - 1e-12) or r_eval.max() > a * (1 + 1e-12):
        raise ValueError("evaluation radii must lie in [r0, a]")
    r_eval = np.clip(r_eval, r0, a)
    u0, du0 = frobenius_start(problem.potential, problem.ell, z, r0)
    S = math.sqrt(max(z, S_MIN))
    th0 = math.atan2(S * u0, du0)
    lnR0 = math.log(math.hypot(u0, du0 / S))
    pot = problem.potential
    c = problem.ell * (problem.ell + 1)

    def rhs(rr, y):
        V = float(pot(rr)) + c / (rr * rr)
        th = y[0] + S * rr
        s, co = math.sin(th), math.cos(th)
        w = (z - V) / S
        return [(w - S) * s * s, (S - w) * s * co]

    sol = solve_ivp(rhs, (r0, a), [th0 - S * r0, lnR0], method="DOP853", rtol=RTOL, atol=ATOL, dense_output=True)
    if sol.status != 0:
        raise SolverError(f"integration failed: {sol.message}")
    y = sol.sol(r_eval)
    th = y[0] + S * r_eval
    R = np.exp(y[1])
    return SolutionSample(r=r_eval, values=R * np.sin(th), derivative=S * R * np.cos(th))


def _to_energy(t):
    return t * np.abs(t)


def _from_energy(z):
    return np.sign(z) * np.sqrt(np.abs(z))


def eigenvalues_dirichlet(problem: RadialProblem, n_max: int, n_min: int = 1) -> EigenSpectrum:
    """Dirichlet eigenvalues z_n for n = n_min..n_max, indexed by node count + 1."""
    if n_max < 1 or n_min < 1 or n_min > n_max:
        raise ValueError("need 1 <= n_min <= n_max")
    a, ell = problem.a, problem.ell
    n = np.arange(n_min, n_max + 1)
    shift = problem.potential.integral(0.0, a) / a
    # brackets from the counting law with one level of margin on each side
    lo = _from_energy((math.pi * (n - 1 + ell / 2) / a) ** 2 + shift)
    hi = _from_energy((math.pi * (n + 1 + ell / 2) / a) ** 2 + shift)
    target = n * math.pi

    def phase(t):
        return _end_phase(problem, _to_energy(t))

    t, f = find_monotone_roots(phase, target, lo, hi, xtol=2e-15, ftol=1e-14)
    z = _to_energy(t)
    residual = np.abs(np.sin(f))
    return EigenSpectrum(n, z, residual, {"a": a, "ell": ell, "potential": problem.potential.label})


def asymptotic_sqrt_z(n, a: float, ell: int, delta: float):
    """(pi/a)(n + l/2) + (a delta - l(l+1)) / (2 (n + l/2) pi a)."""
    N = np.asarray(n, dtype=float) + ell / 2.0
    return math.pi * N / a + (a * delta - ell * (ell + 1)) / (2.0 * N * math.pi * a)


def defect_per_level(spectrum: EigenSpectrum, a: float, ell: int) -> np.ndarray:
    N = spectrum.n + ell / 2.0
    # levels below zero have no real sqrt; they are never in the fitted window
    with np.errstate(invalid="ignore"):
        root = np.sqrt(spectrum.z)
    return (2.0 * N * math.pi * a * (root - math.pi * N / a) + ell * (ell + 1)) / a


def extrapolate_in_inverse_n(N: np.ndarray, values: np.ndarray, order: int = 2):
    """Least-squares fit of values against powers of 1/N; returns (limit, spread).

    The spread compares the fit of the requested order with the one a
    degree lower, which is what the limit is sensitive to.
    """
    x = 1.0 / np.asarray(N, dtype=float)
    y = np.asarray(values, dtype=float)

    def fit(k):
        k = min(k, len(x) - 1)
        A = np.vander(x, k + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        return coef[0]

    best = fit(order)
    lower = fit(order - 1) if order > 0 else y[-1]
    return float(best), float(abs(best - lower))


def estimate_defect(spectrum: EigenSpectrum, a: float, ell: int, order: int = 3) -> DefectEstimate:
    """Quantum defect from a Dirichlet spectrum, extrapolated over the top third of levels."""
    if len(spectrum) < 5:
        raise InsufficientDataError("defect estimation needs at least 5 levels")
    per = defect_per_level(spectrum, a, ell)
    k = max(5, len(spectrum) // 3)
    sel = slice(len(spectrum) - k, None)
    N = spectrum.n[sel] + ell / 2.0
    value, spread = extrapolate_in_inverse_n(N, per[sel], order)
    return DefectEstimate(value, spread, spectrum.n.copy(), per)


def whittaker_zero_asymptotic(n, ell: int):
    """pi(n + l/2) - l(l+1) / (pi(2n + l)): large-n zeros of M_{0,l+1/2}(2ix)."""
    n = np.asarray(n, dtype=float)
    return math.pi * (n + ell / 2.0) - ell * (ell + 1) / (math.pi * (2 * n + ell))


def _m0_on_imaginary_axis(ell: int, x: float, scale: float) -> float:
    # M_{0,l+1/2}(i scale x) / (i^(l+1) (scale x)^(l+1)) is real
    y = specfun.whittaker_m(0.0, ell, 1j * scale * x) / ((1j) ** (ell + 1) * (scale * x) ** (ell + 1))
    return y.real


def whittaker_zeros(ell: int, n_max: int, convention: str = "scaled") -> np.ndarray:
    """First ``n_max`` positive roots x of M_{0,l+1/2} on the imaginary axis.

    ``convention="scaled"`` returns roots of x -> M_{0,l+1/2}(2ix), the
    normalisation under which :func:`whittaker_zero_asymptotic` applies;
    ``"literal"`` returns roots of x -> M_{0,l+1/2}(ix), which are twice as large.
    """
    if convention not in ("scaled", "literal"):
        raise ValueError("convention must be 'scaled' or 'literal'")
    roots = np.empty(n_max)
    for k in range(1, n_max + 1):
        guess = float(whittaker_zero_asymptotic(k, ell))
        lo, hi = guess - 1.0, guess + 1.0
        roots[k - 1] = brentq(lambda x: _m0_on_imaginary_axis(ell, x, 2.0), lo, hi, xtol=1e-14, rtol=1e-15)
    return roots if convention == "scaled" else 2.0 * roots
