"""Coulomb-type variants of the radial Schrodinger and Dirac problems.

Schrodinger:  y'' + (z + 2a/r - l(l+1)/r^2 - q) y = 0, with free solutions

    u1 = (2 eps)^-(l+1) M_{a/eps, l+1/2}(2 r eps),   u2 = (2 eps)^l W_{a/eps, l+1/2}(2 r eps).

Dirac:  (d/dr + l/r) f1 - (z + m + a/r - q) f2 = 0,
        (d/dr - l/r) f2 + (z - m + a/r - q) f1 = 0,   l^2 > a^2,

with omega = sqrt(l^2 - a^2) and free columns

    f1 =  sqrt(m+z) e^{-r eps} (2 r eps)^(omega-1) (Q1 + Q2) r
    f2 = -sqrt(m-z) e^{-r eps} (2 r eps)^(omega-1) (Q1 - Q2) r.

The regular column takes Q1 = alpha1 M(w, 2 omega + 1, rho), Q2 = alpha2 M(w + 1, ...)
with w = omega - a z / eps, alpha1 - alpha2 = 2 and

    (alpha1 + alpha2) / (alpha1 - alpha2) = -a sqrt(m-z) / ((omega + l) sqrt(m+z)).

The non-regular column takes Q1 = U(w, 2 omega + 1, rho) and
Q2 = c2 U(w + 1, 2 omega + 1, rho) with c2 = w (omega eps + a z) / (l eps - a m),
which is the multiplier that makes the pair solve the system; at a = 0 it
reduces to the l of the Coulomb-free basis.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from . import specfun
from .dirac import DiracBasis
from .potentials import PotentialSpec
from .types import BranchedEnergy, SolutionSample, SolverError

__all__ = [
    "CoulombParams",
    "coulomb_schrodinger_pair",
    "coulomb_schrodinger_decaying",
    "coulomb_dirac_basis",
    "coulomb_dirac_residual",
    "coulomb_dirac_decaying",
    "coulomb_dirac_defect",
    "coulomb_dirac_normalised",
    "coulomb_dirac_wronskian_limit",
]

RTOL = 1e-12


@dataclass(frozen=True)
class CoulombParams:
    a_coul: float
    ell: int
    m: Optional[float] = None

    def __post_init__(self):
        if self.a_coul == 0 or not math.isfinite(self.a_coul):
            raise ValueError("Coulomb strength must be a non-zero real number")
        if int(self.ell) != self.ell:
            raise ValueError("ell must be an integer")
        object.__setattr__(self, "ell", int(self.ell))
        if self.m is not None:
            if not self.m > 0:
                raise ValueError("mass must be positive")
            if self.ell * self.ell <= self.a_coul * self.a_coul:
                raise ValueError("the Dirac case needs l^2 > a^2")
            if self.ell < 0:
                raise ValueError("the Dirac Coulomb basis is implemented for l > 0")
        elif self.ell < 0:
            raise ValueError("Schrodinger angular number must be non-negative")

    @property
    def omega(self) -> float:
        return math.sqrt(self.ell * self.ell - self.a_coul * self.a_coul)

    def energy(self, z) -> BranchedEnergy:
        if self.m is None:
            return BranchedEnergy.schrodinger(z)
        return BranchedEnergy.dirac(z, self.m)


# ---------------------------------------------------------------------------
# Schrodinger


def _schrodinger_pair(a_coul: float, ell: int, eps: complex, r: float, with_derivative: bool = False):
    x = 2.0 * r * eps
    kappa = a_coul / eps
    alpha = ell + 1 - kappa
    c = 2 * ell + 2
    pre = cmath.exp(-0.5 * x) * x ** (ell + 1)
    M = pre * specfun.kummer_phi(alpha, c, x)
    U = specfun.tricomi_u(alpha, c, x)
    W = pre * U
    u1 = (2 * eps) ** (-(ell + 1)) * M
    u2 = (2 * eps) ** ell * W
    if not with_derivative:
        return u1, u2
    # W'(x) = W (-1/2 + (l+1)/x) - alpha e^{-x/2} x^{l+1} U(alpha+1, c+1, x)
    dW = W * (-0.5 + (ell + 1) / x) - alpha * pre * specfun.tricomi_u(alpha + 1, c + 1, x)
    du2 = (2 * eps) ** (ell + 1) * dW
    return u1, u2, du2


def coulomb_schrodinger_pair(params: CoulombParams, energy: BranchedEnergy, r: float):
    """(u1, u2) of the free Coulomb equation at radius r."""
    if not r > 0:
        raise ValueError("r must be positive")
    if energy.eps == 0:
        raise ValueError("2 r eps must be non-zero")
    return _schrodinger_pair(params.a_coul, params.ell, energy.eps, r)


def _complex_backward(rhs_real, y_start: np.ndarray, R: float, r: np.ndarray):
    """Integrate a real linear system backwards for a complex initial vector."""
    n = y_start.size

    def rhs(t, y):
        return np.concatenate([rhs_real(t, y[:n]), rhs_real(t, y[n:])])

    y0 = np.concatenate([y_start.real, y_start.imag])
    r = np.asarray(r, dtype=float)
    if r.min() >= R:
        return np.tile(y_start, (r.size, 1))
    atol = 1e-3 * RTOL * float(np.max(np.abs(y0)))
    sol = solve_ivp(rhs, (R, float(r.min())), y0, method="DOP853", rtol=RTOL, atol=atol, dense_output=True)
    if sol.status != 0:
        raise SolverError(f"backward integration failed: {sol.message}")
    vals = sol.sol(np.minimum(r, R))
    return (vals[:n] + 1j * vals[n:]).T


def coulomb_schrodinger_decaying(params: CoulombParams, energy: BranchedEnergy, potential: PotentialSpec,
                                 r_grid, r_max: Optional[float] = None, check_cutoff: bool = True) -> SolutionSample:
    """Solution that coincides with u2 beyond the cut-off where q vanishes.

    Integrated backwards from R = ``r_max`` (default: support end of q).
    With ``check_cutoff`` the solve is repeated from 2R and a relative change
    above 1e-7 raises :class:`SolverError`.
    """
    if not energy.is_real or energy.z.real <= 0:
        raise ValueError("the decaying solution is computed for real z > 0")
    z = energy.z.real
    a_c, ell = params.a_coul, params.ell
    r = np.atleast_1d(np.asarray(r_grid, dtype=float))
    R = potential.support_end() if r_max is None else r_max
    if not math.isfinite(R):
        raise ValueError("potential has no finite cut-off; pass r_max")
    R = max(R, float(r.max()), 1e-3)

    def rhs_real(t, y):
        k = z + 2 * a_c / t - ell * (ell + 1) / (t * t) - float(potential(t))
        return np.array([y[1], -k * y[0]])

    def solve(Rc):
        _, u2, du2 = _schrodinger_pair(a_c, ell, energy.eps, Rc, with_derivative=True)
        return _complex_backward(rhs_real, np.array([u2, du2]), Rc, r)

    vals = solve(R)
    if check_cutoff and potential.kind != "zero":
        alt = solve(2 * R)
        change = np.max(np.abs(alt[:, 0] - vals[:, 0])) / np.max(np.abs(vals[:, 0]))
        if change > 1e-7:
            raise SolverError(f"decaying solution depends on the cut-off (relative change {change:.2e})")
    return SolutionSample(r=r, values=vals[:, 0], derivative=vals[:, 1])


# ---------------------------------------------------------------------------
# Dirac


def _dirac_coefficients(params: CoulombParams, energy: BranchedEnergy):
    a, ell, m = params.a_coul, params.ell, params.m
    om = params.omega
    z, eps = energy.z, energy.eps
    sp, sm = energy.sqrt_m_plus, energy.sqrt_m_minus
    w = om - a * z / eps
    ratio = -a * sm / ((om + ell) * sp)  # (alpha1 + alpha2) / (alpha1 - alpha2)
    alpha1 = ratio + 1.0
    alpha2 = ratio - 1.0
    c2 = w * (om * eps + a * z) / (ell * eps - a * m)
    return om, w, alpha1, alpha2, c2


def coulomb_dirac_basis(params: CoulombParams, energy: BranchedEnergy, r: float) -> DiracBasis:
    """U0(r) for the free Coulomb-Dirac system (regular, non-regular columns)."""
    if params.m is None:
        raise ValueError("Dirac basis needs a mass")
    if not r > 0:
        raise ValueError("r must be positive")
    eps = energy.eps
    rho = 2.0 * r * eps
    if rho == 0:
        raise ValueError("2 r eps must be non-zero")
    om, w, alpha1, alpha2, c2 = _dirac_coefficients(params, energy)
    c = 2 * om + 1
    q1 = alpha1 * specfun.kummer_phi(w, c, rho)
    q2 = alpha2 * specfun.kummer_phi(w + 1, c, rho)
    t1 = specfun.tricomi_u(w, c, rho)
    t2 = c2 * specfun.tricomi_u(w + 1, c, rho)
    pre = cmath.exp(-r * eps) * rho ** (om - 1) * r
    sp, sm = energy.sqrt_m_plus, energy.sqrt_m_minus
    reg = np.array([sp * pre * (q1 + q2), -sm * pre * (q1 - q2)])
    non = np.array([sp * pre * (t1 + t2), -sm * pre * (t1 - t2)])
    return DiracBasis(r=float(r), U0=np.column_stack([reg, non]))


def coulomb_dirac_residual(params: CoulombParams, energy: BranchedEnergy, r: float, h: float = 1e-4) -> np.ndarray:
    """Relative residual of both basis columns in the free system (central differences)."""
    U = [coulomb_dirac_basis(params, energy, r + k * h).U0 for k in (-2, -1, 1, 2)]
    dU = (U[0] - 8 * U[1] + 8 * U[2] - U[3]) / (12 * h)
    U0 = coulomb_dirac_basis(params, energy, r).U0
    a, ell, m, z = params.a_coul, params.ell, params.m, energy.z
    e1 = dU[0] + ell / r * U0[0] - (z + m + a / r) * U0[1]
    e2 = dU[1] - ell / r * U0[1] + (z - m + a / r) * U0[0]
    scale = np.max(np.abs(U0), axis=0)
    return np.maximum(np.abs(e1), np.abs(e2)) / scale


def coulomb_dirac_wronskian_limit(params: CoulombParams) -> complex:
    """Large-energy limit of eps det U0: -alpha2 Gamma(2 omega + 1) / (2 Gamma(omega + 1 + i a)).

    alpha2 is taken at its z -> +inf value, where sqrt(m-z)/sqrt(m+z) -> i.
    """
    a, ell = params.a_coul, params.ell
    om = params.omega
    alpha2 = -1j * a / (om + ell) - 1.0
    return -alpha2 * cmath.exp(specfun.log_gamma(2 * om + 1) - specfun.log_gamma(om + 1 + 1j * a)) / 2.0


def coulomb_dirac_decaying(params: CoulombParams, potential: PotentialSpec, z: float, r,
                           r_max: Optional[float] = None) -> np.ndarray:
    """Solution equal to the free non-regular column beyond the support of q."""
    energy = params.energy(z)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    R = potential.support_end() if r_max is None else r_max
    if not math.isfinite(R):
        raise ValueError("potential has no finite cut-off; pass r_max")
    R = max(R, float(r.max()))
    start = coulomb_dirac_basis(params, energy, R).nonregular
    a, ell, m = params.a_coul, params.ell, params.m

    def rhs_real(t, y):
        q = float(potential(t))
        return np.array([-(ell / t) * y[0] + (z + m + a / t - q) * y[1],
                         (ell / t) * y[1] - (z - m + a / t - q) * y[0]])

    return _complex_backward(rhs_real, start, R, r)


def coulomb_dirac_normalised(params: CoulombParams, potential: PotentialSpec, z: float, r,
                             r_max: Optional[float] = None) -> np.ndarray:
    """-2 sqrt(m+z) e^{r eps} (2 r eps)^{i a} F~(r); tends to exp(-i delta(r)) (i, 1)."""
    energy = params.energy(z)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    F = coulomb_dirac_decaying(params, potential, z, r, r_max)
    rho = 2.0 * r * energy.eps
    fac = -2.0 * energy.sqrt_m_plus * np.exp(r * energy.eps) * rho ** (1j * params.a_coul)
    return F * fac[:, None]


def coulomb_dirac_defect(params: CoulombParams, potential: PotentialSpec, r, z_list=None,
                         r_max: Optional[float] = None):
    """Tail defect int_r^inf q from the phase of the normalised decaying solution.

    The phase -arg N2 is followed continuously along r from the cut-off
    (where it vanishes), so no mod-2 pi ambiguity arises, and the finite-z
    values are extrapolated by a polynomial in 1/z.  Returns
    ``(estimate, per_energy)``.
    """
    if params.m is None:
        raise ValueError("Dirac defect needs a mass")
    if z_list is None:
        z_list = [10 * params.m, 50 * params.m, 250 * params.m]
    z_values = np.asarray(z_list, dtype=float)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    R = potential.support_end() if r_max is None else r_max
    if not math.isfinite(R):
        raise ValueError("potential has no finite cut-off; pass r_max")
    R = max(R, float(r.max()))
    path = np.unique(np.concatenate([np.linspace(float(r.min()), R, 400), r]))[::-1]
    per = np.empty((z_values.size, r.size))
    for k, z in enumerate(z_values):
        N = coulomb_dirac_normalised(params, potential, z, path, R)
        ph = -np.unwrap(np.angle(N[:, 1]))
        ph -= 2 * math.pi * round(ph[0] / (2 * math.pi))
        per[k] = np.interp(r, path[::-1], ph[::-1])
    if z_values.size < 2:
        return per[-1], per
    powers = range(min(3, z_values.size))
    A = np.vstack([z_values ** (-float(p)) for p in powers]).T
    coef, *_ = np.linalg.lstsq(A, per, rcond=None)
    return coef[0], per
