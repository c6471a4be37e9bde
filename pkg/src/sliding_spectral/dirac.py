"""Radial Dirac system

    (d/dr + l/r) f1 - (z + m - q) f2 = 0
    (d/dr - l/r) f2 + (z - m - q) f1 = 0

Free solutions come from confluent hypergeometric functions of rho = 2 r eps,

    f1 =  sqrt(m+z) e^{-r eps} (2 r eps)^{l-1} (Q1 + Q2) r
    f2 = -sqrt(m-z) e^{-r eps} (2 r eps)^{l-1} (Q1 - Q2) r

with Q1 = M(l, 2l+1, rho), Q2 = -M(l+1, 2l+1, rho) for the regular column and
Q1 = U(l, 2l+1, rho), Q2 = l U(l+1, 2l+1, rho) for the non-regular one.

With q present the regular solution is integrated from a Frobenius start, and
eigenvalues of the boundary condition f1(a) sin(psi) + f2(a) cos(psi) = 0 are
found through the phase theta = atan2(f1, f2), which obeys

    theta' = z - q + m cos(2 theta) - (l/r) sin(2 theta)

and increases with z.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import specfun
from ._roots import find_monotone_roots
from .potentials import PotentialSpec
from .schrodinger import extrapolate_in_inverse_n, start_radius
from .types import (
    BracketError,
    BranchedEnergy,
    DefectEstimate,
    EigenSpectrum,
    InsufficientDataError,
    SolutionSample,
    SolverError,
)

__all__ = [
    "DiracParams",
    "DiracBasis",
    "THETA1",
    "THETA2",
    "free_basis",
    "free_q_functions",
    "integrate_regular_dirac",
    "dirac_phase",
    "eigenvalues_bc",
    "eigenvalues_in_window",
    "estimate_defect_dirac",
    "tail_limit_vector",
    "tail_limit_integral",
    "decaying_solution",
    "tail_defect_solution",
    "tail_defect_estimate",
    "system_residual",
]

RTOL = 1e-12
ATOL = 1e-13

THETA1 = 0.5 * np.array([[1.0, 1j], [-1j, 1.0]])
THETA2 = 0.5 * np.array([[1.0, -1j], [1j, 1.0]])


@dataclass(frozen=True, eq=False)
class DiracParams:
    ell: int
    m: float
    potential: PotentialSpec

    def __post_init__(self):
        if int(self.ell) != self.ell or self.ell == 0:
            raise ValueError("ell must be a non-zero integer")
        if not self.m > 0:
            raise ValueError("mass must be positive")
        object.__setattr__(self, "ell", int(self.ell))

    def energy(self, z) -> BranchedEnergy:
        return BranchedEnergy.dirac(z, self.m)

    def transformed(self) -> "DiracParams":
        """Parameters of the J-transformed system (-l, -q); energies map to -z."""
        return DiracParams(-self.ell, self.m, self.potential.negated())


@dataclass
class DiracBasis:
    r: float
    U0: np.ndarray

    @property
    def regular(self) -> np.ndarray:
        return self.U0[:, 0]

    @property
    def nonregular(self) -> np.ndarray:
        return self.U0[:, 1]

    @property
    def det(self) -> complex:
        U = self.U0
        return U[0, 0] * U[1, 1] - U[0, 1] * U[1, 0]


def _positive_ell(params: DiracParams) -> int:
    if params.ell < 0:
        raise ValueError("closed-form basis is implemented for l > 0; use the J-transformation for l < 0")
    return params.ell


def free_q_functions(ell: int, rho):
    """(Q1, Q2, Q1~, Q2~) at rho for the free system."""
    rho = complex(rho)
    q1 = specfun.kummer_phi(ell, 2 * ell + 1, rho)
    q2 = -specfun.kummer_phi(ell + 1, 2 * ell + 1, rho)
    t1 = specfun.tricomi_u(ell, 2 * ell + 1, rho)
    t2 = ell * specfun.tricomi_u(ell + 1, 2 * ell + 1, rho)
    return q1, q2, t1, t2


def _columns(energy: BranchedEnergy, ell: int, r: float, q1, q2, t1, t2, rho_power: float | None = None):
    eps = energy.eps
    pre = cmath.exp(-r * eps) * (2 * r * eps) ** (ell - 1) * r
    sp, sm = energy.sqrt_m_plus, energy.sqrt_m_minus
    reg = np.array([sp * pre * (q1 + q2), -sm * pre * (q1 - q2)])
    non = np.array([sp * pre * (t1 + t2), -sm * pre * (t1 - t2)])
    return reg, non


def free_basis(params: DiracParams, energy: BranchedEnergy, r: float) -> DiracBasis:
    """U0(r) whose columns are the regular and non-regular free solutions."""
    ell = _positive_ell(params)
    if not r > 0:
        raise ValueError("r must be positive")
    rho = 2.0 * r * energy.eps
    if rho == 0:
        raise ValueError("2 r eps must be non-zero")
    reg, non = _columns(energy, ell, r, *free_q_functions(ell, rho))
    return DiracBasis(r=float(r), U0=np.column_stack([reg, non]))


def regular_prefactor(energy: BranchedEnergy, ell: int) -> complex:
    """Constant C with F0(r) ~ C (0, r^l) as r -> 0, i.e. -2 sqrt(m-z) (2 eps)^(l-1)."""
    return -2.0 * energy.sqrt_m_minus * (2.0 * energy.eps) ** (ell - 1)


# ---------------------------------------------------------------------------
# regular solution with a potential


def _frobenius(ell: int, z: float, m: float, potential: PotentialSpec, r0: float, max_terms: int = 60):
    """(f1, f2) at r0 for the solution regular at the origin.

    l > 0: f2 ~ r^l, f1 = O(r^(l+1)).  l < 0: f1 ~ r^|l|, f2 = O(r^(|l|+1)).
    The potential is expanded linearly at the origin.
    """
    qr, dq = potential.taylor_at(r0)
    q0 = qr - dq * r0
    A = (z + m - q0, -dq)  # z + m - q
    B = (z - m - q0, -dq)  # z - m - q
    L = abs(ell)
    a = [0.0] * max_terms
    b = [0.0] * max_terms
    if ell > 0:
        b[0] = 1.0
    else:
        a[0] = 1.0
    s1 = a[0]
    s2 = b[0]
    for k in range(1, max_terms):
        sa = sum(A[j] * b[k - 1 - j] for j in range(2) if k - 1 - j >= 0)
        sb = -sum(B[j] * a[k - 1 - j] for j in range(2) if k - 1 - j >= 0)
        if ell > 0:
            a[k] = sa / (k + 2 * L)
            b[k] = sb / k
        else:
            a[k] = sa / k
            b[k] = sb / (k + 2 * L)
        ta = a[k] * r0**k
        tb = b[k] * r0**k
        s1 += ta
        s2 += tb
        if k > 4 and max(abs(ta), abs(tb)) < 1e-18 * max(abs(s1), abs(s2)):
            break
    scale = r0**L
    return s1 * scale, s2 * scale


def _rhs_real(ell, z, m, potential):
    def rhs(r, y):
        q = float(potential(r))
        f1, f2 = y[0], y[1]
        return [-(ell / r) * f1 + (z + m - q) * f2, (ell / r) * f2 - (z - m - q) * f1]

    return rhs


def integrate_regular_dirac(params: DiracParams, energy: BranchedEnergy | float, a: float, r=None,
                            n_points: int = 401, normalize: str = "basis") -> SolutionSample:
    """Regular solution on [r0, a].

    ``normalize="basis"`` scales the solution to coincide with the free
    regular column near the origin (complex constant); ``"unit"`` returns
    the real solution with leading coefficient 1.
    """
    if not isinstance(energy, BranchedEnergy):
        energy = params.energy(energy)
    if not energy.is_real:
        raise ValueError("the regular solver works with real energies")
    z = energy.z.real
    r0 = start_radius(a)
    r_eval = np.linspace(r0, a, n_points) if r is None else np.asarray(r, dtype=float)
    if r_eval.min() < r0 * (1 - 1e-12) or r_eval.max() > a * (1 + 1e-12):
        raise ValueError("evaluation radii must lie in [r0, a]")
    r_eval = np.clip(r_eval, r0, a)
    y0 = _frobenius(params.ell, z, params.m, params.potential, r0)
    atol = 1e-3 * RTOL * max(abs(y0[0]), abs(y0[1]))
    sol = solve_ivp(_rhs_real(params.ell, z, params.m, params.potential), (r0, a), list(y0),
                    method="DOP853", rtol=RTOL, atol=atol, dense_output=True)
    if sol.status != 0:
        raise SolverError(f"integration failed: {sol.message}")
    vals = sol.sol(r_eval).T
    if normalize == "unit":
        return SolutionSample(r=r_eval, values=vals)
    if normalize != "basis":
        raise ValueError("normalize must be 'basis' or 'unit'")
    if params.ell < 0:
        raise ValueError("basis normalisation is defined for l > 0")
    C = regular_prefactor(energy, params.ell)
    return SolutionSample(r=r_eval, values=C * vals.astype(complex))


def system_residual(params: DiracParams, z: float, sample: SolutionSample) -> np.ndarray:
    """Max-normalised residual of the system under 4th order finite differences."""
    r = sample.r
    f = sample.values
    h = np.diff(r)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("residual check needs a uniform grid")
    h = h[0]
    d = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    rr = r[2:-2]
    q = params.potential(rr)
    f1, f2 = f[2:-2, 0], f[2:-2, 1]
    e1 = d[:, 0] + params.ell / rr * f1 - (z + params.m - q) * f2
    e2 = d[:, 1] - params.ell / rr * f2 + (z - params.m - q) * f1
    scale = np.max(np.abs(f))
    return np.max(np.abs(np.stack([e1, e2])), axis=0) / scale


# ---------------------------------------------------------------------------
# phase and eigenvalues


def _start_theta(params: DiracParams, z: np.ndarray, r0: float) -> np.ndarray:
    out = np.empty_like(z)
    for i, zi in enumerate(z):
        f1, f2 = _frobenius(params.ell, zi, params.m, params.potential, r0)
        out[i] = math.atan2(f1, f2)
    return out


def dirac_phase(params: DiracParams, z, a: float, r=None, *, rtol: float = RTOL, atol: float = ATOL):
    """Continuous phase theta = atan2(f1, f2) of the regular solution.

    Returns theta(a) for every energy in ``z``, or theta on the radii ``r``
    (shape ``(len(z), len(r))``) when ``r`` is given.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    r0 = start_radius(a)
    th0 = _start_theta(params, z, r0)
    pot, ell, m = params.potential, params.ell, params.m

    def rhs(rr, phi):
        th = phi + z * rr
        return -float(pot(rr)) + m * np.cos(2 * th) - (ell / rr) * np.sin(2 * th)

    sol = solve_ivp(rhs, (r0, a), th0 - z * r0, method="DOP853", rtol=rtol, atol=atol,
                    dense_output=r is not None)
    if sol.status != 0:
        raise SolverError(f"phase integration failed: {sol.message}")
    if r is None:
        return sol.y[:, -1] + z * a
    r = np.asarray(r, dtype=float)
    return sol.sol(r) + np.outer(z, r)


def _bc_offset(psi: float, component: str) -> float:
    # f1 sin psi + f2 cos psi = 0  <=>  theta = psi - pi/2 (mod pi)
    # f2 sin psi + f1 cos psi = 0  <=>  theta = -psi (mod pi)
    if component == "f1":
        return psi - math.pi / 2
    if component == "swapped":
        return -psi
    raise ValueError("component must be 'f1' or 'swapped'")


def eigenvalues_bc(params: DiracParams, a: float, psi: float, n_range, component: str = "f1") -> EigenSpectrum:
    """Levels z_n, n in ``n_range`` (positive indices), of the psi boundary problem on [0, a].

    The index is the phase count: theta(a, z_n) = psi - pi/2 + n pi, which
    makes a z_n - pi(n + l/2) - psi + pi/2 tend to the defect for large n.
    """
    if abs(psi) > math.pi / 2 + 1e-15:
        raise ValueError("psi must lie in [-pi/2, pi/2]")
    if params.ell < 0:
        raise ValueError("indexed spectra are defined for l > 0; use eigenvalues_in_window otherwise")
    n_lo, n_hi = int(n_range[0]), int(n_range[-1])
    if n_lo < 1 or n_hi < n_lo:
        raise ValueError("n_range must be a window of positive indices")
    n = np.arange(n_lo, n_hi + 1)
    offset = _bc_offset(psi, component)
    delta = params.potential.integral(0.0, a)
    guess = (math.pi * (n + params.ell / 2) + offset + delta) / a
    spacing = math.pi / a
    target = offset + n * math.pi
    z, f = find_monotone_roots(lambda zz: dirac_phase(params, zz, a), target,
                               guess - spacing, guess + spacing, xtol=1e-15, ftol=1e-13)
    meta = {"a": a, "ell": params.ell, "m": params.m, "psi": psi, "component": component,
            "potential": params.potential.label}
    return EigenSpectrum(n, z, np.abs(np.sin(f)), meta)


def eigenvalues_in_window(params: DiracParams, a: float, psi: float, z_lo: float, z_hi: float,
                          component: str = "f1") -> np.ndarray:
    """All eigenvalues of the psi boundary problem with z in (z_lo, z_hi), any sign of l."""
    if z_hi <= z_lo:
        raise ValueError("empty energy window")
    offset = _bc_offset(psi, component)
    th_lo, th_hi = dirac_phase(params, [z_lo, z_hi], a)
    k = np.arange(math.floor((th_lo - offset) / math.pi) + 1, math.ceil((th_hi - offset) / math.pi))
    k = k[(offset + k * math.pi > th_lo) & (offset + k * math.pi < th_hi)]
    if k.size == 0:
        return np.empty(0)
    target = offset + k * math.pi
    lo = np.full(k.shape, float(z_lo))
    hi = np.full(k.shape, float(z_hi))
    z, _ = find_monotone_roots(lambda zz: dirac_phase(params, zz, a), target, lo, hi,
                               xtol=1e-15, ftol=1e-13, max_widen=0)
    return np.sort(z)


def defect_per_level_dirac(spectrum: EigenSpectrum, a: float, ell: int, psi: float) -> np.ndarray:
    return a * spectrum.z - math.pi * (spectrum.n + ell / 2.0) - psi + math.pi / 2


def estimate_defect_dirac(spectrum: EigenSpectrum, a: float, ell: int, psi: float, order: int = 2) -> DefectEstimate:
    """Defect from a psi boundary spectrum, extrapolated in 1/n over the top third."""
    if len(spectrum) < 5:
        raise InsufficientDataError("defect estimation needs at least 5 levels")
    per = defect_per_level_dirac(spectrum, a, ell, psi)
    k = max(5, len(spectrum) // 3)
    sel = slice(len(spectrum) - k, None)
    value, spread = extrapolate_in_inverse_n(spectrum.n[sel] + ell / 2.0, per[sel], order)
    return DefectEstimate(value, spread, spectrum.n.copy(), per)


# ---------------------------------------------------------------------------
# tail defect


def tail_limit_vector(potential: PotentialSpec, r: float) -> np.ndarray:
    """exp(-i int_r^inf q) (i, 1): the large-z limit of the normalised decaying solution."""
    delta = potential.integral(r, math.inf)
    return cmath.exp(-1j * delta) * np.array([1j, 1.0])


def tail_limit_integral(potential: PotentialSpec, r, projector: np.ndarray = THETA1, r_max: float | None = None):
    """Solve F(r) = (i, 1) + int_r^inf P Vhat(t) F(t) dt for the given projector P.

    Returned on the radii ``r`` (array).  With P = THETA1 the solution is
    exp(-i int_r^inf q) (i, 1); P = THETA2 annihilates Vhat (i, 1).
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    R = potential.support_end() if r_max is None else r_max
    if not math.isfinite(R):
        raise ValueError("tail integral diverges for this potential")
    R = max(R, r.max())

    def rhs(t, y):
        F = y[:2] + 1j * y[2:]
        q = float(potential(t))
        Vh = np.array([[0.0, q], [-q, 0.0]])
        d = -(projector @ (Vh @ F))
        return np.concatenate([d.real, d.imag])

    y0 = np.array([0.0, 1.0, 1.0, 0.0])  # (i, 1) split into real and imaginary parts
    order = np.argsort(-r)
    sol = solve_ivp(rhs, (R, float(r.min())), y0, method="DOP853", rtol=1e-12, atol=1e-14,
                    t_eval=r[order] if r.min() < R else None, dense_output=True)
    vals = sol.sol(r)
    return (vals[:2] + 1j * vals[2:]).T


def decaying_solution(params: DiracParams, z: float, r, r_max: float | None = None) -> np.ndarray:
    """The solution equal to the free non-regular column beyond the support of q.

    Integrated backwards from ``r_max`` (default: support end of q) to the
    radii ``r``; returns an array of shape ``(len(r), 2)``.
    """
    ell = _positive_ell(params)
    energy = params.energy(z)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    R = params.potential.support_end() if r_max is None else r_max
    if not math.isfinite(R):
        raise ValueError("potential has no finite tail cut-off; pass r_max")
    R = max(R, float(r.max()))
    start = free_basis(params, energy, R).nonregular
    rhs_real = _rhs_real(ell, z, params.m, params.potential)

    def rhs(t, y):
        a = rhs_real(t, y[:2])
        b = rhs_real(t, y[2:])
        return [a[0], a[1], b[0], b[1]]

    y0 = [start[0].real, start[1].real, start[0].imag, start[1].imag]
    if R == r.min():
        return np.array([start])
    atol = 1e-3 * RTOL * max(abs(v) for v in y0)
    sol = solve_ivp(rhs, (R, float(r.min())), y0, method="DOP853", rtol=RTOL, atol=atol, dense_output=True)
    if sol.status != 0:
        raise SolverError(f"backward integration failed: {sol.message}")
    vals = sol.sol(r)
    return (vals[:2] + 1j * vals[2:]).T


def normalised_decaying(params: DiracParams, z: float, r, r_max: float | None = None) -> np.ndarray:
    """N(r) = -2 sqrt(m+z) e^{r eps} F~(r, z); tends to exp(-i delta(r)) (i, 1) as z grows."""
    energy = params.energy(z)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    F = decaying_solution(params, z, r, r_max)
    fac = -2.0 * energy.sqrt_m_plus * np.exp(r * energy.eps)
    return F * fac[:, None]


def tail_defect_solution(params: DiracParams, r: float, z_values=None, r_max: float | None = None):
    """Limit vector at r together with the finite-z normalised decaying solutions.

    Returns ``(limit, finite, errors)`` where ``finite[k]`` is N(r) at
    ``z_values[k]`` and ``errors[k] = |N - limit|``.  The default energies
    are 10 m, 50 m and 250 m.
    """
    if z_values is None:
        z_values = [10 * params.m, 50 * params.m, 250 * params.m]
    limit = tail_limit_vector(params.potential, r)
    finite = np.array([normalised_decaying(params, z, [r], r_max)[0] for z in z_values])
    errors = np.linalg.norm(finite - limit[None, :], axis=1)
    return limit, finite, errors


def _phase_from_normalised(N: np.ndarray) -> np.ndarray:
    """-arg N2 along the first axis, unwrapped."""
    return -np.unwrap(np.angle(N[..., 1]), axis=0)


def tail_defect_estimate(params: DiracParams, r, z_values=None, r_max: float | None = None,
                         extrapolate: bool = True):
    """Tail defect delta(r) = int_r^inf q from the phase of the normalised decaying solution.

    For each energy the phase -arg N2(r) is unwrapped along r (continuity
    from the cut-off, where it vanishes) and the finite-z values are
    extrapolated by a polynomial in 1/z (up to quadratic).  Returns ``(estimate, per_energy)`` with
    ``per_energy`` of shape ``(len(z_values), len(r))``.
    """
    if z_values is None:
        z_values = [10 * params.m, 50 * params.m, 250 * params.m]
    z_values = np.asarray(z_values, dtype=float)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    R = params.potential.support_end() if r_max is None else r_max
    R = max(R, float(r.max()))
    # dense r path from the cut-off gives a continuous branch of the phase
    path = np.unique(np.concatenate([np.linspace(float(r.min()), R, 400), r]))[::-1]
    per = np.empty((z_values.size, r.size))
    for k, z in enumerate(z_values):
        N = normalised_decaying(params, z, path, R)
        ph = -np.unwrap(np.angle(N[:, 1]))
        ph -= 2 * math.pi * round(ph[0] / (2 * math.pi))
        per[k] = np.interp(r, path[::-1], ph[::-1])
    if not extrapolate or z_values.size < 2:
        return per[-1], per
    powers = range(min(3, z_values.size))
    A = np.vstack([z_values ** (-float(p)) for p in powers]).T
    coef, *_ = np.linalg.lstsq(A, per, rcond=None)
    return coef[0], per
