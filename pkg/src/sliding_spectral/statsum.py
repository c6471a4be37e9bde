"""Statistical sums Z(T) = sum exp(-z_n / T) and their large-T expansions.

Conventions used throughout (checked against direct summation in the tests):

* 1-D Dirichlet problem on [0, a] with defect delta:
      Z(T) = (a/2) sqrt(T/pi) - 1/2 - delta / (2 sqrt(pi T)) + o(T^-1/2)
* k-dimensional box with separable potential:
      Z(T) = (T/4pi)^(k/2) (V_k - sqrt(pi/T) V_(k-1) + (pi/T) V_(k-2) - delta(G)/T + ...)
* anharmonic oscillator x^2/4 + q on the half line, and its k-fold product:
      Z(T) = T/2 - 1/4 - delta / (2 sqrt(pi T)) + o(T^-1/2)
      Z(T) = (T/2)^k (1 - k/(2T) - delta_sum / (T sqrt(pi T)) + ...)

A constant shift z_n -> z_n + c multiplies Z by exp(-c/T), which fixes the
sign of every defect term above.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .potentials import PotentialSpec
from ._roots import find_monotone_roots
from .types import EigenSpectrum, SolverError

__all__ = [
    "BoxDomain",
    "StatSumReport",
    "LevelLaw",
    "level_law",
    "partition_sum",
    "separable_partition_sum",
    "theta_identity_check",
    "theta_remainder",
    "asympt_1d",
    "asympt_multidim",
    "box_coefficients",
    "anharmonic_levels",
    "anharmonic_defect_fit",
    "asympt_anharmonic",
    "report",
]

TERM_TOL = 1e-18
PHASE_RTOL = 1e-10


@dataclass(frozen=True)
class BoxDomain:
    sides: tuple

    def __post_init__(self):
        sides = tuple(float(s) for s in np.atleast_1d(self.sides))
        if len(sides) < 1:
            raise ValueError("a box needs at least one side")
        if any(not s > 0 for s in sides):
            raise ValueError("box sides must be positive")
        object.__setattr__(self, "sides", sides)

    @property
    def k(self) -> int:
        return len(self.sides)

    def measures(self):
        """(S_k, S_(k-1), S_(k-2)): volume, boundary measure, measure of the facet intersections."""
        V = box_coefficients(self)
        k = self.k
        return tuple(V[i] * 2 ** (k - i) for i in (k, k - 1, k - 2))


@dataclass(frozen=True)
class StatSumReport:
    T: float
    z_direct: float
    z_asymptotic: float

    @property
    def residual(self) -> float:
        return self.z_direct - self.z_asymptotic


@dataclass(frozen=True)
class LevelLaw:
    """Analytic level law n -> z_n (n = 1, 2, ...), assumed eventually increasing and convex."""

    func: Callable
    name: str = "law"

    def __call__(self, n):
        return self.func(np.asarray(n, dtype=float))


def level_law(name: str) -> LevelLaw:
    """Built-in laws: ``nsq`` (n^2), ``box:a`` ((pi n / a)^2), ``harmonic`` (2n - 1/2)."""
    kind, _, arg = name.partition(":")
    if kind == "nsq":
        return LevelLaw(lambda n: n * n, name)
    if kind == "box":
        a = float(arg)
        if not a > 0:
            raise ValueError("box side must be positive")
        return LevelLaw(lambda n: (math.pi * n / a) ** 2, name)
    if kind == "harmonic":
        return LevelLaw(lambda n: 2.0 * n - 0.5, name)
    raise ValueError(f"unknown level law {name!r}")


def _sum_law(law: LevelLaw, T: float, max_terms: int):
    # blocks of terms; fsum keeps the result independent of block size
    terms = []
    total = 0.0
    start = 1
    block = 256
    while start <= max_terms:
        n = np.arange(start, start + block, dtype=float)
        t = np.exp(-law(n) / T)
        terms.append(t)
        total = math.fsum(np.concatenate(terms))
        last = t[-1]
        if last == 0.0 and total > 0.0:
            return total, 0.0
        if last < TERM_TOL * total and t[-1] < t[-2]:
            ratio = t[-1] / t[-2]
            # for convex increasing levels the term ratio keeps shrinking
            if ratio < 1:
                return total, last * ratio / (1.0 - ratio)
        start += block
        block = min(2 * block, 1 << 20)
    raise SolverError("partition sum did not converge: levels do not grow fast enough")


def partition_sum(levels, T: float, *, return_bound: bool = False, max_terms: int = 10**8):
    """sum_n exp(-z_n / T) for an :class:`EigenSpectrum`, an array of levels or a :class:`LevelLaw`.

    Finite spectra are summed in full; a warning-free truncation is the
    caller's business.  For a level law the sum stops once a term falls below
    1e-18 of the running total and a geometric bound on the remainder is
    returned with ``return_bound=True``.
    """
    if not T > 0:
        raise ValueError("temperature must be positive")
    if isinstance(levels, LevelLaw):
        total, bound = _sum_law(levels, T, max_terms)
    else:
        z = levels.z if isinstance(levels, EigenSpectrum) else np.asarray(levels, dtype=float)
        total, bound = math.fsum(np.exp(-np.sort(z.ravel()) / T)), 0.0
    return (total, bound) if return_bound else total


def _law_terms(law: LevelLaw, T: float) -> np.ndarray:
    total, _ = _sum_law(law, T, 10**8)
    n = 1
    while math.exp(-float(law(n)) / T) >= TERM_TOL * total:
        n *= 2
    k = np.arange(1, n + 1, dtype=float)
    t = np.exp(-law(k) / T)
    return t[t >= TERM_TOL * total * 1e-2]


def separable_partition_sum(laws: Sequence, T: float, max_tuples: int = 50_000_000) -> float:
    """Direct sum over index tuples of z = z_(n1,1) + ... + z_(nk,k).

    ``laws`` are level laws or 1-D level arrays.  Partial tuples whose weight
    is below 1e-20 of an upper bound on the total are dropped (the remaining
    factors are all at most one for positive levels).
    """
    factors = []
    for law in laws:
        if isinstance(law, LevelLaw):
            factors.append(_law_terms(law, T))
        else:
            z = law.z if isinstance(law, EigenSpectrum) else np.asarray(law, dtype=float)
            factors.append(np.exp(-np.sort(z) / T))
    cut = TERM_TOL * 1e-2 * math.prod(math.fsum(f) for f in factors)
    acc = factors[0]
    for f in factors[1:]:
        if acc.size * f.size > max_tuples:
            raise ValueError(f"too many index tuples ({acc.size * f.size:.3g}); lower T")
        acc = np.outer(acc, f).ravel()
        acc = acc[acc >= cut]
    return math.fsum(acc)


def theta_identity_check(z: float):
    """Both sides of sum_{n>=1} e^{-n^2/z} = -1/2 + sqrt(z pi)/2 + sqrt(z pi) sum_{n>=1} e^{-z n^2 pi^2}."""
    if not z > 0:
        raise ValueError("z must be positive")
    lhs = _gauss_tail(1.0 / z)
    root = math.sqrt(z * math.pi)
    rhs = math.fsum([-0.5, 0.5 * root, root * _gauss_tail(z * math.pi ** 2)])
    return lhs, rhs


def _gauss_tail(c: float) -> float:
    # sum_{n>=1} exp(-c n^2) to 1e-16 relative term tolerance
    terms = []
    n = 1
    while True:
        t = math.exp(-c * n * n)
        if t == 0.0:
            break
        terms.append(t)
        if t < 1e-16 * terms[0] * 1e-3:
            break
        n += 1
    return math.fsum(terms)


def theta_remainder(z: float) -> float:
    """sqrt(z pi) sum_{n>=1} e^{-z n^2 pi^2}, the exponentially small part of the identity."""
    return math.sqrt(z * math.pi) * _gauss_tail(z * math.pi ** 2)


def asympt_1d(T: float, a: float, delta: float) -> float:
    if not T > 0 or not a > 0:
        raise ValueError("T and a must be positive")
    return 0.5 * a * math.sqrt(T / math.pi) - 0.5 - delta / (2.0 * math.sqrt(T * math.pi))


def box_coefficients(domain: BoxDomain) -> dict:
    """{k: V_k, k-1: V_(k-1), k-2: V_(k-2)} with V_(-1) = 0 and V_0 = 1."""
    s = domain.sides
    k = domain.k
    Vk = math.prod(s)
    out = {k: Vk, k - 1: Vk * sum(1.0 / x for x in s)}
    if k >= 2:
        out[k - 2] = Vk * sum(1.0 / (x * y) for x, y in combinations(s, 2))
    out[0] = 1.0
    out[-1] = 0.0
    return out


def asympt_multidim(T: float, domain: BoxDomain, deltaG: float) -> float:
    if not T > 0:
        raise ValueError("T must be positive")
    V = box_coefficients(domain)
    k = domain.k
    inner = V[k] - math.sqrt(math.pi / T) * V[k - 1] + (math.pi / T) * V[k - 2] - deltaG / T
    return (T / (4 * math.pi)) ** (k / 2) * inner


def asympt_anharmonic(T: float, delta: float, k: int = 1) -> float:
    """Anharmonic expansion; for k > 1 ``delta`` is the sum of the 1-D defects."""
    if not T > 0:
        raise ValueError("T must be positive")
    if int(k) != k or k < 1:
        raise ValueError("dimension must be a positive integer")
    if k == 1:
        return T / 2 - 0.25 - delta / (2 * math.sqrt(T * math.pi))
    return (T / 2) ** k * (1 - k / (2 * T) - delta / (T * math.sqrt(T * math.pi)))


# ---------------------------------------------------------------------------
# anharmonic oscillator levels


def _mapped_phase(q: PotentialSpec, z: np.ndarray, x_from: np.ndarray, x_to: np.ndarray) -> np.ndarray:
    """Prufer phase carried from x_from to x_to (theta = 0 at x_from), one solve for all z.

    Each energy gets its own interval, mapped onto t in [0, 1].
    """
    S = np.sqrt(np.maximum(z, 1.0))
    span = x_to - x_from

    def rhs(t, th):
        x = x_from + span * t
        V = 0.25 * x * x + q(x)
        s = np.sin(th)
        c = np.cos(th)
        return span * (S * c * c + (z - V) / S * s * s)

    sol = solve_ivp(rhs, (0.0, 1.0), np.zeros(z.size), method="DOP853", rtol=PHASE_RTOL, atol=PHASE_RTOL)
    if sol.status != 0:
        raise SolverError(f"phase integration failed: {sol.message}")
    return sol.y[:, -1]


def _anharmonic_mismatch(q: PotentialSpec, z: np.ndarray, L: float) -> np.ndarray:
    # left phase up to half the turning point, right phase integrated back
    # from L, so neither side runs into the forbidden zone in its unstable
    # direction; at x = sqrt(z) the local wavenumber is close to S, which keeps
    # the mismatch nearly linear in z
    xt = np.minimum(np.sqrt(np.maximum(z, 0.25)), L)
    left = _mapped_phase(q, z, np.zeros(z.size), xt)
    right = _mapped_phase(q, z, np.full(z.size, L), xt)
    return left - right


def _anharmonic_solve(q: PotentialSpec, n: np.ndarray, L: float) -> np.ndarray:
    centre = 2.0 * n - 0.5
    z, _ = find_monotone_roots(lambda zz: _anharmonic_mismatch(q, zz, L), n * math.pi, centre - 1.0, centre + 1.0,
                               xtol=1e-11, ftol=1e-9)
    return z


def anharmonic_levels(q: PotentialSpec | None, n_max: int, n_min: int = 1, *, numeric: bool = False,
                      L: float | None = None, check: bool = True) -> EigenSpectrum:
    """Levels of -y'' + (x^2/4 + q) y = z y, y(0) = 0, on the half line.

    For q = 0 (or None) the exact values 2n - 1/2 are returned unless
    ``numeric`` is set.  Otherwise Dirichlet problems on [0, L] are solved
    with L = max(20, 2 sqrt(z_max) + 12), so the classically forbidden
    stretch suppresses the truncation error far below 1e-12; with ``check``
    the solve is repeated on [0, 2L] and a move above 1e-8 raises.
    """
    if n_max < 1 or n_min < 1 or n_min > n_max:
        raise ValueError("need 1 <= n_min <= n_max")
    n = np.arange(n_min, n_max + 1, dtype=float)
    free = q is None or q.kind == "zero"
    if free and not numeric:
        return EigenSpectrum(n.astype(int), 2 * n - 0.5, np.zeros(n.size), {"q": "zero"})
    if q is None:
        from .potentials import zero
        q = zero()
    if L is None:
        L = max(20.0, 2.0 * math.sqrt(2.0 * n_max + 2.0 * abs(q.abs_integral_estimate()) + 2) + 12.0)
    z = _anharmonic_solve(q, n, L)
    if check:
        z2 = _anharmonic_solve(q, n, 2 * L)
        move = float(np.max(np.abs(z2 - z)))
        if move > 1e-8:
            raise SolverError(f"anharmonic levels depend on the truncation length (move {move:.2e})")
    return EigenSpectrum(n.astype(int), z, None, {"q": q.label, "L": L})


def anharmonic_defect_fit(spectrum: EigenSpectrum, order: int = 2) -> float:
    """Fit (z_n - 2n + 1/2) pi sqrt(2n) against powers of n^-1/2 and return the constant term."""
    n = spectrum.n.astype(float)
    y = (spectrum.z - 2 * n + 0.5) * math.pi * np.sqrt(2 * n)
    A = np.vander(n ** -0.5, order + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0])


def report(levels, T_grid, asymptote: Callable[[float], float]):
    """StatSumReport rows for a temperature grid."""
    return [StatSumReport(float(T), partition_sum(levels, T), float(asymptote(T))) for T in T_grid]
