"""Small result containers used across the solvers."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "BranchedEnergy",
    "EigenSpectrum",
    "SolutionSample",
    "DefectEstimate",
    "SolverError",
    "BracketError",
    "InsufficientDataError",
]


class SolverError(RuntimeError):
    """A forward solver could not produce a trustworthy answer."""


class BracketError(SolverError):
    """An eigenvalue search window did not contain exactly one root."""


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class BranchedEnergy:
    """An energy together with its branch-consistent spectral parameter.

    For the Schrodinger problems ``eps = i sqrt(z)``.  For the Dirac problems
    ``eps = sqrt(m + z) * sqrt(m - z)`` where the two square roots follow the
    cut conventions on ``z > m`` and ``z < -m`` and are principal elsewhere,
    which gives ``Re eps > 0`` off the cuts.
    """

    z: complex
    eps: complex
    sqrt_m_plus: complex = complex("nan")
    sqrt_m_minus: complex = complex("nan")
    m: Optional[float] = None

    @classmethod
    def schrodinger(cls, z) -> "BranchedEnergy":
        z = complex(z)
        if z.imag == 0.0 and z.real > 0:
            eps = 1j * math.sqrt(z.real)
        else:
            eps = 1j * cmath.sqrt(z)
        return cls(z=z, eps=eps)

    @classmethod
    def dirac(cls, z, m: float) -> "BranchedEnergy":
        if m <= 0:
            raise ValueError("mass must be positive")
        z = complex(z)
        if z.imag == 0.0 and z.real > m:
            sp = complex(math.sqrt(z.real + m), 0.0)
            sm = 1j * math.sqrt(z.real - m)
        elif z.imag == 0.0 and z.real < -m:
            sp = -1j * math.sqrt(-z.real - m)
            sm = complex(math.sqrt(m - z.real), 0.0)
        else:
            sp = cmath.sqrt(m + z)
            sm = cmath.sqrt(m - z)
        return cls(z=z, eps=sp * sm, sqrt_m_plus=sp, sqrt_m_minus=sm, m=float(m))

    @property
    def is_real(self) -> bool:
        return self.z.imag == 0.0

    @property
    def momentum(self) -> float:
        """|eps| for real energies above the mass gap, i.e. sqrt(z^2 - m^2)."""
        return abs(self.eps)


@dataclass
class EigenSpectrum:
    """Indexed eigenvalues with strictly increasing values and contiguous indices."""

    n: np.ndarray
    z: np.ndarray
    residual: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=int)
        self.z = np.asarray(self.z, dtype=float)
        if self.n.shape != self.z.shape or self.n.ndim != 1:
            raise ValueError("indices and eigenvalues must be 1-D arrays of equal length")
        if self.n.size > 1:
            if np.any(np.diff(self.n) != 1):
                raise ValueError("eigenvalue indices must be contiguous")
            if np.any(np.diff(self.z) <= 0):
                raise ValueError("eigenvalues must be strictly increasing in the index")
        if self.residual is not None:
            self.residual = np.asarray(self.residual, dtype=float)

    def __len__(self):
        return int(self.n.size)

    @property
    def sqrt_z(self) -> np.ndarray:
        return np.sqrt(self.z)

    def window(self, lo: int, hi: int) -> "EigenSpectrum":
        keep = (self.n >= lo) & (self.n <= hi)
        res = None if self.residual is None else self.residual[keep]
        return EigenSpectrum(self.n[keep], self.z[keep], res, dict(self.meta))


@dataclass
class SolutionSample:
    """Solution values on a radial grid.

    ``values`` has shape ``(len(r),)`` for scalar equations and
    ``(len(r), 2)`` for the Dirac systems.  ``derivative`` is filled for the
    second order equations.
    """

    r: np.ndarray
    values: np.ndarray
    derivative: Optional[np.ndarray] = None

    @property
    def f1(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def f2(self) -> np.ndarray:
        return self.values[:, 1]


@dataclass
class DefectEstimate:
    """Extrapolated quantum defect with the per-level estimates it came from."""

    value: float
    uncertainty: float
    n: np.ndarray
    per_level: np.ndarray

    def __float__(self):
        return float(self.value)
