"""Sliding inverse problems: potentials from defect curves.

A defect curve measured from the origin, delta(a) = int_0^a q, gives
q = d delta / da; a tail curve, delta(r) = int_r^inf q, gives q = -d delta / dr.
On a box the field delta(G(a1, ..., ak)) gives q through the mixed
derivative in all sides.  Differentiation is a plain second-order stencil
(central inside, one-sided at the ends), so noise of size sigma in the
curve turns into an error of order sigma / h in q.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.signal import savgol_filter

from ._parallel import parallel_map
from .dirac import DiracParams, eigenvalues_bc, estimate_defect_dirac
from .potentials import PotentialSpec
from .schrodinger import RadialProblem, eigenvalues_dirichlet, estimate_defect
from .types import EigenSpectrum, InsufficientDataError, SolverError

__all__ = [
    "DefectCurve",
    "DefectField2D",
    "Smoothing",
    "recover_q_1d",
    "recover_q_multidim",
    "mixed_derivative",
    "assemble_dirac_v",
    "PipelineResult",
    "sliding_pipeline_schrodinger",
    "sliding_pipeline_dirac",
    "parse_grid",
]

SIDES = ("from_origin", "tail")


@dataclass(frozen=True)
class Smoothing:
    """Savitzky-Golay pre-smoothing of the curve (uniform spacing only)."""

    window: int = 7
    order: int = 3


@dataclass
class DefectCurve:
    endpoints: np.ndarray
    values: np.ndarray
    side: str = "from_origin"

    def __post_init__(self):
        self.endpoints = np.asarray(self.endpoints, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        if self.endpoints.ndim != 1 or self.endpoints.shape != self.values.shape:
            raise ValueError("endpoints and values must be 1-D arrays of equal length")
        steps = np.diff(self.endpoints)
        if np.any(steps == 0):
            raise ValueError("adjacent endpoints coincide")
        if np.any(steps < 0):
            raise ValueError("endpoints must be strictly increasing")
        if np.any(self.endpoints <= 0):
            raise ValueError("endpoints must be positive")


@dataclass
class DefectField2D:
    a1: np.ndarray
    a2: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.a1 = np.asarray(self.a1, dtype=float)
        self.a2 = np.asarray(self.a2, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.a1.size, self.a2.size):
            raise ValueError("field shape must be (len(a1), len(a2))")
        for ax in (self.a1, self.a2):
            if np.any(np.diff(ax) <= 0):
                raise ValueError("lattice axes must be strictly increasing")


def _derivative(x: np.ndarray, y: np.ndarray, axis: int = 0) -> np.ndarray:
    return np.gradient(y, x, axis=axis, edge_order=2)


def recover_q_1d(curve: DefectCurve, smoothing: Optional[Smoothing] = None, interpolation: str = "cubic") -> PotentialSpec:
    """q on the curve's endpoints, returned as a sampled potential."""
    x, y = curve.endpoints, curve.values
    if x.size < 3:
        raise InsufficientDataError("differentiation needs at least 3 samples")
    if smoothing is not None:
        h = np.diff(x)
        if np.ptp(h) > 1e-6 * h.mean():
            raise ValueError("Savitzky-Golay smoothing needs a uniform grid")
        if smoothing.window > x.size:
            raise InsufficientDataError("smoothing window longer than the curve")
        y = savgol_filter(y, smoothing.window, smoothing.order)
    q = _derivative(x, y)
    if curve.side == "tail":
        q = -q
    if interpolation == "cubic" and x.size < 4:
        interpolation = "linear"
    return PotentialSpec.sampled(x, q, interpolation)


def mixed_derivative(axes, values: np.ndarray) -> np.ndarray:
    """d^k / (d a1 ... d ak) of a field sampled on a rectangular lattice."""
    out = np.asarray(values, dtype=float)
    if out.ndim != len(axes):
        raise ValueError("one axis per field dimension is required")
    for k, ax in enumerate(axes):
        ax = np.asarray(ax, dtype=float)
        if ax.size < 3:
            raise InsufficientDataError("lattice needs at least 3 points per axis")
        if np.any(np.diff(ax) <= 0):
            raise ValueError("lattice axes must be strictly increasing")
        out = _derivative(ax, out, axis=k)
    return out


def recover_q_multidim(fld: DefectField2D) -> np.ndarray:
    """q(a1, a2) on the lattice from the box integrals delta(G(a1, a2))."""
    return mixed_derivative((fld.a1, fld.a2), fld.values)


def assemble_dirac_v(r, ell: int, m: float, q) -> np.ndarray:
    """V(r) = [[-l/r, m - q], [m + q, l/r]] for every radius; shape (len(r), 2, 2)."""
    r = np.asarray(r, dtype=float)
    q = np.broadcast_to(np.asarray(q, dtype=float), r.shape)
    V = np.empty(r.shape + (2, 2))
    V[..., 0, 0] = -ell / r
    V[..., 0, 1] = m - q
    V[..., 1, 0] = m + q
    V[..., 1, 1] = ell / r
    return V


def parse_grid(text: str) -> np.ndarray:
    """'lo:hi:step' (inclusive of hi when it lands on the grid) or a comma list."""
    if ":" in text:
        lo, hi, step = (float(v) for v in text.split(":"))
        if step <= 0 or hi < lo:
            raise ValueError("grid needs lo <= hi and a positive step")
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return lo + step * np.arange(n)
    return np.array([float(v) for v in text.split(",")])


# ---------------------------------------------------------------------------
# pipelines


@dataclass
class PipelineResult:
    curve: DefectCurve
    uncertainty: np.ndarray
    valid: np.ndarray
    recovered: Optional[PotentialSpec]
    q_true: np.ndarray
    q_hat: np.ndarray
    extra: dict = field(default_factory=dict)

    @property
    def l2_relative_error(self) -> float:
        ok = self.valid
        num = np.trapezoid((self.q_hat[ok] - self.q_true[ok]) ** 2, self.curve.endpoints[ok])
        den = np.trapezoid(self.q_true[ok] ** 2, self.curve.endpoints[ok])
        return math.sqrt(num / den) if den > 0 else math.sqrt(num)

    @property
    def max_error(self) -> float:
        ok = self.valid
        return float(np.max(np.abs(self.q_hat[ok] - self.q_true[ok])))


def _cache_path(cache_dir, payload: dict) -> Optional[Path]:
    if cache_dir is None:
        return None
    key = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:32]
    return Path(cache_dir) / f"{key}.npz"


def _cached_spectrum(cache_dir, payload: dict, compute):
    path = _cache_path(cache_dir, payload)
    if path is not None and path.exists():
        with np.load(path) as data:
            return data["n"], data["z"]
    n, z = compute()
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp.npz")
        np.savez(tmp, n=n, z=z)
        tmp.replace(path)
    return n, z


def _schrodinger_endpoint(a: float, q: PotentialSpec, ell: int, n_max: int, cache_dir):
    payload = {"kind": "schrodinger", "q": q.cache_key(), "ell": ell, "a": repr(float(a)), "n_max": n_max}

    def compute():
        spec = eigenvalues_dirichlet(RadialProblem(q, ell, a), n_max)
        return spec.n, spec.z

    try:
        n, z = _cached_spectrum(cache_dir, payload, compute)
        est = estimate_defect(EigenSpectrum(n, z), a, ell)
        return est.value, est.uncertainty, True
    except (SolverError, ValueError):
        return math.nan, math.nan, False


def _dirac_endpoint(a: float, q: PotentialSpec, ell: int, m: float, psi: float, n_levels: int, cache_dir):
    payload = {"kind": "dirac", "q": q.cache_key(), "ell": ell, "m": repr(float(m)), "psi": repr(float(psi)),
               "a": repr(float(a)), "n": n_levels}

    def compute():
        spec = eigenvalues_bc(DiracParams(ell, m, q), a, psi, (1, n_levels))
        return spec.n, spec.z

    try:
        n, z = _cached_spectrum(cache_dir, payload, compute)
        est = estimate_defect_dirac(EigenSpectrum(n, z), a, ell, psi)
        return est.value, est.uncertainty, True
    except (SolverError, ValueError):
        return math.nan, math.nan, False


def _finish(a_grid, results, q_true: PotentialSpec, smoothing) -> PipelineResult:
    vals = np.array([r[0] for r in results])
    unc = np.array([r[1] for r in results])
    valid = np.array([r[2] for r in results], dtype=bool)
    curve = DefectCurve(a_grid, np.where(valid, vals, 0.0), "from_origin")
    truth = np.asarray(q_true(a_grid), dtype=float) * np.ones(a_grid.size)
    recovered = None
    q_hat = np.full(a_grid.size, math.nan)
    if valid.sum() >= 3:
        sub = DefectCurve(a_grid[valid], vals[valid], "from_origin")
        smooth = smoothing if (smoothing is not None and valid.all()) else None
        recovered = recover_q_1d(sub, smooth)
        q_hat[valid] = recovered.values
    return PipelineResult(curve, unc, valid, recovered, truth, q_hat)


def sliding_pipeline_schrodinger(q_true: PotentialSpec, ell: int, a_grid, n_max: int = 60, *,
                                 smoothing: Optional[Smoothing] = None, cache_dir=None,
                                 workers: Optional[int] = None) -> PipelineResult:
    """Dirichlet spectra on [0, a] for every a -> defect curve -> q.

    Endpoints whose solve fails are masked out of the recovery.
    """
    a_grid = np.asarray(a_grid, dtype=float)
    if n_max < 20:
        raise ValueError("the pipeline needs n_max >= 20")
    fn = partial(_schrodinger_endpoint, q=q_true, ell=ell, n_max=n_max, cache_dir=cache_dir)
    return _finish(a_grid, parallel_map(fn, a_grid, workers), q_true, smoothing)


def sliding_pipeline_dirac(q_true: PotentialSpec, ell: int, m: float, psi: float, a_grid, n_levels: int = 40, *,
                           smoothing: Optional[Smoothing] = None, cache_dir=None,
                           workers: Optional[int] = None) -> PipelineResult:
    """psi boundary spectra on [0, a] -> defect curve -> q and the assembled V."""
    if ell < 1 or not m > 0:
        raise ValueError("the Dirac pipeline needs l >= 1 and m > 0")
    a_grid = np.asarray(a_grid, dtype=float)
    fn = partial(_dirac_endpoint, q=q_true, ell=ell, m=m, psi=psi, n_levels=n_levels, cache_dir=cache_dir)
    res = _finish(a_grid, parallel_map(fn, a_grid, workers), q_true, smoothing)
    res.extra["V"] = assemble_dirac_v(a_grid, ell, m, np.nan_to_num(res.q_hat))
    return res
