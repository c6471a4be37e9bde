"""Potential descriptions shared by all solvers.

A potential is either a sampled grid with an interpolation rule or one of a
few built-in analytic shapes identified by a tag string:

    zero                 q = 0
    const:c              q = c
    sin                  q = sin r
    gauss:mu,sigma,amp   q = amp * exp(-(r - mu)^2 / (2 sigma^2))
    bump:center,width,amp
                         smooth compactly supported bump on
                         |r - center| < width / 2, normalised so that its
                         integral equals amp

Grid potentials are extended by their first value below the grid and by
zero above it, so tail integrals of a sampled potential are finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, interpolate, special

__all__ = ["PotentialSpec", "from_tag", "zero", "constant"]

_TAGS = ("zero", "const", "sin", "gauss", "bump")


def _bump_norm() -> float:
    # integral of exp(-1/(1-x^2)) over (-1, 1)
    val, _ = integrate.quad(lambda x: math.exp(-1.0 / (1.0 - x * x)), -1.0, 1.0, epsabs=0, epsrel=1e-13)
    return val


_BUMP_NORM = _bump_norm()


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """A real potential q(r) on the half line.

    Either ``closed_form_tag`` is set (analytic evaluation, the grid is only
    informative) or ``grid``/``values`` describe samples interpolated
    linearly or by a cubic spline.
    """

    grid: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0]))
    values: np.ndarray = field(default_factory=lambda: np.zeros(2))
    interpolation: str = "cubic"
    closed_form_tag: Optional[str] = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if self.closed_form_tag is not None:
            kind, params = self._parse_tag()
            object.__setattr__(self, "_kind", kind)
            object.__setattr__(self, "_params", params)
            return
        object.__setattr__(self, "_kind", "sampled")
        object.__setattr__(self, "_params", ())
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("potential grid must be strictly increasing with at least two points")
        if grid[0] < 0:
            raise ValueError("radial grid must be non-negative")
        if not np.all(np.isfinite(values)):
            raise ValueError("potential samples must be finite")
        if self.interpolation not in ("linear", "cubic"):
            raise ValueError(f"unknown interpolation rule {self.interpolation!r}")
        if self.interpolation == "cubic" and grid.size < 4:
            raise ValueError("cubic interpolation needs at least four samples")

    # -- construction -------------------------------------------------------

    @classmethod
    def analytic(cls, tag: str) -> "PotentialSpec":
        return cls(closed_form_tag=tag.strip())

    @classmethod
    def sampled(cls, grid, values, interpolation: str = "cubic") -> "PotentialSpec":
        return cls(grid=grid, values=values, interpolation=interpolation)

    def _parse_tag(self):
        name, _, args = self.closed_form_tag.partition(":")
        if name not in _TAGS:
            raise ValueError(f"unknown potential tag {self.closed_form_tag!r}")
        params = tuple(float(v) for v in args.split(",")) if args else ()
        expected = {"zero": 0, "const": 1, "sin": 0, "gauss": 3, "bump": 3}[name]
        if len(params) != expected:
            raise ValueError(f"tag {name!r} takes {expected} parameter(s), got {len(params)}")
        if name == "gauss" and params[1] <= 0:
            raise ValueError("gaussian width must be positive")
        if name == "bump" and params[1] <= 0:
            raise ValueError("bump width must be positive")
        return name, params

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def params(self) -> tuple:
        return self._params

    @property
    def label(self) -> str:
        return self.closed_form_tag or f"grid[{self.grid.size}]"

    # -- evaluation ---------------------------------------------------------

    def _interpolant(self):
        cached = self.__dict__.get("_interp")
        if cached is None:
            if self.interpolation == "cubic":
                cached = interpolate.CubicSpline(self.grid, self.values, bc_type="not-a-knot")
            else:
                cached = None
            object.__setattr__(self, "_interp", cached)
        return cached

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        kind = self.kind
        p = self.params
        if kind == "zero":
            return np.zeros_like(r)
        if kind == "const":
            return np.full_like(r, p[0])
        if kind == "sin":
            return np.sin(r)
        if kind == "gauss":
            mu, sigma, amp = p
            return amp * np.exp(-0.5 * ((r - mu) / sigma) ** 2)
        if kind == "bump":
            c, w, amp = p
            x = 2.0 * (r - c) / w
            inside = np.abs(x) < 1.0
            xs = np.where(inside, x, 0.0)
            out = np.where(inside, np.exp(-1.0 / (1.0 - xs * xs)), 0.0)
            return out * amp * 2.0 / (w * _BUMP_NORM)
        # sampled
        rc = np.clip(r, self.grid[0], self.grid[-1])
        if self.interpolation == "cubic":
            out = self._interpolant()(rc)
        else:
            out = np.interp(rc, self.grid, self.values)
        return np.where(r > self.grid[-1], 0.0, out)

    def scalar(self, r: float) -> float:
        return float(self(np.asarray(r)))

    def support_end(self) -> float:
        """Radius beyond which q vanishes (or is below 1e-17 in magnitude)."""
        kind = self.kind
        p = self.params
        if kind == "zero":
            return 0.0
        if kind in ("const", "sin"):
            return math.inf
        if kind == "gauss":
            mu, sigma, amp = p
            if amp == 0:
                return 0.0
            return mu + sigma * math.sqrt(2.0 * max(math.log(abs(amp) / 1e-17), 0.0))
        if kind == "bump":
            return p[0] + 0.5 * p[1]
        return float(self.grid[-1])

    def integral(self, lo: float, hi: float) -> float:
        """Integral of q over [lo, hi]; ``hi`` may be ``inf`` for decaying tails."""
        if hi < lo:
            return -self.integral(hi, lo)
        kind = self.kind
        p = self.params
        if kind == "zero":
            return 0.0
        if kind == "const":
            if math.isinf(hi):
                raise ValueError("tail integral of a constant potential diverges")
            return p[0] * (hi - lo)
        if kind == "sin":
            if math.isinf(hi):
                raise ValueError("tail integral of sin diverges")
            return math.cos(lo) - math.cos(hi)
        if kind == "gauss":
            mu, sigma, amp = p
            s = sigma * math.sqrt(2.0)
            return amp * sigma * math.sqrt(math.pi / 2.0) * (special.erf((hi - mu) / s) - special.erf((lo - mu) / s))
        hi_eff = min(hi, self.support_end())
        if kind == "bump":
            lo_eff = max(lo, p[0] - 0.5 * p[1])
        else:
            lo_eff = lo
        if hi_eff <= lo_eff:
            return 0.0
        if kind == "sampled" and self.interpolation == "cubic":
            total = 0.0
            below = min(hi_eff, self.grid[0])
            if below > lo_eff:
                total += self.values[0] * (below - lo_eff)
                lo_eff = below
            if hi_eff > lo_eff:
                total += float(self._interpolant().integrate(lo_eff, hi_eff))
            return total
        pts = None
        if kind == "sampled":
            pts = self.grid[(self.grid > lo_eff) & (self.grid < hi_eff)]
            if pts.size > 45:
                r = np.concatenate(([lo_eff], pts, [hi_eff]))
                return float(integrate.trapezoid(self(r), r))
        val, _ = integrate.quad(self.scalar, lo_eff, hi_eff, points=pts, limit=400, epsabs=1e-14, epsrel=1e-12)
        return val

    def abs_integral_estimate(self) -> float:
        """Trapezoid estimate of the integral of |q| over the sampling grid."""
        r = self.grid if self.closed_form_tag is None else np.linspace(0.0, max(self.grid[-1], 1.0), 2001)
        return float(integrate.trapezoid(np.abs(self(r)), r))

    def taylor_at(self, r0: float) -> tuple[float, float]:
        """Value and slope of q at ``r0`` (used by the Frobenius starts)."""
        kind = self.kind
        p = self.params
        if kind == "zero":
            return 0.0, 0.0
        if kind == "const":
            return p[0], 0.0
        if kind == "sin":
            return math.sin(r0), math.cos(r0)
        h = 1e-4 * max(1.0, r0)
        lo = max(r0 - h, 0.0)
        return self.scalar(r0), (self.scalar(r0 + h) - self.scalar(lo)) / (r0 + h - lo)

    def shifted(self, c: float) -> "PotentialSpec":
        """q + c as a new potential (sampled potentials stay sampled)."""
        kind = self.kind
        if kind == "zero":
            return constant(c)
        if kind == "const":
            return constant(self.params[0] + c)
        if kind == "sampled":
            return PotentialSpec.sampled(self.grid, self.values + c, self.interpolation)
        r = np.linspace(0.0, 50.0, 20001)
        return PotentialSpec.sampled(r, self(r) + c)

    def negated(self) -> "PotentialSpec":
        kind = self.kind
        if kind == "zero":
            return self
        if kind == "const":
            return constant(-self.params[0])
        if kind in ("gauss", "bump"):
            a, b, amp = self.params
            return PotentialSpec.analytic(f"{kind}:{a!r},{b!r},{-amp!r}")
        r = self.grid if kind == "sampled" else np.linspace(0.0, 50.0, 20001)
        return PotentialSpec.sampled(r, -self(r), self.interpolation)

    def cache_key(self) -> str:
        if self.closed_form_tag is not None:
            return self.closed_form_tag
        import hashlib

        h = hashlib.sha256()
        h.update(self.grid.tobytes())
        h.update(self.values.tobytes())
        h.update(self.interpolation.encode())
        return h.hexdigest()


def from_tag(tag: str) -> PotentialSpec:
    return PotentialSpec.analytic(tag)


def zero() -> PotentialSpec:
    return PotentialSpec.analytic("zero")


def constant(c: float) -> PotentialSpec:
    return PotentialSpec.analytic(f"const:{float(c)!r}")
