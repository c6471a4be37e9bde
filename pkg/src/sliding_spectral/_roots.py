"""Vectorised root finding for monotone phase functions."""
from __future__ import annotations

import numpy as np

from .types import BracketError


def find_monotone_roots(phase, target, lo, hi, *, xtol=1e-13, ftol=0.0, max_iter=200, max_widen=60, floor=None):
    """Solve ``phase(x)[i] = target[i]`` for every i, assuming ``phase`` increases in x.

    ``phase`` maps an array of abscissae to an array of phases of the same
    shape.  Each root gets its own starting bracket ``[lo[i], hi[i]]``; a
    bracket that does not straddle its target is widened geometrically.
    Returns ``(x, f)`` where ``f = phase(x) - target`` at the accepted points.
    """
    target = np.asarray(target, dtype=float)
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    f_lo = phase(lo) - target
    f_hi = phase(hi) - target

    width = hi - lo
    for _ in range(max_widen):
        bad_lo = f_lo > 0
        bad_hi = f_hi < 0
        if not (bad_lo.any() or bad_hi.any()):
            break
        if bad_lo.any():
            # the old lower end becomes a valid upper end
            hi[bad_lo] = lo[bad_lo]
            f_hi[bad_lo] = f_lo[bad_lo]
            lo[bad_lo] -= width[bad_lo]
            if floor is not None:
                lo[bad_lo] = np.maximum(lo[bad_lo], floor)
            f_lo[bad_lo] = phase(lo[bad_lo]) - target[bad_lo]
        if bad_hi.any():
            lo[bad_hi] = hi[bad_hi]
            f_lo[bad_hi] = f_hi[bad_hi]
            hi[bad_hi] += width[bad_hi]
            f_hi[bad_hi] = phase(hi[bad_hi]) - target[bad_hi]
        width = np.where(bad_lo | bad_hi, 2.0 * width, width)
    if np.any(f_lo > 0) or np.any(f_hi < 0):
        raise BracketError("could not bracket all requested roots")

    x = np.where(f_lo == 0, lo, np.where(f_hi == 0, hi, 0.5 * (lo + hi)))
    fx = np.zeros_like(x)
    done = (f_lo == 0) | (f_hi == 0)
    last = np.zeros(x.shape, dtype=int)  # +1 if hi moved last, -1 if lo moved last
    history = [np.full(x.shape, np.inf)] * 3
    bisect = np.zeros(x.shape, dtype=bool)

    for _ in range(max_iter):
        act = ~done
        if not act.any():
            break
        l, h, fl, fh = lo[act], hi[act], f_lo[act], f_hi[act]
        cand = (l * fh - h * fl) / (fh - fl)
        mid = 0.5 * (l + h)
        bad = bisect[act] | ~np.isfinite(cand) | (cand <= l) | (cand >= h)
        xa = np.where(bad, mid, cand)
        fa = phase(xa) - target[act]

        idx = np.flatnonzero(act)
        x[idx] = xa
        fx[idx] = fa
        up = fa > 0
        down = fa < 0
        # Illinois: halve the stale end when the same side moves twice
        hi_idx = idx[up]
        lo_idx = idx[down]
        hi[hi_idx] = xa[up]
        f_hi[hi_idx] = fa[up]
        f_lo[hi_idx] = np.where(last[hi_idx] == 1, 0.5 * f_lo[hi_idx], f_lo[hi_idx])
        last[hi_idx] = 1
        lo[lo_idx] = xa[down]
        f_lo[lo_idx] = fa[down]
        f_hi[lo_idx] = np.where(last[lo_idx] == -1, 0.5 * f_hi[lo_idx], f_hi[lo_idx])
        last[lo_idx] = -1

        width = hi - lo
        scale = np.maximum(1.0, np.abs(xa))
        done[idx] = (np.abs(fa) <= ftol) | (width[idx] <= xtol * scale)
        # fall back to bisection when three steps failed to halve the bracket
        bisect = width > 0.5 * history[0]
        history = history[1:] + [width]
    else:
        if not done.all():
            raise BracketError("root refinement did not converge")
    return x, fx
