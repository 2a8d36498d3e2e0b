"""Scalar and vectorised root finding, golden-section search and
decade-based limit estimation used across the package."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NoStableLimit, ToleranceError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def invert_increasing(fn, y, *, rtol: float = 2.0**-52):
    """Solve ``fn(x) = y`` for ``x >= 0`` elementwise, ``fn`` increasing with
    ``fn(0) = 0``.

    The bracket is found by bisecting on the binary exponent (``x = 2^e`` for
    ``e`` in ``[-1075, 1024]``), then refined by plain bisection inside
    ``[2^e, 2^(e+1)]``; about seventy vectorised steps for any target.
    Targets above ``fn(2^1023)`` map to ``inf``; callers decide whether that
    is an error.
    """
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    if np.any(y < 0) or np.any(~np.isfinite(y)):
        raise ValueError("targets must be finite and nonnegative")
    with np.errstate(over="ignore", invalid="ignore"):
        # nan at the top comes from overflow (inf/inf, inf-inf) and counts as huge
        top = fn(np.full(y.shape, 2.0**1023))
        unreachable = ~((top >= y) | np.isnan(top))
        active = (y > 0) & ~unreachable
        e_lo = np.full(y.shape, -1075)
        e_hi = np.full(y.shape, 1023)
        while np.any(e_hi - e_lo > 1):
            mid = (e_lo + e_hi) // 2
            below = fn(np.ldexp(1.0, mid)) < y
            e_lo = np.where(below, mid, e_lo)
            e_hi = np.where(below, e_hi, mid)
        lo = np.ldexp(1.0, e_lo)
        hi = np.ldexp(1.0, e_hi)
        for _ in range(1100):
            if not active.any():
                break
            mid = 0.5 * (lo + hi)
            stuck = (mid <= lo) | (mid >= hi)
            below = fn(mid) < y
            lo = np.where(active & below, mid, lo)
            hi = np.where(active & ~below, mid, hi)
            active = active & ~((hi - lo) <= rtol * hi) & ~stuck
    x = np.where(y > 0, 0.5 * (lo + hi), 0.0)
    x = np.where(unreachable, np.inf, x)
    return float(x[0]) if scalar else x


def bisect_decreasing(fn: Callable[[float], float], lo: float, hi: float,
                      xtol: float = 1e-15, max_iter: int = 400) -> float:
    """Root of a decreasing scalar function on ``[lo, hi]`` with
    ``fn(lo) > 0 >= fn(hi)``."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol * max(1.0, abs(mid)) or mid in (lo, hi):
            return mid
        if fn(mid) > 0:
            lo = mid
        else:
            hi = mid
    raise ToleranceError("bisection did not converge")


def golden_section_min(fn: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-10, max_iter: int = 500) -> tuple[float, float]:
    """Minimise a unimodal scalar function on ``[lo, hi]``.
    Returns ``(argmin, min value)``."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(lo) + abs(hi)):
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = fn(x2)
    else:
        raise ToleranceError("golden-section search did not converge")
    if f1 <= f2:
        return x1, f1
    return x2, f2


@dataclass(frozen=True)
class LimitEstimate:
    """Outcome of a three-point limit estimate.

    ``kind`` is ``"finite"``, ``"+inf"``, ``"-inf"`` or ``"zero"`` (magnitude
    vanishing like a power).  ``spread`` is the disagreement between the two
    extrapolants for finite limits, else 0.
    """

    kind: str
    value: float
    spread: float
    points: tuple[float, ...]
    samples: tuple[float, ...]
    slopes: tuple[float, ...]

    @property
    def is_nonzero(self) -> bool:
        if self.kind in ("+inf", "-inf"):
            return True
        if self.kind == "zero":
            return False
        return abs(self.value) > max(self.spread, 1e-12)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "spread": self.spread,
            "points": list(self.points),
            "samples": list(self.samples),
            "slopes": list(self.slopes),
        }


def estimate_limit(fn, points: Sequence[float], rtol: float = 0.01,
                   min_slope: float = 0.05, atol: float = 1e-300) -> LimitEstimate:
    """Estimate ``lim fn(x)`` along ``points`` (geometric, toward 0 or infinity).

    Finite limits: one Richardson step eliminates the leading term linear in
    the small parameter (``1/x`` at infinity, ``x`` at zero), and the two
    extrapolants must agree to ``rtol``.  Otherwise a stable log-log slope of
    the magnitude classifies the sequence as diverging or vanishing.
    """
    pts = np.asarray(points, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.asarray(fn(pts), dtype=float)
    toward_inf = pts[-1] > pts[0]
    h = 1.0 / pts if toward_inf else pts
    if np.any(np.isnan(vals)):
        raise NoStableLimit(f"nan in samples {vals.tolist()}")
    if np.any(np.isinf(vals)):
        # overflow only counts as divergence when the finite head already grows
        sign = np.sign(vals[np.isinf(vals)][0])
        mono = np.all(sign * vals[1:] >= sign * vals[:-1])
        if mono and np.all(np.sign(vals[vals != 0]) == sign):
            kind = "+inf" if sign > 0 else "-inf"
            return LimitEstimate(kind, float(sign * np.inf), 0.0, tuple(pts),
                                 tuple(vals.tolist()), ())
        raise NoStableLimit(f"overflow without monotone growth: {vals.tolist()}")

    if np.all(np.abs(vals) <= atol):
        return LimitEstimate("finite", 0.0, 0.0, tuple(pts), tuple(vals.tolist()), ())

    mu = h[1:] / h[:-1]
    rich = (vals[1:] - mu * vals[:-1]) / (1.0 - mu)
    scale = max(abs(rich[-1]), abs(vals[-1]))
    spread = float(np.max(rich) - np.min(rich))
    slopes = ()
    if np.all(vals != 0) and np.all(np.sign(vals) == np.sign(vals[0])):
        slopes = tuple((np.log(np.abs(vals[1:] / vals[:-1])) / np.log(h[:-1] / h[1:])).tolist())

    if spread <= rtol * scale:
        return LimitEstimate("finite", float(rich[-1]), spread, tuple(pts),
                             tuple(vals.tolist()), slopes)
    if slopes:
        s = np.asarray(slopes)
        if np.all(s >= min_slope):
            kind = "+inf" if vals[0] > 0 else "-inf"
            return LimitEstimate(kind, float(np.sign(vals[0]) * np.inf), 0.0, tuple(pts),
                                 tuple(vals.tolist()), slopes)
        if np.all(s <= -min_slope):
            return LimitEstimate("zero", 0.0, float(abs(vals[-1])), tuple(pts),
                                 tuple(vals.tolist()), slopes)
    raise NoStableLimit(
        f"samples {vals.tolist()} at {pts.tolist()} neither agree nor follow a power law"
    )


def central_difference(fn, x, rel_step: float = 1e-4, abs_step: float = 1e-4):
    """Central difference with step ``max(abs_step, rel_step*x)``, clipped to stay
    inside ``[0, inf)``."""
    x = np.asarray(x, dtype=float)
    h = np.maximum(abs_step, rel_step * np.abs(x))
    h = np.where(x - h < 0, np.maximum(x, 1e-300) * 0.5, h)
    return (fn(x + h) - fn(x - h)) / (2.0 * h)
