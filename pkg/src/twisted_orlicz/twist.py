"""Twisted convolution of finitely supported functions and empirical checks
of the algebra inequalities it is meant to satisfy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import lattice
from .errors import DimensionError, ParamError
from .lattice import Cocycle, Weight
from .orlicz import DiscreteFunction, luxemburg_norm, random_function
from .young import YoungFunction

CHUNK_PAIRS = 1 << 20


@dataclass(frozen=True)
class ConvolutionReport:
    result: DiscreteFunction
    flops: int
    pairs: int
    cocycle_id: dict

    def as_dict(self) -> dict:
        return {"flops": self.flops, "pairs": self.pairs, "cocycle": self.cocycle_id,
                "support_size": len(self.result)}


def _accumulate(keys: np.ndarray, vals: np.ndarray, dim: int) -> DiscreteFunction:
    if keys.shape[0] == 0:
        return DiscreteFunction.zero(dim)
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    re = np.bincount(inv, weights=vals.real, minlength=len(uniq))
    im = np.bincount(inv, weights=vals.imag, minlength=len(uniq))
    out = re + 1j * im
    keep = out != 0
    entries = tuple((tuple(int(c) for c in row), complex(v)) for row, v in zip(uniq[keep], out[keep]))
    return DiscreteFunction(dim, entries)


def twisted_convolve(omega: Cocycle, f: DiscreteFunction, g: DiscreteFunction) -> ConvolutionReport:
    """(f ⊛ g)(t) = Σ_s f(s) g(t-s) Ω(s, t-s), summed over the supports.

    Every pair of support points is visited once (no FFT: the cocycle
    factor breaks translation invariance).  ``flops`` counts complex
    operations: two products and one accumulation per pair.
    """
    if f.dim != g.dim:
        raise DimensionError(f"dimensions differ: {f.dim} vs {g.dim}")
    if omega.dim is not None and omega.dim != f.dim:
        raise DimensionError(f"cocycle lives on Z^{omega.dim}, functions on Z^{f.dim}")
    d = f.dim
    P, Q = f.points(), g.points()
    fv, gv = f.values(), g.values()
    nf, ng = len(fv), len(gv)
    if nf == 0 or ng == 0:
        return ConvolutionReport(DiscreteFunction.zero(d), 0, 0, omega.to_spec())
    rows = max(1, CHUNK_PAIRS // ng)
    keys, vals = [], []
    for start in range(0, nf, rows):
        S = np.repeat(P[start:start + rows], ng, axis=0)
        T = np.tile(Q, (min(rows, nf - start), 1))
        w = omega.evaluate_many(S, T)
        vals.append(np.repeat(fv[start:start + rows], ng) * np.tile(gv, min(rows, nf - start)) * w)
        keys.append(S + T)
    result = _accumulate(np.concatenate(keys), np.concatenate(vals), d)
    pairs = nf * ng
    return ConvolutionReport(result, 3 * pairs, pairs, omega.to_spec())


def convolve(f: DiscreteFunction, g: DiscreteFunction) -> DiscreteFunction:
    """Ordinary convolution (trivial cocycle)."""
    return twisted_convolve(lattice.TrivialCocycle(), f, g).result


def sup_distance(a: DiscreteFunction, b: DiscreteFunction) -> float:
    da, db = a.as_dict(), b.as_dict()
    keys = set(da) | set(db)
    return max((abs(da.get(k, 0) - db.get(k, 0)) for k in keys), default=0.0)


def associativity_residual(omega: Cocycle, f: DiscreteFunction, g: DiscreteFunction,
                           h: DiscreteFunction) -> float:
    """‖(f⊛g)⊛h - f⊛(g⊛h)‖_∞ / (1 + ‖f⊛(g⊛h)‖_∞)."""
    left = twisted_convolve(omega, twisted_convolve(omega, f, g).result, h).result
    right = twisted_convolve(omega, f, twisted_convolve(omega, g, h).result).result
    return sup_distance(left, right) / (1.0 + right.sup_norm())


def multiplier_residual(w: Weight, f: DiscreteFunction, g: DiscreteFunction) -> float:
    """Relative sup distance between (f ⊛_Ω g)·ω and (fω)*(gω), Ω the
    coboundary of ω.

    These agree only when ω is trivial: the left side carries the factor
    ω(t)²/(ω(s)ω(t-s)) per term and the right side ω(s)ω(t-s).  The exact
    identity for multiplication by ω is :func:`transport_residual`.
    """
    lhs = twisted_convolve(lattice.coboundary(w), f, g).result.weighted(w)
    rhs = convolve(f.weighted(w), g.weighted(w))
    return sup_distance(lhs, rhs) / max(rhs.sup_norm(), 1e-300)


def transport_residual(w: Weight, f: DiscreteFunction, g: DiscreteFunction) -> float:
    """Relative sup distance between (fω) ⊛_Ω (gω) and (f*g)·ω, Ω the
    coboundary of ω; zero up to rounding since ω(s)ω(t-s)Ω(s,t-s) = ω(t)."""
    lhs = twisted_convolve(lattice.coboundary(w), f.weighted(w), g.weighted(w)).result
    rhs = convolve(f, g).weighted(w)
    return sup_distance(lhs, rhs) / max(rhs.sup_norm(), 1e-300)


# --- decomposition bound ------------------------------------------------------


@dataclass(frozen=True)
class BoundCheck:
    max_violation: float
    witness: tuple  # (τ(s), τ(t), τ(s+t)) or the explicit pair
    cases: int
    method: str

    def as_dict(self) -> dict:
        return {"max_violation": self.max_violation, "witness": list(self.witness),
                "cases": self.cases, "method": self.method}


def decomposition_bound_check(omega: Cocycle, u: Callable, v: Callable, radius: int, d: int,
                              method: str = "auto") -> BoundCheck:
    """max over τ(s), τ(t) ≤ radius of |Ω(s,t)| - u(τ(s)) - v(τ(t)).

    When |Ω| depends only on (τ(s), τ(t), τ(s+t)) the scan runs over integer
    triples, using every reachable τ(s+t); otherwise (or with
    ``method="pairs"``) it visits all pairs of ball points.
    """
    if method not in ("auto", "radial", "pairs"):
        raise ParamError(f"unknown method {method!r}")
    probe = omega.radial_log_modulus(np.zeros(1), np.zeros(1), np.zeros(1))
    if method == "radial" and probe is None:
        raise ParamError("cocycle modulus is not radial")
    if method == "pairs" or probe is None:
        return _bound_pairs(omega, u, v, radius, d)
    ms = np.arange(radius + 1, dtype=float)
    uu = np.asarray(u(ms), dtype=float)
    vv = np.asarray(v(ms), dtype=float)
    best, arg, cases = -math.inf, (0, 0, 0), 0
    for m in range(radius + 1):
        n = np.arange(radius + 1)
        if d == 1:
            ks = [np.abs(m - n), m + n]
        else:
            span = int(2 * radius + 1)
            off = np.arange(span)
            k = np.abs(m - n)[:, None] + off[None, :]
            ok = k <= (m + n)[:, None]
            ks = [np.where(ok, k, (m + n)[:, None])]
        for k in ks:
            nn = np.broadcast_to(n if k.ndim == 1 else n[:, None], k.shape)
            mod = np.exp(omega.radial_log_modulus(np.full(k.shape, m, dtype=float), nn.astype(float),
                                                  k.astype(float)))
            viol = mod - uu[m] - vv[nn]
            i = np.unravel_index(int(np.argmax(viol)), viol.shape)
            cases += int(k.size)
            if viol[i] > best:
                best, arg = float(viol[i]), (m, int(nn[i]), int(k[i]))
    return BoundCheck(best, arg, cases, "radial")


def _bound_pairs(omega, u, v, radius, d) -> BoundCheck:
    pts = lattice.ball_points(d, radius)
    tau = lattice.lengths(pts)
    uu = np.asarray(u(tau.astype(float)), dtype=float)
    vv = np.asarray(v(tau.astype(float)), dtype=float)
    best, arg = -math.inf, ()
    n = len(pts)
    for i in range(n):
        s = np.broadcast_to(pts[i], pts.shape)
        mod = np.abs(omega.evaluate_many(s, pts))
        viol = mod - uu[i] - vv
        j = int(np.argmax(viol))
        if viol[j] > best:
            best, arg = float(viol[j]), (tuple(int(c) for c in pts[i]), tuple(int(c) for c in pts[j]))
    return BoundCheck(best, arg, n * n, "pairs")


# --- submultiplicativity probe -----------------------------------------------


def make_sampler(d: int, radius: int, max_size: int, law: str = "complex") -> Callable:
    """Sampler drawing 1..max_size support points in the ball of ``radius``."""
    def sample(rng: np.random.Generator) -> DiscreteFunction:
        size = int(rng.integers(1, max_size + 1))
        return random_function(rng, d, radius, size, law)
    return sample


@dataclass(frozen=True)
class ProbeResult:
    max_ratio: float
    argmax: tuple
    ratios: tuple
    trials: int

    def as_dict(self) -> dict:
        f, g = self.argmax
        return {"max_ratio": self.max_ratio, "trials": self.trials,
                "argmax": {"f": f.to_json_obj(), "g": g.to_json_obj()},
                "ratios": list(self.ratios)}


def convolution_ratio(phi: YoungFunction, omega: Cocycle, f: DiscreteFunction,
                      g: DiscreteFunction) -> float:
    num = luxemburg_norm(phi, twisted_convolve(omega, f, g).result)
    return num / (luxemburg_norm(phi, f) * luxemburg_norm(phi, g))


def submultiplicativity_probe(phi: YoungFunction, omega: Cocycle, sampler: Callable, trials: int,
                              rng: np.random.Generator) -> ProbeResult:
    """Largest N(f⊛g) / (N(f) N(g)) over random pairs (Luxemburg norms)."""
    if trials < 1:
        raise ParamError("trials must be at least 1")
    best, arg, ratios = -math.inf, None, []
    for _ in range(trials):
        f, g = sampler(rng), sampler(rng)
        r = convolution_ratio(phi, omega, f, g)
        ratios.append(r)
        if r > best:
            best, arg = r, (f, g)
    return ProbeResult(best, arg, tuple(ratios), trials)


__all__ = [
    "ConvolutionReport", "twisted_convolve", "convolve", "sup_distance", "associativity_residual",
    "multiplier_residual", "transport_residual", "BoundCheck", "decomposition_bound_check", "make_sampler",
    "ProbeResult", "convolution_ratio", "submultiplicativity_probe",
]
