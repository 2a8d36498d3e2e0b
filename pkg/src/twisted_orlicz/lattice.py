"""The lattice ℤ^d with generating set {-1,0,1}^d: word length, balls and
spheres, radial weights e^{ρ(τ(s))}, and 2-cocycles.

Points are plain integer tuples; vectorised entry points take ``(n, d)``
int64 arrays.  Weights are handled in log-space throughout: a cocycle
exposes ``log_modulus`` and ``phase`` (in turns) and only the final value is
exponentiated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import numerics
from .errors import DimensionError, ParamError

Point = tuple[int, ...]
ArrayFn = Callable[[np.ndarray], np.ndarray]


# --- points, length, balls ---------------------------------------------------


def as_point(s, d: int | None = None) -> Point:
    pt = tuple(int(c) for c in s)
    if any(int(c) != c for c in s):
        raise ParamError(f"non-integer coordinates in {s!r}")
    if d is not None and len(pt) != d:
        raise DimensionError(f"point {pt} has dimension {len(pt)}, expected {d}")
    if not pt:
        raise DimensionError("points need at least one coordinate")
    return pt


def length(s) -> int:
    """Word length for the generators {-1,0,1}^d, which is the sup norm."""
    return max(abs(int(c)) for c in s)


def lengths(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.int64)
    return np.max(np.abs(points), axis=-1)


def ball_and_sphere(d: int, n: int) -> tuple[int, int]:
    """(#points with τ ≤ n, #points with τ = n), exact integers."""
    if d < 1:
        raise DimensionError(f"dimension must be positive, got {d}")
    if n < 0:
        raise ParamError(f"radius must be nonnegative, got {n}")
    ball = (2 * n + 1) ** d
    sphere = 1 if n == 0 else ball - (2 * n - 1) ** d
    return ball, sphere


def sphere_sizes(d: int, ns: np.ndarray) -> np.ndarray:
    """Vectorised sphere sizes as floats (exact below 2^53)."""
    ns = np.asarray(ns, dtype=float)
    out = (2 * ns + 1) ** d - np.maximum(2 * ns - 1, 0) ** d
    return np.where(ns == 0, 1.0, out)


def ball_points(d: int, n: int) -> np.ndarray:
    """All points with τ ≤ n as an ``((2n+1)^d, d)`` array, lexicographic order."""
    axis = np.arange(-n, n + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def reachable_lengths(d: int, m: int, n: int) -> range:
    """Values of τ(s+t) over τ(s)=m, τ(t)=n.

    On ℤ only |m-n| and m+n occur; for d ≥ 2 a free coordinate lets every
    integer in between occur.
    """
    lo, hi = abs(m - n), m + n
    if d == 1:
        return range(lo, hi + 1, max(hi - lo, 1))
    return range(lo, hi + 1)


# --- weights -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Weight:
    """ω(s) = exp(ρ(τ(s))) with ρ given on [0, ∞) and ρ(0) = 0."""

    kind: str
    params: dict
    rho: ArrayFn
    rho_prime: Optional[ArrayFn] = None
    rho_second: Optional[ArrayFn] = None
    analytic: bool = True

    @property
    def name(self) -> str:
        inner = ",".join(f"{k}={v:g}" for k, v in self.params.items() if isinstance(v, (int, float)))
        return f"{self.kind}({inner})"

    def log_value(self, s) -> float:
        return float(self.rho(np.asarray(float(length(s)))))

    def __call__(self, s) -> float:
        return math.exp(self.log_value(s))

    def log_values(self, points: np.ndarray) -> np.ndarray:
        return self.rho(lengths(points).astype(float))

    def first_derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.rho_prime is not None:
            return self.rho_prime(x)
        return _central(self.rho, x)

    def second_derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.rho_second is not None:
            return self.rho_second(x)
        return _central(lambda t: self.first_derivative(t), x)

    def to_spec(self) -> dict:
        if self.kind == "custom":
            return {"kind": "custom", "name": self.params.get("name", "custom")}
        return {"kind": self.kind, **self.params}

    def check(self, n_max: int = 200, tol: float = 1e-12) -> dict:
        """Sampled ρ(0)=0, monotonicity, concavity and subadditivity on integers."""
        ns = np.arange(n_max + 1, dtype=float)
        r = self.rho(ns)
        d1 = np.diff(r)
        d2 = np.diff(r, 2)
        sub = r[:, None] + r[None, :]
        idx = np.add.outer(np.arange(n_max + 1), np.arange(n_max + 1))
        full = self.rho(np.arange(2 * n_max + 1, dtype=float))
        excess = full[idx] - sub
        return {
            "rho_at_zero": float(r[0]),
            "increasing": bool(np.all(d1 > 0)),
            "concave": bool(np.all(d2 <= tol * np.maximum(1.0, np.abs(r[2:])))),
            "max_second_difference": float(np.max(d2)) if d2.size else 0.0,
            "subadditive": bool(np.all(excess <= tol * np.maximum(1.0, sub))),
            "max_subadditivity_excess": float(np.max(excess)),
            "n_max": n_max,
        }


def _central(fn, x):
    """Central difference, step max(1e-4, 1e-6·x), one-sided at the origin."""
    return numerics.central_difference(fn, x, rel_step=1e-6, abs_step=1e-4)


def _poly(beta: float) -> Weight:
    return Weight(
        kind="poly",
        params={"beta": beta},
        rho=lambda x: beta * np.log1p(x),
        rho_prime=lambda x: beta / (1.0 + x),
        rho_second=lambda x: -beta / (1.0 + x) ** 2,
    )


def _subexp(alpha: float, c: float) -> Weight:
    def rho2(x):
        with np.errstate(divide="ignore"):
            return c * alpha * (alpha - 1.0) * np.where(x > 0, x ** (alpha - 2.0), -np.inf)

    def rho1(x):
        with np.errstate(divide="ignore"):
            return c * alpha * np.where(x > 0, x ** (alpha - 1.0), np.inf)

    return Weight(kind="subexp", params={"alpha": alpha, "C": c},
                  rho=lambda x: c * np.asarray(x, float) ** alpha, rho_prime=rho1, rho_second=rho2)


def _subexp2(gamma: float, c: float) -> Weight:
    # ρ(x) = C x / ln(1+x)^γ for x > 0 and ρ(0) = 0 (the formula tends to C at 0⁺ when γ = 1)
    def rho(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = c * x / np.log1p(x) ** gamma
        return np.where(x > 0, val, 0.0)

    def rho1(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log1p(x)
            val = c * (lg ** -gamma - gamma * x * lg ** (-gamma - 1.0) / (1.0 + x))
        return np.where(x > 0, val, np.nan)

    def rho2(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.log1p(x)
            a = 1.0 + x
            val = c * gamma * (
                -2.0 * lg ** (-gamma - 1.0) / a
                + x * lg ** (-gamma - 1.0) / a**2
                + (gamma + 1.0) * x * lg ** (-gamma - 2.0) / a**2
            )
        return np.where(x > 0, val, np.nan)

    return Weight(kind="subexp2", params={"gamma": gamma, "C": c}, rho=rho, rho_prime=rho1, rho_second=rho2)


def make_weight(kind: str, **params) -> Weight:
    """Build one of the radial weights.

    ``poly`` (beta): ρ = β ln(1+x); ``subexp`` (alpha, C): ρ = C x^α;
    ``subexp2`` (gamma, C): ρ = C x / ln(1+x)^γ; ``linear`` (C): ρ = Cx;
    ``trivial``: ρ = 0; ``custom`` (rho, optional rho_prime/rho_second, name).
    """
    if kind == "poly":
        beta = float(params["beta"])
        if not beta > 0:
            raise ParamError(f"poly weight needs beta > 0, got {beta}")
        return _poly(beta)
    if kind == "subexp":
        alpha, c = float(params["alpha"]), float(params.get("C", 1.0))
        if not (0 < alpha < 1) or not c > 0:
            raise ParamError(f"subexp weight needs 0 < alpha < 1 and C > 0, got {alpha}, {c}")
        return _subexp(alpha, c)
    if kind == "subexp2":
        gamma, c = float(params["gamma"]), float(params.get("C", 1.0))
        if not gamma > 0 or not c > 0:
            raise ParamError(f"subexp2 weight needs gamma > 0 and C > 0, got {gamma}, {c}")
        return _subexp2(gamma, c)
    if kind == "linear":
        c = float(params.get("C", 1.0))
        if not c > 0:
            raise ParamError(f"linear weight needs C > 0, got {c}")
        return Weight(kind="linear", params={"C": c}, rho=lambda x: c * np.asarray(x, float),
                      rho_prime=lambda x: np.full(np.shape(x), c),
                      rho_second=lambda x: np.zeros(np.shape(x)))
    if kind == "trivial":
        zero = lambda x: np.zeros(np.shape(x))
        return Weight(kind="trivial", params={}, rho=zero, rho_prime=zero, rho_second=zero)
    if kind == "custom":
        rho = params["rho"]
        if abs(float(rho(np.asarray(0.0)))) > 1e-15:
            raise ParamError("custom rho must vanish at 0")
        extra = {"name": params.get("name", "custom")}
        return Weight(kind="custom", params=extra, rho=rho,
                      rho_prime=params.get("rho_prime"), rho_second=params.get("rho_second"),
                      analytic=False)
    raise ParamError(f"unknown weight kind {kind!r}")


def weight_from_spec(spec) -> Weight:
    """Accepts a dict like ``{"kind": "poly", "beta": 2}`` or shorthand text
    ``poly:2``, ``subexp:0.5:1``, ``subexp2:1:1``, ``linear:1``, ``trivial``."""
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            return weight_from_spec(json.loads(text))
        kind, *rest = text.split(":")
        vals = [float(v) for v in rest]
        names = {"poly": ("beta",), "subexp": ("alpha", "C"), "subexp2": ("gamma", "C"),
                 "linear": ("C",), "trivial": ()}
        if kind not in names or len(vals) > len(names[kind]):
            raise ParamError(f"cannot parse weight {spec!r}")
        return make_weight(kind, **dict(zip(names[kind], vals)))
    spec = dict(spec)
    kind = spec.pop("kind")
    return make_weight(kind, **spec)


# --- cocycles ----------------------------------------------------------------


def _two_product(a: float, b: np.ndarray):
    """Dekker's exact product: a*b = hi + lo with hi the rounded product."""
    split = 134217729.0  # 2^27 + 1
    b = np.asarray(b, dtype=float)
    hi = a * b
    ca = split * a
    ah = ca - (ca - a)
    al = a - ah
    cb = split * b
    bh = cb - (cb - b)
    bl = b - bh
    lo = ((ah * bh - hi) + ah * bl + al * bh) + al * bl
    return hi, lo


def _turns(theta: float, n: np.ndarray) -> np.ndarray:
    """Fractional part of θ·n in [0, 1) without losing the low bits of θ."""
    hi, lo = _two_product(theta, np.asarray(n, dtype=float))
    frac = hi - np.floor(hi)
    out = frac + lo
    return out - np.floor(out)


class Cocycle:
    """A map ℤ^d × ℤ^d → ℂ\\{0} stored as log|Ω| plus a phase in turns."""

    dim: Optional[int] = None

    def log_modulus_many(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def phase_many(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def radial_log_modulus(self, m, n, k):
        """log|Ω(s,t)| as a function of (τ(s), τ(t), τ(s+t)) when it depends
        only on those; ``None`` otherwise."""
        return None

    def bound(self) -> Optional[float]:
        return None

    def to_spec(self) -> dict:
        raise NotImplementedError

    def _prep(self, s, t):
        s = np.atleast_2d(np.asarray(s, dtype=np.int64))
        t = np.atleast_2d(np.asarray(t, dtype=np.int64))
        if s.shape[-1] != t.shape[-1]:
            raise DimensionError(f"dimensions differ: {s.shape[-1]} vs {t.shape[-1]}")
        if self.dim is not None and s.shape[-1] != self.dim:
            raise DimensionError(f"cocycle lives on Z^{self.dim}, got points in Z^{s.shape[-1]}")
        return s, t

    def evaluate_many(self, s, t) -> np.ndarray:
        s, t = self._prep(s, t)
        mod = np.exp(self.log_modulus_many(s, t))
        turns = self.phase_many(s, t)
        ph = 2.0 * np.pi * turns
        c, sn = np.cos(ph), np.sin(ph)
        # quarter turns exactly, so that e.g. a half turn gives -1 and not -1 + 1e-16j
        q = 4.0 * turns
        quarter = q == np.round(q)
        k = np.round(q).astype(np.int64) % 4
        c = np.where(quarter, np.array([1.0, 0.0, -1.0, 0.0])[k], c)
        sn = np.where(quarter, np.array([0.0, 1.0, 0.0, -1.0])[k], sn)
        return mod * c + 1j * (mod * sn)

    def __call__(self, s, t) -> complex:
        return complex(self.evaluate_many([tuple(s)], [tuple(t)])[0])

    def modulus_part(self) -> "Cocycle":
        return ModulusPart(self)

    def torus_part(self) -> "Cocycle":
        return TorusPart(self)

    def __mul__(self, other: "Cocycle") -> "Cocycle":
        return cocycle_product(self, other)


@dataclass(eq=False)
class TrivialCocycle(Cocycle):
    dim: Optional[int] = None

    def log_modulus_many(self, s, t):
        s, t = self._prep(s, t)
        return np.zeros(np.broadcast_shapes(s.shape, t.shape)[:-1])

    def phase_many(self, s, t):
        return self.log_modulus_many(s, t)

    def radial_log_modulus(self, m, n, k):
        return np.zeros(np.broadcast_shapes(np.shape(m), np.shape(n), np.shape(k)))

    def bound(self):
        return 1.0

    def to_spec(self):
        return {"kind": "trivial"}


@dataclass(eq=False)
class CoboundaryCocycle(Cocycle):
    """Ω(s,t) = ω(s+t) / (ω(s) ω(t)); positive and real."""

    weight: Weight
    dim: Optional[int] = None

    def log_modulus_many(self, s, t):
        s, t = self._prep(s, t)
        rho = self.weight.rho
        return rho(lengths(s + t).astype(float)) - rho(lengths(s).astype(float)) - rho(lengths(t).astype(float))

    def phase_many(self, s, t):
        s, t = self._prep(s, t)
        return np.zeros(np.broadcast_shapes(s.shape, t.shape)[:-1])

    def radial_log_modulus(self, m, n, k):
        rho = self.weight.rho
        return rho(np.asarray(k, float)) - rho(np.asarray(m, float)) - rho(np.asarray(n, float))

    def bound(self):
        return 1.0 if self.weight.check(60)["subadditive"] else None

    def to_spec(self):
        return {"kind": "coboundary", "weight": self.weight.to_spec()}


@dataclass(eq=False)
class HeisenbergCocycle(Cocycle):
    """Ω((a,b),(c,e)) = exp(2πi θ a e) on ℤ²; bilinear, hence a cocycle."""

    theta: float
    dim: Optional[int] = 2

    def log_modulus_many(self, s, t):
        s, t = self._prep(s, t)
        return np.zeros(np.broadcast_shapes(s.shape, t.shape)[:-1])

    def phase_many(self, s, t):
        s, t = self._prep(s, t)
        return _turns(self.theta, s[..., 0] * t[..., 1])

    def radial_log_modulus(self, m, n, k):
        return np.zeros(np.broadcast_shapes(np.shape(m), np.shape(n), np.shape(k)))

    def bound(self):
        return 1.0

    def to_spec(self):
        return {"kind": "heisenberg", "theta": self.theta}


@dataclass(eq=False)
class ProductCocycle(Cocycle):
    factors: tuple

    def __post_init__(self):
        dims = {f.dim for f in self.factors if f.dim is not None}
        if len(dims) > 1:
            raise DimensionError(f"factors live in different dimensions {sorted(dims)}")
        self.dim = dims.pop() if dims else None

    def log_modulus_many(self, s, t):
        s, t = self._prep(s, t)
        return sum(f.log_modulus_many(s, t) for f in self.factors)

    def phase_many(self, s, t):
        s, t = self._prep(s, t)
        total = sum(f.phase_many(s, t) for f in self.factors)
        return total - np.floor(total)

    def radial_log_modulus(self, m, n, k):
        parts = [f.radial_log_modulus(m, n, k) for f in self.factors]
        if any(p is None for p in parts):
            return None
        return sum(parts)

    def modulus_part(self):
        return ProductCocycle(tuple(f.modulus_part() for f in self.factors))

    def torus_part(self):
        return ProductCocycle(tuple(f.torus_part() for f in self.factors))

    def bound(self):
        bounds = [f.bound() for f in self.factors]
        return None if any(b is None for b in bounds) else math.prod(bounds)

    def to_spec(self):
        return {"kind": "product", "factors": [f.to_spec() for f in self.factors]}


@dataclass(eq=False)
class ModulusPart(Cocycle):
    """|Ω| of a cocycle, itself a positive cocycle."""

    base: Cocycle

    def __post_init__(self):
        self.dim = self.base.dim

    def log_modulus_many(self, s, t):
        return self.base.log_modulus_many(s, t)

    def phase_many(self, s, t):
        s, t = self._prep(s, t)
        return np.zeros(np.broadcast_shapes(s.shape, t.shape)[:-1])

    def radial_log_modulus(self, m, n, k):
        return self.base.radial_log_modulus(m, n, k)

    def modulus_part(self):
        return self

    def bound(self):
        return self.base.bound()

    def to_spec(self):
        return {"kind": "modulus", "of": self.base.to_spec()}


@dataclass(eq=False)
class TorusPart(Cocycle):
    """Ω / |Ω|, unimodular by construction."""

    base: Cocycle

    def __post_init__(self):
        self.dim = self.base.dim

    def log_modulus_many(self, s, t):
        s, t = self._prep(s, t)
        return np.zeros(np.broadcast_shapes(s.shape, t.shape)[:-1])

    def phase_many(self, s, t):
        return self.base.phase_many(s, t)

    def radial_log_modulus(self, m, n, k):
        return np.zeros(np.broadcast_shapes(np.shape(m), np.shape(n), np.shape(k)))

    def torus_part(self):
        return self

    def bound(self):
        return 1.0

    def to_spec(self):
        return {"kind": "torus", "of": self.base.to_spec()}


def coboundary(w: Weight) -> CoboundaryCocycle:
    return CoboundaryCocycle(w)


def heisenberg_cocycle(theta: float, d: int = 2) -> HeisenbergCocycle:
    if d != 2:
        raise DimensionError(f"the Heisenberg cocycle is defined on Z^2 only, got d={d}")
    return HeisenbergCocycle(float(theta))


def cocycle_product(*factors: Cocycle) -> ProductCocycle:
    flat = []
    for f in factors:
        flat.extend(f.factors if isinstance(f, ProductCocycle) else (f,))
    return ProductCocycle(tuple(flat))


def decompose(c: Cocycle) -> tuple[Cocycle, Cocycle]:
    """(|Ω|, Ω_𝕋) with Ω = |Ω|·Ω_𝕋."""
    return c.modulus_part(), c.torus_part()


def cocycle_from_spec(spec) -> Cocycle:
    """Parse a cocycle from a dict or shorthand text.

    Shorthand: ``trivial``, ``heisenberg:0.5``, ``coboundary:poly:1``,
    products joined by ``*`` (``coboundary:poly:1*heisenberg:0.25``).
    """
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            return cocycle_from_spec(json.loads(text))
        if "*" in text:
            return cocycle_product(*(cocycle_from_spec(p) for p in text.split("*")))
        kind, _, rest = text.partition(":")
        if kind == "trivial":
            return TrivialCocycle()
        if kind == "heisenberg":
            return heisenberg_cocycle(float(rest) if rest else 0.0)
        if kind == "coboundary":
            return coboundary(weight_from_spec(rest))
        raise ParamError(f"cannot parse cocycle {spec!r}")
    kind = spec.get("kind")
    if kind == "trivial":
        return TrivialCocycle()
    if kind == "heisenberg":
        return heisenberg_cocycle(float(spec["theta"]))
    if kind == "coboundary":
        return coboundary(weight_from_spec(spec["weight"]))
    if kind == "product":
        return cocycle_product(*(cocycle_from_spec(f) for f in spec["factors"]))
    if kind == "modulus":
        return cocycle_from_spec(spec["of"]).modulus_part()
    if kind == "torus":
        return cocycle_from_spec(spec["of"]).torus_part()
    raise ParamError(f"unknown cocycle kind {kind!r}")


# --- sampled cocycle checks ---------------------------------------------------


def random_points(rng: np.random.Generator, d: int, radius: int, count: int) -> np.ndarray:
    return rng.integers(-radius, radius + 1, size=(count, d), dtype=np.int64)


def identity_residual(c: Cocycle, r: np.ndarray, s: np.ndarray, t: np.ndarray) -> float:
    """max |Ω(r,s)Ω(r+s,t) - Ω(s,t)Ω(r,s+t)| over paired rows."""
    left = c.evaluate_many(r, s) * c.evaluate_many(r + s, t)
    right = c.evaluate_many(s, t) * c.evaluate_many(r, s + t)
    return float(np.max(np.abs(left - right)))


def normalization_residual(c: Cocycle, s: np.ndarray) -> float:
    zero = np.zeros_like(s)
    return float(max(np.max(np.abs(c.evaluate_many(s, zero) - 1.0)),
                     np.max(np.abs(c.evaluate_many(zero, s) - 1.0))))


def recomposition_residual(c: Cocycle, s: np.ndarray, t: np.ndarray) -> float:
    mod, tor = decompose(c)
    whole = c.evaluate_many(s, t)
    return float(np.max(np.abs(mod.evaluate_many(s, t) * tor.evaluate_many(s, t) - whole)))


__all__ = [
    "Point", "as_point", "length", "lengths", "ball_and_sphere", "sphere_sizes", "ball_points",
    "reachable_lengths", "Weight", "make_weight", "weight_from_spec",
    "Cocycle", "TrivialCocycle", "CoboundaryCocycle", "HeisenbergCocycle", "ProductCocycle",
    "ModulusPart", "TorusPart", "coboundary", "heisenberg_cocycle", "cocycle_product",
    "decompose", "cocycle_from_spec", "random_points", "identity_residual",
    "normalization_residual", "recomposition_residual",
]
