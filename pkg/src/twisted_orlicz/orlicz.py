"""Finitely supported functions on ℤ^d, Orlicz modulars and norms, and the
radial series diagnostics used to decide membership questions.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

import numpy as np
from scipy.special import logsumexp

from . import lattice, numerics
from .errors import DimensionError, ParamError, ToleranceError
from .young import YoungFunction

# --- finitely supported functions --------------------------------------------


@dataclass(frozen=True)
class DiscreteFunction:
    """A finitely supported complex function on ℤ^d.

    ``entries`` is a tuple of ``(point, value)`` sorted by point, zeros
    dropped; two functions are equal iff their entries are identical.
    """

    dim: int
    entries: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError(f"dimension must be positive, got {self.dim}")
        for pt, _ in self.entries:
            if len(pt) != self.dim:
                raise DimensionError(f"point {pt} does not live in Z^{self.dim}")

    @classmethod
    def from_mapping(cls, dim: int, mapping: Mapping | Iterable) -> "DiscreteFunction":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        acc: dict = {}
        for pt, val in items:
            key = lattice.as_point(pt, dim)
            acc[key] = acc.get(key, 0) + complex(val)
        return cls(dim, tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    @classmethod
    def delta(cls, point, value: complex = 1.0) -> "DiscreteFunction":
        pt = lattice.as_point(point)
        return cls.from_mapping(len(pt), {pt: value})

    @classmethod
    def zero(cls, dim: int) -> "DiscreteFunction":
        return cls(dim, ())

    @classmethod
    def from_arrays(cls, points: np.ndarray, values: np.ndarray) -> "DiscreteFunction":
        points = np.asarray(points, dtype=np.int64)
        dim = points.shape[1]
        keys = [tuple(int(c) for c in row) for row in points]
        return cls.from_mapping(dim, zip(keys, np.asarray(values, dtype=complex).tolist()))

    def __len__(self) -> int:
        return len(self.entries)

    def as_dict(self) -> dict:
        return dict(self.entries)

    def points(self) -> np.ndarray:
        if not self.entries:
            return np.zeros((0, self.dim), dtype=np.int64)
        return np.array([pt for pt, _ in self.entries], dtype=np.int64)

    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.entries], dtype=complex)

    def abs_values(self) -> np.ndarray:
        return np.abs(self.values())

    def sup_norm(self) -> float:
        return float(np.max(self.abs_values())) if self.entries else 0.0

    def scale(self, c: complex) -> "DiscreteFunction":
        if c == 0:
            return DiscreteFunction.zero(self.dim)
        return DiscreteFunction(self.dim, tuple((p, v * c) for p, v in self.entries if v * c != 0))

    def __add__(self, other: "DiscreteFunction") -> "DiscreteFunction":
        if other.dim != self.dim:
            raise DimensionError("dimensions differ")
        return DiscreteFunction.from_mapping(self.dim, list(self.entries) + list(other.entries))

    def __sub__(self, other: "DiscreteFunction") -> "DiscreteFunction":
        return self + other.scale(-1.0)

    def weighted(self, w: lattice.Weight) -> "DiscreteFunction":
        """Pointwise product f·ω."""
        if not self.entries:
            return self
        factors = np.exp(w.log_values(self.points()))
        return DiscreteFunction(self.dim, tuple((p, v * float(c)) for (p, v), c in zip(self.entries, factors)))

    def to_json_obj(self) -> dict:
        return {
            "dim": self.dim,
            "entries": [{"point": list(p), "re": float(v.real), "im": float(v.imag)} for p, v in self.entries],
        }

    def dumps(self) -> str:
        # json writes floats with repr, the shortest string that round-trips exactly
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=1)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "DiscreteFunction":
        try:
            dim = int(obj["dim"])
            items = [(e["point"], complex(float(e["re"]), float(e.get("im", 0.0)))) for e in obj["entries"]]
        except (KeyError, TypeError) as exc:
            raise ParamError(f"malformed function file: {exc}") from None
        return cls.from_mapping(dim, items)

    @classmethod
    def loads(cls, text: str) -> "DiscreteFunction":
        return cls.from_json_obj(json.loads(text))


def random_function(rng: np.random.Generator, d: int, radius: int, size: int,
                    law: str = "complex") -> DiscreteFunction:
    """Random function with ``size`` support points (with repetition merged)
    drawn uniformly from the ball of the given radius.

    ``law`` is ``complex`` (standard complex normal), ``positive``
    (uniform on (0, 1]) or ``lognormal``.
    """
    pts = rng.integers(-radius, radius + 1, size=(size, d))
    if law == "complex":
        vals = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    elif law == "positive":
        vals = 1.0 - rng.random(size)
    elif law == "lognormal":
        vals = rng.lognormal(0.0, 1.0, size)
    else:
        raise ParamError(f"unknown value law {law!r}")
    return DiscreteFunction.from_arrays(pts, vals)


# --- modular and norms --------------------------------------------------------


def modular(phi: YoungFunction, f: DiscreteFunction) -> float:
    """Σ_s Φ(|f(s)|)."""
    if not f.entries:
        return 0.0
    with np.errstate(over="ignore"):
        return float(np.sum(phi(f.abs_values())))


def _inverse_young(phi: YoungFunction, c: float) -> float:
    x = numerics.invert_increasing(phi.evaluate, c)
    if not math.isfinite(x):
        raise ToleranceError(f"{phi.name}: Φ does not reach {c:g}")
    return x


def luxemburg_norm(phi: YoungFunction, f: DiscreteFunction, rtol: float = 1e-15) -> float:
    """inf{k > 0 : Σ Φ(|f|/k) ≤ 1}, by bisection on log k.

    The bracket comes from ``Φ(max|f|/k) ≤ M(f/k) ≤ n Φ(max|f|/k)`` with n
    the support size, so it is exact up to the inversion of Φ.
    """
    if not f.entries:
        return 0.0
    a = f.abs_values()
    top = float(np.max(a))
    n = len(a)
    k_lo = top / _inverse_young(phi, 1.0)
    if n == 1:
        return k_lo
    k_hi = top / _inverse_young(phi, 1.0 / n)

    def excess(t):
        with np.errstate(over="ignore"):
            return float(np.sum(phi(a * math.exp(-t)))) - 1.0

    # the inversion of Φ is only accurate to rounding: widen outward if needed
    t_lo, t_hi = math.log(k_lo), math.log(k_hi)
    step = 1e-12
    while excess(t_lo) <= 0:
        t_lo -= step
        step *= 2.0
        if step > 64.0:
            raise ToleranceError("Luxemburg lower bracket not found")
    step = 1e-12
    while excess(t_hi) > 0:
        t_hi += step
        step *= 2.0
        if step > 64.0:
            raise ToleranceError("Luxemburg upper bracket not found")
    return math.exp(numerics.bisect_decreasing(excess, t_lo, t_hi, xtol=rtol))


def amemiya(phi: YoungFunction, f: DiscreteFunction, k: float) -> float:
    """(1 + M(k f)) / k."""
    with np.errstate(over="ignore"):
        return (1.0 + float(np.sum(phi(k * f.abs_values())))) / k


def orlicz_norm(phi: YoungFunction, f: DiscreteFunction, tol: float = 1e-12) -> float:
    """Orlicz (dual) norm via inf_k (1 + M(kf))/k, golden-section over log k.

    With s = 1/k the objective s(1 + M(f/s)) is a perspective of a convex
    function, hence unimodal.  The minimiser satisfies s ≤ 2N (N the
    Luxemburg norm, where the objective equals 2N); the lower end is pushed
    down until s·M(f/s) exceeds 2N, past which the objective only grows.
    """
    if not f.entries:
        return 0.0
    lux = luxemburg_norm(phi, f)
    a = f.abs_values()

    def obj_s(s):
        with np.errstate(over="ignore"):
            return s * (1.0 + float(np.sum(phi(a / s))))

    s_hi = 2.0 * lux
    s_lo = lux
    for _ in range(2000):
        if obj_s(s_lo) - s_lo >= 2.0 * lux:
            break
        s_lo *= 0.5
    else:
        raise ToleranceError("Amemiya lower bracket not found")
    t, val = numerics.golden_section_min(lambda t: obj_s(math.exp(t)), math.log(s_lo), math.log(s_hi), tol=tol)
    return min(val, obj_s(s_hi))


def orlicz_norm_by_duality(psi: YoungFunction, f: DiscreteFunction, resolution: int = 200) -> float:
    """sup{Σ|f v| : Σ Ψ(|v|) ≤ 1} over a simplex grid of directions.

    Each direction w ≥ 0, Σw = 1, is scaled to the boundary Σ Ψ(λw) = 1 and
    the best grid direction is refined by golden section along each edge.
    Intended for supports of at most four points.
    """
    if not f.entries:
        return 0.0
    a = f.abs_values()
    n = len(a)
    if n > 4:
        raise ParamError("duality oracle handles at most four support points")

    def boundary_value(w):
        w = np.asarray(w, dtype=float)

        def excess(t):
            with np.errstate(over="ignore"):
                return float(np.sum(psi(math.exp(t) * w))) - 1.0

        lo, hi = -1.0, 1.0
        while excess(lo) > 0:
            lo -= 2.0
        while excess(hi) <= 0:
            hi += 2.0
        # excess increases in t; flip the sign for the decreasing bisector
        t = numerics.bisect_decreasing(lambda t: -excess(t), lo, hi, xtol=1e-15)
        return math.exp(t) * float(np.dot(a, w))

    best, best_w = -1.0, None
    for combo in itertools.product(range(resolution + 1), repeat=n - 1):
        if sum(combo) > resolution:
            continue
        w = np.array(list(combo) + [resolution - sum(combo)], dtype=float) / resolution
        val = boundary_value(w)
        if val > best:
            best, best_w = val, w
    # coordinate refinement: move mass between pairs of coordinates
    step = 1.0 / resolution
    for _ in range(3):
        for i, j in itertools.permutations(range(n), 2):
            def along(x, i=i, j=j, base=best_w.copy()):
                w = base.copy()
                w[i] += x
                w[j] -= x
                return -boundary_value(np.clip(w, 0.0, None))

            lo = -min(step, best_w[i])
            hi = min(step, best_w[j])
            if hi - lo <= 0:
                continue
            x, v = numerics.golden_section_min(along, lo, hi, tol=1e-13)
            if -v > best:
                best = -v
                best_w = best_w.copy()
                best_w[i] += x
                best_w[j] -= x
                best_w = np.clip(best_w, 0.0, None)
        step *= 0.1
    return best


def weighted_norm(phi: YoungFunction, f: DiscreteFunction, w: lattice.Weight,
                  kind: str = "luxemburg") -> float:
    """Norm of f·ω; ``kind`` is ``luxemburg`` or ``orlicz``."""
    fw = f.weighted(w)
    if kind == "luxemburg":
        return luxemburg_norm(phi, fw)
    if kind == "orlicz":
        return orlicz_norm(phi, fw)
    raise ParamError(f"unknown norm kind {kind!r}")


# --- radial series ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RadialTerm:
    """Summand of a radial series, kept as a log so tails never overflow.

    ``log_term(ns)`` returns log of term(n) (already including the sphere
    size); ``-inf`` encodes a zero term.  ``majorized_below`` marks radii
    where the log is an upper bound rather than the exact value.
    """

    log_term: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    ratio: Optional[Callable[[np.ndarray], np.ndarray]] = None
    majorized: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def term(self, n):
        with np.errstate(under="ignore"):
            return np.exp(self.log_term(np.asarray(n, dtype=float)))

    @classmethod
    def from_terms(cls, term: Callable, label: str = "") -> "RadialTerm":
        tiny = np.finfo(float).tiny

        def lt(ns):
            vals = np.asarray(term(np.asarray(ns, dtype=float)), dtype=float)
            # subnormals carry too few bits for ratio estimates: treat as underflow
            with np.errstate(divide="ignore"):
                return np.where(np.abs(vals) < tiny, -np.inf, np.log(np.abs(vals))) + \
                    np.where(vals < 0, np.nan, 0.0)
        return cls(lt, label)


def _safe_log(x):
    with np.errstate(divide="ignore"):
        return np.log(np.asarray(x, dtype=float))


def radial_series(d: int, value: Callable | None = None, *, log_value: Callable | None = None,
                  label: str = "") -> RadialTerm:
    """term(n) = sphere(d, n)·value(n); pass ``log_value`` to stay in log-space."""
    if (value is None) == (log_value is None):
        raise ParamError("give exactly one of value and log_value")
    inner = log_value if log_value is not None else (lambda ns: _safe_log(value(ns)))

    def lt(ns):
        ns = np.asarray(ns, dtype=float)
        return np.log(lattice.sphere_sizes(d, ns)) + np.asarray(inner(ns), dtype=float)

    return RadialTerm(lt, label or f"radial(d={d})")


@dataclass(frozen=True)
class SummabilityPolicy:
    n_max: int = 100_000
    window_fraction: float = 0.1
    min_window: int = 16
    ratio_margin: float = 1e-3
    slope_margin: float = 0.05
    monotone_slack: float = 1e-12

    def as_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "window_fraction": self.window_fraction,
            "min_window": self.min_window,
            "ratio_margin": self.ratio_margin,
            "slope_margin": self.slope_margin,
            "monotone_slack": self.monotone_slack,
        }


@dataclass(frozen=True)
class SeriesVerdict:
    verdict: str  # "Converges" | "Diverges" | "Inconclusive"
    partial_sum: float
    log_partial_sum: float
    terms_inspected: int
    tail_bound: Optional[float] = None
    log_tail_bound: Optional[float] = None
    witness: Optional[dict] = None
    reason: str = ""
    evidence: dict = field(default_factory=dict)

    @property
    def converges(self) -> bool:
        return self.verdict == "Converges"

    @property
    def diverges(self) -> bool:
        return self.verdict == "Diverges"

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "partial_sum": self.partial_sum,
            "log_partial_sum": self.log_partial_sum,
            "terms_inspected": self.terms_inspected,
            "tail_bound": self.tail_bound,
            "log_tail_bound": self.log_tail_bound,
            "witness": self.witness,
            "reason": self.reason,
            "evidence": self.evidence,
        }


def summability(rt: RadialTerm, policy: SummabilityPolicy = SummabilityPolicy()) -> SeriesVerdict:
    """Decide Σ_{n≥0} term(n) from the terms up to ``policy.n_max``.

    Converges when, on the final window, either the ratios stay below
    ``1 - margin`` and do not increase (geometric tail), or the local
    log-log slope stays above ``1 + margin`` with no downward drift, also
    after extrapolating it in 1/ln n (power tail, bound term(N)·N/(p-1)).
    Diverges when the window terms do not decrease, or when n·term(n) or
    n·ln(n)·term(n) does not decrease (harmonic or log-harmonic minorant).
    Anything else is Inconclusive.
    """
    N = int(policy.n_max)
    ns = np.arange(N + 1, dtype=float)
    lt = np.asarray(rt.log_term(ns), dtype=float)
    if np.any(np.isnan(lt)) or np.any(lt == np.inf):
        bad = int(np.argmax(np.isnan(lt) | (lt == np.inf)))
        return SeriesVerdict("Inconclusive", math.nan, math.nan, N + 1,
                             reason=f"term at n={bad} is not a finite nonnegative number")
    log_partial = float(logsumexp(lt)) if np.any(lt > -np.inf) else -math.inf
    partial = _exp(log_partial)
    base = dict(partial_sum=partial, log_partial_sum=log_partial, terms_inspected=N + 1)

    finite = np.nonzero(lt > -np.inf)[0]
    if finite.size == 0:
        return SeriesVerdict("Converges", **base, tail_bound=0.0, log_tail_bound=-math.inf,
                             reason="every term is zero")
    last = int(finite[-1])
    truncated = last < N
    if truncated:
        # terms past `last` underflowed: judge the tail from the representable part
        N = last
    w = max(policy.min_window, int(policy.window_fraction * N))
    if N - w < 1:
        return SeriesVerdict("Inconclusive", **base, reason=f"only {N + 1} representable terms")
    win = slice(N - w, N + 1)
    lw, nw = lt[win], ns[win]
    majorized = rt.majorized is not None and bool(np.any(rt.majorized(nw)))
    evidence = {"window": [int(nw[0]), int(nw[-1])], "policy": policy.as_dict(),
                "majorized_window": majorized, "underflow_after": last if truncated else None}

    if np.any(lw == -np.inf):
        return SeriesVerdict("Inconclusive", **base, reason="window mixes zero and nonzero terms",
                             evidence=evidence)

    slack = policy.monotone_slack
    steps = np.diff(lw)
    log_r_bar = float(np.max(steps))
    r_bar = math.exp(log_r_bar)
    ratio_steps = np.diff(steps)
    evidence["ratio_max"] = r_bar
    evidence["ratio_nonincreasing"] = bool(np.all(ratio_steps <= slack * (1 + np.abs(steps[1:]))))
    log_tail_term = float(lw[-1])

    if r_bar <= 1.0 - policy.ratio_margin and evidence["ratio_nonincreasing"]:
        log_tail = log_tail_term + log_r_bar - math.log1p(-r_bar)
        return SeriesVerdict("Converges", **base, tail_bound=_exp(log_tail), log_tail_bound=log_tail,
                             evidence=evidence,
                             reason=f"ratio test: ratios <= {r_bar:.6g} and nonincreasing on the window")

    logn = np.log(nw)
    slopes = -steps / np.diff(logn)
    drift = max(0.0, float(slopes[0] - slopes[-1]))
    # slope ≈ a + b/ln n covers log-corrected terms such as 1/(n ln n), whose
    # local slope creeps down to 1; a is the slope the tail tends to
    mid = 1.0 / (0.5 * (logn[1:] + logn[:-1]))
    b, a = np.polyfit(mid, slopes, 1)
    p_bar = min(float(np.min(slopes)) - drift, float(a))
    evidence.update({"slope_min": float(np.min(slopes)), "slope_first": float(slopes[0]),
                     "slope_last": float(slopes[-1]), "slope_at_infinity": float(a), "slope_bound": p_bar})
    if p_bar > 1.0 + policy.slope_margin:
        log_tail = log_tail_term + math.log(nw[-1]) - math.log(p_bar - 1.0)
        return SeriesVerdict("Converges", **base, tail_bound=_exp(log_tail), log_tail_bound=log_tail,
                             evidence=evidence,
                             reason=f"power test: local slope >= {p_bar:.6g} > 1 on the window")

    if np.all(steps >= -slack * (1 + np.abs(lw[1:]))):
        if majorized:
            return SeriesVerdict("Inconclusive", **base, evidence=evidence,
                                 reason="nonvanishing pattern seen only on majorized terms")
        witness = {"kind": "nonvanishing", "min_term_on_window": float(np.exp(np.min(lw))),
                   "window": evidence["window"]}
        return SeriesVerdict("Diverges", **base, witness=witness, evidence=evidence,
                             reason="terms do not decrease on the window")
    n_term = lw + logn
    if np.all(np.diff(n_term) >= -slack * (1 + np.abs(n_term[1:]))):
        if majorized:
            return SeriesVerdict("Inconclusive", **base, evidence=evidence,
                                 reason="harmonic pattern seen only on majorized terms")
        c = float(np.exp(np.min(n_term)))
        witness = {"kind": "harmonic", "c": c, "window": evidence["window"],
                   "statement": "term(n) >= c/n with n*term(n) nondecreasing"}
        return SeriesVerdict("Diverges", **base, witness=witness, evidence=evidence,
                             reason="harmonic minorant on the window")
    nlog_term = n_term + np.log(logn)
    if nw[0] >= 3 and np.all(np.diff(nlog_term) >= -slack * (1 + np.abs(nlog_term[1:]))):
        if majorized:
            return SeriesVerdict("Inconclusive", **base, evidence=evidence,
                                 reason="log-harmonic pattern seen only on majorized terms")
        c = float(np.exp(np.min(nlog_term)))
        witness = {"kind": "log-harmonic", "c": c, "window": evidence["window"],
                   "statement": "term(n) >= c/(n ln n) with n ln(n) term(n) nondecreasing"}
        return SeriesVerdict("Diverges", **base, witness=witness, evidence=evidence,
                             reason="minorant c/(n ln n) on the window")
    return SeriesVerdict("Inconclusive", **base, evidence=evidence,
                         reason="neither a geometric or power tail nor a divergence pattern")


def _exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


ESCALATION = (1.0, 2.0, 10.0, 100.0)


def _log_psi(psi: YoungFunction, floor: float = 1e-100):
    """log Ψ(y) as a function of log y, exact above ``floor`` and replaced
    below it by the convexity majorant Ψ(y) ≤ (y/y0)Ψ(y0)."""
    y0 = floor
    while float(psi(y0)) < 1e-280:
        y0 *= 1e10
    log_y0 = math.log(y0)
    log_psi_y0 = math.log(float(psi(y0)))

    def fn(log_y):
        log_y = np.asarray(log_y, dtype=float)
        below = log_y < log_y0
        with np.errstate(over="ignore", divide="ignore", under="ignore"):
            y = np.exp(np.where(below, log_y0, log_y))
            exact = np.log(psi(y))
        return np.where(below, log_psi_y0 + (log_y - log_y0), exact), below

    return fn


def s_psi_membership(psi: YoungFunction, d: int, value: Callable | None = None, *,
                     log_value: Callable | None = None, alphas=ESCALATION,
                     policy: SummabilityPolicy = SummabilityPolicy()) -> SeriesVerdict:
    """Σ_n sphere(d,n)·Ψ(α·value(n)) for each α in ``alphas``.

    Converges only when every α converges; Diverges as soon as one α
    diverges (membership needs all α).  Finitely many α stand in for
    "every α > 0"; the verdict records that.
    """
    if (value is None) == (log_value is None):
        raise ParamError("give exactly one of value and log_value")
    lv = log_value if log_value is not None else (lambda ns: _safe_log(value(ns)))
    ns = np.arange(policy.n_max + 1, dtype=float)
    sample = np.asarray(lv(ns), dtype=float)
    with np.errstate(invalid="ignore"):
        rises = np.diff(sample) > 1e-12 * (1 + np.abs(sample[1:]))
    increases = np.nonzero(rises)[0]
    n0 = int(increases[-1] + 1) if increases.size else 0
    monotone = {"nonincreasing_from": n0, "checked_up_to": int(policy.n_max)}
    note = f"every alpha > 0 replaced by alpha in {list(alphas)}"
    if np.all(sample == -np.inf):
        return SeriesVerdict("Converges", 0.0, -math.inf, policy.n_max + 1, tail_bound=0.0,
                             log_tail_bound=-math.inf,
                             reason="value vanishes identically", evidence={"surrogate": note,
                                                                           "monotone": monotone})
    if n0 > policy.n_max // 2:
        return SeriesVerdict("Inconclusive", math.nan, math.nan, policy.n_max + 1,
                             reason=f"value not eventually nonincreasing (last increase at n={n0})",
                             evidence={"surrogate": note, "monotone": monotone})
    log_psi = _log_psi(psi)
    runs = {}
    for alpha in alphas:
        def lt(ns, alpha=alpha):
            inner = np.asarray(lv(ns), dtype=float) + math.log(alpha)
            vals, _ = log_psi(inner)
            vals = np.where(inner == -np.inf, -np.inf, vals)
            return np.log(lattice.sphere_sizes(d, ns)) + vals

        def below(ns, alpha=alpha):
            return log_psi(np.asarray(lv(ns), dtype=float) + math.log(alpha))[1]

        runs[alpha] = summability(RadialTerm(lt, f"psi(alpha={alpha:g})", majorized=below), policy)
    verdicts = [r.verdict for r in runs.values()]
    evidence = {"surrogate": note, "monotone": monotone,
                "runs": {repr(a): r.as_dict() for a, r in runs.items()}}
    first = runs[alphas[0]]
    if "Diverges" in verdicts:
        bad = next(a for a, r in runs.items() if r.diverges)
        r = runs[bad]
        return SeriesVerdict("Diverges", r.partial_sum, r.log_partial_sum, r.terms_inspected,
                             witness={**(r.witness or {}), "alpha": bad}, evidence=evidence,
                             reason=f"diverges at alpha={bad:g}: {r.reason}")
    if all(v == "Converges" for v in verdicts):
        worst = runs[alphas[-1]]
        return SeriesVerdict("Converges", first.partial_sum, first.log_partial_sum, first.terms_inspected,
                             tail_bound=first.tail_bound, log_tail_bound=first.log_tail_bound,
                             evidence=evidence,
                             reason=f"converges for every tested alpha ({note}); "
                                    f"largest alpha tail bound {worst.tail_bound:.3g}")
    return SeriesVerdict("Inconclusive", first.partial_sum, first.log_partial_sum, first.terms_inspected,
                         evidence=evidence, reason="some alpha runs were inconclusive")


def radial_luxemburg_bound(psi: YoungFunction, d: int, log_value: Callable,
                           policy: SummabilityPolicy = SummabilityPolicy(),
                           rtol: float = 1e-6) -> float:
    """Upper bound for the Luxemburg norm of the radial function s ↦ value(τ(s)).

    For each trial k the modular is bounded by partial sum + certified
    tail; bisection on log k keeps the upper end feasible, so the returned
    k satisfies Σ Ψ(value/k) ≤ 1 whenever every tail bound is sound.
    """
    ns = np.arange(policy.n_max + 1, dtype=float)
    base = np.asarray(log_value(ns), dtype=float)
    if np.all(base == -np.inf):
        return 0.0
    log_psi = _log_psi(psi)

    def modular_bound(t):
        def lt(n):
            inner = np.asarray(log_value(n), dtype=float) - t
            vals, _ = log_psi(inner)
            return np.log(lattice.sphere_sizes(d, n)) + np.where(inner == -np.inf, -np.inf, vals)

        v = summability(RadialTerm(lt), policy)
        if not v.converges:
            return math.inf
        return v.partial_sum + v.tail_bound

    t_hi = float(np.max(base))
    while modular_bound(t_hi) > 1.0:
        t_hi += 1.0
        if t_hi > 700:
            raise ToleranceError("radial modular does not drop below 1")
    t_lo = t_hi - 1.0
    while modular_bound(t_lo) <= 1.0:
        t_lo -= 1.0
    while t_hi - t_lo > rtol:
        mid = 0.5 * (t_lo + t_hi)
        if modular_bound(mid) <= 1.0:
            t_hi = mid
        else:
            t_lo = mid
    return math.exp(t_hi)


__all__ = [
    "DiscreteFunction", "random_function", "modular", "luxemburg_norm", "amemiya", "orlicz_norm",
    "orlicz_norm_by_duality", "weighted_norm", "RadialTerm", "radial_series",
    "SummabilityPolicy", "SeriesVerdict", "summability", "s_psi_membership", "ESCALATION",
    "radial_luxemburg_bound",
]
