"""Young functions, complementary pairs and growth classification.

All evaluators are numpy-vectorised: they accept scalars or arrays of
nonnegative reals.  Closed forms are written to avoid cancellation near 0
(``expm1``, ``log1p``, ``2 sinh^2(x/2)``) because small-argument behaviour
drives the exponent estimate and the series checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, stats

from . import numerics
from .config import TOL
from .errors import (
    BracketError,
    DivergenceError,
    InconclusiveGrowth,
    NoStableLimit,
    NoStableSlope,
    NonMonotoneInput,
    ParamError,
)

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class YoungFunction:
    name: str
    evaluate: ArrayFn
    derivative: ArrayFn
    second_derivative: Optional[ArrayFn] = None
    analytic_conjugate: Optional[Callable[[], "YoungFunction"]] = field(default=None, repr=False)
    params: tuple = ()

    def __call__(self, x):
        return self.evaluate(np.asarray(x, dtype=float))

    def phi(self, x):
        return self.derivative(np.asarray(x, dtype=float))

    def curvature(self, x):
        """Second derivative, analytic if attached, else a central difference of φ."""
        x = np.asarray(x, dtype=float)
        if self.second_derivative is not None:
            return self.second_derivative(x)
        return numerics.central_difference(self.derivative, x, rel_step=1e-3, abs_step=0.0)

    def conjugate_function(self) -> Optional["YoungFunction"]:
        return self.analytic_conjugate() if self.analytic_conjugate is not None else None

    def to_spec(self) -> dict:
        return {"name": self.name, "params": list(self.params)}

    def check(self, grid=None, tol: float = 1e-9) -> None:
        """Sampled check of Φ(0)=0, strict increase, convexity and monotone φ."""
        if grid is None:
            grid = np.concatenate([[0.0], np.logspace(-4, 1.5, 120)])
        grid = np.sort(np.asarray(grid, dtype=float))
        with np.errstate(over="ignore"):
            vals = self(grid)
            ders = self.phi(grid)
        finite = np.isfinite(vals) & np.isfinite(ders)
        grid, vals, ders = grid[finite], vals[finite], ders[finite]
        if abs(float(self(0.0))) > tol:
            raise NonMonotoneInput(f"{self.name}: Φ(0) = {float(self(0.0))} != 0")
        if np.any(np.diff(vals) <= 0):
            raise NonMonotoneInput(f"{self.name}: Φ not strictly increasing on grid")
        if np.any(np.diff(ders) < -tol * np.maximum(1.0, np.abs(ders[1:]))):
            raise NonMonotoneInput(f"{self.name}: φ decreases on grid")
        x1, x2 = grid[:-1], grid[1:]
        for lam in (0.25, 0.5, 0.75):
            with np.errstate(over="ignore"):
                mid = self(lam * x1 + (1 - lam) * x2)
            chord = lam * vals[:-1] + (1 - lam) * vals[1:]
            if np.any(mid > chord + tol * np.maximum(1.0, np.abs(chord))):
                raise NonMonotoneInput(f"{self.name}: convexity violated on grid")


@dataclass(frozen=True, eq=False)
class YoungPair:
    phi: YoungFunction
    psi: YoungFunction
    provenance: str  # "analytic" | "numeric-legendre"
    witnesses: dict = field(default_factory=dict)

    def young_slack(self, xs, ys) -> np.ndarray:
        """Φ(x) + Ψ(y) - xy on the outer grid."""
        X, Y = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float), indexing="ij")
        return self.phi(X) + self.psi(Y) - X * Y

    def equality_residual(self, xs) -> np.ndarray:
        xs = np.asarray(xs, float)
        ys = self.phi.phi(xs)
        return np.abs(self.phi(xs) + self.psi(ys) - xs * ys)


# --- built-in catalog -------------------------------------------------------


def power(p: float) -> YoungFunction:
    """Φ(x) = x^p / p."""
    p = float(p)
    if not p > 1:
        raise ParamError(f"power exponent must exceed 1, got {p}")
    q = p / (p - 1.0)
    return YoungFunction(
        name=f"power:{p:g}",
        evaluate=lambda x: x**p / p,
        derivative=lambda x: x ** (p - 1.0),
        second_derivative=lambda x: (p - 1.0) * _safe_pow(x, p - 2.0),
        analytic_conjugate=lambda: power(q),
        params=(("p", p),),
    )


def _safe_pow(x, e):
    """x**e with the limiting value at x = 0 (0, 1 or inf by sign of e)."""
    x = np.asarray(x, dtype=float)
    at_zero = 0.0 if e > 0 else (1.0 if e == 0 else np.inf)
    return np.where(x > 0, np.power(np.where(x > 0, x, 1.0), e), at_zero)


def xlog(alpha: float = 1.0) -> YoungFunction:
    """Φ(x) = x^α ln(1+x), α ≥ 1."""
    a = float(alpha)
    if a < 1:
        raise ParamError(f"xlog exponent must be >= 1, got {a}")

    def d2(x):
        x = np.asarray(x, float)
        lead = a * (a - 1.0) * _safe_pow(x, a - 2.0) * np.log1p(x) if a != 1 else 0.0
        return lead + 2.0 * a * _safe_pow(x, a - 1.0) / (1.0 + x) - x**a / (1.0 + x) ** 2

    name = "xlog" if a == 1 else f"xlog:{a:g}"
    return YoungFunction(
        name=name,
        evaluate=lambda x: x**a * np.log1p(x),
        derivative=lambda x: a * _safe_pow(x, a - 1.0) * np.log1p(x) + x**a / (1.0 + x),
        second_derivative=d2,
        params=(("alpha", a),),
    )


def exp_young() -> YoungFunction:
    """Φ(x) = e^x - x - 1."""
    return YoungFunction(
        name="exp",
        evaluate=lambda x: np.expm1(x) - x,
        derivative=np.expm1,
        second_derivative=np.exp,
        analytic_conjugate=entropy,
    )


def entropy() -> YoungFunction:
    """Φ(x) = (1+x) ln(1+x) - x."""
    return YoungFunction(
        name="entropy",
        evaluate=lambda x: (1.0 + x) * np.log1p(x) - x,
        derivative=np.log1p,
        second_derivative=lambda x: 1.0 / (1.0 + x),
        analytic_conjugate=exp_young,
    )


def cosh_young() -> YoungFunction:
    """Φ(x) = cosh x - 1."""
    return YoungFunction(
        name="cosh",
        evaluate=lambda x: 2.0 * np.sinh(0.5 * x) ** 2,
        derivative=np.sinh,
        second_derivative=np.cosh,
        analytic_conjugate=cosh_conjugate,
    )


def cosh_conjugate() -> YoungFunction:
    """Ψ(y) = y asinh(y) - sqrt(1+y²) + 1, the conjugate of cosh x - 1."""

    def ev(y):
        return y * np.arcsinh(y) - y * y / (np.sqrt(1.0 + y * y) + 1.0)

    return YoungFunction(
        name="cosh*",
        evaluate=ev,
        derivative=np.arcsinh,
        second_derivative=lambda y: 1.0 / np.sqrt(1.0 + y * y),
        analytic_conjugate=cosh_young,
    )


def square_composed(inner: YoungFunction) -> YoungFunction:
    """Φ₀(x) = Φ(x²)."""
    d2 = None
    if inner.second_derivative is not None:
        d2 = lambda x: 2.0 * inner.derivative(x * x) + 4.0 * x * x * inner.second_derivative(x * x)
    return YoungFunction(
        name=f"square_compose:{inner.name}",
        evaluate=lambda x: inner.evaluate(x * x),
        derivative=lambda x: 2.0 * x * inner.derivative(x * x),
        second_derivative=d2,
        params=(("inner", inner.name),),
    )


def pointwise_sum(terms: list[tuple[float, YoungFunction]]) -> YoungFunction:
    """Σ c_i Φ_i(x) with c_i > 0."""
    if not terms or any(c <= 0 for c, _ in terms):
        raise ParamError("sum needs at least one term with positive coefficient")

    def combine(attr):
        fns = [(c, getattr(f, attr)) for c, f in terms]
        if any(fn is None for _, fn in fns):
            return None
        return lambda x: sum(c * fn(x) for c, fn in fns)

    label = "+".join(name if c == 1 else f"{c:g}*{name}" for c, name in ((c, f.name) for c, f in terms))
    return YoungFunction(
        name=f"sum:{label}",
        evaluate=combine("evaluate"),
        derivative=combine("derivative"),
        second_derivative=combine("second_derivative"),
        params=tuple(("term", f"{c:g}*{f.name}") for c, f in terms),
    )


def from_spec(spec: str) -> YoungFunction:
    """Parse a catalog name such as ``power:2``, ``xlog``, ``exp``, ``cosh``,
    ``entropy``, ``square_compose:xlog`` or ``sum:2*power:2+xlog``."""
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    try:
        if head == "power":
            return power(float(rest))
        if head == "xlog":
            return xlog(float(rest)) if rest else xlog()
        if head == "exp" and not rest:
            return exp_young()
        if head == "entropy" and not rest:
            return entropy()
        if head == "cosh" and not rest:
            return cosh_young()
        if head == "cosh*" and not rest:
            return cosh_conjugate()
        if head == "square_compose" and rest:
            return square_composed(from_spec(rest))
        if head == "sum" and rest:
            terms = []
            for part in rest.split("+"):
                coef, star, name = part.partition("*")
                if star and _is_number(coef):
                    terms.append((float(coef), from_spec(name)))
                else:
                    terms.append((1.0, from_spec(part)))
            return pointwise_sum(terms)
    except ValueError as exc:
        if isinstance(exc, ParamError):
            raise
        raise ParamError(f"bad Young function spec {spec!r}: {exc}") from exc
    raise ParamError(f"unknown Young function spec {spec!r}")


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


BUILTIN_NAMES = ("power:2", "power:3", "xlog", "exp", "cosh", "entropy")


# --- complementary functions ------------------------------------------------


def conjugate(phi: YoungFunction) -> YoungFunction:
    """Numeric complementary function Ψ(y) = x*·y - Φ(x*) with φ(x*) = y.

    x* is found by geometric bracket growth then bisection; the returned
    function's derivative is x* itself (the inverse of φ).
    """

    def inverse(y):
        return numerics.invert_increasing(phi.derivative, y)

    def ev(y):
        y = np.asarray(y, dtype=float)
        xs = inverse(y)
        if np.any(np.isinf(xs)):
            bad = float(np.asarray(y)[np.isinf(xs)].flat[0])
            raise BracketError(f"{phi.name}: no finite x with φ(x) = {bad:g}; φ appears bounded")
        with np.errstate(over="ignore", invalid="ignore"):
            return np.where(y > 0, xs * y - phi.evaluate(xs), 0.0)

    d2 = None
    if phi.second_derivative is not None:
        d2 = lambda y: 1.0 / phi.second_derivative(inverse(y))
    return YoungFunction(
        name=f"conj({phi.name})",
        evaluate=ev,
        derivative=inverse,
        second_derivative=d2,
        analytic_conjugate=lambda: phi,
        params=(("of", phi.name),),
    )


def complementary_pair(phi: YoungFunction) -> YoungPair:
    """Pair Φ with its closed-form conjugate when one exists, else the numeric one."""
    psi = phi.conjugate_function()
    if psi is not None:
        return YoungPair(phi, psi, "analytic")
    return YoungPair(phi, conjugate(phi), "numeric-legendre")


def biconjugate_residual(phi: YoungFunction, grid) -> float:
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid < 0):
        raise ParamError("grid must be nonempty and nonnegative")
    twice = conjugate(conjugate(phi))
    return float(np.max(np.abs(twice(grid) - phi(grid))))


def make_pair_from_phi(phi_derivative: ArrayFn, name: str = "custom",
                       tol: float | None = None, sample_max: float = 50.0) -> YoungPair:
    """Build Φ = ∫₀ˣ φ and Ψ = ∫₀ʸ φ⁻¹ by adaptive quadrature."""
    tol = TOL.quad if tol is None else tol
    grid = np.linspace(0.0, sample_max, 501)
    with np.errstate(over="ignore"):
        sampled = np.asarray(phi_derivative(grid), dtype=float)
    if abs(sampled[0]) > 1e-14:
        raise NonMonotoneInput(f"φ(0) = {sampled[0]} != 0")
    if np.any(np.diff(sampled) <= 0):
        i = int(np.argmax(np.diff(sampled) <= 0))
        raise NonMonotoneInput(f"φ not strictly increasing near x = {grid[i]:g}")

    def scalar_phi(t):
        return float(phi_derivative(np.asarray(t, dtype=float)))

    def inverse(y):
        x = numerics.invert_increasing(phi_derivative, y)
        if np.any(np.isinf(x)):
            raise BracketError(f"{name}: φ appears bounded; no finite preimage")
        return x

    def scalar_inverse(t):
        return float(inverse(t))

    def integrate_to(fn, x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        for idx, upper in np.ndenumerate(x):
            if upper == 0:
                out[idx] = 0.0
                continue
            val, err = integrate.quad(fn, 0.0, float(upper), epsabs=tol, epsrel=tol, limit=200)
            if not err <= max(tol, tol * abs(val)) * 10:
                raise DivergenceError(f"quadrature error {err:g} at {upper:g} exceeds tolerance")
            out[idx] = val
        return out if out.ndim else float(out)

    phi_fn = YoungFunction(
        name=name,
        evaluate=lambda x: integrate_to(scalar_phi, x),
        derivative=phi_derivative,
    )
    psi_fn = YoungFunction(
        name=f"conj({name})",
        evaluate=lambda y: integrate_to(scalar_inverse, y),
        derivative=inverse,
        analytic_conjugate=lambda: phi_fn,
    )
    object.__setattr__(phi_fn, "analytic_conjugate", lambda: psi_fn)
    return YoungPair(phi_fn, psi_fn, "numeric-legendre")


def square_compose(phi: YoungFunction) -> YoungPair:
    """Pair (Φ₀, Ψ₀) with Φ₀(x) = Φ(x²), plus the witnesses for the two
    quadratic-minorant conditions: K = Φ(1) on x ≥ 1 for Φ₀, and
    K = 1/(4Φ(1)) on 0 ≤ x ≤ 2Φ(1) for Ψ₀ (from a = 1/(2Φ(1)))."""
    phi0 = square_composed(phi)
    psi0 = conjugate(phi0)
    k_large = float(phi(1.0))
    a = 1.0 / (2.0 * k_large)
    k_small = a - k_large * a * a
    x_small = 1.0 / a
    xs_large = np.logspace(0, 2, 200)
    xs_small = np.linspace(0.0, x_small, 201)[1:]
    with np.errstate(over="ignore"):
        large_ok = bool(np.all(k_large * xs_large**2 <= phi0(xs_large) * (1 + 1e-12)))
    small_ok = bool(np.all(k_small * xs_small**2 <= psi0(xs_small) * (1 + 1e-12)))
    witnesses = {
        "compact": {"K": k_large, "x0": 1.0, "holds_on_grid": large_ok},
        "discrete_conjugate": {"K": k_small, "x0": x_small, "holds_on_grid": small_ok},
    }
    return YoungPair(phi0, psi0, "numeric-legendre", witnesses)


# --- growth classification --------------------------------------------------


@dataclass(frozen=True)
class GrowthClass:
    satisfies_compact: bool
    satisfies_discrete: bool
    satisfies_noncompact: bool
    K_estimates: dict
    limits: dict

    def as_dict(self) -> dict:
        return {
            "satisfies_compact": self.satisfies_compact,
            "satisfies_discrete": self.satisfies_discrete,
            "satisfies_noncompact": self.satisfies_noncompact,
            "K_estimates": self.K_estimates,
            "limits": self.limits,
        }


def growth_class(phi: YoungFunction, tol=TOL) -> GrowthClass:
    """Decide whether K x² ≤ Φ(x) holds for large x, for small x, and for all x.

    Φ″ → L at infinity (resp. 0⁺) gives Φ(x)/x² → L/2 by L'Hospital, so a
    nonzero limit is sufficient and a zero limit rules the regime out.  The
    witnessed K is the minimum of Φ(x)/x² on a log grid over the regime.
    """
    try:
        at_inf = numerics.estimate_limit(phi.curvature, tol.limit_points, rtol=tol.limit_rtol)
        at_zero = numerics.estimate_limit(phi.curvature, tol.zero_points, rtol=tol.limit_rtol)
    except NoStableLimit as exc:
        raise InconclusiveGrowth(f"{phi.name}: {exc}") from None

    compact = at_inf.is_nonzero
    discrete = at_zero.is_nonzero
    k = {}
    with np.errstate(over="ignore"):
        if compact:
            xs = np.logspace(0, 4, 200)
            ratio = phi(xs) / xs**2
            k["compact"] = {"K": float(np.min(ratio)), "x0": 1.0}
            compact = bool(np.min(ratio) > 0)
        if discrete:
            xs = np.logspace(-4, 0, 200)
            ratio = phi(xs) / xs**2
            k["discrete"] = {"K": float(np.min(ratio)), "x0": 1.0}
            discrete = bool(np.min(ratio) > 0)
    return GrowthClass(
        satisfies_compact=compact,
        satisfies_discrete=discrete,
        satisfies_noncompact=compact and discrete,
        K_estimates=k,
        limits={"second_derivative_at_infinity": at_inf.as_dict(),
                "second_derivative_at_zero": at_zero.as_dict()},
    )


@dataclass(frozen=True)
class SmallArgumentExponent:
    value: float
    stderr: float
    ci95: tuple[float, float]
    decade_slopes: tuple[float, ...]

    def as_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "ci95": list(self.ci95),
                "decade_slopes": list(self.decade_slopes)}


def l_exponent(psi: YoungFunction, decades=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6),
               slope_tol: float = 0.05) -> SmallArgumentExponent:
    """Log-log slope of Ψ near 0, i.e. the l with Ψ(x)/x^l convergent as x → 0⁺."""
    xs = np.asarray(decades, dtype=float)
    vals = np.asarray(psi(xs), dtype=float)
    if np.any(vals <= 0) or np.any(~np.isfinite(vals)):
        raise NoStableSlope(f"{psi.name}: nonpositive samples near 0: {vals.tolist()}")
    lx, lv = np.log(xs), np.log(vals)
    per_decade = np.diff(lv) / np.diff(lx)
    if np.ptp(per_decade) > slope_tol:
        raise NoStableSlope(f"{psi.name}: decade slopes {per_decade.tolist()} spread beyond {slope_tol}")
    fit = stats.linregress(lx, lv)
    tcrit = stats.t.ppf(0.975, len(xs) - 2)
    half = float(tcrit * fit.stderr)
    return SmallArgumentExponent(
        value=float(fit.slope),
        stderr=float(fit.stderr),
        ci95=(float(fit.slope) - half, float(fit.slope) + half),
        decade_slopes=tuple(per_decade.tolist()),
    )


def grid_sup_conjugate(phi: YoungFunction, y: float, x_max: float | None = None,
                       n: int = 20001) -> float:
    """Ψ(y) by a coarse grid maximum plus golden refinement; independent of φ."""
    if y == 0:
        return 0.0
    if x_max is None:
        x_max = 1.0
        with np.errstate(over="ignore"):
            while phi(x_max) < y * x_max:
                x_max *= 2.0
    xs = np.linspace(0.0, x_max, n)
    with np.errstate(over="ignore"):
        vals = y * xs - phi(xs)
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, n - 1)]
    _, best = numerics.golden_section_min(lambda x: -(y * x - float(phi(x))), lo, hi, tol=1e-14)
    return max(-best, float(vals[i]))


__all__ = [
    "YoungFunction", "YoungPair", "GrowthClass", "SmallArgumentExponent",
    "power", "xlog", "exp_young", "entropy", "cosh_young", "cosh_conjugate",
    "square_composed", "pointwise_sum", "from_spec", "BUILTIN_NAMES",
    "conjugate", "complementary_pair", "biconjugate_residual", "make_pair_from_phi",
    "square_compose", "growth_class", "l_exponent", "grid_sup_conjugate",
]
