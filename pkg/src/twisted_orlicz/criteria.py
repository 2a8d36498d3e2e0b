"""Mechanical checks of the sufficient conditions for twisted Orlicz
algebras on ℤ^d with radial weights e^{ρ(τ)}.

Every checker returns a :class:`CriterionReport`.  A verdict is ``Holds`` or
``Fails`` only when each sub-check it depends on is decisive; anything else
is ``Inconclusive``.  Reports describe hypotheses being verified, never the
structural conclusions those hypotheses lead to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import lattice, numerics, orlicz, twist, young
from .config import TOL, Tolerances
from .errors import (
    ConcavityError,
    DifferentiabilityError,
    InconclusiveGrowth,
    NoStableLimit,
    NoStableSlope,
    ParamError,
)
from .lattice import Weight
from .orlicz import SummabilityPolicy
from .young import YoungFunction

HOLDS, FAILS, INCONCLUSIVE = "Holds", "Fails", "Inconclusive"
EXIT_CODES = {HOLDS: 0, FAILS: 1, INCONCLUSIVE: 2}


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    verdict: str
    statement: str
    evidence: dict = field(default_factory=dict)
    derived: dict = field(default_factory=dict)
    objects: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def as_dict(self) -> dict:
        return {"criterion": self.criterion, "verdict": self.verdict, "statement": self.statement,
                "evidence": self.evidence, "derived": self.derived}


def combine(verdicts) -> str:
    """Conjunction: Fails if any fails, Holds if all hold, else Inconclusive."""
    verdicts = list(verdicts)
    if FAILS in verdicts:
        return FAILS
    if all(v == HOLDS for v in verdicts):
        return HOLDS
    return INCONCLUSIVE


def _series_verdict(v: orlicz.SeriesVerdict) -> str:
    return {"Converges": HOLDS, "Diverges": FAILS}.get(v.verdict, INCONCLUSIVE)


# --- decreasing-quotient lemma -------------------------------------------------


def lemma_decreasing_quotient(sigma: Callable | None = None, N: int = 500, *,
                              log_sigma: Callable | None = None, tol: float = 1e-12) -> CriterionReport:
    """Check that σ(n+1)/σ(n) decreases on [0, 2N], then brute-force
    σ(m+n)/(σ(m)σ(n)) ≤ σ(2m)/σ(m)² + σ(2n)/σ(n)² for 0 ≤ m, n ≤ N.

    Works on log σ so that fast-growing sequences stay representable.
    """
    if (sigma is None) == (log_sigma is None):
        raise ParamError("give exactly one of sigma and log_sigma")
    ns = np.arange(2 * N + 1, dtype=float)
    if log_sigma is None:
        vals = np.asarray(sigma(ns), dtype=float)
        if np.any(vals <= 0):
            raise ParamError("sigma must be positive")
        ls = np.log(vals)
    else:
        ls = np.asarray(log_sigma(ns), dtype=float)
    steps = np.diff(ls)
    rises = np.diff(steps)
    bad = np.nonzero(rises > tol * (1.0 + np.abs(steps[1:])))[0]
    hypothesis = bad.size == 0

    m = np.arange(N + 1)
    log_lhs = ls[np.add.outer(m, m)] - ls[m][:, None] - ls[m][None, :]
    log_diag = ls[2 * m] - 2.0 * ls[m]
    log_rhs = np.logaddexp(log_diag[:, None], log_diag[None, :])
    # relative slack 1 - lhs/rhs; stays finite however fast σ grows
    slack = -np.expm1(log_lhs - log_rhs)
    i, j = np.unravel_index(int(np.argmin(slack)), slack.shape)
    min_slack = float(slack[i, j])
    inequality = bool(min_slack >= -tol)

    evidence = {
        "N": N,
        "quotients_decreasing": hypothesis,
        "first_increase_at": int(bad[0]) if bad.size else None,
        "max_quotient_rise": float(np.max(rises)) if rises.size else 0.0,
        "min_relative_slack": min_slack,
        "min_slack_at": [int(i), int(j)],
        "pairs_checked": int(slack.size),
        "inequality_holds": inequality,
    }
    if not hypothesis:
        verdict, statement = FAILS, "hypothesis fails: consecutive quotients increase"
    elif inequality:
        verdict, statement = HOLDS, "quotients decrease and the two-term bound holds on every pair"
    else:
        verdict, statement = FAILS, "quotients decrease but the two-term bound is violated"
    return CriterionReport("lemma", verdict, statement, evidence)


# --- u profile ---------------------------------------------------------------


def log_u(w: Weight) -> Callable:
    """n ↦ ρ(2n) - 2ρ(n), the log of the decomposition profile."""
    return lambda n: w.rho(2.0 * np.asarray(n, dtype=float)) - 2.0 * w.rho(np.asarray(n, dtype=float))


def u_profile(w: Weight) -> Callable:
    lu = log_u(w)
    return lambda n: np.exp(lu(n))


def check_concave(w: Weight, n_max: int, tol: float = 1e-12) -> dict:
    ns = np.arange(n_max + 1, dtype=float)
    r = w.rho(ns)
    d2 = np.diff(r, 2)
    info = {"rho_at_zero": float(r[0]), "increasing": bool(np.all(np.diff(r) > 0)),
            "max_second_difference": float(np.max(d2)) if d2.size else 0.0, "n_max": n_max}
    bad = np.nonzero(d2 > tol * np.maximum(1.0, np.abs(r[1:-1])))[0]
    if bad.size:
        raise ConcavityError(f"{w.name}: second difference {d2[bad[0]]:.3g} > 0 at n={bad[0] + 1}")
    if abs(info["rho_at_zero"]) > tol or not info["increasing"]:
        raise ConcavityError(f"{w.name}: rho must vanish at 0 and increase ({info})")
    return info


def decomposition_profile(w: Weight, radius: int = 200, d: int = 1, tol: float = 1e-12) -> CriterionReport:
    """u(n) = exp(ρ(2n) - 2ρ(n)) and a scan of ω(s+t)/(ω(s)ω(t)) ≤ u(τ(s)) + u(τ(t))
    over the ball of the given radius (reduced to integer length triples)."""
    concave = check_concave(w, 2 * radius)
    u = u_profile(w)
    check = twist.decomposition_bound_check(lattice.coboundary(w), u, u, radius, d)
    ok = check.max_violation <= tol
    ns = np.arange(min(radius, 10) + 1, dtype=float)
    derived = {"u_samples": {str(int(n)): float(x) for n, x in zip(ns, u(ns))},
               "u_formula": "exp(rho(2n) - 2 rho(n))"}
    evidence = {"weight": w.to_spec(), "dimension": d, "radius": radius, "concavity": concave,
                "bound_check": check.as_dict(), "slack_tolerance": tol}
    return CriterionReport("decomposition", HOLDS if ok else FAILS,
                           "pointwise two-term bound holds on the ball" if ok
                           else "pointwise two-term bound violated",
                           evidence, derived, {"u": u, "log_u": log_u(w)})


# --- three sufficient conditions for u in S^Ψ ----------------------------------


def _bounded_sequence(fn: Callable, tol: Tolerances) -> tuple[str, dict]:
    grid = np.arange(0, 10_001, dtype=float)
    vals = np.asarray(fn(grid), dtype=float)
    info = {"grid_max": float(np.max(vals)), "grid_range": [0, 10_000]}
    try:
        lim = numerics.estimate_limit(fn, tol.limit_points, rtol=tol.limit_rtol)
    except NoStableLimit as exc:
        info["limit"] = str(exc)
        return INCONCLUSIVE, info
    info["limit"] = lim.as_dict()
    if lim.kind == "+inf":
        return FAILS, info
    info["bound"] = max(info["grid_max"], lim.value + lim.spread) if lim.kind == "finite" else info["grid_max"]
    return HOLDS, info


def condition_bounded_product(w: Weight, psi: YoungFunction, d: int,
                              policy: SummabilityPolicy = SummabilityPolicy(),
                              tol: Tolerances = TOL) -> CriterionReport:
    """u·ω bounded and ω⁻¹ ∈ S^Ψ."""
    h = lambda n: w.rho(2.0 * np.asarray(n, dtype=float)) - w.rho(np.asarray(n, dtype=float))
    bounded, info = _bounded_sequence(h, tol)
    member = orlicz.s_psi_membership(psi, d, log_value=lambda n: -w.rho(np.asarray(n, dtype=float)),
                                     policy=policy)
    verdict = combine([bounded, _series_verdict(member)])
    statement = {HOLDS: "hypotheses verified: u*omega bounded and 1/omega in S^Psi",
                 FAILS: "hypotheses not met",
                 INCONCLUSIVE: "could not decide"}[verdict]
    evidence = {"weight": w.to_spec(), "psi": psi.to_spec(), "dimension": d,
                "log_u_omega": {"verdict": bounded, **info},
                "inverse_weight_membership": member.as_dict()}
    return CriterionReport("condition-bounded-product", verdict, statement, evidence)


def condition_first_derivative(w: Weight, psi: YoungFunction, d: int,
                               policy: SummabilityPolicy = SummabilityPolicy()) -> CriterionReport:
    """v(n) = exp(n²q'(n)) = exp(nρ'(n) - ρ(n)) ∈ S^Ψ, with q = ρ(x)/x, plus a
    sampled check that x²q'(x) does not increase."""
    if w.rho_prime is None:
        raise DifferentiabilityError(f"{w.name}: no analytic first derivative")

    def log_v(n):
        n = np.asarray(n, dtype=float)
        with np.errstate(invalid="ignore"):
            val = n * w.rho_prime(n) - w.rho(n)
        return np.where(n > 0, val, 0.0)

    xs = np.logspace(-2, 5, 400)
    xq = log_v(xs)
    rises = np.diff(xq)
    monotone = bool(np.all(rises <= 1e-12 * (1.0 + np.abs(xq[1:]))))
    member = orlicz.s_psi_membership(psi, d, log_value=log_v, policy=policy)
    mono_verdict = HOLDS if monotone else FAILS
    verdict = combine([_series_verdict(member), mono_verdict if member.verdict != "Diverges" else HOLDS])
    statement = {HOLDS: "hypotheses verified: v in S^Psi and x^2 q'(x) nonincreasing",
                 FAILS: "hypotheses not met",
                 INCONCLUSIVE: "could not decide"}[verdict]
    evidence = {"weight": w.to_spec(), "psi": psi.to_spec(), "dimension": d,
                "x2_q_prime_nonincreasing": monotone, "max_rise": float(np.max(rises)),
                "grid": [float(xs[0]), float(xs[-1]), len(xs)],
                "v_membership": member.as_dict()}
    return CriterionReport("condition-first-derivative", verdict, statement, evidence,
                           {"log_v_samples": {str(n): float(log_v(n)) for n in (1, 10, 100, 1000)}})


def condition_second_derivative(w: Weight, psi: YoungFunction, d: int,
                                tol: Tolerances = TOL) -> CriterionReport:
    """lim x²ρ''(x) < -d/l with l the small-argument exponent of Ψ.

    The limit comes from three decades with a Richardson step; Holds (Fails)
    needs the gap to -d/l to exceed ``margin_factor`` times the combined
    uncertainty of the limit and of d/l.
    """
    evidence: dict = {"weight": w.to_spec(), "psi": psi.to_spec(), "dimension": d}
    fn = lambda x: x * x * w.second_derivative(x)
    try:
        lim = numerics.estimate_limit(fn, tol.limit_points, rtol=tol.limit_rtol)
    except NoStableLimit as exc:
        evidence["limit"] = str(exc)
        return CriterionReport("condition-second-derivative", INCONCLUSIVE, "limit not stable", evidence)
    evidence["limit"] = lim.as_dict()
    try:
        ell = young.l_exponent(psi)
    except NoStableSlope as exc:
        evidence["l"] = str(exc)
        return CriterionReport("condition-second-derivative", INCONCLUSIVE, "exponent l not stable", evidence)
    evidence["l"] = ell.as_dict()
    threshold = -d / ell.value
    half_ci = 0.5 * (ell.ci95[1] - ell.ci95[0])
    unc = lim.spread + d * half_ci / ell.value**2
    evidence.update({"threshold": threshold, "uncertainty": unc, "margin_factor": tol.margin_factor})
    if lim.kind == "-inf":
        verdict = HOLDS
    elif lim.kind == "+inf":
        verdict = FAILS
    else:
        gap = threshold - lim.value
        evidence["gap"] = gap
        if gap > tol.margin_factor * unc and gap > 0:
            verdict = HOLDS
        elif -gap > tol.margin_factor * unc or (gap <= 0 and unc == 0):
            verdict = FAILS
        else:
            verdict = INCONCLUSIVE
    statement = {HOLDS: "hypothesis verified: lim x^2 rho'' < -d/l",
                 FAILS: "hypothesis not met: lim x^2 rho'' >= -d/l",
                 INCONCLUSIVE: "limit within uncertainty of -d/l"}[verdict]
    return CriterionReport("condition-second-derivative", verdict, statement, evidence,
                           {"L": lim.value, "l": ell.value})


def u_membership(w: Weight, psi: YoungFunction, d: int,
                 policy: SummabilityPolicy = SummabilityPolicy()) -> CriterionReport:
    """u ∈ S^Ψ checked directly on the radial profile."""
    member = orlicz.s_psi_membership(psi, d, log_value=log_u(w), policy=policy)
    verdict = _series_verdict(member)
    return CriterionReport("u-membership", verdict,
                           {HOLDS: "hypothesis verified: u in S^Psi", FAILS: "u not in S^Psi",
                            INCONCLUSIVE: "could not decide"}[verdict],
                           {"weight": w.to_spec(), "psi": psi.to_spec(), "dimension": d,
                            "membership": member.as_dict()})


# --- operator algebra certificate ----------------------------------------------


def corollary_case(w: Weight, d: int, policy: SummabilityPolicy = SummabilityPolicy()) -> dict:
    """Which of the three named weight families applies."""
    if w.kind == "poly":
        inv_sq = orlicz.summability(
            orlicz.radial_series(d, log_value=lambda n: -2.0 * w.rho(np.asarray(n, dtype=float))), policy)
        applies = inv_sq.converges
        return {"case": "polynomial", "applies": applies if inv_sq.verdict != "Inconclusive" else None,
                "inverse_weight_square_summable": inv_sq.as_dict()}
    if w.kind == "subexp":
        return {"case": "subexponential-power", "applies": True}
    if w.kind == "subexp2":
        return {"case": "subexponential-log", "applies": True}
    return {"case": None, "applies": False}


def intersection_young(phi: YoungFunction) -> YoungFunction:
    """Φ̃(x) = x² + Φ(x), the Young function of ℓ² ∩ ℓ^Φ."""
    return young.pointwise_sum([(2.0, young.power(2)), (1.0, phi)])


def operator_algebra_certificate(phi: YoungFunction, w: Weight, d: int,
                                 policy: SummabilityPolicy = SummabilityPolicy(),
                                 tol: Tolerances = TOL) -> CriterionReport:
    """Granted iff (a) K x² ≤ Φ(x) near 0 (the discrete embedding into ℓ²)
    and (b) Σ_n sphere(d,n)·u(n)² < ∞ for the decomposition profile u."""
    evidence: dict = {"phi": phi.to_spec(), "weight": w.to_spec(), "dimension": d}
    try:
        gc = young.growth_class(phi, tol)
        growth = HOLDS if gc.satisfies_discrete else FAILS
        evidence["growth"] = gc.as_dict()
    except InconclusiveGrowth as exc:
        growth = INCONCLUSIVE
        evidence["growth"] = str(exc)
    try:
        evidence["concavity"] = check_concave(w, 400)
    except ConcavityError as exc:
        evidence["concavity"] = str(exc)
        return CriterionReport("operator-algebra", FAILS, "weight profile is not concave", evidence)
    lu = log_u(w)
    series = orlicz.summability(orlicz.radial_series(d, log_value=lambda n: 2.0 * lu(n)), policy)
    evidence["u_square_summable"] = series.as_dict()
    verdict = combine([growth, _series_verdict(series)])
    tilde = intersection_young(phi)
    derived = {"corollary_weight_case": corollary_case(w, d, policy),
               "intersection_young_function": tilde.name,
               "u_equals_v": "exp(rho(2n) - 2 rho(n))"}
    statement = {HOLDS: "certificate granted: embedding and square-summable decomposition verified "
                        "(sufficient conditions only)",
                 FAILS: "certificate denied: a sufficient condition fails (no claim about necessity)",
                 INCONCLUSIVE: "certificate undecided"}[verdict]
    return CriterionReport("operator-algebra", verdict, statement, evidence, derived, {"u": u_profile(w)})


def lp_threshold(d: int, p: float, beta: float) -> dict:
    """The two thresholds for ℓ^p with polynomial weight (1+τ)^β:
    Banach algebra iff β > d/q; operator algebra claimed if 1 < p ≤ 2 and β > d/2."""
    if not (1 < p < math.inf):
        raise ParamError(f"p must lie in (1, inf), got {p}")
    if not beta > 0:
        raise ParamError(f"beta must be positive, got {beta}")
    if d < 1:
        raise ParamError(f"dimension must be positive, got {d}")
    q = p / (p - 1.0)
    return {"d": d, "p": p, "q": q, "beta": beta,
            "banach_algebra": bool(beta > d / q),
            "operator_algebra_claimed": bool(1 < p <= 2 and beta > d / 2)}


def lp_threshold_report(d: int, p: float, beta: float) -> CriterionReport:
    out = lp_threshold(d, p, beta)
    verdict = HOLDS if out["banach_algebra"] and out["operator_algebra_claimed"] else FAILS
    return CriterionReport("lp-threshold", verdict,
                           f"banach: {str(out['banach_algebra']).lower()}, "
                           f"operator: {str(out['operator_algebra_claimed']).lower()}", out)


def growth_report(phi: YoungFunction, tol: Tolerances = TOL) -> CriterionReport:
    try:
        gc = young.growth_class(phi, tol)
    except InconclusiveGrowth as exc:
        return CriterionReport("growth", INCONCLUSIVE, str(exc), {"phi": phi.to_spec()})
    verdict = HOLDS if gc.satisfies_discrete else FAILS
    flags = [k for k, v in (("compact", gc.satisfies_compact), ("discrete", gc.satisfies_discrete),
                            ("noncompact", gc.satisfies_noncompact)) if v]
    return CriterionReport("growth", verdict, "quadratic minorant regimes: " + (", ".join(flags) or "none"),
                           {"phi": phi.to_spec(), **gc.as_dict()})


__all__ = [
    "HOLDS", "FAILS", "INCONCLUSIVE", "EXIT_CODES", "CriterionReport", "combine",
    "lemma_decreasing_quotient", "log_u", "u_profile", "check_concave", "decomposition_profile",
    "condition_bounded_product", "condition_first_derivative", "condition_second_derivative",
    "u_membership", "corollary_case", "intersection_young", "operator_algebra_certificate",
    "lp_threshold", "lp_threshold_report", "growth_report",
]
