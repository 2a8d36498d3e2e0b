"""A concave piecewise-linear profile ρ with e^{-ρ(n)} summable yet
Σ e^{ρ(2n)-2ρ(n)} divergent.

Each anchor n_k carries the tangent line to y = 2 ln x through (0, ln n_k),
which touches at x_k = e√n_k and reads T_k(x) = ln n_k + 2x/(e√n_k).
Consecutive tangents meet at t_k; the next anchor is the smallest integer
n_{k+1} > 2n_k with 2n_k < t_k < n_{k+1}.  On [0, n_1] ρ is the chord from
the origin.  All arithmetic runs in mpmath at ``DPS`` digits; stored values
are rounded to ``DIGITS`` significant digits.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf

from .errors import ParamError, SearchExhausted, VerificationError

DPS = 60
DIGITS = 40
DEFAULT_CAP = 10**60
BRUTE_WINDOW = 20_000
EPS = mpf("1e-12")


def _q(x) -> mpf:
    """Round to DIGITS significant digits (the stored precision)."""
    return mpf(mpmath.nstr(x, DIGITS))


def _render(x: mpf):
    if x == int(x) and abs(x) < mpf(10) ** DIGITS:
        return int(x)
    return mpmath.nstr(x, DIGITS)


def _parse(v) -> mpf:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ValueError(f"expected an integer or decimal string, got {v!r}")
    return mpf(v)


@dataclass(frozen=True)
class Piece:
    a: mpf
    b: mpf
    slope: mpf
    intercept: mpf
    label: str

    def __call__(self, x) -> mpf:
        return self.intercept + self.slope * x

    def to_json_obj(self) -> dict:
        return {"a": _render(self.a), "b": _render(self.b), "slope": _render(self.slope),
                "intercept": _render(self.intercept), "label": self.label}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Piece":
        return cls(_parse(obj["a"]), _parse(obj["b"]), _parse(obj["slope"]), _parse(obj["intercept"]),
                   str(obj["label"]))


@dataclass(frozen=True)
class PiecewiseRho:
    """Affine pieces tiling [0, 2n_K]; the last piece extends to infinity."""

    n1: int
    anchors: tuple
    touch_points: tuple
    junctions: tuple
    chord_slope: mpf
    pieces: tuple

    def piece_index(self, x) -> int:
        starts = [p.a for p in self.pieces]
        return max(0, bisect.bisect_right(starts, x) - 1)

    def __call__(self, x) -> mpf:
        with mp.workdps(DPS):
            x = mpf(x)
            if x < 0:
                raise ParamError("rho is defined on [0, inf)")
            return self.pieces[self.piece_index(x)](x)

    @property
    def end(self) -> mpf:
        return self.pieces[-1].b

    def to_json_obj(self) -> dict:
        return {
            "kind": "piecewise_rho",
            "digits": DIGITS,
            "n1": self.n1,
            "anchors": list(self.anchors),
            "touch_points": [_render(x) for x in self.touch_points],
            "junctions": [_render(x) for x in self.junctions],
            "chord_slope": _render(self.chord_slope),
            "pieces": [p.to_json_obj() for p in self.pieces],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PiecewiseRho":
        if obj.get("kind") != "piecewise_rho":
            raise ValueError("not a piecewise_rho document")
        with mp.workdps(DPS):
            return cls(
                int(obj["n1"]),
                tuple(int(n) for n in obj["anchors"]),
                tuple(_parse(x) for x in obj["touch_points"]),
                tuple(_parse(x) for x in obj["junctions"]),
                _parse(obj["chord_slope"]),
                tuple(Piece.from_json_obj(p) for p in obj["pieces"]),
            )

    @classmethod
    def loads(cls, text: str) -> "PiecewiseRho":
        return cls.from_json_obj(json.loads(text))

    def with_slope(self, index: int, delta) -> "PiecewiseRho":
        """Copy with one slope shifted; used to check that defects are caught."""
        pieces = list(self.pieces)
        p = pieces[index]
        with mp.workdps(DPS):
            pieces[index] = Piece(p.a, p.b, p.slope + mpf(delta), p.intercept, p.label)
        return PiecewiseRho(self.n1, self.anchors, self.touch_points, self.junctions, self.chord_slope,
                            tuple(pieces))


@dataclass
class ConstructionLog:
    steps: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"steps": self.steps, "notes": self.notes}


def tangent_slope(n) -> mpf:
    return 2 / (mp.e * mpmath.sqrt(n))


def junction(n: int, m: int) -> mpf:
    """Abscissa where the tangents of anchors n < m meet."""
    n, m = mpf(n), mpf(m)
    return mp.e * mpmath.log(m / n) * (n * mpmath.sqrt(m) + m * mpmath.sqrt(n)) / (2 * (m - n))


def _admissible(n: int, m: int) -> tuple[bool, mpf]:
    t = junction(n, m)
    return bool(2 * n < t < m), t


def next_anchor(n: int, cap: int = DEFAULT_CAP, log: list | None = None) -> tuple[int, mpf]:
    """Smallest integer m > 2n with 2n < t(n, m) < m.

    t grows with m, so doubling finds an admissible candidate and integer
    bisection then locates the smallest one.
    """
    tried = [] if log is None else log

    def test(m):
        ok, t = _admissible(n, m)
        tried.append({"candidate": m, "junction": mpmath.nstr(t, 20), "admissible": ok})
        return ok, t

    lo, m = 2 * n, 2 * n + 1
    while True:
        if m > cap:
            raise SearchExhausted(f"no admissible anchor after {n} below cap {cap} "
                                  f"(last candidate {lo}, junction {tried[-1]['junction']})")
        ok, t = test(m)
        if ok:
            break
        lo, m = m, 2 * m
    hi = m
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if test(mid)[0]:
            hi = mid
        else:
            lo = mid
    ok, t = _admissible(n, hi)
    assert ok and (hi - 1 <= 2 * n or not _admissible(n, hi - 1)[0])
    return hi, t


def build_rho(n1: int, K: int, cap: int = DEFAULT_CAP) -> tuple[PiecewiseRho, ConstructionLog]:
    if not isinstance(n1, int) or n1 <= 2:
        raise ParamError(f"n1 must be an integer greater than 2, got {n1!r}")
    if not isinstance(K, int) or K < 1:
        raise ParamError(f"K must be a positive integer, got {K!r}")
    log = ConstructionLog()
    log.notes.append("on [0, n1] rho is the chord from the origin to (n1, rho(n1))")
    log.notes.append("beyond 2*n_K rho continues along the last tangent")
    with mp.workdps(DPS):
        anchors, junctions = [n1], []
        for k in range(1, K):
            step = {"k": k, "from": anchors[-1], "candidates": []}
            log.steps.append(step)
            try:
                m, t = next_anchor(anchors[-1], cap, step["candidates"])
            except SearchExhausted as exc:
                exc.log = log
                exc.anchors = tuple(anchors)
                raise
            step.update({"anchor": m, "junction": mpmath.nstr(t, 20)})
            anchors.append(m)
            junctions.append(_q(t))

        slopes = [_q(tangent_slope(n)) for n in anchors]
        intercepts = [_q(mpmath.log(n)) for n in anchors]
        chord = _q((intercepts[0] + slopes[0] * anchors[0]) / anchors[0])
        pieces = [Piece(mpf(0), mpf(n1), chord, mpf(0), "chord")]
        bounds = [mpf(n1)] + junctions + [mpf(2 * anchors[-1])]
        for k in range(K):
            pieces.append(Piece(bounds[k], bounds[k + 1], slopes[k], intercepts[k], f"tangent {k + 1}"))
        touch = tuple(_q(mp.e * mpmath.sqrt(n)) for n in anchors)
        rho = PiecewiseRho(n1, tuple(anchors), touch, tuple(junctions), chord, tuple(pieces))
    return rho, log


# --- verification -------------------------------------------------------------


def _fail(part, index, detail, report):
    raise VerificationError(part, index, detail, report)


def _critical_integers(rho: PiecewiseRho, hi: int, scale=1) -> set:
    """Integers within two of a piece boundary divided by ``scale``."""
    out = set()
    for p in rho.pieces:
        c = int(mpmath.floor(p.a / scale))
        out.update(n for n in range(c - 2, c + 4) if 1 <= n <= hi)
    return out


def verify_counterexample(rho: PiecewiseRho, horizon: int | None = None) -> dict:
    """Check the five properties on integers up to ``horizon``; raises
    VerificationError naming the part and the offending index.

    Affine pieces make most checks exact: second differences vanish away
    from piece boundaries, so only integers next to a boundary (plus a brute
    window at the start) need evaluation.
    """
    last = rho.anchors[-1]
    N = 2 * last if horizon is None else int(horizon)
    if N < 2 * last:
        raise ParamError(f"horizon must be at least 2*n_K = {2 * last}")
    report: dict = {"horizon": N, "anchors": list(rho.anchors), "pieces": len(rho.pieces),
                    "beyond_last_anchor": N > 2 * last}
    with mp.workdps(DPS):
        P = rho.pieces
        # tiling
        if P[0].a != 0:
            _fail("structure", 0, "first piece does not start at 0", report)
        for j in range(len(P) - 1):
            if P[j].b != P[j + 1].a or not P[j].a < P[j].b:
                _fail("structure", j, f"pieces {j} and {j + 1} do not tile", report)

        # (i) rho(0) = 0 and increasing
        if abs(P[0](0)) > EPS:
            _fail("i", 0, f"rho(0) = {mpmath.nstr(P[0](0), 5)}", report)
        for j, p in enumerate(P):
            if not p.slope > 0:
                _fail("i", j, f"slope {mpmath.nstr(p.slope, 8)} not positive", report)
        report["i"] = {"rho_at_zero": float(P[0](0)), "min_slope": mpmath.nstr(min(p.slope for p in P), 17)}

        # (ii) concavity: continuity, decreasing slopes, integer second differences
        for j in range(len(P) - 1):
            gap = P[j + 1](P[j].b) - P[j](P[j].b)
            if abs(gap) > EPS * max(1, abs(P[j](P[j].b))):
                _fail("ii", j, f"value jump {mpmath.nstr(gap, 5)} at junction {mpmath.nstr(P[j].b, 17)} "
                               f"(pieces {j} and {j + 1})", report)
            if not P[j + 1].slope < P[j].slope:
                _fail("ii", j, f"slope does not decrease at junction {mpmath.nstr(P[j].b, 17)}", report)
        ints = set(range(1, min(N, BRUTE_WINDOW))) | _critical_integers(rho, N - 1)
        worst = mpf("-inf")
        for n in sorted(ints):
            d2 = rho(n + 1) - 2 * rho(n) + rho(n - 1)
            worst = max(worst, d2)
            if d2 > EPS:
                _fail("ii", rho.piece_index(n), f"second difference {mpmath.nstr(d2, 5)} at n={n}", report)
        report["ii"] = {"max_second_difference": float(worst), "integers_evaluated": len(ints),
                        "exhaustive": "affine pieces: other integers have zero second difference"}

        # (iii) tangent slopes and growth trend
        for k, n in enumerate(rho.anchors):
            p = P[k + 1]
            if abs(p.slope - tangent_slope(n)) > EPS * p.slope or abs(p.intercept - mpmath.log(n)) > EPS:
                _fail("iii", k + 1, f"piece {k + 1} is not the tangent of anchor {n}", report)
            if not (p.a <= n and 2 * n <= p.b):
                _fail("iii", k + 1, f"piece {k + 1} does not cover [{n}, {2 * n}]", report)
        report["iii"] = {"tangent_slopes": [mpmath.nstr(P[k + 1].slope, 17) for k in range(len(rho.anchors))],
                         "rho_N_over_N": mpmath.nstr(rho(N) / N, 17),
                         "note": "slopes decrease toward 0; the limit of rho(x)/x is not certified"}

        # (iv) rho(n) >= 2 ln n on [n1, N]: affine minus 2 ln x is convex, so
        # its minimum over a piece is at 2/slope clipped to the piece
        n1 = rho.n1
        worst = mpf("inf")
        for j, p in enumerate(P):
            lo, hi = max(p.a, mpf(n1)), (p.b if j < len(P) - 1 else mpf(N))
            hi = min(hi, mpf(N))
            if lo > hi:
                continue
            x = min(max(2 / p.slope, lo), hi)
            gap = p(x) - 2 * mpmath.log(x)
            samples = [lo + (hi - lo) * i / 99 for i in range(100)]
            gap = min([gap] + [p(s) - 2 * mpmath.log(s) for s in samples])
            worst = min(worst, gap)
            if gap < -EPS:
                _fail("iv", j, f"rho - 2 ln x reaches {mpmath.nstr(gap, 5)} on piece {j}", report)
        for n in range(n1, min(N, BRUTE_WINDOW) + 1):
            if rho(n) - 2 * mpmath.log(n) < -EPS:
                _fail("iv", n, "rho(n) < 2 ln n", report)
        head = mpmath.fsum(mpmath.exp(-rho(n)) for n in range(n1))
        report["iv"] = {"min_gap_over_log": float(worst),
                        "sum_exp_minus_rho_bound": mpmath.nstr(head + mpf(1) / (n1 - 1), 17),
                        "bound_parts": {"head": mpmath.nstr(head, 17), "tail_inverse_square": f"1/{n1 - 1}"}}

        # (v) a_n = exp(rho(2n) - 2 rho(n)) nonincreasing, n_k a_{n_k} = 1
        half = N // 2
        crit = set(range(1, min(half, BRUTE_WINDOW))) | _critical_integers(rho, half - 1) \
            | _critical_integers(rho, half - 1, scale=2)
        la = lambda n: rho(2 * n) - 2 * rho(n)
        worst = mpf("-inf")
        for n in sorted(crit):
            rise = la(n + 1) - la(n)
            worst = max(worst, rise)
            if rise > EPS:
                _fail("v", n, f"a_n increases by a factor exp({mpmath.nstr(rise, 5)})", report)
        witnesses = []
        for k, n in enumerate(rho.anchors):
            ident = 2 * rho(n) - rho(2 * n) - mpmath.log(n)
            prod = n * mpmath.exp(la(n))
            if abs(ident) > mpf("1e-9") or abs(prod - 1) > mpf("1e-9"):
                _fail("v", k, f"anchor {n}: 2rho(n)-rho(2n)-ln n = {mpmath.nstr(ident, 5)}, "
                              f"n*a_n = {mpmath.nstr(prod, 17)}", report)
            witnesses.append({"anchor": n, "n_times_a_n": float(prod), "identity_residual": float(ident)})
        report["v"] = {"max_log_rise": float(worst), "integers_evaluated": len(crit), "anchors": witnesses,
                       "note": "n*a_n = 1 along the anchors, so n*a_n does not tend to 0"}
    report["verdict"] = "all five properties verified"
    return report


__all__ = [
    "DPS", "DIGITS", "DEFAULT_CAP", "Piece", "PiecewiseRho", "ConstructionLog", "tangent_slope", "junction",
    "next_anchor", "build_rho", "verify_counterexample",
]
