"""Command-line interface.

Exit codes: 0 Holds / success, 1 Fails, 2 Inconclusive, 64 usage error,
70 computation error, 74 unreadable or malformed input/output file.
Reports are JSON with sorted keys and shortest round-trip float rendering,
and every report echoes the tolerances in force.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np

from . import counterexample, criteria, lattice, orlicz, twist, young
from .config import Tolerances, default_tolerances
from .errors import (
    DimensionError,
    ParamError,
    SearchExhausted,
    TwistedOrliczError,
    VerificationError,
)

EXIT_OK, EXIT_FAILS, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_SOFTWARE, EXIT_IO = 64, 70, 74


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, mpmath.mpf):
        return mpmath.nstr(obj, 17)
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=_json_default) + "\n"


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from exc


def _load_function(path: str) -> orlicz.DiscreteFunction:
    try:
        return orlicz.DiscreteFunction.loads(_read(path))
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, (ParamError, DimensionError)):
            raise
        raise InputError(f"{path}: not a discrete function document ({exc})") from exc


def _header(tol: Tolerances, **extra) -> dict:
    return {"tolerances": tol.as_dict(), **extra}


def _emit_report(rep: criteria.CriterionReport, args, tol, out, err) -> int:
    doc = {**_header(tol), "report": rep.as_dict()}
    _write(getattr(args, "output", None), dumps(doc), out)
    err.write(f"{rep.criterion}: {rep.verdict} ({rep.statement})\n")
    return rep.exit_code


# --- commands -----------------------------------------------------------------


def cmd_young_show(args, tol, out, err) -> int:
    phi = young.from_spec(args.phi)
    info = {"name": phi.name, "spec": phi.to_spec()}
    xs = np.asarray(args.at, dtype=float)
    info["values"] = {repr(float(x)): float(v) for x, v in zip(xs, phi(xs))}
    psi = phi.conjugate_function()
    info["conjugate"] = psi.name if psi is not None else young.conjugate(phi).name
    try:
        info["growth"] = young.growth_class(phi, tol).as_dict()
    except TwistedOrliczError as exc:
        info["growth"] = {"error": f"{type(exc).__name__}: {exc}"}
    try:
        info["small_argument_exponent"] = young.l_exponent(phi).as_dict()
    except TwistedOrliczError as exc:
        info["small_argument_exponent"] = {"error": f"{type(exc).__name__}: {exc}"}
    _write(args.output, dumps({**_header(tol), "young": info}), out)
    return EXIT_OK


def cmd_norm(args, tol, out, err) -> int:
    phi = young.from_spec(args.phi)
    f = _load_function(args.input)
    if args.weight:
        f = f.weighted(lattice.weight_from_spec(args.weight))
    if args.kind == "luxemburg":
        value = orlicz.luxemburg_norm(phi, f)
    else:
        value = orlicz.orlicz_norm(phi, f, tol=tol.root)
    if args.json:
        _write(args.output, dumps({**_header(tol), "phi": phi.name, "kind": args.kind,
                                   "weight": args.weight, "norm": value}), out)
    else:
        _write(args.output, f"{value!r}\n" if value else "0\n", out)
    return EXIT_OK


def cmd_conv(args, tol, out, err) -> int:
    omega = lattice.cocycle_from_spec(args.cocycle)
    rep = twist.twisted_convolve(omega, _load_function(args.f), _load_function(args.g))
    _write(args.output, rep.result.dumps(), out)
    err.write(f"pairs: {rep.pairs}, flops: {rep.flops}, support: {len(rep.result)}\n")
    return EXIT_OK


def cmd_random_function(args, tol, out, err) -> int:
    rng = np.random.default_rng(args.seed)
    f = orlicz.random_function(rng, args.dim, args.radius, args.size, args.law)
    _write(args.output, f.dumps(), out)
    return EXIT_OK


def cmd_probe(args, tol, out, err) -> int:
    phi = young.from_spec(args.phi)
    omega = lattice.cocycle_from_spec(args.cocycle)
    sampler = twist.make_sampler(args.dim, args.radius, args.size, args.law)
    res = twist.submultiplicativity_probe(phi, omega, sampler, args.trials, np.random.default_rng(args.seed))
    doc = {**_header(tol, seed=args.seed), "phi": phi.name, "cocycle": omega.to_spec(), "probe": res.as_dict(),
           "note": "empirical ratios only; no bound is certified"}
    _write(args.output, dumps(doc), out)
    return EXIT_OK


def _lemma(args, tol):
    if args.square:
        return criteria.lemma_decreasing_quotient(log_sigma=lambda n: n * n, N=args.N)
    w = lattice.weight_from_spec(args.weight)
    return criteria.lemma_decreasing_quotient(log_sigma=w.rho, N=args.N)


def _conditions(args, tol):
    w = lattice.weight_from_spec(args.weight)
    psi = young.from_spec(args.psi)
    checks = {
        "i": lambda: criteria.condition_bounded_product(w, psi, args.dim, tol=tol),
        "ii": lambda: criteria.condition_first_derivative(w, psi, args.dim),
        "iii": lambda: criteria.condition_second_derivative(w, psi, args.dim, tol=tol),
    }
    if args.condition != "any":
        return checks[args.condition]()
    reps = [checks[k]() for k in ("i", "ii", "iii")]
    verdicts = [r.verdict for r in reps]
    verdict = (criteria.HOLDS if criteria.HOLDS in verdicts
               else criteria.INCONCLUSIVE if criteria.INCONCLUSIVE in verdicts else criteria.FAILS)
    return criteria.CriterionReport(
        "u-membership-conditions", verdict,
        "at least one sufficient condition verified" if verdict == criteria.HOLDS
        else "no sufficient condition verified",
        {k: r.as_dict() for k, r in zip(("i", "ii", "iii"), reps)})


CHECKS = {
    "lemma": _lemma,
    "decomposition": lambda a, t: criteria.decomposition_profile(lattice.weight_from_spec(a.weight), a.radius,
                                                                 a.dim),
    "conditions": _conditions,
    "growth": lambda a, t: criteria.growth_report(young.from_spec(a.phi), t),
    "operator-algebra": lambda a, t: criteria.operator_algebra_certificate(
        young.from_spec(a.phi), lattice.weight_from_spec(a.weight), a.dim, tol=t),
    "lp-threshold": lambda a, t: criteria.lp_threshold_report(a.dim, a.p, a.beta),
}
ALIASES = {"thm32": "decomposition", "thm33": "conditions"}


def cmd_check(args, tol, out, err) -> int:
    name = ALIASES.get(args.check, args.check)
    return _emit_report(CHECKS[name](args, tol), args, tol, out, err)


def cmd_counterexample_build(args, tol, out, err) -> int:
    try:
        rho, log = counterexample.build_rho(args.n1, args.segments, cap=args.cap)
    except SearchExhausted as exc:
        log = getattr(exc, "log", None)
        if args.log and log is not None:
            _write(args.log, dumps(log.as_dict()), out)
        err.write(f"anchors found before the search gave up: {list(getattr(exc, 'anchors', ()))}\n")
        raise
    _write(args.output, rho.dumps(), out)
    if args.log:
        _write(args.log, dumps(log.as_dict()), out)
    err.write(f"anchors: {list(rho.anchors)}\n")
    return EXIT_OK


def cmd_counterexample_verify(args, tol, out, err) -> int:
    try:
        rho = counterexample.PiecewiseRho.loads(_read(args.input))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{args.input}: not a piecewise_rho document ({exc})") from exc
    try:
        rep = counterexample.verify_counterexample(rho, args.horizon)
    except VerificationError as exc:
        doc = {**_header(tol), "verdict": criteria.FAILS, "part": exc.part, "index": exc.index,
               "detail": exc.detail, "partial": exc.report}
        _write(args.output, dumps(doc), out)
        err.write(f"{exc}\n")
        return EXIT_FAILS
    _write(args.output, dumps({**_header(tol), "verdict": criteria.HOLDS, "report": rep}), out)
    return EXIT_OK


# --- sweep ------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    betas: tuple
    p: float
    dim: int
    operation: str
    fmt: str
    output: str | None

    def __post_init__(self):
        if not self.betas:
            raise UsageError("empty parameter grid")
        if self.operation not in SWEEP_OPS:
            raise UsageError(f"unknown sweep operation {self.operation!r}")


def beta_grid(start: float, stop: float, step: float) -> tuple:
    if not step > 0 or not (math.isfinite(start) and math.isfinite(stop)):
        raise UsageError("step must be positive and bounds finite")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 12) for i in range(max(count, 0)))


def _row_threshold(beta, spec, tol):
    out = criteria.lp_threshold(spec.dim, spec.p, beta)
    return {"banach_algebra": out["banach_algebra"], "operator_algebra_claimed": out["operator_algebra_claimed"]}


def _row_condition(beta, spec, tol):
    w = lattice.make_weight("poly", beta=beta)
    psi = young.power(spec.p / (spec.p - 1.0))
    rep = criteria.condition_second_derivative(w, psi, spec.dim, tol=tol)
    return {"condition_verdict": rep.verdict, "limit": rep.derived.get("L"), "l": rep.derived.get("l")}


def _row_certificate(beta, spec, tol):
    rep = criteria.operator_algebra_certificate(young.power(spec.p), lattice.make_weight("poly", beta=beta),
                                                spec.dim, tol=tol)
    return {"certificate_verdict": rep.verdict}


def _row_all(beta, spec, tol):
    row = _row_threshold(beta, spec, tol)
    row.update(_row_condition(beta, spec, tol))
    if spec.p == 2:
        row.update(_row_certificate(beta, spec, tol))
    return row


SWEEP_OPS = {"lp-threshold": _row_threshold, "condition": _row_condition,
             "operator-algebra": _row_certificate, "all": _row_all}


def run_sweep(spec: SweepSpec, tol: Tolerances) -> tuple[list, bool]:
    op = SWEEP_OPS[spec.operation]

    def row(beta):
        base = {"beta": beta, "d": spec.dim, "p": spec.p}
        try:
            base.update(op(beta, spec, tol))
            base["error"] = ""
        except TwistedOrliczError as exc:
            base["error"] = f"{type(exc).__name__}: {exc}"
        return base

    with ThreadPoolExecutor(max_workers=4) as pool:
        rows = list(pool.map(row, spec.betas))
    inconclusive = any(r.get("error") or criteria.INCONCLUSIVE in
                       (r.get("condition_verdict"), r.get("certificate_verdict")) for r in rows)
    return rows, inconclusive


def _csv(rows: list, tol: Tolerances, spec: SweepSpec) -> str:
    cols = list(dict.fromkeys(k for r in rows for k in r))
    buf = io.StringIO()
    buf.write("# columns: beta = weight exponent; d = dimension; p = Orlicz exponent;\n")
    buf.write("# banach_algebra, operator_algebra_claimed = arithmetic thresholds;\n")
    buf.write("# condition_verdict = second-derivative condition with l measured from y^q/q;\n")
    buf.write("# limit, l = estimated lim x^2 rho'' and small-argument exponent;\n")
    buf.write("# certificate_verdict = operator-algebra certificate (p = 2 only); error = per-row failure\n")
    buf.write(f"# tolerances: {json.dumps(tol.as_dict(), sort_keys=True)}\n")
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def cmd_sweep(args, tol, out, err) -> int:
    spec = SweepSpec(beta_grid(args.beta_start, args.beta_stop, args.beta_step), args.p, args.dim,
                     args.operation, args.format, args.output)
    rows, inconclusive = run_sweep(spec, tol)
    text = _csv(rows, tol, spec) if spec.fmt == "csv" else dumps({**_header(tol), "rows": rows})
    _write(spec.output, text, out)
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="twisted-orlicz", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    y = sub.add_parser("young", help="inspect a Young function")
    ysub = y.add_subparsers(dest="young_command", required=True, parser_class=_Parser)
    ys = ysub.add_parser("show")
    ys.add_argument("phi", help="e.g. power:2, xlog, exp, entropy, cosh, square_compose:exp")
    ys.add_argument("--at", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ys.add_argument("-o", "--output")
    ys.set_defaults(func=cmd_young_show)

    n = sub.add_parser("norm", help="Luxemburg or Orlicz norm of a function file")
    n.add_argument("--phi", required=True)
    n.add_argument("--input", required=True)
    n.add_argument("--kind", choices=("luxemburg", "orlicz"), default="luxemburg")
    n.add_argument("--weight", help="multiply by a weight first, e.g. poly:1")
    n.add_argument("--json", action="store_true", help="emit a JSON report instead of the bare number")
    n.add_argument("-o", "--output")
    n.set_defaults(func=cmd_norm)

    c = sub.add_parser("conv", help="twisted convolution of two function files")
    c.add_argument("--cocycle", required=True, help="e.g. trivial, heisenberg:0.5, coboundary:poly:1")
    c.add_argument("--f", required=True)
    c.add_argument("--g", required=True)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_conv)

    r = sub.add_parser("random-function", help="write a random finitely supported function")
    r.add_argument("--dim", "-d", type=int, default=1)
    r.add_argument("--radius", type=int, default=10)
    r.add_argument("--size", type=int, default=5)
    r.add_argument("--law", choices=("complex", "positive", "lognormal"), default="complex")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_random_function)

    pr = sub.add_parser("probe", help="empirical ratios N(f*g)/(N(f)N(g)) on random pairs")
    pr.add_argument("--phi", required=True)
    pr.add_argument("--cocycle", required=True)
    pr.add_argument("--dim", "-d", type=int, default=1)
    pr.add_argument("--radius", type=int, default=10)
    pr.add_argument("--size", type=int, default=5)
    pr.add_argument("--law", choices=("complex", "positive", "lognormal"), default="complex")
    pr.add_argument("--trials", type=int, default=50)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("-o", "--output")
    pr.set_defaults(func=cmd_probe)

    ch = sub.add_parser("check", help="verdict-producing checks (exit 0/1/2)")
    csub = ch.add_subparsers(dest="check", required=True, parser_class=_Parser)

    def check_parser(name, aliases=(), **kw):
        q = csub.add_parser(name, aliases=list(aliases), **kw)
        q.add_argument("-o", "--output")
        q.set_defaults(func=cmd_check)
        return q

    q = check_parser("lemma", help="decreasing quotient lemma, brute force")
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--weight", help="sigma = exp(rho) for this weight profile")
    g.add_argument("--square", action="store_true", help="sigma(n) = exp(n^2)")
    q.add_argument("-N", type=int, default=500)

    q = check_parser("decomposition", aliases=("thm32",), help="u profile and the pointwise bound")
    q.add_argument("--weight", required=True)
    q.add_argument("--dim", "-d", type=int, default=1)
    q.add_argument("--radius", type=int, default=200)

    q = check_parser("conditions", aliases=("thm33",), help="sufficient conditions for u in S^Psi")
    q.add_argument("--condition", choices=("i", "ii", "iii", "any"), default="any")
    q.add_argument("--weight", required=True)
    q.add_argument("--psi", required=True)
    q.add_argument("--dim", "-d", type=int, default=1)

    q = check_parser("growth", help="quadratic minorant regimes of a Young function")
    q.add_argument("--phi", required=True)

    q = check_parser("operator-algebra", help="embedding plus square-summable u")
    q.add_argument("--phi", required=True)
    q.add_argument("--weight", required=True)
    q.add_argument("--dim", "-d", type=int, default=1)

    q = check_parser("lp-threshold", help="weighted l^p thresholds")
    q.add_argument("--dim", "-d", type=int, required=True)
    q.add_argument("-p", type=float, required=True)
    q.add_argument("--beta", type=float, required=True)

    ce = sub.add_parser("counterexample", help="concave profile with a divergent u series")
    cesub = ce.add_subparsers(dest="ce_command", required=True, parser_class=_Parser)
    b = cesub.add_parser("build")
    b.add_argument("--n1", type=int, default=10)
    b.add_argument("--segments", "-K", type=int, default=3)
    b.add_argument("--cap", type=int, default=counterexample.DEFAULT_CAP)
    b.add_argument("-o", "--output")
    b.add_argument("--log", help="write the construction log here")
    b.set_defaults(func=cmd_counterexample_build)
    v = cesub.add_parser("verify")
    v.add_argument("input")
    v.add_argument("--horizon", type=int)
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_counterexample_verify)

    s = sub.add_parser("sweep", help="threshold table over a beta grid")
    s.add_argument("--operation", default="all", choices=sorted(SWEEP_OPS))
    s.add_argument("--beta-start", type=float, required=True)
    s.add_argument("--beta-stop", type=float, required=True)
    s.add_argument("--beta-step", type=float, default=0.1)
    s.add_argument("-p", type=float, default=2.0)
    s.add_argument("--dim", "-d", type=int, default=1)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        tol = default_tolerances()
        return args.func(args, tol, out, err)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (ParamError, DimensionError) as exc:
        err.write(f"usage error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE
    except InputError as exc:
        err.write(f"i/o error: {exc}\n")
        return EXIT_IO
    except TwistedOrliczError as exc:
        err.write(f"computation error: {type(exc).__name__}: {exc}\n")
        return EXIT_SOFTWARE


def run_command(argv) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
