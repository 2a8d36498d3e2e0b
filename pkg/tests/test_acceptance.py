"""The thirteen acceptance checks, one test each, at the stated tolerances.

Run ``pytest tests/test_acceptance.py`` (or this file directly); the
terminal summary prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import io
import math
import sys
import time

import numpy as np
import pytest
from scipy import optimize

from twisted_orlicz import cli, counterexample, criteria, lattice, orlicz, twist, young
from twisted_orlicz.orlicz import DiscreteFunction

from conftest import PHI_FORMULAS


def _omega_beta(beta):
    return lattice.make_weight("poly", beta=beta)


SIGMA = lattice.make_weight("subexp", alpha=0.5, C=1.0)
NU = lattice.make_weight("subexp2", gamma=1.0, C=1.0)


def test_criterion_01_norm_sandwich():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = math.inf
    for name in ("power:2", "power:3", "xlog", "exp", "entropy"):
        phi = young.from_spec(name)
        for d in (1, 2):
            for _ in range(200):
                f = orlicz.random_function(rng, d, 6, int(rng.integers(1, 9)), "complex")
                lux = orlicz.luxemburg_norm(phi, f)
                orl = orlicz.orlicz_norm(phi, f)
                worst = min(worst, (orl - lux) / lux, (2 * lux - orl) / lux)
    elapsed = time.perf_counter() - start
    assert worst >= -1e-6
    assert elapsed < 60.0


def test_criterion_02_power_exactness():
    rng = np.random.default_rng(2)
    for p in (1.5, 2.0, 3.0):
        phi = young.power(p)
        for _ in range(100):
            f = orlicz.random_function(rng, int(rng.integers(1, 3)), 8, int(rng.integers(1, 12)))
            expected = np.linalg.norm(f.abs_values(), ord=p) * p ** (-1.0 / p)
            assert orlicz.luxemburg_norm(phi, f) == pytest.approx(expected, rel=1e-9)


def test_criterion_03_conjugate_fidelity():
    ys = np.linspace(0.0, 10.0, 201)
    for p in (1.5, 2.0, 3.0):
        q = p / (p - 1.0)
        num = young.conjugate(young.power(p))
        assert np.max(np.abs(num(ys) - ys**q / q)) <= 1e-6
    grid = np.linspace(0.0, 5.0, 51)
    for name in young.BUILTIN_NAMES:
        assert young.biconjugate_residual(young.from_spec(name), grid) < 1e-5, name
    # e^x - x - 1 and (1+y)ln(1+y) - y are mutually conjugate
    exp_star = young.conjugate(young.exp_young())
    ent_star = young.conjugate(young.entropy())
    assert np.max(np.abs(exp_star(ys) - PHI_FORMULAS["entropy"](ys))) <= 1e-6
    assert np.max(np.abs(ent_star(ys) - PHI_FORMULAS["exp"](ys))) <= 1e-6


def test_criterion_04_cocycle_identity():
    rng = np.random.default_rng(4)
    cob_beta = lattice.coboundary(_omega_beta(1.5))
    cob_sigma = lattice.coboundary(SIGMA)
    heis = lattice.heisenberg_cocycle(0.37)
    cases = [cob_beta, cob_sigma, heis, cob_beta * heis, cob_sigma * heis, cob_beta * cob_sigma * heis]
    r, s, t = (lattice.random_points(rng, 2, 50, 1000) for _ in range(3))
    for c in cases:
        assert lattice.identity_residual(c, r, s, t) < 1e-12
        assert lattice.normalization_residual(c, s) < 1e-12
    for c in (cob_beta, cob_sigma):
        r1, s1, t1 = (lattice.random_points(rng, 1, 50, 1000) for _ in range(3))
        assert lattice.identity_residual(c, r1, s1, t1) < 1e-12


def test_criterion_05_associativity():
    rng = np.random.default_rng(5)
    cocycles = [lattice.TrivialCocycle(), lattice.coboundary(_omega_beta(1.0)), lattice.coboundary(SIGMA),
                lattice.heisenberg_cocycle(0.37), lattice.coboundary(SIGMA) * lattice.heisenberg_cocycle(0.2)]
    for c in cocycles:
        for _ in range(100):
            f, g, h = (orlicz.random_function(rng, 2, 5, int(rng.integers(1, 7))) for _ in range(3))
            assert twist.associativity_residual(c, f, g, h) < 1e-10
        f = orlicz.random_function(rng, 2, 5, 6)
        delta = DiscreteFunction.delta((0, 0))
        for left in (twist.twisted_convolve(c, delta, f).result, twist.twisted_convolve(c, f, delta).result):
            assert twist.sup_distance(left, f) <= 1e-14


def test_criterion_06_decomposition_bound():
    weights = [_omega_beta(0.5), _omega_beta(1.0), _omega_beta(2.0),
               lattice.make_weight("subexp", alpha=0.5, C=1.0), lattice.make_weight("subexp", alpha=0.75, C=2.0),
               lattice.make_weight("subexp2", gamma=1.0, C=1.0)]
    for w in weights:
        for d in (1, 2):
            rep = criteria.decomposition_profile(w, radius=200, d=d, tol=1e-12)
            assert rep.verdict == criteria.HOLDS, (w.name, d, rep.evidence["bound_check"])


def test_criterion_07_lemma():
    concave = [_omega_beta(0.5), _omega_beta(1.0), _omega_beta(2.0), lattice.make_weight("subexp", alpha=0.5, C=1.0),
               lattice.make_weight("subexp", alpha=0.75, C=2.0), lattice.make_weight("subexp2", gamma=1.0, C=1.0),
               lattice.make_weight("linear", C=1.0), lattice.make_weight("trivial")]
    for w in concave:
        assert criteria.lemma_decreasing_quotient(log_sigma=w.rho, N=500).verdict == criteria.HOLDS, w.name
    rep = criteria.lemma_decreasing_quotient(log_sigma=lambda n: n * n, N=500)
    assert rep.verdict == criteria.FAILS
    assert rep.evidence["quotients_decreasing"] is False


def test_criterion_08_threshold_reproduction():
    for d in (1, 2):
        for two_beta, expected in ((d - 0.5, "Diverges"), (d, "Diverges"), (d + 0.5, "Converges")):
            w = _omega_beta(two_beta / 2)
            series = orlicz.radial_series(d, log_value=lambda n, w=w: -2.0 * w.rho(n))
            assert orlicz.summability(series).verdict == expected, (d, two_beta)


def test_criterion_09_operator_algebra_certificate():
    phi = young.power(2)
    assert criteria.operator_algebra_certificate(phi, _omega_beta(0.75), 1).verdict == criteria.HOLDS
    assert criteria.operator_algebra_certificate(phi, _omega_beta(0.25), 1).verdict == criteria.FAILS
    assert criteria.operator_algebra_certificate(phi, SIGMA, 1).verdict == criteria.HOLDS
    assert criteria.operator_algebra_certificate(phi, NU, 1).verdict == criteria.HOLDS
    grid = [round(0.05 * k, 2) for k in range(1, 9)] + [round(0.6 + 0.05 * k, 2) for k in range(12)]
    assert len(grid) == 20 and not any(0.45 <= b <= 0.55 for b in grid)
    for beta in grid:
        granted = criteria.operator_algebra_certificate(phi, _omega_beta(beta), 1).verdict == criteria.HOLDS
        assert granted == criteria.lp_threshold(1, 2.0, beta)["operator_algebra_claimed"], beta


def test_criterion_10_second_derivative_condition():
    for beta in (0.3, 0.8, 1.7, 3.0):
        w = _omega_beta(beta)
        rep = criteria.condition_second_derivative(w, young.power(2), 1)
        lim = rep.evidence["limit"]
        assert lim["kind"] == "finite" and lim["points"] == [1e2, 1e3, 1e4]
        assert rep.derived["L"] == pytest.approx(-beta, rel=0.01)
        assert lim["spread"] <= 0.01 * beta
    for p in (1.5, 2.0, 3.0):
        q = p / (p - 1.0)
        psi = young.power(q)
        assert young.l_exponent(psi).value == pytest.approx(q, abs=0.01)
        for d in (1, 2):
            for beta in np.arange(0.1, 3.01, 0.1):
                if abs(beta - d / q) <= 0.05:
                    continue
                rep = criteria.condition_second_derivative(_omega_beta(beta), psi, d)
                assert rep.verdict == (criteria.HOLDS if beta > d / q else criteria.FAILS), (p, d, beta)


def test_criterion_11_counterexample_end_to_end():
    start = time.perf_counter()
    rho, _ = counterexample.build_rho(10, 5)
    rep = counterexample.verify_counterexample(rho)
    a = rho.anchors
    assert len(a) == 5 and all(a[k + 1] > 2 * a[k] for k in range(4))
    assert all(abs(w["n_times_a_n"] - 1) <= 1e-9 for w in rep["v"]["anchors"])
    assert all(abs(w["identity_residual"]) <= 1e-9 for w in rep["v"]["anchors"])
    assert rep["ii"]["max_second_difference"] <= 1e-12
    assert rep["iv"]["min_gap_over_log"] >= -1e-12
    with pytest.raises(counterexample.VerificationError):
        counterexample.verify_counterexample(rho.with_slope(2, 1e-3))
    assert time.perf_counter() - start < 30.0


def test_criterion_12_intertwining_identity():
    rng = np.random.default_rng(12)
    for w in (_omega_beta(1.0), SIGMA):
        for _ in range(100):
            f, g = (orlicz.random_function(rng, 1, 20, int(rng.integers(1, 10))) for _ in range(2))
            assert twist.multiplier_residual(w, f, g) <= 1e-12, w.name


DETERMINISM_COMMANDS = [
    ["random-function", "--dim", "2", "--radius", "6", "--size", "9", "--seed", "3"],
    ["probe", "--phi", "xlog", "--cocycle", "coboundary:subexp:0.5:1*heisenberg:0.3", "-d", "2",
     "--trials", "8", "--seed", "11"],
    ["check", "operator-algebra", "--phi", "power:2", "--weight", "poly:0.75"],
    ["check", "thm33", "--weight", "poly:2", "--psi", "power:2"],
    ["check", "thm32", "--weight", "subexp:0.5:1", "--radius", "60", "-d", "2"],
    ["check", "lemma", "--weight", "subexp2:1:1"],
    ["check", "growth", "--phi", "entropy"],
    ["check", "lp-threshold", "-d", "1", "-p", "4", "--beta", "0.8"],
    ["young", "show", "xlog"],
    ["sweep", "--beta-start", "0.4", "--beta-stop", "1.2", "--beta-step", "0.1"],
    ["counterexample", "build", "--n1", "10", "-K", "3"],
]


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_criterion_13_determinism(tmp_path):
    for argv in DETERMINISM_COMMANDS:
        first, second = _run(argv), _run(argv)
        assert first == second, argv
        assert first[0] in (0, 1, 2), (argv, first[2])
    rho_path = tmp_path / "rho.json"
    _run(["counterexample", "build", "--n1", "10", "-K", "3", "-o", str(rho_path)])
    assert _run(["counterexample", "verify", str(rho_path)]) == _run(["counterexample", "verify", str(rho_path)])
    for seed in (0, 1):
        f_path = tmp_path / f"f{seed}.json"
        _run(["random-function", "--seed", str(seed), "-o", str(f_path)])
        conv = ["conv", "--cocycle", "coboundary:poly:1", "--f", str(tmp_path / "f0.json"), "--g", str(f_path)]
        norm = ["norm", "--phi", "exp", "--input", str(f_path), "--kind", "orlicz"]
        assert _run(conv) == _run(conv)
        assert _run(norm) == _run(norm)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
