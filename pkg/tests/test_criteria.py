import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twisted_orlicz import criteria, lattice, young
from twisted_orlicz.errors import ConcavityError, DifferentiabilityError, ParamError

from conftest import RHO_FORMULAS


def test_combine():
    H, F, I = criteria.HOLDS, criteria.FAILS, criteria.INCONCLUSIVE
    assert criteria.combine([H, H]) == H
    assert criteria.combine([H, I]) == I
    assert criteria.combine([I, F]) == F
    assert criteria.EXIT_CODES == {H: 0, F: 1, I: 2}


def test_lemma_on_plain_sigma_and_log_sigma_agree():
    sigma = lambda n: (1 + n) ** 1.5
    a = criteria.lemma_decreasing_quotient(sigma, N=100)
    b = criteria.lemma_decreasing_quotient(log_sigma=lambda n: 1.5 * np.log1p(n), N=100)
    assert a.verdict == b.verdict == criteria.HOLDS
    assert a.evidence["min_relative_slack"] == pytest.approx(b.evidence["min_relative_slack"], abs=1e-12)
    with pytest.raises(ParamError):
        criteria.lemma_decreasing_quotient(sigma, log_sigma=sigma)
    with pytest.raises(ParamError):
        criteria.lemma_decreasing_quotient(lambda n: n - 1.0, N=5)


def test_lemma_slack_by_hand():
    # σ = 2^n: every ratio is 1/1, bound 1 + 1 = 2, so slack is exactly 1/2
    rep = criteria.lemma_decreasing_quotient(log_sigma=lambda n: n * math.log(2), N=30)
    assert rep.verdict == criteria.HOLDS
    assert rep.evidence["min_relative_slack"] == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(beta=st.floats(0.05, 4.0), alpha=st.floats(0.05, 0.95))
def test_lemma_holds_for_concave_families(beta, alpha):
    for ls in (lambda n: beta * np.log1p(n), lambda n: n**alpha):
        assert criteria.lemma_decreasing_quotient(log_sigma=ls, N=60).verdict == criteria.HOLDS


def test_u_profile_matches_hand_formulas():
    ns = np.arange(0.0, 50.0)
    beta = 1.3
    poly = criteria.u_profile(lattice.make_weight("poly", beta=beta))
    np.testing.assert_allclose(poly(ns), (1 + 2 * ns) ** beta / (1 + ns) ** (2 * beta), rtol=1e-13)
    alpha, C = 0.5, 2.0
    sub = criteria.u_profile(lattice.make_weight("subexp", alpha=alpha, C=C))
    np.testing.assert_allclose(sub(ns), np.exp(C * (2**alpha - 2) * ns**alpha), rtol=1e-12)
    rho = RHO_FORMULAS["subexp2"](1.0, 1.0)
    sub2 = criteria.u_profile(lattice.make_weight("subexp2", gamma=1.0, C=1.0))
    np.testing.assert_allclose(sub2(ns), np.exp(rho(2 * ns) - 2 * rho(ns)), rtol=1e-12)


def test_granted_profile_has_no_violation_on_explicit_pairs():
    w = lattice.make_weight("subexp", alpha=0.5, C=1.0)
    rep = criteria.decomposition_profile(w, radius=30, d=2)
    assert rep.verdict == criteria.HOLDS
    u = rep.objects["u"]
    pts = lattice.ball_points(2, 12)
    tau = lattice.lengths(pts).astype(float)
    rho = RHO_FORMULAS["subexp"](0.5, 1.0)
    for i in range(0, len(pts), 7):
        k = lattice.lengths(pts[i] + pts).astype(float)
        ratio = np.exp(rho(k) - rho(tau[i]) - rho(tau))
        assert np.all(ratio <= u(tau[i]) + u(tau) + 1e-12)


def test_concavity_errors():
    convex = lattice.make_weight("custom", rho=lambda x: np.asarray(x, float) ** 2, name="square")
    with pytest.raises(ConcavityError):
        criteria.check_concave(convex, 20)
    with pytest.raises(ConcavityError):
        criteria.decomposition_profile(convex, radius=5)
    assert criteria.operator_algebra_certificate(young.power(2), convex, 1).verdict == criteria.FAILS


def test_missing_derivative():
    custom = lattice.make_weight("custom", rho=lambda x: np.sqrt(np.asarray(x, float)), name="root")
    with pytest.raises(DifferentiabilityError):
        criteria.condition_first_derivative(custom, young.power(2), 1)


@pytest.mark.parametrize("beta,d,expected", [(2.0, 1, criteria.HOLDS), (0.3, 1, criteria.FAILS),
                                             (2.0, 2, criteria.HOLDS), (0.8, 2, criteria.FAILS)])
def test_second_derivative_condition(beta, d, expected):
    rep = criteria.condition_second_derivative(lattice.make_weight("poly", beta=beta), young.power(2), d)
    assert rep.verdict == expected
    assert rep.evidence["threshold"] == pytest.approx(-d / 2, abs=0.01)


def test_second_derivative_condition_at_the_threshold_is_inconclusive():
    rep = criteria.condition_second_derivative(lattice.make_weight("poly", beta=0.5), young.power(2), 1)
    assert rep.verdict == criteria.INCONCLUSIVE


def test_unstable_limit_is_inconclusive():
    wobble = lattice.make_weight("custom", rho=lambda x: np.log1p(np.asarray(x, float)) * (1.5 + 0.4 * np.sin(
        np.log1p(np.asarray(x, float)))), name="wobble")
    rep = criteria.condition_second_derivative(wobble, young.power(2), 1)
    assert rep.verdict == criteria.INCONCLUSIVE


def test_bounded_product_and_first_derivative_conditions():
    psi = young.power(2)
    poly2 = lattice.make_weight("poly", beta=2.0)
    assert criteria.condition_bounded_product(poly2, psi, 1).verdict == criteria.HOLDS
    assert criteria.condition_bounded_product(lattice.make_weight("poly", beta=0.2), psi, 1).verdict == criteria.FAILS
    # subexponential weights make u·ω unbounded
    assert criteria.condition_bounded_product(lattice.make_weight("subexp", alpha=0.5, C=1.0), psi,
                                              1).verdict == criteria.FAILS
    assert criteria.condition_first_derivative(lattice.make_weight("subexp", alpha=0.5, C=1.0), psi,
                                               1).verdict == criteria.HOLDS
    assert criteria.u_membership(poly2, psi, 1).verdict == criteria.HOLDS
    assert criteria.u_membership(lattice.make_weight("poly", beta=0.2), psi, 1).verdict == criteria.FAILS


def test_operator_algebra_certificate_cases():
    phi = young.power(2)
    rep = criteria.operator_algebra_certificate(phi, lattice.make_weight("poly", beta=1.5), 2)
    assert rep.verdict == criteria.HOLDS
    assert rep.derived["corollary_weight_case"]["case"] == "polynomial"
    assert criteria.operator_algebra_certificate(phi, lattice.make_weight("poly", beta=0.8), 2).verdict == \
        criteria.FAILS
    # Φ = x³/3 has no quadratic minorant at the origin
    assert criteria.operator_algebra_certificate(young.power(3), lattice.make_weight("poly", beta=1.5),
                                                 1).verdict == criteria.FAILS


def test_intersection_young_function():
    tilde = criteria.intersection_young(young.xlog())
    xs = np.linspace(0, 5, 21)
    np.testing.assert_allclose(tilde(xs), xs**2 + xs * np.log1p(xs), rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("d,p,beta,banach,operator", [
    (1, 2.0, 0.6, True, True), (1, 2.0, 0.4, False, False), (1, 4.0, 0.8, True, False),
    (2, 1.5, 1.2, True, True), (2, 1.5, 0.6, False, False), (1, 3.0, 0.6, False, False), (1, 3.0, 0.8, True, False),
])
def test_lp_threshold(d, p, beta, banach, operator):
    out = criteria.lp_threshold(d, p, beta)
    assert (out["banach_algebra"], out["operator_algebra_claimed"]) == (banach, operator)
    rep = criteria.lp_threshold_report(d, p, beta)
    assert rep.holds == (banach and operator)
    assert rep.statement == f"banach: {str(banach).lower()}, operator: {str(operator).lower()}"


@pytest.mark.parametrize("args", [(1, 1.0, 0.5), (1, math.inf, 0.5), (1, 2.0, 0.0), (0, 2.0, 0.5)])
def test_lp_threshold_errors(args):
    with pytest.raises(ParamError):
        criteria.lp_threshold(*args)


def test_growth_report():
    assert criteria.growth_report(young.power(2)).verdict == criteria.HOLDS
    assert criteria.growth_report(young.power(3)).verdict == criteria.FAILS
    assert "discrete" in criteria.growth_report(young.entropy()).statement
