import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from twisted_orlicz import lattice, orlicz, young
from twisted_orlicz.errors import DimensionError, ParamError
from twisted_orlicz.orlicz import DiscreteFunction, RadialTerm

from conftest import PHI_FORMULAS

points_1d = st.tuples(st.integers(-30, 30))
values = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)
functions_1d = st.dictionaries(points_1d, values, max_size=8).map(lambda m: DiscreteFunction.from_mapping(1, m))


def brent_luxemburg(phi_formula, a):
    """k with Σ Φ(|f|/k) = 1, by brentq on a bracket grown from the data."""
    a = np.asarray(a, dtype=float)
    def g(k):
        with np.errstate(over="ignore"):  # inf just means k is far too small
            return float(np.sum(phi_formula(a / k))) - 1.0

    lo, hi = 1e-3 * a.max(), 1e3 * a.sum() + 1.0
    while g(lo) <= 0:
        lo /= 10
    return optimize.brentq(g, lo, hi, xtol=1e-15, rtol=1e-14)


def amemiya_oracle(phi_formula, a):
    """inf_k (1 + Σ Φ(k|f|)) / k by bounded minimisation over log k."""
    a = np.asarray(a, dtype=float)
    obj = lambda t: (1.0 + float(np.sum(phi_formula(math.exp(t) * a)))) / math.exp(t)
    res = optimize.minimize_scalar(obj, bounds=(-20.0, 10.0), method="bounded", options={"xatol": 1e-12})
    return res.fun


def test_discrete_function_basics():
    f = DiscreteFunction.from_mapping(2, [((1, 0), 2.0), ((0, 0), 0.0), ((1, 0), 1.0)])
    assert len(f) == 1 and f.as_dict() == {(1, 0): 3.0}
    with pytest.raises(DimensionError):
        DiscreteFunction(2, (((1,), 1.0),))
    with pytest.raises(DimensionError):
        DiscreteFunction.zero(0)
    assert (f - f) == DiscreteFunction.zero(2)
    assert (f + f) == f.scale(2)


@settings(max_examples=100, deadline=None)
@given(f=functions_1d)
def test_json_round_trip(f):
    assert DiscreteFunction.loads(f.dumps()) == f


@pytest.mark.parametrize("name", sorted(PHI_FORMULAS))
def test_luxemburg_against_brentq(name, rng):
    phi = young.from_spec(name)
    for _ in range(20):
        f = orlicz.random_function(rng, 2, 5, int(rng.integers(1, 8)))
        expected = brent_luxemburg(PHI_FORMULAS[name], f.abs_values())
        assert orlicz.luxemburg_norm(phi, f) == pytest.approx(expected, rel=1e-12)
        assert orlicz.modular(phi, f.scale(1 / expected)) == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("name", sorted(PHI_FORMULAS))
def test_orlicz_norm_against_amemiya_oracle(name, rng):
    phi = young.from_spec(name)
    for _ in range(10):
        f = orlicz.random_function(rng, 1, 5, int(rng.integers(1, 6)), "positive")
        assert orlicz.orlicz_norm(phi, f) == pytest.approx(amemiya_oracle(PHI_FORMULAS[name], f.abs_values()),
                                                           rel=1e-8)


@pytest.mark.parametrize("name", ["power:2", "power:3", "exp", "entropy"])
def test_orlicz_norm_against_dual_supremum(name, rng):
    phi = young.from_spec(name)
    psi = phi.conjugate_function()
    for _ in range(5):
        f = orlicz.random_function(rng, 1, 3, int(rng.integers(1, 4)), "positive")
        assert orlicz.orlicz_norm_by_duality(psi, f) == pytest.approx(orlicz.orlicz_norm(phi, f), rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(f=functions_1d, g=functions_1d, c=st.floats(1e-3, 1e3), name=st.sampled_from(["power:2", "xlog", "exp"]))
def test_norm_axioms(f, g, c, name):
    phi = young.from_spec(name)
    for norm in (orlicz.luxemburg_norm, orlicz.orlicz_norm):
        nf, ng = norm(phi, f), norm(phi, g)
        assert norm(phi, f.scale(c)) == pytest.approx(c * nf, rel=1e-8, abs=1e-300)
        assert norm(phi, f + g) <= (nf + ng) * (1 + 1e-8) + 1e-300
    assert orlicz.luxemburg_norm(phi, DiscreteFunction.zero(1)) == 0.0


def test_weighted_norm_of_a_point_mass():
    f = DiscreteFunction.delta((3,))
    w = lattice.make_weight("poly", beta=1.0)
    # f·ω = 4 at one point; Σ (4/k)²/2 = 1 gives k = 4/√2
    assert orlicz.weighted_norm(young.power(2), f, w) == pytest.approx(2 * math.sqrt(2), rel=1e-14)
    assert orlicz.weighted_norm(young.power(2), f, w, "orlicz") == pytest.approx(4 * math.sqrt(2), rel=1e-9)
    with pytest.raises(ParamError):
        orlicz.weighted_norm(young.power(2), f, w, "nope")


# --- radial series ------------------------------------------------------------


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_zeta_series_bracketed(p):
    v = orlicz.summability(RadialTerm.from_terms(lambda n: (1 + n) ** -p))
    assert v.verdict == "Converges"
    exact = float(mpmath.zeta(p))
    assert v.partial_sum <= exact <= v.partial_sum + v.tail_bound


def test_geometric_series_tail_is_tight():
    v = orlicz.summability(RadialTerm(lambda n: -n * math.log(2.0)))
    assert v.verdict == "Converges"
    assert v.partial_sum <= 2.0 <= v.partial_sum + v.tail_bound + 1e-15


def test_log_space_tail_survives_underflow():
    v = orlicz.summability(RadialTerm(lambda n: -np.asarray(n, float) ** 2))
    assert v.verdict == "Converges"
    assert v.partial_sum == pytest.approx(float(mpmath.nsum(lambda n: mpmath.exp(-n * n), [0, mpmath.inf])))


@pytest.mark.parametrize("term", [lambda n: 1 / (1 + n), lambda n: np.ones_like(n), lambda n: 1 / ((2 + n) * np.log(2 + n))])
def test_divergent_series(term):
    assert orlicz.summability(RadialTerm.from_terms(term)).verdict == "Diverges"


def test_borderline_is_not_called_convergent():
    # Σ 1/(n (ln n)^1.01) converges far too slowly to certify
    v = orlicz.summability(RadialTerm.from_terms(lambda n: 1 / ((2 + n) * np.log(2 + n) ** 1.01)))
    assert v.verdict != "Converges"


def test_radial_series_sphere_factor():
    rt = orlicz.radial_series(2, lambda n: np.ones_like(n))
    np.testing.assert_allclose(rt.term(np.arange(5.0)), [1, 8, 16, 24, 32])


def test_membership_examples():
    psi = young.power(2)
    assert orlicz.s_psi_membership(psi, 1, lambda n: 1 / (1 + n)).verdict == "Converges"
    assert orlicz.s_psi_membership(psi, 1, lambda n: (1 + n) ** -0.5).verdict == "Diverges"
    assert orlicz.s_psi_membership(psi, 2, log_value=lambda n: -1.5 * np.log1p(n)).verdict == "Converges"
    assert orlicz.s_psi_membership(young.exp_young(), 1, log_value=lambda n: -np.sqrt(n)).verdict == "Converges"


def test_radial_luxemburg_bound_is_an_upper_bound():
    psi = young.power(2)
    bound = orlicz.radial_luxemburg_bound(psi, 1, lambda n: -np.log1p(n))
    # exact: Σ_n sphere(1,n) (1+n)^-2 / (2k²) = 1 with Σ = 2ζ(2) - 1
    exact = math.sqrt((2 * float(mpmath.zeta(2)) - 1) / 2)
    assert exact <= bound <= exact * (1 + 1e-5)
