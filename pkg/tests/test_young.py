import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from twisted_orlicz import young
from twisted_orlicz.errors import NonMonotoneInput, NoStableSlope, ParamError

from conftest import PHI_FORMULAS


def scipy_conjugate(phi_formula, y, x_hi=60.0):
    """sup_x (xy - Φ(x)) by bounded scalar minimisation."""
    res = optimize.minimize_scalar(lambda x: -(x * y - phi_formula(x)), bounds=(0.0, x_hi), method="bounded",
                                   options={"xatol": 1e-12})
    return -res.fun


@pytest.mark.parametrize("name", sorted(PHI_FORMULAS))
def test_catalog_matches_formulas(name):
    xs = np.linspace(0.0, 5.0, 101)
    np.testing.assert_allclose(young.from_spec(name)(xs), PHI_FORMULAS[name](xs), rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("name", ["power:2", "power:1.5", "xlog", "xlog:2", "exp", "entropy", "cosh", "cosh*",
                                  "square_compose:exp", "sum:2*power:2+xlog"])
def test_spec_names_round_trip(name):
    phi = young.from_spec(name)
    assert young.from_spec(phi.name).name == phi.name
    phi.check()


@pytest.mark.parametrize("bad", ["power:1", "power:x", "nope", "xlog:0.5", "sum:", "sum:-1*exp"])
def test_bad_specs(bad):
    with pytest.raises(ParamError):
        young.from_spec(bad)


def test_check_rejects_concave_function():
    root = young.YoungFunction("sqrt", np.sqrt, lambda x: 0.5 / np.sqrt(np.maximum(x, 1e-300)))
    with pytest.raises(NonMonotoneInput):
        root.check()


@pytest.mark.parametrize("name", ["xlog", "cosh", "power:3"])
def test_numeric_conjugate_against_scipy(name):
    phi = young.from_spec(name)
    psi = young.conjugate(phi)
    for y in (0.1, 0.7, 2.0, 5.0):
        assert float(psi(y)) == pytest.approx(scipy_conjugate(lambda x: float(phi(x)), y), rel=1e-8, abs=1e-10)


def test_cosh_conjugate_closed_form():
    ys = np.linspace(0.0, 20.0, 81)
    np.testing.assert_allclose(young.conjugate(young.cosh_young())(ys), young.cosh_conjugate()(ys), atol=1e-9)
    oracle = ys * np.arcsinh(ys) - np.sqrt(1 + ys**2) + 1
    np.testing.assert_allclose(young.cosh_conjugate()(ys), oracle, atol=1e-12)


def test_grid_sup_conjugate_agrees():
    phi = young.xlog()
    psi = young.conjugate(phi)
    for y in (0.3, 1.0, 3.0):
        assert young.grid_sup_conjugate(phi, y) == pytest.approx(float(psi(y)), rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(0, 20), y=st.floats(0, 20), name=st.sampled_from(["power:2", "power:3", "exp", "entropy",
                                                                      "cosh", "xlog"]))
def test_young_inequality(x, y, name):
    pair = young.complementary_pair(young.from_spec(name))
    slack = float(pair.young_slack([x], [y])[0, 0])
    assert slack >= -1e-9 * max(1.0, x * y)


def test_young_equality_on_the_graph():
    xs = np.linspace(0.0, 4.0, 41)
    for name in ("power:2", "exp", "entropy", "xlog"):
        pair = young.complementary_pair(young.from_spec(name))
        assert np.max(pair.equality_residual(xs) / (1 + xs * pair.phi.phi(xs))) < 1e-9, name


def test_pair_from_derivative():
    pair = young.make_pair_from_phi(lambda x: np.asarray(x, float), name="half-square")
    xs = np.array([0.0, 0.5, 1.0, 3.0])
    np.testing.assert_allclose(pair.phi(xs), xs**2 / 2, atol=1e-10)
    np.testing.assert_allclose(pair.psi(xs), xs**2 / 2, atol=1e-10)
    with pytest.raises(NonMonotoneInput):
        young.make_pair_from_phi(lambda x: np.sin(np.asarray(x, float)))


def test_square_compose_witnesses():
    for inner in ("power:2", "exp", "xlog"):
        pair = young.square_compose(young.from_spec(inner))
        assert pair.witnesses["compact"]["holds_on_grid"]
        assert pair.witnesses["discrete_conjugate"]["holds_on_grid"]


@pytest.mark.parametrize("name,compact,discrete", [
    ("power:2", True, True),
    ("power:3", True, False),
    ("power:1.5", False, True),
    ("exp", True, True),
    ("entropy", False, True),
    ("cosh", True, True),
])
def test_growth_classes(name, compact, discrete):
    gc = young.growth_class(young.from_spec(name))
    assert (gc.satisfies_compact, gc.satisfies_discrete) == (compact, discrete)
    assert gc.satisfies_noncompact == (compact and discrete)
    if discrete:
        xs = np.logspace(-4, 0, 50)
        K = gc.K_estimates["discrete"]["K"]
        assert np.all(K * xs**2 <= young.from_spec(name)(xs) * (1 + 1e-12))


@pytest.mark.parametrize("q", [1.25, 1.5, 2.0, 3.0, 4.0])
def test_small_argument_exponent_of_powers(q):
    est = young.l_exponent(young.power(q))
    assert est.value == pytest.approx(q, abs=0.01)
    assert est.ci95[0] <= q + 1e-9 and q - 1e-9 <= est.ci95[1]


def test_small_argument_exponent_of_entropy_and_exp():
    assert young.l_exponent(young.entropy()).value == pytest.approx(2.0, abs=0.01)
    assert young.l_exponent(young.exp_young()).value == pytest.approx(2.0, abs=0.01)


def test_small_argument_exponent_unstable():
    wobbly = young.YoungFunction("wobbly", lambda x: x**2 * (2 + np.sin(np.log(x))), lambda x: x)
    with pytest.raises(NoStableSlope):
        young.l_exponent(wobbly)
