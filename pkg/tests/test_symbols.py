import decimal

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boussinesq.symbols import (BBM, GENERIC, KDV, AbcdParams, PhysicalDerivation, Regime,
                                RegimeError, SymbolDomainError, classify, eval_dispersion,
                                eval_h, eval_omega, eval_sigma, eval_varsigma,
                                params_from_physical, physical_identities, sigma_expansion)

SYM = AbcdParams(-1, 1, -1, 1)


def test_regime_tags():
    assert GENERIC.regime is Regime.GENERIC
    assert KDV.regime is Regime.KDV_KDV
    assert BBM.regime is Regime.BBM_BBM
    assert classify(0.5, 0.2, 0.5, 0.2) is Regime.GENERIC_AB
    assert classify(0, -1 / 6, 0, 1 / 2) is Regime.UNCLASSIFIED


def test_regime_violation_raises():
    with pytest.raises(RegimeError):
        AbcdParams(1, 1, -1, 1, Regime.GENERIC)
    with pytest.raises(RegimeError):
        AbcdParams(1, 0, 1, 1e-6, Regime.KDV_KDV)


def test_unclassified_refuses_evaluation():
    p = AbcdParams(0, -1 / 6, 0, 1 / 2)
    with pytest.raises(RegimeError):
        eval_omega(1.0, p)


@pytest.mark.parametrize("p", [GENERIC, KDV, BBM, SYM])
def test_omega_at_zero(p):
    assert eval_omega(0.0, p) == (1.0, 1.0)


def test_omega_examples():
    w1, w2 = eval_omega(2.0, SYM)
    assert w1 == w2 == 1.0
    assert eval_omega(1.0, BBM)[0] == pytest.approx(6 / 7, abs=1e-15)


def test_h_examples():
    p = AbcdParams(-1, 1, -2, 1)
    assert eval_h(1.0, p) == pytest.approx(np.sqrt(2 / 3), abs=1e-15)
    assert eval_h(0.0, GENERIC) == 1.0
    xs = np.linspace(-50, 50, 101)
    np.testing.assert_array_equal(eval_h(xs, AbcdParams(-0.3, 0.4, -0.3, 0.4)), 1.0)


def test_h_domain_error():
    # no valid parameter set reaches the error, so a tagged set is altered in place:
    # omega_1 = (1 - xi^2)/(1 + xi^2) changes sign while omega_2 = 1
    p = AbcdParams(-1, 1, -1, 1)
    object.__setattr__(p, "a", 1.0)
    with pytest.raises(SymbolDomainError, match="xi="):
        eval_h(np.array([0.5, 2.0]), p)


def test_sigma_examples():
    assert eval_sigma(0.0, GENERIC) == 1.0
    np.testing.assert_allclose(eval_sigma(np.linspace(0, 30, 31), SYM), 1.0, atol=0)
    xs = np.linspace(-5, 5, 41)
    # the principal root is |1 - xi^2| while the signed dispersion keeps 1 - xi^2
    np.testing.assert_allclose(eval_sigma(xs, KDV), np.abs(1 - xs**2), atol=1e-14)
    np.testing.assert_allclose(eval_dispersion(xs, KDV), 1 - xs**2, atol=1e-14)


def test_dispersion_examples():
    assert eval_dispersion(np.sqrt(6), BBM, 2) == pytest.approx(0.5, abs=1e-15)
    assert eval_dispersion(1.0, KDV, 2) == 0.0
    np.testing.assert_array_equal(eval_dispersion(np.linspace(0, 9, 10), SYM, 2), 1.0)
    with pytest.raises(ValueError):
        eval_dispersion(1.0, GENERIC, 3)


def test_varsigma_examples():
    assert eval_varsigma(0.0, GENERIC) == 1.0
    assert eval_varsigma(1.0, AbcdParams(-1, 1, -2, 2)) == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_array_equal(eval_varsigma(np.linspace(0, 9, 10), BBM), 1.0)


finite = st.floats(-100, 100, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(finite)
def test_symbols_even(xi):
    for p in (GENERIC, KDV, BBM, SYM):
        assert eval_omega(xi, p) == eval_omega(-xi, p)
        assert eval_dispersion(xi, p) == eval_dispersion(-xi, p)
    assert eval_h(xi, GENERIC) == eval_h(-xi, GENERIC)


@settings(max_examples=200, deadline=None)
@given(finite)
def test_pointwise_identities(xi):
    w1, w2 = eval_omega(xi, GENERIC)
    sigma, h = eval_sigma(xi, GENERIC), eval_h(xi, GENERIC)
    assert sigma**2 == pytest.approx(w1 * w2, rel=1e-12)
    assert h**2 == pytest.approx(w1 / w2, rel=1e-12)
    assert w1 / sigma == pytest.approx(h, rel=1e-12)
    assert w2 / sigma == pytest.approx(1 / h, rel=1e-12)


def test_expansion_trivial_cases():
    e = sigma_expansion(SYM)
    assert (e.leading, e.alpha, e.beta) == (1.0, 0.0, 0.0)
    np.testing.assert_allclose(e.tilde(np.array([1.0, 10.0, 1e3])), 0.0, atol=1e-15)
    e = sigma_expansion(AbcdParams(-1, 1, -2, 2))
    assert (e.leading, e.alpha, e.beta) == (1.0, 0.0, 0.0)


def test_expansion_needs_generic():
    with pytest.raises(RegimeError):
        sigma_expansion(BBM)


def test_tilde_decays_like_inverse_square():
    e = sigma_expansion(AbcdParams(-1, 2, -1, 1))
    xs = np.array([1e2, 1e3, 1e4])
    scaled = np.abs(e.tilde(xs)) * xs**2
    assert np.all(np.abs(scaled / scaled[-1] - 1) < 0.05)


def _sigma_decimal(xi, p, digits=60):
    """sigma at high precision, independent of the float implementation."""
    decimal.getcontext().prec = digits
    D = decimal.Decimal
    x2 = D(xi) ** 2
    a, b, c, d = (D(v) for v in (p.a, p.b, p.c, p.d))
    return ((1 - a * x2) * (1 - c * x2) / ((1 + b * x2) * (1 + d * x2))).sqrt()


def test_first_order_term_residual_is_fourth_order():
    p = AbcdParams(-1, 2, -1, 1)
    e = sigma_expansion(p)
    scaled = []
    for xi in (1e3, 1e4, 1e5):
        # leading and first-order term in the same high precision
        decimal.getcontext().prec = 60
        D = decimal.Decimal
        a, b, c, d = (D(v) for v in (p.a, p.b, p.c, p.d))
        lead = (a * c / (b * d)).sqrt()
        al = -(b + d) - b * d * (a + c) / (a * c)
        be = b * d / (a * c) - 1
        x2 = D(xi) ** 2
        first = lead * (al * x2 + be) / (2 * (1 + b * x2) * (1 + d * x2))
        resid = _sigma_decimal(xi, p) - lead - first
        scaled.append(abs(float(resid)) * xi**4)
        # float closed form agrees with the high-precision one
        assert float(e.first_order(xi)) == pytest.approx(float(first), rel=1e-9)
    assert max(scaled) < 10 * min(scaled)
    assert np.isfinite(max(scaled))


def test_expansion_constants_match_formula():
    p = GENERIC
    e = sigma_expansion(p)
    a, b, c, d = p.a, p.b, p.c, p.d
    assert e.leading == pytest.approx(np.sqrt(a * c / (b * d)))
    assert e.alpha == pytest.approx(-(b + d) - b * d * (a + c) / (a * c))
    assert e.beta == pytest.approx(b * d / (a * c) - 1)


@pytest.mark.parametrize("pd, expected", [
    (PhysicalDerivation(np.sqrt(1 / 3), 1, 1, 0), (0, 0, 1 / 3, 0)),
    (PhysicalDerivation(0, 0, 0, 0), (0, -1 / 6, 0, 1 / 2)),
])
def test_params_from_physical(pd, expected):
    p = params_from_physical(pd)
    np.testing.assert_allclose((p.a, p.b, p.c, p.d), expected, atol=1e-15)


def test_physical_unclassified_is_not_an_error():
    assert params_from_physical(PhysicalDerivation(0, 0, 0, 0)).regime is Regime.UNCLASSIFIED


@pytest.mark.parametrize("nu", [-2.0, 0.3, 1.0])
def test_theta_one(nu):
    p = params_from_physical(PhysicalDerivation(1.0, nu, 1.0, 0.0))
    assert p.c == 0 and p.d == 0
    assert p.a + p.b == pytest.approx(1 / 3, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 2))
def test_physical_identities(theta, nu, mu, tau):
    pd = PhysicalDerivation(theta, nu, mu, tau)
    out = physical_identities(pd)
    assert abs(out["a+b"]) < 1e-12
    if mu != nu:
        assert out["c+d"] is None and out["a+b+c+d"] is None


@pytest.mark.parametrize("theta, nu, tau", [(0.0, 2.0, 1.5), (0.5, -1.0, 0.1), (1.0, 0.7, 0.0)])
def test_physical_total_when_mu_equals_nu(theta, nu, tau):
    out = physical_identities(PhysicalDerivation(theta, nu, nu, tau))
    assert abs(out["c+d"]) < 1e-12
    assert abs(out["a+b+c+d"]) < 1e-12


def test_generic_comes_from_physical_block():
    p = params_from_physical(PhysicalDerivation(0.0, 2.0, 0.0, 1.5))
    np.testing.assert_allclose((p.a, p.b, p.c, p.d), (GENERIC.a, GENERIC.b, GENERIC.c, GENERIC.d),
                               atol=1e-15)


def test_physical_validation():
    with pytest.raises(ValueError):
        PhysicalDerivation(1.5, 0, 0)
    with pytest.raises(ValueError):
        PhysicalDerivation(0.5, 0, 0, -1)
