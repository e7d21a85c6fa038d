import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracnorm.errors import DomainError
from fracnorm.funcspace import (
    TensorFunction,
    make_constant,
    make_f0,
    make_indicator,
    make_zero,
)
from fracnorm.norms import (
    PsiFunction,
    besov_natural_psi,
    besov_norm,
    fundamental_function,
    gls_norm,
    lp_norm,
    mixed_norm,
    modulus_of_continuity,
    natural_psi,
    power_weighted,
    restricted,
)


def _indicator_besov_oracle(h1, h2, alpha, p, b):
    # |x^-a g|_p + a int_0^b t^(-1-a) (2 min(t, w))^(1/p) dt, with w < b
    w = h2 - h1
    e = 1.0 - alpha * p
    first = ((h2**e - h1**e) / e) ** (1.0 / p)
    r = 1.0 / p
    t_part = alpha * 2**r * (w ** (r - alpha) / (r - alpha) + w**r * (w**-alpha - b**-alpha) / alpha)
    return first + t_part


# lp_norm


def test_lp_f0():
    assert lp_norm(make_f0(), 2.0) == pytest.approx(1.0, rel=1e-10)


def test_lp_indicator():
    assert lp_norm(make_indicator(0.25, 0.75), 3.0) == pytest.approx(0.5 ** (1 / 3), rel=1e-12)
    assert 0.5 ** (1 / 3) == pytest.approx(0.793701, abs=1e-6)


def test_lp_indicator_derivative_finite():
    d = make_indicator(0.2, 0.6).derivative(0.5)
    assert math.isfinite(lp_norm(d, 1.5))


def test_lp_divergence_is_a_signal():
    assert lp_norm(make_f0(), 1.0) == math.inf
    assert lp_norm(make_indicator(0.2, 0.6).derivative(0.5), 2.0) == math.inf


def test_lp_zero():
    assert lp_norm(make_zero(), 2.0) == 0.0


@given(st.floats(1.0, 8.0), st.floats(0.05, 0.9), st.floats(0.01, 2.0))
@settings(max_examples=40, deadline=None)
def test_lp_matches_closed_form_indicator(p, h1, w):
    g = make_indicator(h1, h1 + w)
    assert lp_norm(g, p) == pytest.approx(w ** (1 / p), rel=1e-10)


@given(st.floats(-10, 10).filter(lambda c: abs(c) > 1e-6), st.floats(1.0, 5.0))
@settings(max_examples=30, deadline=None)
def test_lp_homogeneity(c, p):
    g = make_indicator(0.1, 0.4).derivative(0.2)
    assert lp_norm(g.scale(c), p) == pytest.approx(abs(c) * lp_norm(g, p), rel=1e-10)


def test_lp_power_weighted():
    # |x^-a 1_(0,1)|_p = (1 - a p)^(-1/p)
    f = power_weighted(make_indicator(0.0, 1.0), -0.3)
    assert lp_norm(f, 2.0) == pytest.approx(0.4 ** -0.5, rel=1e-10)


def test_restricted():
    f = restricted(make_constant(2.0), 0.0, 0.5)
    assert lp_norm(f, 1.0) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(DomainError):
        restricted(make_indicator(0.2, 0.4), 0.5, 0.9)


# mixed_norm


def test_mixed_norm_unit():
    g = make_indicator(0.0, 1.0).function
    for p1, p2 in ((1.0, 2.0), (3.0, 1.5)):
        assert mixed_norm(TensorFunction(g, g), p1, p2) == pytest.approx(1.0, rel=1e-12)


def test_mixed_norm_product():
    F = TensorFunction(make_indicator(0.0, 0.5).function, make_indicator(0.0, 0.25).function)
    assert mixed_norm(F, 1.0, 2.0) == pytest.approx(0.25, rel=1e-12)


def test_mixed_norm_asymmetry():
    F = TensorFunction(make_indicator(0.0, 0.5).function, make_indicator(0.0, 0.25).function)
    a = mixed_norm(F, 1.0, 2.0)
    b = mixed_norm(F, 2.0, 1.0)
    assert b == pytest.approx(0.5**0.5 * 0.25, rel=1e-12)
    assert abs(a - b) > 1e-3


@pytest.mark.parametrize("p1,p2", [(1.5, 2.0), (3.0, 1.2)])
def test_mixed_norm_iterated_matches_product(p1, p2):
    F = TensorFunction(make_indicator(0.1, 0.7).derivative(0.3), make_f0().function)
    prod = mixed_norm(F, p1, p2)
    it = mixed_norm(F, p1, p2, method="iterated")
    assert it == pytest.approx(prod, rel=1e-6)


# modulus_of_continuity


@pytest.mark.parametrize("delta", [0.01, 0.1, 0.3, 0.8])
@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_modulus_indicator_oracle(delta, p):
    # [DERIVED] the shifted indicators differ on a set of measure 2 min(delta, w)
    w = 0.4
    g = make_indicator(0.2, 0.2 + w)
    want = (2 * min(delta, w)) ** (1 / p)
    assert modulus_of_continuity(g, delta, p) == pytest.approx(want, rel=1e-9)


def test_modulus_zero():
    assert modulus_of_continuity(make_zero(), 0.1, 2.0) == 0.0


def test_modulus_small_on_continuous():
    # the tent-like derivative of an indicator is not continuous; use a power
    f = restricted(make_constant(1.0), 0.0, 1.0)
    g = power_weighted(f, 2.0)
    assert modulus_of_continuity(g, 1e-6, 2.0) < 2e-3


def test_modulus_monotone_and_subadditive():
    for entry in (make_indicator(0.1, 0.3), make_indicator(0.2, 0.9).derivative(0.2)):
        prev = 0.0
        for delta in (0.01, 0.02, 0.05, 0.1, 0.2):
            w = modulus_of_continuity(entry, delta, 1.5)
            w2 = modulus_of_continuity(entry, 2 * delta, 1.5)
            assert w >= prev - 1e-12
            assert w2 <= 2 * w + 1e-9
            prev = w


# besov_norm


@pytest.mark.parametrize("alpha,p", [(0.3, 1.5), (0.5, 1.2), (0.7, 1.1)])
def test_besov_indicator_oracle(alpha, p):
    h1, h2, b = 0.2, 0.5, 1.0
    got = besov_norm(make_indicator(h1, h2), alpha, p, b)
    assert got == pytest.approx(_indicator_besov_oracle(h1, h2, alpha, p, b), rel=1e-5)


def test_besov_indicator_lower_asymptotic():
    alpha, p, w = 0.5, 1.5, 0.3
    val = besov_norm(make_indicator(0.0, w), alpha, p)
    assert val >= w ** (1 / p - alpha) * (1 - alpha * p) ** (-1 / p)


def test_besov_zero():
    assert besov_norm(make_zero(), 0.5, 1.5) == 0.0


def test_besov_divergent_indicator():
    assert besov_norm(make_indicator(0.2, 0.5), 0.5, 2.5) == math.inf


def test_besov_dominates_first_term():
    f = make_indicator(0.1, 0.6)
    for alpha, p in ((0.3, 2.0), (0.6, 1.3)):
        first = lp_norm(power_weighted(restricted(f.function, 0.0, 1.0), -alpha), p)
        assert besov_norm(f, alpha, p) >= first


def test_besov_report():
    rep = {}
    besov_norm(make_indicator(0.2, 0.5), 0.5, 1.5, report=rep)
    # omega(t) = (2t)^(1/p) near 0
    assert rep["local_exponent"] == pytest.approx(1 / 1.5, rel=1e-6)


# gls_norm, natural_psi


@pytest.mark.parametrize("entry,support", [
    (make_f0(), (1.1, 3.0)),
    (make_indicator(0.0, 0.3), (1.0, 6.0)),
    (make_indicator(0.2, 0.5).derivative(0.4), (1.0, 2.4)),
])
def test_gls_natural_is_one(entry, support):
    psi = natural_psi(entry, *support)
    assert gls_norm(entry, psi) == pytest.approx(1.0, abs=1e-6)


def test_gls_zero_and_homogeneity():
    psi = PsiFunction.constant(1.0, (1.0, 4.0))
    g = make_indicator(0.0, 0.4)
    assert gls_norm(make_zero(), psi) == 0.0
    assert gls_norm(g.scaled(2.0), psi) == pytest.approx(2 * gls_norm(g, psi), rel=1e-9)


def test_natural_psi_values():
    assert natural_psi(make_f0(), 1.1, 3.0)(2.0) == pytest.approx(1.0, rel=1e-12)
    psi = natural_psi(make_indicator(0.0, 0.3), 1.0, 5.0)
    assert psi(2.5) == pytest.approx(0.3**0.4, rel=1e-12)
    g = make_indicator(0.2, 0.5).derivative(0.4)
    p1, p2 = natural_psi(g, 1.0, 2.0), natural_psi(g.scale(2.0), 1.0, 2.0)
    assert p2(1.5) == pytest.approx(2 * p1(1.5), rel=1e-10)


def test_natural_psi_divergent_support():
    with pytest.raises(DomainError):
        natural_psi(make_f0(), 0.5, 3.0)
    with pytest.raises(DomainError):
        natural_psi(make_indicator(0.2, 0.5).derivative(0.5), 1.0, 3.0)


def test_psi_outside_support():
    psi = PsiFunction.constant(1.0, (1.0, 2.0))
    with pytest.raises(DomainError):
        psi(2.5)


# fundamental_function


def test_fundamental_examples():
    psi = PsiFunction.constant(1.0, (1.0, 2.0))
    assert fundamental_function(psi, 0.25) == pytest.approx(0.5, rel=1e-3)
    assert fundamental_function(psi, 1.0) == pytest.approx(1.0, rel=1e-12)
    # supremum at the clipped left end
    assert fundamental_function(psi, 4.0) == pytest.approx(4.0, rel=1e-3)


def test_fundamental_nondecreasing():
    psi = natural_psi(make_f0(), 1.2, 4.0)
    vals = [fundamental_function(psi, d) for d in np.geomspace(1e-3, 1e3, 13)]
    assert all(b >= a * (1 - 1e-9) for a, b in zip(vals, vals[1:]))


# besov_natural_psi


def test_besov_natural_psi_zero_rejected():
    with pytest.raises(DomainError):
        besov_natural_psi(make_zero(), 0.5, 1.5)


def test_besov_natural_psi_indicator_finite():
    alpha = 0.5
    psi = besov_natural_psi(make_indicator(0.2, 0.5), alpha, 1 / alpha - 0.05)
    assert math.isfinite(psi(1.5))
    assert psi(1.5) == pytest.approx(_indicator_besov_oracle(0.2, 0.5, alpha, 1.5, 1.0),
                                     rel=1e-5)


def test_besov_natural_psi_homogeneity():
    g = make_indicator(0.2, 0.5)
    a = besov_natural_psi(g, 0.5, 1.5)
    b = besov_natural_psi(g.scaled(3.0), 0.5, 1.5)
    assert b(1.2) == pytest.approx(3 * a(1.2), rel=1e-8)
