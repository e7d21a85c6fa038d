import math

import numpy as np
import pytest

from fracnorm import constants, lab
from fracnorm.errors import (
    DivergenceError,
    DomainError,
    EmptyResultError,
    InsufficientDataError,
)
from fracnorm.funcspace import (
    VerySimpleFunction,
    make_f0,
    make_h_delta,
    make_indicator,
    make_power_alpha,
    make_zero,
)
from fracnorm.norms import PsiFunction, lp_norm, natural_psi
from fracnorm.operators import riesz_potential_1d
from fracnorm.special import gamma


# witness fast paths against direct quadrature


@pytest.mark.parametrize("kernel", lab.KERNELS)
@pytest.mark.parametrize("alpha,p", [(0.3, 1.5), (0.5, 1.3), (0.7, 1.2)])
def test_f0_fast_path_matches_quadrature(kernel, alpha, p):
    q = constants.sobolev_q(p, alpha)
    f0 = make_f0()
    direct = lp_norm(lab.potential_function(f0, alpha, kernel=kernel), q)
    fast = lab.potential_ratio(f0, alpha, p, kernel=kernel) * f0.norm(p)
    assert fast == pytest.approx(direct, rel=1e-6)


def test_h_delta_output_values_match_riesz():
    alpha, delta = 0.5, 0.1
    h = make_h_delta(delta, alpha)
    t = np.array([1.0, 2.0, 7.0, 60.0])
    fast = lab._h_output_values(alpha, delta, t)
    for ti, v in zip(t, fast):
        want = riesz_potential_1d(h, alpha, math.exp(-ti))
        assert v == pytest.approx(want, rel=1e-7)


def test_h_delta_fast_path_matches_quadrature():
    alpha, p = 0.5, 1.4
    h = make_h_delta(0.1, alpha)
    q = constants.sobolev_q(p, alpha)
    direct = lp_norm(lab.potential_function(h, alpha, kernel="two_sided"), q)
    fast = lab.potential_ratio(h, alpha, p, kernel="two_sided") * h.norm(p)
    assert fast == pytest.approx(direct, rel=1e-6)


# empirical_k_lower


def test_empirical_k_lower_picks_best_witness():
    alpha, p = 0.5, 1.3
    fam = [make_f0(), make_indicator(0.0, 1.0)]
    s = lab.empirical_k_lower(alpha, p, fam)
    ratios = {e.name: lab.potential_ratio(e, alpha, p) for e in fam}
    assert s.witness == max(ratios, key=ratios.get)
    assert s.ratio == max(ratios.values())
    assert s.q == pytest.approx(constants.sobolev_q(p, alpha))


def test_empirical_k_lower_errors():
    with pytest.raises(DomainError):
        lab.empirical_k_lower(0.5, 2.5, [make_f0()])
    with pytest.raises(DomainError):
        lab.empirical_k_lower(0.5, 1.5, [])
    with pytest.raises(EmptyResultError):
        lab.empirical_k_lower(0.5, 1.5, [make_zero()])
    with pytest.raises(DomainError):
        lab.potential_ratio(make_f0(), 0.5, 1.5, kernel="sideways")


def test_sample_below_k_upper_midrange():
    for alpha in (0.3, 0.5, 0.7):
        p = 0.5 * (1 + 1 / alpha)
        s = lab.empirical_k_lower(alpha, p, [make_f0()])
        assert s.ratio <= constants.k_upper(alpha, 1, p, 10.0)


# indicator bracket


def test_indicator_bracket_example():
    r = lab.verify_indicator_bracket(0.3, 2.0, 0.2, 0.7)
    assert r.passed
    assert r.lower <= r.quantity <= r.upper


def test_indicator_bracket_p_one_envelope():
    alpha, w = 0.4, 0.5
    r = lab.verify_indicator_bracket(alpha, 1.0, 0.2, 0.2 + w)
    assert r.lower == pytest.approx(w ** (1 - alpha) / (1 - alpha), rel=1e-14)
    assert r.passed


def test_indicator_bracket_shrinking_width():
    for w in (1e-1, 1e-2, 1e-3):
        r = lab.verify_indicator_bracket(0.5, 1.5, 0.4, 0.4 + w)
        assert r.passed
        assert 1.0 <= r.quantity / r.lower <= 3.0


def test_indicator_bracket_domain():
    with pytest.raises(DomainError):
        lab.verify_indicator_bracket(0.5, 2.0, 0.2, 0.7)
    with pytest.raises(DomainError):
        lab.verify_indicator_bracket(0.5, 1.5, 0.7, 0.2)


# GLS checks


def test_gls_indicator_example():
    zeta = PsiFunction.constant(1.0, (1.0, 1 / 0.3))
    r = lab.verify_gls_indicator(0.3, 0.2, 0.7, zeta)
    assert r.passed
    r2 = lab.verify_gls_indicator(0.3, 0.2, 0.7, zeta.scaled(2.0))
    assert r2.passed
    assert r2.quantity == pytest.approx(r.quantity / 2, rel=1e-6)
    assert r2.upper == pytest.approx(r.upper / 2, rel=1e-6)


def test_gls_indicator_zeta_support():
    with pytest.raises(DomainError):
        lab.verify_gls_indicator(0.5, 0.2, 0.7, PsiFunction.constant(1.0, (1.0, 3.0)))


def test_vs_bound_cases():
    one = VerySimpleFunction.equal_step([0.2], [1.0], 0.3)
    r = lab.verify_vs_bound(one, 0.4, 1.5)
    br = lab.verify_indicator_bracket(0.4, 1.5, 0.2, 0.5)
    assert r.passed
    assert r.quantity == pytest.approx(br.quantity, rel=1e-10)
    # single block: the bound times the width is the bracket's upper end
    assert r.upper == pytest.approx(br.upper, rel=1e-12)
    two = VerySimpleFunction.equal_step([0.1, 0.5], [1.0, 1.0], 0.2)
    assert lab.verify_vs_bound(two, 0.4, 1.5).passed
    zero = VerySimpleFunction.equal_step([0.1], [0.0], 0.2)
    r0 = lab.verify_vs_bound(zero, 0.4, 1.5)
    assert r0.passed and r0.quantity == 0.0 and r0.upper == 0.0


def test_vs_gls_single_block_consistent_with_indicator():
    alpha = 0.4
    zeta = PsiFunction.constant(1.0, (1.0, 2.5))
    one = VerySimpleFunction.equal_step([0.2], [1.0], 0.3)
    r = lab.verify_vs_gls(one, alpha, zeta)
    ri = lab.verify_gls_indicator(alpha, 0.2, 0.5, zeta)
    assert r.passed
    assert r.quantity == pytest.approx(ri.quantity, rel=1e-6)
    # |f|_1 = h makes both right sides equal
    assert r.upper == pytest.approx(ri.upper, rel=1e-9)


def test_gls_sobolev_natural():
    g = make_indicator(0.2, 0.7)
    r = lab.verify_gls_sobolev(g, natural_psi(g, 1.1, 1.5), 0.5)
    assert r.upper == pytest.approx(1.0, abs=1e-6)
    assert r.passed


def test_gls_sobolev_zero_and_scaling():
    psi = PsiFunction.constant(1.0, (1.1, 1.5))
    assert lab.verify_gls_sobolev(make_zero(), psi, 0.5).passed
    g = make_indicator(0.2, 0.7)
    a = lab.verify_gls_sobolev(g, psi, 0.5)
    b = lab.verify_gls_sobolev(g.scaled(2.0), psi, 0.5)
    assert b.quantity == pytest.approx(2 * a.quantity, rel=1e-8)
    assert b.upper == pytest.approx(2 * a.upper, rel=1e-8)
    assert a.passed == b.passed


# Besov


def test_besov_ratio_indicator_below_bound():
    for alpha, p in ((0.3, 2.0), (0.5, 1.5)):
        r = lab.besov_ratio(make_indicator(0.2, 0.7), alpha, p)
        assert 0 < r <= (1 + 1e-3) / gamma(1 - alpha)


def test_besov_ratio_annihilated():
    assert lab.besov_ratio(make_power_alpha(0.5), 0.5, 1.5) == 0.0


def test_besov_ratio_divergent():
    with pytest.raises(DivergenceError):
        # the weighted first term needs 2 alpha p < 1
        lab.besov_ratio(make_h_delta(0.1, 0.5), 0.5, 1.5)
    with pytest.raises(DomainError):
        lab.besov_ratio(make_indicator(0.2, 0.7), 0.5, 2.0)


def test_prop51():
    r = lab.verify_prop51(make_indicator(0.2, 0.7), 0.3, 2.0)
    assert r.passed
    assert r.upper == pytest.approx(1 / gamma(0.7))
    r0 = lab.verify_prop51(make_power_alpha(0.3), 0.3, 2.0)
    assert r0.quantity == 0.0 and r0.passed
    with pytest.raises(DomainError):
        lab.verify_prop51(make_zero(), 0.3, 2.0)


# factorization


def test_factorization_example():
    r = lab.verify_factorization(make_f0(), make_f0(), 0.5, 0.5, 1.5, 1.5)
    assert r.passed


def test_factorization_constant_second_factor():
    g1, g2 = make_indicator(0.1, 0.6), make_indicator(0.0, 1.0)
    r = lab.verify_factorization(g1, g2, 0.4, 0.6, 1.5, 1.2)
    assert r.passed
    r1 = lab.potential_ratio(g1, 0.4, 1.5) / gamma(0.4)
    r2 = lab.potential_ratio(g2, 0.6, 1.2) / gamma(0.6)
    assert r.quantity == pytest.approx(r1 * r2, rel=1e-6)


def test_factorization_below_product_of_envelopes():
    r = lab.verify_factorization(make_f0(), make_indicator(0.0, 1.0), 0.5, 0.3, 1.5, 2.0)
    bound = (constants.k_upper(0.5, 1, 1.5, 10.0) * constants.k_upper(0.3, 1, 2.0, 10.0)
             / (gamma(0.5) * gamma(0.3)))
    assert r.quantity <= bound


# blow-up slope


def _samples(ps, ratios):
    return [lab.RatioSample(p, constants.sobolev_q(p, 0.5), r, "w") for p, r in zip(ps, ratios)]


def test_blowup_slope_constant_is_zero():
    ps = 1 + 2.0 ** -np.arange(3, 9)
    assert lab.blowup_slope(_samples(ps, [2.0] * 6), "left") == pytest.approx(0.0, abs=1e-12)


def test_blowup_slope_exact_power():
    ps = 1 + 2.0 ** -np.arange(3, 9)
    assert lab.blowup_slope(_samples(ps, (ps - 1) ** -0.5), "left") == pytest.approx(-0.5)
    ps = (1 - 2.0 ** -np.arange(3, 9)) / 0.5
    assert lab.blowup_slope(_samples(ps, (1 - 0.5 * ps) ** -0.3), "right") == pytest.approx(-0.3)


def test_blowup_slope_errors():
    with pytest.raises(InsufficientDataError):
        lab.blowup_slope(_samples([1.1, 1.2], [1.0, 1.0]), "left")
    with pytest.raises(DomainError):
        lab.blowup_slope(_samples([1.1] * 5, [1.0] * 5), "middle")


# weighted bracket


def test_weighted_bracket_empty_interval():
    with pytest.raises(DomainError):
        lab.verify_weighted_bracket(0.9, 0.3, 0.4, [make_indicator(0.1, 0.5)], [1.3])


def test_weighted_bracket_needs_beta_or_gamma():
    with pytest.raises(DomainError):
        lab.verify_weighted_bracket(0.5, 0.0, 0.0, [make_indicator(0.1, 0.5)], [1.3])


def test_weighted_ratio_zero():
    assert lab.weighted_ratio(make_zero(), 0.9, 0.3, 0.4, 1.3) == 0.0
