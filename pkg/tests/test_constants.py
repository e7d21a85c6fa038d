import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracnorm.constants import (
    SobolevPair,
    k_lower_shape,
    k_upper,
    sobolev_p,
    sobolev_q,
    stein_constant,
    transported_psi,
    v2,
    weighted_bracket,
)
from fracnorm.errors import DomainError
from fracnorm.norms import PsiFunction


def test_sobolev_q_examples():
    assert sobolev_q(1.5, 1 / 3) == pytest.approx(3.0, rel=1e-12)
    assert sobolev_q(2.0, 0.25) == pytest.approx(4.0, rel=1e-12)


def test_sobolev_q_domain():
    with pytest.raises(DomainError):
        sobolev_q(2.0, 1.0, 2)
    with pytest.raises(DomainError):
        sobolev_q(1.0, 0.5)
    with pytest.raises(DomainError):
        sobolev_q(2.0, 0.5)


@given(st.floats(0.05, 0.95), st.integers(1, 4), st.floats(0.0, 1.0))
@settings(max_examples=100, deadline=None)
def test_sobolev_round_trip(alpha, d, t):
    top = d / alpha
    p = 1.0 + 1e-6 + t * (top - 1.0 - 2e-6)
    q = sobolev_q(p, alpha, d)
    assert q > d / (d - alpha)
    assert sobolev_p(q, alpha, d) == pytest.approx(p, rel=1e-12)


def test_sobolev_pair():
    pair = SobolevPair.from_p(1.5, 1 / 3)
    assert pair.q == pytest.approx(3.0)
    with pytest.raises(DomainError):
        SobolevPair(1.5, 4.0, 1 / 3)


def test_stein():
    assert stein_constant(1) == 10.0
    assert stein_constant(2) == 50.0
    assert stein_constant(2, "flat") == 2.0
    with pytest.raises(DomainError):
        stein_constant(0)


def test_v2_example():
    # Omega(1) = 2
    assert v2(0.5, 1, 1.0, 10.0) == pytest.approx(2**-1.5 * math.sqrt(10), rel=1e-12)
    assert v2(0.5, 1, 1.0, 10.0) == pytest.approx(1.118034, abs=1e-6)


def test_v2_s_drops_out_at_right_end():
    assert v2(0.5, 1, 2.0, 10.0) == pytest.approx(v2(0.5, 1, 2.0, 1e6), rel=1e-12)


def test_v2_continuity_and_positivity():
    for alpha in (0.3, 0.5, 0.8):
        ps = np.arange(1.0, 1.0 / alpha, 1e-4)
        vals = np.array([v2(alpha, 1, p, 10.0) for p in ps])
        assert np.all(vals > 0)
        assert np.max(np.abs(np.diff(vals))) <= 1e-3
        p = 0.5 * (1.0 + 1.0 / alpha)
        assert abs(v2(alpha, 1, p, 10.0) - v2(alpha, 1, p + 1e-6, 10.0)) <= 1e-4


def test_v2_domain():
    with pytest.raises(DomainError):
        v2(0.5, 1, 2.1, 10.0)
    with pytest.raises(DomainError):
        v2(0.5, 1, 0.9, 10.0)


def test_k_upper_example():
    want = v2(0.5, 1, 1.5, 10.0) * 2 / (0.5 * 0.25) ** 0.5
    assert k_upper(0.5, 1, 1.5, 10.0) == pytest.approx(want, rel=1e-14)


def test_k_upper_endpoints():
    assert k_upper(0.5, 1, 1.0, 10.0) == math.inf
    assert k_upper(0.5, 1, 2.0, 10.0) == math.inf
    # for d >= 2 the right end is 1/alpha, not d/alpha
    assert k_upper(0.5, 2, 2.0, 50.0) == math.inf
    with pytest.raises(DomainError):
        k_upper(0.5, 2, 3.0, 50.0)


def test_k_lower_shape():
    assert k_lower_shape(0.5, 1.5) == pytest.approx(math.sqrt(8), rel=1e-14)
    assert k_lower_shape(0.5, 1.0) == math.inf
    assert k_lower_shape(0.5, 2.0) == math.inf


def test_k_lower_shape_depends_on_product_only():
    # (p-1)(1-p/2) takes the same value at p and 3 - p
    for p in (1.1, 1.3, 1.45):
        assert k_lower_shape(0.5, p) == pytest.approx(k_lower_shape(0.5, 3 - p), rel=1e-12)


def _endpoint_slope(fun, alpha, end):
    eps = np.geomspace(1e-4, 1e-7, 8)
    if end == "left":
        ps = 1.0 + eps
        dist = eps
    else:
        ps = (1.0 - eps) / alpha
        dist = eps
    y = np.log([fun(p) for p in ps])
    return np.polyfit(np.log(dist), y, 1)[0]


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("end", ["left", "right"])
def test_envelope_slopes(alpha, end):
    s_up = _endpoint_slope(lambda p: k_upper(alpha, 1, p, 10.0), alpha, end)
    s_lo = _endpoint_slope(lambda p: k_lower_shape(alpha, p), alpha, end)
    assert s_up == pytest.approx(-(1 - alpha), rel=0.02)
    assert s_lo == pytest.approx(-(1 - alpha), rel=0.02)


def test_envelope_slope_general_d():
    alpha, d = 0.5, 3
    s = _endpoint_slope(lambda p: k_upper(alpha, d, p, stein_constant(d)), alpha, "left")
    assert s == pytest.approx(-(1 - alpha / d), rel=0.02)


def test_weighted_bracket_examples():
    br = weighted_bracket(0.5, 0.3, 0.4)
    assert br.kappa == pytest.approx(0.8)
    assert br.p_minus == pytest.approx(1 / 0.7)
    assert br.p_plus == pytest.approx(1 / 1.2)
    # consistency probe: the admissible interval is empty here
    assert not br.nonempty
    br = weighted_bracket(0.9, 0.3, 0.4)
    assert br.kappa == pytest.approx(0.4)
    assert br.p_minus == pytest.approx(1.428571, abs=1e-6)
    assert br.p_plus == pytest.approx(1.25)
    assert not br.nonempty
    assert br.q_minus == pytest.approx(1 / 0.3)
    assert br.q_plus == pytest.approx(2.5)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
@settings(max_examples=200, deadline=None)
def test_weighted_bracket_properties(a, b, g):
    if a + b + g >= 2:
        with pytest.raises(DomainError):
            weighted_bracket(a, b, g)
        return
    br = weighted_bracket(a, b, g)
    assert br.kappa > 0
    # p_minus < p_plus iff 1 - b > 2 - a - b iff a > 1
    assert not br.nonempty
    assert (br.q_minus is None) == (a + g <= 1)


def test_weighted_bracket_conditions():
    for args in ((0.0, 0.3, 0.4), (0.5, 1.0, 0.4), (0.9, 0.9, 0.5)):
        with pytest.raises(DomainError):
            weighted_bracket(*args)


def test_weighted_envelope():
    br = weighted_bracket(0.5, 0.3, 0.4)
    assert br.envelope(br.p_minus) == math.inf
    assert br.envelope(br.p_minus + 1.0) == pytest.approx(1.0)


def test_transported_psi_support():
    # q(1.2) = 1/(1/1.2 - 1/2) = 3 and q(1.8) = 1/(1/1.8 - 1/2) = 18
    psi = PsiFunction.constant(1.0, (1.2, 1.8))
    t = transported_psi(psi, 0.5, 1, 10.0)
    assert t.support[0] == pytest.approx(3.0, rel=1e-12)
    assert t.support[1] == pytest.approx(18.0, rel=1e-12)


def test_transported_psi_values_and_linearity():
    psi = PsiFunction.constant(1.0, (1.2, 1.8))
    t = transported_psi(psi, 0.5, 1, 10.0)
    t2 = transported_psi(psi.scaled(2.0), 0.5, 1, 10.0)
    q = 5.0
    p = sobolev_p(q, 0.5)
    assert t(q) == pytest.approx(k_upper(0.5, 1, p, 10.0), rel=1e-12)
    assert t2(q) == pytest.approx(2 * t(q), rel=1e-12)


def test_transported_psi_domain():
    with pytest.raises(DomainError):
        transported_psi(PsiFunction.constant(1.0, (1.2, 2.5)), 0.5, 1, 10.0)


def test_q_map_increasing():
    ps = np.linspace(1.01, 1.99, 50)
    qs = [sobolev_q(p, 0.5) for p in ps]
    assert all(b > a for a, b in zip(qs, qs[1:]))
