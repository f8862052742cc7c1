import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ipdsaw.continuum import (
    _big_g_at_gap,
    a_beta,
    big_g,
    c_prefactor,
    g_tilde,
    h_tilde,
    k_constants,
    lg_relation_residual,
    psi_second,
    psi_tilde,
    rate_point,
    vartheta,
)
from ipdsaw.laplace import DomainError, cgf, cgf_array, delta_coeffs
from ipdsaw.numerics import simpson

SIMPSON_STEPS = 10**6


def simpson_g(beta, h, order):
    return simpson(lambda x: cgf_array(beta, h * (0.5 - x), order) * (0.5 - x) ** order, 0.0, 1.0,
                   SIMPSON_STEPS)


def simpson_vartheta(beta, h):
    w = lambda x: cgf_array(beta, h * (x - 0.5), 2)
    m0 = simpson(w, 0.0, 1.0, SIMPSON_STEPS)
    m1 = simpson(lambda x: x * w(x), 0.0, 1.0, SIMPSON_STEPS)
    m2 = simpson(lambda x: x * x * w(x), 0.0, 1.0, SIMPSON_STEPS)
    return m2 * m0 - m1 * m1


def test_big_g_at_zero():
    assert big_g(2.0, 0.0, 0) == 0.0
    assert big_g(2.0, 0.0, 1) == 0.0
    assert big_g(2.0, 0.0, 2) == pytest.approx(cgf(2.0, 0.0, 2) / 12.0, rel=1e-13)


@pytest.mark.parametrize("order,expected", [(0, 0.08385373201261015), (1, 0.1840305657058685),
                                            (2, 0.25907745146222805)])
def test_big_g_against_simpson(order, expected):
    assert big_g(2.0, 1.0, order) == pytest.approx(expected, rel=1e-13)
    assert abs(big_g(2.0, 1.0, order) - simpson_g(2.0, 1.0, order)) < 1e-10


def test_big_g_domain():
    for h in (2.0, -2.0, 3.0):
        with pytest.raises(DomainError):
            big_g(2.0, h)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.97, 0.97))
def test_big_g_parity(frac):
    h = 2.0 * frac
    assert big_g(2.0, h, 0) == big_g(2.0, -h, 0)
    assert big_g(2.0, h, 1) == -big_g(2.0, -h, 1)


def test_big_g_convex_on_compact():
    hs = np.arange(-1.9, 1.9 + 1e-9, 1e-3)
    assert min(big_g(2.0, float(h), 2) for h in hs) > 0.0


def test_h_tilde():
    q = 0.5
    h = h_tilde(2.0, q)
    assert h == pytest.approx(1.662014469299246, rel=1e-12)
    assert abs(big_g(2.0, h, 1) - q) < 1e-12
    assert h_tilde(2.0, 1.0) > h
    assert h_tilde(2.0, 1e-6) < 1e-4


def test_psi_tilde_fields():
    pt = psi_tilde(2.0, 0.5)
    assert pt.psi == pytest.approx(0.5435051390781054, rel=1e-12)
    assert pt.psi == pytest.approx(pt.q * pt.h_tilde - big_g(2.0, pt.h_tilde), rel=1e-14)
    assert pt.psi_prime == pt.h_tilde
    assert pt.psi > 0
    assert rate_point(2.0, 1e-6).psi < 1e-9
    with pytest.raises(DomainError):
        rate_point(2.0, 0.0)


def test_psi_prime_finite_difference():
    q, d = 0.5, 1e-5
    fd = (rate_point(2.0, q + d).psi - rate_point(2.0, q - d).psi) / (2 * d)
    assert abs(fd - rate_point(2.0, q).psi_prime) < 1e-6


def test_psi_second_finite_difference():
    q, d = 0.5, 1e-5
    fd = (rate_point(2.0, q + d).psi_prime - rate_point(2.0, q - d).psi_prime) / (2 * d)
    assert fd == pytest.approx(psi_second(2.0, q), rel=1e-6)


@pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
def test_legendre_identities_on_grid(beta):
    qs = np.geomspace(0.05, 20.0, 25)
    for q in qs:
        q = float(q)
        assert abs(lg_relation_residual(beta, q)) < 1e-10
        fd = (rate_point(beta, q + 1e-5).psi - rate_point(beta, q - 1e-5).psi) / 2e-5
        assert abs(fd - rate_point(beta, q).psi_prime) < 1e-6
    psis = np.array([rate_point(beta, float(q)).psi for q in np.linspace(0.05, 20.0, 60)])
    assert np.all(np.diff(psis, 2) >= -1e-9)


def test_large_area_tilt_is_resolved():
    # at q=20 the tilt is closer to beta than a double can resolve; the gap is still exact
    pt = rate_point(2.0, 20.0)
    assert 0.0 < pt.gap < 1e-10
    assert _big_g_at_gap(2.0, pt.gap, 1) == pytest.approx(20.0, rel=1e-12)


def test_vartheta():
    assert vartheta(2.0, 0.0) == pytest.approx(cgf(2.0, 0.0, 2) ** 2 / 12.0, rel=1e-13)
    assert vartheta(2.0, 1.0) == pytest.approx(0.6499098630584805, rel=1e-12)
    assert abs(vartheta(2.0, 1.0) - simpson_vartheta(2.0, 1.0)) < 1e-10
    assert vartheta(2.0, 1.3) == vartheta(2.0, -1.3)
    with pytest.raises(DomainError):
        vartheta(2.0, 2.0)


def test_c_prefactor():
    c = c_prefactor(2.0, 0.5)
    assert c == pytest.approx(0.04261807637046085, rel=1e-12)
    qs = 0.5 + 1e-4 * np.arange(6)
    vals = [c_prefactor(2.0, float(q)) for q in qs]
    assert max(abs(b / a - 1) for a, b in zip(vals, vals[1:])) < 1e-3
    assert c_prefactor(2.0, 1e-6) < 1e-4
    assert c_prefactor(2.0, 0.5) == c


def test_g_tilde_negative_and_derivatives():
    for x in (0.3, 0.8, 1.36, 2.5, 6.0):
        assert g_tilde(2.0, x, 0) < 0
        d = 1e-5
        fd1 = (g_tilde(2.0, x + d) - g_tilde(2.0, x - d)) / (2 * d)
        fd2 = (g_tilde(2.0, x + d, 1) - g_tilde(2.0, x - d, 1)) / (2 * d)
        assert abs(fd1 - g_tilde(2.0, x, 1)) < 1e-6
        assert fd2 == pytest.approx(g_tilde(2.0, x, 2), rel=1e-6)
    with pytest.raises(DomainError):
        g_tilde(1.0, 1.0)


def test_a_beta():
    a = a_beta(2.0)
    assert a == pytest.approx(1.3595752991865653, rel=1e-12)
    assert abs(g_tilde(2.0, a, 1)) < 1e-10
    assert g_tilde(2.0, a, 2) < 0
    assert g_tilde(2.0, a) >= max(g_tilde(2.0, a - 1e-3), g_tilde(2.0, a + 1e-3))
    for beta in (1.5, 3.0):
        assert abs(g_tilde(beta, a_beta(beta), 1)) < 1e-10
    with pytest.raises(DomainError):
        a_beta(1.2)


def test_k_constants_at_two():
    k = k_constants(2.0)
    em = math.exp(-2.0)
    assert k.g_tilde_max == pytest.approx(-2.5023298636878217, rel=1e-12)
    assert k.k_circ == pytest.approx(2.963253562784713, rel=1e-10)
    assert k.k_beta == pytest.approx(4.247282206783759, rel=1e-10)
    assert min(k.k_circ, k.k_hat, k.k_bar, k.k_beta) > 0
    assert k.k_hat == pytest.approx(k.k_circ * (1 + em) / (2 * (1 - em)), rel=1e-15)
    assert k.k_bar / k.k_hat == pytest.approx(2 / (1 + em), rel=1e-14)
    # route B from its ingredients, recomputed here
    d = delta_coeffs(2.0)
    route_b = (k.k_bar / (1 - d.delta2) + k.k_hat * d.delta1 / (1 - d.delta2) ** 2) / (1 - em)
    assert route_b == pytest.approx(k.k_beta_route_a, rel=1e-9)


@pytest.mark.parametrize("beta", [1.4, 1.8, 2.0, 2.5, 3.0])
def test_k_routes_agree(beta):
    assert k_constants(beta).route_gap < 1e-9


def test_repeatable():
    assert rate_point(2.0, 0.7) == rate_point(2.0, 0.7)
    assert k_constants(2.5) == k_constants(2.5)
