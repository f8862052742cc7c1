import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ipdsaw.continuum import big_g, h_tilde, rate_point
from ipdsaw.finite_n import em_gap_scan, g_n, g_n_grid, h_gap_scan, h_n_q, psi_nh
from ipdsaw.laplace import DomainError


def test_g_n_at_zero():
    assert g_n(2.0, 10, 0.0, 0) == 0.0
    assert g_n(2.0, 10, 0.0, 1) == 0.0


def test_g_n_close_to_continuum():
    assert g_n(2.0, 400, 1.0) == pytest.approx(0.08385307874471641, rel=1e-13)
    assert abs(g_n(2.0, 400, 1.0) - big_g(2.0, 1.0)) < 1e-4


def test_g_n_domain():
    with pytest.raises(DomainError):
        g_n(2.0, 10, 10 * 2.0 / 9)
    with pytest.raises(DomainError):
        g_n(2.0, 1, 0.1)


@settings(max_examples=40)
@given(st.integers(2, 300), st.floats(0.0, 0.99))
def test_g_n_even(n, frac):
    h = frac * n * 2.0 / (n - 1)
    assert abs(g_n(2.0, n, h) - g_n(2.0, n, -h)) <= 1e-14 * max(1.0, abs(g_n(2.0, n, h)))


def test_g_n_derivative_increasing():
    n = 50
    hs = np.linspace(-1.95, 1.95, 400)
    d = g_n_grid(2.0, n, hs, 1)
    assert np.all(np.diff(d) > 0)
    fd = (g_n(2.0, n, 0.7 + 1e-6) - g_n(2.0, n, 0.7 - 1e-6)) / 2e-6
    assert fd == pytest.approx(g_n(2.0, n, 0.7, 1), rel=1e-7)


def test_h_n_q():
    h = h_n_q(2.0, 50, 0.5)
    assert h == pytest.approx(1.6631904420513501, rel=1e-12)
    assert abs(g_n(2.0, 50, h, 1) - 0.5) < 1e-12
    assert h_n_q(2.0, 50, 1.0) > h


def test_h_n_q_converges_at_rate_n_squared():
    rows = h_gap_scan(2.0, [25, 50, 100, 200, 400], 0.5)
    scaled = [r.scaled_gap for r in rows]
    assert max(scaled) < 3.0
    assert max(scaled) / min(scaled) < 1.01


@pytest.mark.parametrize("q,bound", [(0.3, 2.0), (1.0, 10.0), (3.0, 600.0)])
def test_h_gap_bounded(q, bound):
    rows = h_gap_scan(2.0, [25, 50, 100, 200, 400, 800], q)
    assert all(r.scaled_gap < bound for r in rows)


def test_h_gap_q3_settles_only_at_large_n():
    # h_tilde(3) sits about 1.3e-3 below beta, so the n^-2 regime starts near n ~ 10^4
    rows = h_gap_scan(2.0, [16000, 32000, 64000], 3.0)
    scaled = [r.scaled_gap for r in rows]
    assert max(scaled) / min(scaled) < 1.01
    assert 2.0 - h_tilde(2.0, 3.0) < 2e-3


def test_psi_nh():
    assert psi_nh(2.0, 10, 0.0, 0, 0) == 0.0
    h = 0.8
    assert psi_nh(2.0, 10, h, 60, 3) - psi_nh(2.0, 10, h, 50, 3) == pytest.approx(h, rel=1e-12)


def test_psi_nh_approaches_rate_function():
    q = 0.5
    target = rate_point(2.0, q).psi
    scaled = []
    for n in (50, 100, 200, 400):
        h = h_n_q(2.0, n, q)
        gap = abs(psi_nh(2.0, n, h, int(q * n * n), 0) / n - target)
        scaled.append(n * n * gap)
    assert max(scaled) < 1.0
    assert max(scaled) / min(scaled) < 1.01


@pytest.mark.parametrize("order", [0, 1])
def test_em_gap_scan_scaling(order):
    rows = em_gap_scan(2.0, [10, 100, 300, 1000], 0.3, order)
    scaled = {r.n: r.scaled_gap for r in rows}
    assert all(np.isfinite(v) for v in scaled.values())
    assert abs(scaled[1000] / scaled[100] - 1.0) < 0.5


def test_em_gap_vanishes_at_zero_tilt():
    assert g_n(2.0, 37, 0.0) == big_g(2.0, 0.0) == 0.0


def test_em_gap_scan_validates():
    with pytest.raises(DomainError):
        em_gap_scan(2.0, [10], 2.5)
    with pytest.raises(ValueError):
        em_gap_scan(2.0, [10], 0.3, order=2)
