import math

import numpy as np
import pytest

from ipdsaw.identities import (
    RENEWAL_MAX_LENGTH,
    asymptotics_fit,
    delta_series_check,
    llt_ratio,
    renewal,
    renewal_check,
    walk_rep_check,
    walk_rep_single_bead,
)
from ipdsaw.continuum import k_constants
from ipdsaw.laplace import BETA_C, DomainError


def test_walk_rep_smallest_bead():
    assert walk_rep_single_bead(2.0, 2).value == pytest.approx(2.0, rel=1e-14)
    assert walk_rep_single_bead(2.0, 4).value == pytest.approx(2.0 + 2.0 * math.exp(2.0), rel=1e-14)


@pytest.mark.parametrize("beta", [0.5, BETA_C, 2.0, 3.0])
def test_walk_rep_matches_dp(beta):
    assert walk_rep_check(beta, 40) < 1e-10


@pytest.mark.parametrize("beta", [0.5, 2.0, 3.0])
def test_renewal(beta):
    res = renewal(beta, 60)
    assert res.max_rel_error < 1e-12
    assert res.z_c[0] == 1.0
    assert renewal_check(beta, 20) < 1e-12


def test_renewal_bounds():
    with pytest.raises(ValueError):
        renewal_check(2.0, RENEWAL_MAX_LENGTH + 1)
    with pytest.raises(ValueError):
        renewal_check(2.0, 1)


@pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
def test_delta_series(beta):
    res = delta_series_check(beta)
    assert res.consistent
    assert 0.0 <= res.remainder_bound < 0.05 * res.delta2


def test_delta_series_domain():
    with pytest.raises(DomainError):
        delta_series_check(1.0)


def test_llt_small_n_positive():
    assert llt_ratio(2.0, 2, 1) > 0.0


def test_llt_requires_integer_area():
    with pytest.raises(DomainError):
        llt_ratio(2.0, 10, 0.333)
    llt_ratio(2.0, 10, 0.33)


@pytest.mark.parametrize("q", [0.5, 2.0])
def test_llt_order_one(q):
    r = llt_ratio(2.0, 40, q)
    assert 0.5 < r < 2.0


def test_llt_approaches_one():
    errs = [abs(llt_ratio(2.0, n, 1) - 1.0) for n in (16, 32, 48)]
    assert errs[0] > errs[1] > errs[2]


def test_fit_window():
    with pytest.raises(np.linalg.LinAlgError):
        asymptotics_fit(2.0, 100, 140)
    with pytest.raises(DomainError):
        asymptotics_fit(1.0, 100, 400)


def test_fit_sqrt_coefficient():
    fit = asymptotics_fit(2.0, 300, 1500)
    assert fit.sqrt_coeff == pytest.approx(k_constants(2.0).g_tilde_max, rel=0.02)
    assert fit.rms_residual < 1e-3
