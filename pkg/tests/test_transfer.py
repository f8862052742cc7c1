import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ipdsaw.budget import ENV_VAR, TableBudgetError
from ipdsaw.laplace import BETA_C
from ipdsaw.logweight import LogWeight
from ipdsaw.polymer import enumerate_all, hamiltonian, iter_trajectories
from ipdsaw.serialize import read_excursion, read_series, sidecar_path, write_excursion, write_series
from ipdsaw.excursions import excursion_table
from ipdsaw.transfer import (
    VARIANTS,
    evaluate_coefficients,
    exact_coefficients,
    stretch_dp,
    stretch_table,
)

logs = st.one_of(st.just(-math.inf), st.floats(-50, 50))


@given(logs, logs)
def test_logweight_add_commutes(a, b):
    assert (LogWeight(a) + LogWeight(b)).log_value == (LogWeight(b) + LogWeight(a)).log_value


@given(logs, logs, logs)
def test_logweight_add_associates(a, b, c):
    x, y, z = LogWeight(a), LogWeight(b), LogWeight(c)
    left, right = (x + y) + z, x + (y + z)
    if left.log_value == -math.inf:
        assert right.log_value == -math.inf
    else:
        assert left.relative_error(right) < 1e-12


@given(logs, logs)
def test_logweight_multiplication(a, b):
    prod = LogWeight(a) * LogWeight(b)
    if -math.inf in (a, b):
        assert prod == LogWeight.zero()
    else:
        assert prod.log_value == a + b
    assert LogWeight(a) * LogWeight.one() == LogWeight(a)
    assert (LogWeight(a) + LogWeight.zero()).log_value == a


def test_logweight_from_value():
    assert LogWeight.from_value(0.0) == LogWeight.zero()
    assert LogWeight.from_value(2.0).value == pytest.approx(2.0)
    with pytest.raises(ValueError):
        LogWeight.from_value(-1.0)


def circ_brute(L, beta):
    total = 0.0
    for t in iter_trajectories(L):
        if all(s != 0 for s in t) and all(a * b < 0 for a, b in zip(t, t[1:])):
            total += math.exp(beta * hamiltonian(t))
    return total


@pytest.mark.parametrize("beta", [0.5, BETA_C, 2.0, 3.0])
def test_full_matches_brute_force(beta):
    series = stretch_dp(beta, 12, "full")
    for L in range(1, 13):
        expected = evaluate_coefficients(enumerate_all(L), beta)
        assert series[L].relative_error(expected) < 1e-12


@pytest.mark.parametrize("beta", [0.5, 2.0])
def test_circ_matches_brute_force(beta):
    series = stretch_dp(beta, 10, "circ")
    for L in range(2, 11):
        assert series[L].value == pytest.approx(circ_brute(L, beta), rel=1e-12)


def test_small_values():
    beta = 2.0
    e = math.exp(beta)
    assert stretch_dp(beta, 4, "circ")[4].value == pytest.approx(2 + 2 * e, rel=1e-14)
    assert stretch_dp(beta, 4, "hat_circ")[2].value == pytest.approx(1.0, rel=1e-14)
    assert stretch_dp(beta, 4, "bar_circ")[2].value == pytest.approx(2.0, rel=1e-14)
    assert stretch_dp(beta, 4, "c_end")[4].value == pytest.approx(8 + 2 * e, rel=1e-14)
    assert stretch_dp(beta, 4, "full")[4].value == pytest.approx(15 + 2 * e, rel=1e-14)
    assert stretch_dp(beta, 4, "c_end")[1] == LogWeight.zero()


def test_exact_mode_matches_enumeration():
    exact = exact_coefficients(14)
    for L in range(1, 15):
        assert exact[L] == enumerate_all(L)


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("beta", [0.5, 2.0, 3.0])
def test_dp_matches_exact_mode(variant, beta):
    exact = exact_coefficients(30, variant)
    series = stretch_dp(beta, 30, variant)
    for L in range(1, 31):
        if exact[L]:
            assert series[L].relative_error(evaluate_coefficients(exact[L], beta)) < 1e-12
        else:
            assert series[L] == LogWeight.zero()


def test_extended_beads_are_linear_in_single_beads():
    beta = 2.0
    circ = [w.value for w in stretch_dp(beta, 25, "circ").values]
    hat = stretch_dp(beta, 25, "hat_circ")
    bar = stretch_dp(beta, 25, "bar_circ")
    for L in range(2, 26):
        assert hat[L].value == pytest.approx(0.5 * circ[L] + math.fsum(circ[1:L]), rel=1e-13)
        assert bar[L].value == pytest.approx(math.fsum(circ[1:L + 1]), rel=1e-13)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 4.0))
def test_full_dominates_and_grows(beta):
    series = {v: stretch_dp(beta, 60, v).log_values for v in VARIANTS}
    full = series["full"]
    assert np.all(np.diff(full[1:]) > 0)
    for v in ("circ", "c_end", "bar_circ"):
        assert np.all(full[1:] >= series[v][1:] - 1e-12)


def test_large_lengths_stay_finite():
    s = stretch_dp(2.0, 1000, "full")
    assert np.all(np.isfinite(s.log_values[1:]))
    # log Z_L - beta L decays like a multiple of sqrt(L)
    assert 1900.0 < s.log_values[1000] < 2000.0


def test_variant_and_size_validation():
    with pytest.raises(ValueError):
        stretch_dp(2.0, 10, "bogus")
    with pytest.raises(ValueError):
        stretch_dp(2.0, 0)
    with pytest.raises(ValueError):
        exact_coefficients(31)


def test_budget_is_enforced(monkeypatch):
    monkeypatch.setenv(ENV_VAR, "100000")
    with pytest.raises(TableBudgetError):
        stretch_table(2.0, 500)
    stretch_table(2.0, 50)


def test_series_roundtrip(tmp_path):
    s = stretch_dp(2.0, 40, "hat_circ")
    path = tmp_path / "series.csv"
    write_series(s, path)
    assert path.read_text().splitlines()[0] == "L,log_value"
    assert sidecar_path(path).exists()
    back = read_series(path)
    assert back.variant == "hat_circ" and back.beta == 2.0
    assert np.array_equal(back.log_values, s.log_values)


def test_excursion_roundtrip(tmp_path):
    t = excursion_table(2.0, 6, 40)
    path = tmp_path / "exc.csv"
    write_excursion(t, path)
    back = read_excursion(path)
    assert np.array_equal(back.probabilities, t.probabilities)
    assert back.tail_bound == t.tail_bound and back.height_cap == t.height_cap
