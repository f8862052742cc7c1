"""The acceptance checks, shared by the ``verify-all`` command and the test suite.

Every check returns a :class:`CheckResult` whose metrics are deterministic given the
arguments (including the seed), so reports built from them are byte-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .beads import bead_survey
from .continuum import k_constants, lg_relation_residual, rate_point
from .excursions import excursion_table
from .finite_n import em_gap_scan, h_gap_scan
from .identities import (
    asymptotics_fit,
    delta_series_check,
    llt_ratio,
    renewal,
    walk_rep_check,
)
from .laplace import BETA_C, delta_coeffs, kappa, r_beta
from .polymer import enumerate_all
from .sampling import mc_kappa, mc_r_beta, sample_polymer
from .transfer import evaluate_coefficients, exact_coefficients, stretch_dp


@dataclass
class CheckResult:
    id: int
    name: str
    module: str
    operation: str
    tolerance: str
    passed: bool = True
    metrics: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def require(self, ok: bool, message: str) -> None:
        if not ok:
            self.passed = False
            self.failures.append(f"{self.module}.{self.operation}: {message} (tolerance: {self.tolerance})")

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.id:2d} {self.name}"


def brute_force(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(1, "brute-force equivalence", "exact_engines", "stretch_dp",
                      "relative error < 1e-12 for L <= 12; exact coefficient maps equal")
    l_max = 12
    counts = {L: enumerate_all(L) for L in range(1, l_max + 1)}
    exact = exact_coefficients(l_max)
    mismatched = [L for L in range(1, l_max + 1) if exact[L] != counts[L]]
    res.require(not mismatched, f"exact polynomial mode differs at L={mismatched}")
    res.require(counts[4] == {0: 15, 1: 2}, f"Z_4 coefficients {counts[4]} != 15 + 2 e^beta")
    worst = 0.0
    for b in (0.5, BETA_C, 2.0, 3.0):
        dp = stretch_dp(b, l_max, "full")
        err = max(dp[L].relative_error(evaluate_coefficients(counts[L], b)) for L in range(1, l_max + 1))
        res.metrics[f"max_rel_error_beta_{b:.6g}"] = err
        worst = max(worst, err)
    res.metrics["max_rel_error"] = worst
    res.require(worst < 1e-12, f"DP vs enumeration relative error {worst:.3e}")
    return res


def walk_representation(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(2, "walk-representation identity", "exact_engines", "walk_rep_single_bead",
                      "relative error < 1e-10 for L <= 40")
    for b in (1.5, 2.0, 3.0):
        err = walk_rep_check(b, 40)
        res.metrics[f"max_rel_error_beta_{b:g}"] = err
        res.require(err < 1e-10, f"beta={b}: single-bead DP vs excursion sum {err:.3e}")
    return res


def renewal_identities(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(3, "renewal identities", "exact_engines", "renewal_check",
                      "max relative error < 1e-10 for L <= 60")
    out = renewal(beta, 60)
    res.metrics.update(max_rel_error=out.max_rel_error, bead_error=out.bead_error,
                       trailing_error=out.trailing_error)
    res.require(out.max_rel_error < 1e-10, f"renewal error {out.max_rel_error:.3e}")
    zc2 = out.z_c[2] * math.exp(2.0 * beta)
    zc4 = out.z_c[4] * math.exp(4.0 * beta)
    target4 = 8.0 + 2.0 * math.exp(beta)
    res.metrics.update(z_c_2=zc2, z_c_4=zc4)
    res.require(abs(zc2 - 2.0) <= 1e-10 * 2.0, f"Z^c_2 = {zc2!r} != 2")
    res.require(abs(zc4 - target4) <= 1e-10 * target4, f"Z^c_4 = {zc4!r} != 8 + 2 e^beta")
    return res


def closed_form_chain(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(4, "closed-form chain", "laplace_core", "delta_coeffs",
                      "|delta2(beta_c) - 1| < 1e-10; delta2 < 1; series within the tail bound at L*=200")
    d_crit = delta_coeffs(BETA_C).delta2
    res.metrics["delta2_at_beta_c"] = d_crit
    res.require(abs(d_crit - 1.0) < 1e-10, f"delta2(beta_c) = {d_crit!r}")
    for b in (1.4, 2.0, 3.0):
        d2 = delta_coeffs(b).delta2
        res.metrics[f"delta2_beta_{b:g}"] = d2
        res.require(d2 < 1.0, f"delta2({b}) = {d2!r} is not below 1")
    series = delta_series_check(beta, 200)
    res.metrics.update(series_partial_sum=series.partial_sum, series_remainder_bound=series.remainder_bound,
                       series_gap=series.delta2 - series.partial_sum)
    res.require(series.consistent, f"delta2 - partial sum = {series.delta2 - series.partial_sum:.3e} "
                f"outside [0, {series.remainder_bound:.3e}]")
    return res


def monte_carlo(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(5, "Monte Carlo vs closed forms", "sampling", "mc_kappa/mc_r_beta",
                      "|estimate - closed form| <= 4 standard errors + bias bound")
    h = 0.5
    k_mc = mc_kappa(beta, h, 10**6, 2000, seed)
    k_exact = kappa(beta, h)
    r_mc = mc_r_beta(beta, 10**7, 200, seed)
    r_exact = r_beta(beta)
    for name, mc, exact in (("kappa", k_mc, k_exact), ("r_beta", r_mc, r_exact)):
        z = (mc.estimate - exact) / mc.std_error
        res.metrics.update({f"{name}_estimate": mc.estimate, f"{name}_std_error": mc.std_error,
                            f"{name}_closed_form": exact, f"{name}_z_score": z,
                            f"{name}_bias_bound": mc.cap_bias_bound})
        res.require(abs(mc.estimate - exact) <= 4.0 * mc.std_error + mc.cap_bias_bound,
                    f"{name}: z-score {z:.2f}")
    return res


def legendre_suite(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(6, "Legendre identity suite", "continuum_constants", "psi_tilde",
                      "relation residual < 1e-10; psi' finite-difference gap < 1e-6")
    qs = np.geomspace(0.05, 20.0, 25)
    worst_res = worst_fd = 0.0
    for b in (1.5, 2.0, 3.0):
        for q in qs:
            q = float(q)
            worst_res = max(worst_res, abs(lg_relation_residual(b, q)))
            eps = 1e-5
            fd = (rate_point(b, q + eps).psi - rate_point(b, q - eps).psi) / (2.0 * eps)
            worst_fd = max(worst_fd, abs(fd - rate_point(b, q).psi_prime))
    res.metrics.update(max_relation_residual=worst_res, max_fd_gap=worst_fd)
    res.require(worst_res < 1e-10, f"relation residual {worst_res:.3e}")
    res.require(worst_fd < 1e-6, f"finite-difference gap {worst_fd:.3e}")
    return res


GAP_N_LIST = (100, 200, 300, 500, 700, 1000)


def continuum_gaps(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(7, "discrete-to-continuum gaps", "finite_n_tilt", "em_gap_scan/h_gap_scan",
                      "n^2-scaled gaps within a factor 1.5 of their n=100 value for n <= 1000")
    series = {f"G{j}_K0.3": em_gap_scan(beta, GAP_N_LIST, 0.3, order=j) for j in (0, 1)}
    for q in (0.3, 1.0, 3.0):
        series[f"h_q{q:g}"] = h_gap_scan(beta, GAP_N_LIST, q)
    for name, rows in series.items():
        base = rows[0].scaled_gap
        ratios = [r.scaled_gap / base for r in rows]
        for r, ratio in zip(rows, ratios):
            res.metrics[f"{name}_n{r.n}_scaled"] = r.scaled_gap
        worst = max(max(ratios), 1.0 / min(ratios))
        res.metrics[f"{name}_worst_ratio"] = worst
        res.require(worst <= 1.5, f"{name}: n^2 gap drifts by a factor {worst:.3f} from n=100")
    return res


LLT_N_LIST = (16, 24, 32, 40, 48)


def local_limit(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(8, "local limit theorem", "exact_engines", "llt_ratio",
                      "|ratio - 1| decreasing over n and < 0.15 at n=48; tail bound < 1e-14 of retained mass")
    q = 1
    devs = []
    for n in LLT_N_LIST:
        ratio = llt_ratio(beta, n, q)
        res.metrics[f"ratio_n{n}"] = ratio
        devs.append(abs(ratio - 1.0))
    res.require(all(b < a for a, b in zip(devs, devs[1:])), "ratio does not approach 1 monotonically")
    res.require(devs[-1] < 0.15, f"|ratio - 1| = {devs[-1]:.3f} at n=48")
    n = LLT_N_LIST[-1]
    table = excursion_table(beta, n, q * n * n)
    retained = float(table.probabilities.sum())
    res.metrics.update(tail_bound=table.tail_bound, retained_mass=retained)
    res.require(table.tail_bound < 1e-14 * retained, f"height-cap tail bound {table.tail_bound:.3e}")
    return res


def asymptotic_fit(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(9, "partition-function exponents", "exact_engines", "asymptotics_fit",
                      "sqrt-coefficient within 1%; log-slope in [-0.90, -0.60]; e^intercept within 1.5x of K_beta")
    fit = asymptotics_fit(beta, 300, 1000)
    const = k_constants(beta)
    rel = abs(fit.sqrt_coeff - const.g_tilde_max) / abs(const.g_tilde_max)
    k_ratio = math.exp(fit.intercept) / const.k_beta
    res.metrics.update(sqrt_coeff=fit.sqrt_coeff, g_tilde_max=const.g_tilde_max, sqrt_rel_error=rel,
                       log_slope=fit.log_slope, intercept=fit.intercept, k_beta=const.k_beta,
                       k_ratio=k_ratio, rms_residual=fit.rms_residual)
    res.require(rel < 0.01, f"sqrt-coefficient off by {rel:.3%}")
    res.require(-0.90 <= fit.log_slope <= -0.60, f"log-slope {fit.log_slope:.4f}")
    res.require(1.0 / 1.5 <= k_ratio <= 1.5, f"e^intercept / K_beta = {k_ratio:.4f}")
    return res


K_BETAS = (1.4, 1.5, 2.0, 2.5, 3.0)


def k_consistency(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(10, "K_beta route consistency", "continuum_constants", "k_constants",
                      "relative gap between the two routes < 1e-9")
    for b in K_BETAS:
        try:
            gap = k_constants(b).route_gap
        except ArithmeticError as exc:
            res.require(False, f"beta={b}: {exc}")
            continue
        res.metrics[f"route_gap_beta_{b:g}"] = gap
        res.require(gap < 1e-9, f"beta={b}: route gap {gap:.3e}")
    return res


SURVEY_L = 400
SURVEY_COUNT = 10_000
SURVEY_K = tuple(range(0, 45, 5)) + (SURVEY_L,)


def one_bead(beta: float = 2.0, seed: int = 0) -> CheckResult:
    res = CheckResult(11, "one macroscopic bead", "bead_analysis", "bead_survey",
                      "P(I_max >= L-k) nondecreasing in k and >= 0.9 at k=40")
    batch = sample_polymer(beta, SURVEY_L, SURVEY_COUNT, seed)
    survey = bead_survey(batch, SURVEY_K)
    for k in SURVEY_K:
        res.metrics[f"prob_k{k}"] = survey.empirical_prob[k]
    res.require(survey.monotone, "survey curve is not monotone in k")
    res.require(survey.empirical_prob[40] >= 0.9, f"P at k=40 is {survey.empirical_prob[40]:.4f}")
    return res


ALL_CHECKS: tuple[Callable[..., CheckResult], ...] = (
    brute_force, walk_representation, renewal_identities, closed_form_chain, monte_carlo,
    legendre_suite, continuum_gaps, local_limit, asymptotic_fit, k_consistency, one_bead,
)
