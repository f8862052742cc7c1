"""Cross-checks between the exact engines and the closed forms.

Each check evaluates one quantity along two code paths that share no arithmetic,
so agreement is evidence for both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .continuum import c_prefactor, rate_point
from .excursions import excursion_sweep, excursion_table
from .laplace import BETA_C, DomainError, ModelParams, _params, cgf_array, delta_coeffs
from .logweight import LogWeight
from .transfer import hat_bar_from_circ, stretch_dp

RENEWAL_MAX_LENGTH = 80
MIN_FIT_WINDOW = 50


def walk_rep_series(params: ModelParams, l_max: int) -> np.ndarray:
    """``log Z°_L`` for ``L = 0..l_max`` from excursions of the step law.

    ``Z°_L e^{-beta L} = 2 c_beta sum_{N=1}^{L/2} Gamma^N P(V_{N+1, L-N})``.
    """
    p = _params(params)
    l_max = int(l_max)
    if l_max < 2:
        raise ValueError(f"l_max must be at least 2, got {l_max}")
    # heights never exceed the area, so this cap prunes nothing
    area_cap = l_max - 1
    tables = excursion_sweep(p, l_max // 2 + 1, area_cap, height_cap=area_cap)
    log_gamma = math.log(p.gamma_beta)
    out = np.full(l_max + 1, -np.inf)
    for L in range(2, l_max + 1):
        terms = [N * log_gamma + math.log(tables[N].probabilities[L - N])
                 for N in range(1, L // 2 + 1) if tables[N].probabilities[L - N] > 0]
        if terms:
            out[L] = math.log(2.0 * p.c_beta) + p.beta * L + float(np.logaddexp.reduce(terms))
    return out


def walk_rep_single_bead(params: ModelParams, L: int) -> LogWeight:
    """Single-bead partition function ``Z°_L`` through the excursion representation."""
    if L < 2:
        raise ValueError(f"L must be at least 2, got {L}")
    return LogWeight(float(walk_rep_series(params, L)[L]))


def _max_rel(a: np.ndarray, b: np.ndarray, start: int) -> float:
    worst = 0.0
    for x, y in zip(a[start:], b[start:]):
        if x == y:
            continue
        worst = max(worst, abs(math.expm1(x - y)))
    return worst


def walk_rep_check(params: ModelParams, l_max: int) -> float:
    """Max relative gap between the single-bead DP and the excursion representation."""
    dp = stretch_dp(params, l_max, "circ").log_values
    return _max_rel(dp, walk_rep_series(params, l_max), 2)


@dataclass(frozen=True)
class RenewalResult:
    max_rel_error: float
    bead_error: float  # Z^c from bead convolution vs the DP ending in a nonzero stretch
    trailing_error: float  # Z from the Z^c sum vs the full DP
    z_c: np.ndarray  # scaled Z^c_L e^{-beta L}, with Z^c_0 = 1


def renewal(params: ModelParams, l_max: int) -> RenewalResult:
    p = _params(params)
    l_max = int(l_max)
    if not 2 <= l_max <= RENEWAL_MAX_LENGTH:
        raise ValueError(f"renewal check needs 2 <= l_max <= {RENEWAL_MAX_LENGTH}, got {l_max}")
    beta = p.beta
    Ls = np.arange(l_max + 1)
    circ = stretch_dp(p, l_max, "circ").log_values
    hat_log, bar_log = hat_bar_from_circ(circ)
    # e^{-beta L} keeps every term of order one
    hat = np.exp(hat_log - beta * Ls)
    bar = np.exp(bar_log - beta * Ls)
    u = np.zeros(l_max + 1)
    for L in range(1, l_max + 1):
        u[L] = bar[L] + math.fsum(u[L - t] * hat[t] for t in range(2, L - 1))
    zc = u.copy()
    zc[0] = 1.0
    decay = np.exp(-beta * Ls)
    z = np.array([math.fsum(decay[k] * zc[L - k] for k in range(L + 1)) for L in Ls])

    c_end = stretch_dp(p, l_max, "c_end").log_values - beta * Ls
    full = stretch_dp(p, l_max, "full").log_values - beta * Ls
    with np.errstate(divide="ignore"):
        bead_err = _max_rel(np.log(u), c_end, 2)
        trail_err = _max_rel(np.log(z), full, 1)
    return RenewalResult(max(bead_err, trail_err), bead_err, trail_err, zc)


def renewal_check(params: ModelParams, l_max: int) -> float:
    """Max relative discrepancy of the bead and trailing-zero decompositions over ``L <= l_max``."""
    return renewal(params, l_max).max_rel_error


@dataclass(frozen=True)
class DeltaSeriesResult:
    delta2: float
    partial_sum: float
    remainder_bound: float
    l_star: int

    @property
    def consistent(self) -> bool:
        gap = self.delta2 - self.partial_sum
        slack = 64 * np.finfo(float).eps * self.delta2
        return -slack <= gap <= self.remainder_bound + slack


def _area_tail_bound(p: ModelParams, n: int, m: int) -> float:
    """Chernoff bound on ``P(X_1 + ... + X_n >= m)`` for the untilted walk."""
    if m <= 0:
        return 1.0
    # X_1 + ... + X_n = sum_j (n - j + 1) Y_j, so the exponent needs lam * n < beta / 2
    weights = np.arange(1, n + 1, dtype=float)
    best = 0.0
    for lam in np.linspace(0.0, 0.5 * p.beta / n, 202)[1:-1]:
        best = min(best, -lam * m + float(cgf_array(p, lam * weights).sum()))
    return math.exp(best)


def delta_series_check(params: ModelParams, l_star: int = 200) -> DeltaSeriesResult:
    """Compare ``delta_2`` with ``sum_{L=2}^{L*} Ẑ°_L e^{-beta L}`` and bound the remainder.

    The remainder splits by the length ``t`` of the bead itself. Beads with ``t <= L*``
    contribute ``z_t e^{-beta (L*-t+1)} / (1 - e^{-beta})`` through longer zero
    prefixes, computed exactly. For ``t > L*`` the single-bead weights
    ``z_t = Z°_t e^{-beta t}`` are bounded through the excursion representation: the
    excursion of ``N+1`` steps must have area above ``L* - N``, a Chernoff bound for
    ``N <= L*/2``, and ``Gamma^N`` alone beyond.
    """
    p = _params(params)
    if not p.beta > BETA_C:
        raise DomainError(f"needs beta > beta_c = {BETA_C!r}, got {p.beta!r}")
    beta = p.beta
    Ls = np.arange(l_star + 1)
    circ = stretch_dp(p, l_star, "circ").log_values
    hat_log, _ = hat_bar_from_circ(circ)
    partial = math.fsum(np.exp(hat_log[2:] - beta * Ls[2:]))

    em = math.exp(-beta)
    z = np.exp(circ - beta * Ls)
    exact_part = math.fsum(z[t] * em ** (l_star - t + 1) for t in range(2, l_star + 1)) / (1.0 - em)
    gamma = p.gamma_beta
    half = l_star // 2
    long_beads = sum(gamma**N * _area_tail_bound(p, N + 1, l_star + 1 - N) for N in range(1, half + 1))
    long_beads += gamma ** (half + 1) / (1.0 - gamma)
    long_beads *= 2.0 * p.c_beta
    remainder = exact_part + long_beads * (0.5 + em / (1.0 - em))
    return DeltaSeriesResult(delta_coeffs(p).delta2, partial, remainder, l_star)


def _area_index(n: int, q) -> int:
    k = Fraction(q).limit_denominator(10**9) * n * n if isinstance(q, float) else Fraction(q) * n * n
    if isinstance(q, float) and abs(float(k) - q * n * n) > 1e-9 * max(1.0, q * n * n):
        k = Fraction(q * n * n)
    if k.denominator != 1:
        raise DomainError(f"q n^2 must be an integer, got q={q!r}, n={n}")
    return int(k)


def llt_ratio(params: ModelParams, n: int, q) -> float:
    """``n^2 P(V_{n, q n^2}) e^{n psi(q)} / C_{beta,q}``; tends to 1 as ``n`` grows."""
    p = _params(params)
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    k = _area_index(n, q)
    if k < 1:
        raise DomainError(f"q n^2 must be positive, got {k}")
    qf = float(q)
    prob = excursion_table(p, n, k)[k]
    pt = rate_point(p, qf)
    return n * n * prob * math.exp(n * pt.psi) / c_prefactor(p, qf)


@dataclass(frozen=True)
class AsymptoticsFit:
    sqrt_coeff: float
    log_slope: float
    intercept: float
    rms_residual: float


def asymptotics_fit(params: ModelParams, l_min: int, l_max: int) -> AsymptoticsFit:
    """Least squares of ``log Z_L - beta L`` against ``c1 sqrt(L) + g log(L) + c0``."""
    p = _params(params)
    if not p.beta > BETA_C:
        raise DomainError(f"needs beta > beta_c = {BETA_C!r}, got {p.beta!r}")
    if l_max - l_min < MIN_FIT_WINDOW:
        raise np.linalg.LinAlgError(
            f"fit window [{l_min}, {l_max}] is too short to separate the terms; need at least {MIN_FIT_WINDOW}")
    if l_min < 1:
        raise ValueError(f"l_min must be positive, got {l_min}")
    series = stretch_dp(p, l_max, "full").log_values
    Ls = np.arange(l_min, l_max + 1, dtype=float)
    y = series[l_min:] - p.beta * Ls
    design = np.column_stack([np.sqrt(Ls), np.log(Ls), np.ones_like(Ls)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return AsymptoticsFit(float(coef[0]), float(coef[1]), float(coef[2]),
                          float(np.sqrt(np.mean(resid**2))))
