"""Discrete Laplace step law, its exponential tilts and the closed-form scalars.

The step law puts mass ``exp(-beta |k| / 2) / c_beta`` on every integer ``k``.
Everything here is a pure function of ``beta`` (and a tilt ``h``), evaluated in
double precision from closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


@dataclass(frozen=True)
class ModelParams:
    """Inverse temperature together with the derived normalizer and growth ratio."""

    beta: float
    c_beta: float = field(init=False)
    gamma_beta: float = field(init=False)

    def __post_init__(self):
        beta = float(self.beta)
        if not (beta > 0 and math.isfinite(beta)):
            raise DomainError(f"beta must be a positive finite number, got {self.beta!r}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "c_beta", c_of(beta))
        object.__setattr__(self, "gamma_beta", c_of(beta) * math.exp(-beta))

    @property
    def decay(self) -> float:
        """Ratio ``exp(-beta/2)`` between the masses of ``k`` and ``k+1`` for ``k >= 0``."""
        return math.exp(-0.5 * self.beta)


def c_of(beta: float) -> float:
    """Normalizer ``sum_k exp(-beta |k| / 2)``."""
    return (1.0 + math.exp(-0.5 * beta)) / -math.expm1(-0.5 * beta)


def _params(params: ModelParams | float) -> ModelParams:
    return params if isinstance(params, ModelParams) else ModelParams(params)


def step_pmf(params: ModelParams, k: int) -> float:
    """Probability that one step equals ``k``."""
    p = _params(params)
    return math.exp(-0.5 * p.beta * abs(k)) / p.c_beta


def step_log_pmf(params: ModelParams, k: int) -> float:
    p = _params(params)
    return -0.5 * p.beta * abs(k) - math.log(p.c_beta)


def _check_tilt(p: ModelParams, h: float) -> None:
    if not abs(h) < 0.5 * p.beta:
        raise DomainError(f"tilt h={h!r} must satisfy |h| < beta/2 = {0.5 * p.beta!r}")


def cgf(params: ModelParams, h: float, order: int = 0) -> float:
    """Log-moment generating function of one step and its first two derivatives.

    With ``a = exp(-beta/2)`` the moment generating function factorizes as
    ``(1-a)^2 / ((1 - a e^h)(1 - a e^-h))``, which gives

        L(h)   = 2 log(1-a) - log(1 - a e^h) - log(1 - a e^-h)
        L'(h)  = a e^h / (1 - a e^h) - a e^-h / (1 - a e^-h)
        L''(h) = a e^h / (1 - a e^h)^2 + a e^-h / (1 - a e^-h)^2
    """
    p = _params(params)
    _check_tilt(p, h)
    half = 0.5 * p.beta
    # u = a e^h and v = a e^-h, both in (0, 1) on the domain
    u = math.exp(h - half)
    v = math.exp(-h - half)
    if order == 0:
        return 2.0 * math.log1p(-math.exp(-half)) - math.log1p(-u) - math.log1p(-v)
    # 1 - u computed as -expm1(h - beta/2) keeps accuracy near the domain edge
    one_u = -math.expm1(h - half)
    one_v = -math.expm1(-h - half)
    if order == 1:
        return u / one_u - v / one_v
    if order == 2:
        return u / one_u**2 + v / one_v**2
    raise ValueError(f"order must be 0, 1 or 2, got {order!r}")


def cgf_array(params: ModelParams, h, order: int = 0) -> np.ndarray:
    """Vectorized :func:`cgf` for quadrature integrands; no domain check."""
    p = _params(params)
    h = np.asarray(h, dtype=float)
    half = 0.5 * p.beta
    u = np.exp(h - half)
    v = np.exp(-h - half)
    if order == 0:
        return 2.0 * math.log1p(-math.exp(-half)) - np.log1p(-u) - np.log1p(-v)
    one_u = -np.expm1(h - half)
    one_v = -np.expm1(-h - half)
    if order == 1:
        return u / one_u - v / one_v
    if order == 2:
        return u / one_u**2 + v / one_v**2
    raise ValueError(f"order must be 0, 1 or 2, got {order!r}")


def cgf_edge(params: ModelParams, near, far, order: int = 0) -> np.ndarray:
    """:func:`cgf` at ``t`` given ``near = beta/2 - |t|`` and ``far = beta/2 + |t|``.

    Passing the distances to the two poles directly avoids the cancellation in
    ``beta/2 - t`` when ``t`` is within a few ulps of the edge. Order 1 returns
    ``L'(|t|)``; callers restore the sign for negative ``t``.
    """
    p = _params(params)
    near = np.asarray(near, dtype=float)
    far = np.asarray(far, dtype=float)
    if order == 0:
        return (2.0 * math.log1p(-math.exp(-0.5 * p.beta))
                - np.log(-np.expm1(-near)) - np.log(-np.expm1(-far)))
    if order == 1:
        return 1.0 / np.expm1(near) - 1.0 / np.expm1(far)
    if order == 2:
        # e^D / (e^D - 1)^2 written as 1 / (4 sinh^2(D/2))
        return 0.25 / np.sinh(0.5 * near) ** 2 + 0.25 / np.sinh(0.5 * far) ** 2
    raise ValueError(f"order must be 0, 1 or 2, got {order!r}")


def tilted_pmf(params: ModelParams, h: float, k: int) -> float:
    """Mass of ``k`` under the step law tilted by ``exp(h k - L(h))``."""
    p = _params(params)
    return math.exp(h * k - cgf(p, h) + step_log_pmf(p, k))


def beta_c(tol: float = 1e-15, max_iter: int = 100) -> float:
    """Critical inverse temperature, where ``c_beta = exp(beta)``.

    ``x = exp(beta_c / 2)`` is the real root of ``x^3 - x^2 - x - 1``; Newton from x=2.
    """
    x = 2.0
    for _ in range(max_iter):
        f = ((x - 1.0) * x - 1.0) * x - 1.0
        df = (3.0 * x - 2.0) * x - 1.0
        step = f / df
        x -= step
        if abs(step) <= tol * x:
            break
    return 2.0 * math.log(x)


BETA_C = beta_c()


def gamma_beta(params: ModelParams | float) -> float:
    return _params(params).gamma_beta


def kappa(params: ModelParams, h: float) -> float:
    """Probability that the ``h``-tilted walk started at 0 stays positive forever."""
    p = _params(params)
    if not 0.0 <= h < 0.5 * p.beta:
        raise DomainError(f"kappa needs 0 <= h < beta/2, got h={h!r}")
    return math.expm1(2.0 * h) / math.expm1(h + 0.5 * p.beta)


def _at_critical(beta: float) -> bool:
    # zeta has a square-root singularity at beta_c: one ulp of beta moves it by ~1e-8,
    # so inputs within a few ulps of BETA_C are taken to be beta_c itself
    return abs(beta - BETA_C) <= 4.0 * math.ulp(BETA_C)


def _require_collapsed(p: ModelParams, name: str) -> None:
    if p.beta < BETA_C and not _at_critical(p.beta):
        raise DomainError(f"{name} is only defined for beta >= beta_c = {BETA_C!r}, got {p.beta!r}")


def _cosh_zeta_excess(p: ModelParams) -> float:
    # cosh(zeta) - 1 = (1-a)(1-a-a^2-a^3) / (2a), accurate near beta_c where it vanishes
    if _at_critical(p.beta):
        return 0.0
    a = math.exp(-0.5 * p.beta)
    return -math.expm1(-0.5 * p.beta) * (1.0 - a * (1.0 + a * (1.0 + a))) / (2.0 * a)


def zeta_beta(params: ModelParams) -> float:
    """Root ``zeta`` in ``[0, beta/2)`` of ``L(-zeta) = -log(Gamma_beta)``.

    Equals ``arccosh(exp(-beta/2) cosh(beta))``, evaluated through ``cosh(zeta) - 1``.
    """
    p = _params(params)
    _require_collapsed(p, "zeta_beta")
    excess = _cosh_zeta_excess(p)
    return math.log1p(excess + math.sqrt(excess * (excess + 2.0)))


def r_beta(params: ModelParams) -> float:
    """``E[1{X_1>0} 1{X_rho=0} Gamma^rho]`` with rho the first time the walk is <= 0.

    Equals ``1 - e^-beta - e^{-beta/2 + zeta}``. That difference cancels badly for large
    beta; with ``a = e^{-beta/2}`` and ``e = cosh(zeta) - 1`` it is rewritten as
    ``a^6 / (X + a sqrt(e (e + 2)))`` with ``X = (1 - 2a^2 - a^4) / 2``, a sum of
    positive terms.
    """
    p = _params(params)
    _require_collapsed(p, "r_beta")
    a = math.exp(-0.5 * p.beta)
    excess = _cosh_zeta_excess(p)
    a2 = a * a
    x = 0.5 * (1.0 - a2 * (2.0 + a2))
    return a2 * a2 * a2 / (x + a * math.sqrt(excess * (excess + 2.0)))


@dataclass(frozen=True)
class DeltaCoeffs:
    delta1: float
    delta2: float


def delta_coeffs(params: ModelParams) -> DeltaCoeffs:
    """Generating functions of the first and subsequent extended beads at ``z = e^-beta``."""
    p = _params(params)
    r = r_beta(p)
    delta1 = 2.0 * math.exp(p.beta) * r / -math.expm1(-p.beta)
    delta2 = math.exp(p.beta) * c_of(2.0 * p.beta) * r
    return DeltaCoeffs(delta1, delta2)
