"""Continuum rate function of large positive excursions and the collapsed-phase constants.

All integrals run over ``v`` in ``[0, 1/2]`` with the step CGF evaluated at
``t = h (1/2 - v)``. Tilts are carried internally as the gap ``s = beta - |h|``:
for large normalized areas ``q`` the solving tilt lies closer to ``beta`` than a
double can resolve, while ``s`` itself stays representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .laplace import (
    BETA_C,
    DomainError,
    ModelParams,
    _params,
    cgf_edge,
    delta_coeffs,
    kappa,
    zeta_beta,
)
from .numerics import ConvergenceError, integrate, increasing_root

QUAD_TOL = 1e-13
# the largest -log(gap) the tilt solver will try; L'' ~ gap^-2 must stay finite
_MAX_LOG_INV_GAP = 300.0


def _grading(h: float, gap: float) -> list[float]:
    # the integrands vary on the scale v ~ gap / h near v = 0
    if h <= 0.0 or gap > 1e-2 * h:
        return []
    v = 0.5 * gap / h
    points = []
    while v < 0.5:
        points.append(v)
        v *= 2.0
    return points


@lru_cache(maxsize=65536)
def _moment(beta: float, gap: float, cgf_order: int, power: int) -> float:
    """``2 * int_0^{1/2} (1/2 - v)^power L^(cgf_order)(h (1/2 - v)) dv`` with ``h = beta - gap``."""
    p = ModelParams(beta)
    h = beta - gap

    def f(v):
        near = h * v + 0.5 * gap
        vals = cgf_edge(p, near, beta - near, cgf_order)
        return vals * (0.5 - v) ** power if power else vals

    # the relative term keeps tiny graded panels from demanding sub-rounding accuracy
    return 2.0 * integrate(f, 0.0, 0.5, QUAD_TOL, rtol=1e-15, breakpoints=_grading(h, gap))


def _check_h(p: ModelParams, h: float) -> None:
    if not abs(h) < p.beta:
        raise DomainError(f"h={h!r} must satisfy |h| < beta = {p.beta!r}")


def big_g(params: ModelParams, h: float, order: int = 0) -> float:
    """Area-tilt potential ``G(h) = int_0^1 L(h (1/2 - x)) dx`` or its first two derivatives."""
    p = _params(params)
    _check_h(p, h)
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order!r}")
    gap = p.beta - abs(h)
    value = _moment(p.beta, gap, order, order)
    return math.copysign(value, h) if order == 1 else value


def _big_g_at_gap(beta: float, gap: float, order: int) -> float:
    return _moment(beta, gap, order, order)


@dataclass(frozen=True)
class RateFunctionPoint:
    q: float
    h_tilde: float
    psi: float
    psi_prime: float
    # beta - h_tilde, exact even where h_tilde rounds to beta
    gap: float


@lru_cache(maxsize=4096)
def _solve_gap(beta: float, q: float) -> float:
    def first(y):
        return _big_g_at_gap(beta, math.exp(-y), 1)

    def slope(y):
        gap = math.exp(-y)
        return gap * _big_g_at_gap(beta, gap, 2)

    y_lo = -math.log(beta)  # gap = beta, i.e. h = 0, where G' = 0 < q
    y_hi = max(y_lo + 1.0, 1.0)
    while first(y_hi) <= q:
        if y_hi >= _MAX_LOG_INV_GAP:
            raise ConvergenceError(f"q={q!r} needs a tilt closer to beta than double precision allows")
        y_lo, y_hi = y_hi, min(2.0 * y_hi, _MAX_LOG_INV_GAP)
    y = increasing_root(first, slope, q, y_lo, y_hi, tol=1e-12)
    return math.exp(-y)


def h_tilde(params: ModelParams, q: float) -> float:
    """Tilt ``h`` in ``(0, beta)`` with ``G'(h) = q``."""
    return rate_point(params, q).h_tilde


def rate_point(params: ModelParams, q: float) -> RateFunctionPoint:
    """Rate function value, slope and solving tilt at normalized area ``q``."""
    p = _params(params)
    q = float(q)
    if not q > 0.0:
        raise DomainError(f"q must be positive, got {q!r}")
    gap = _solve_gap(p.beta, q)
    h = p.beta - gap
    psi = q * h - _big_g_at_gap(p.beta, gap, 0)
    return RateFunctionPoint(q=q, h_tilde=h, psi=psi, psi_prime=h, gap=gap)


psi_tilde = rate_point


def psi_second(params: ModelParams, q: float) -> float:
    """``psi''(q) = 1 / G''(h_tilde(q))`` by differentiating the inverse function."""
    p = _params(params)
    gap = rate_point(p, q).gap
    return 1.0 / _big_g_at_gap(p.beta, gap, 2)


def lg_relation_residual(params: ModelParams, q: float) -> float:
    """``L(h/2) - q h - G(h)`` at ``h = h_tilde(q)``; vanishes identically."""
    p = _params(params)
    pt = rate_point(p, q)
    near = 0.5 * pt.gap
    l_half = float(cgf_edge(p, near, p.beta - near, 0))
    return l_half - q * pt.h_tilde - _big_g_at_gap(p.beta, pt.gap, 0)


def _vartheta_gap(beta: float, gap: float) -> float:
    # L'' is even, so the first moment of the weight L''(h(x - 1/2)) on [0, 1] is half
    # its mass and the determinant collapses to mass * (second central moment)
    return _moment(beta, gap, 2, 0) * _moment(beta, gap, 2, 2)


def vartheta(params: ModelParams, h: float) -> float:
    """Determinant of the covariance of (area, endpoint) under the continuum tilt."""
    p = _params(params)
    _check_h(p, h)
    return _vartheta_gap(p.beta, p.beta - abs(h))


def c_prefactor(params: ModelParams, q: float) -> float:
    """Local-limit prefactor ``kappa(h/2)^2 / (2 pi sqrt(vartheta(h)))`` at ``h = h_tilde(q)``."""
    p = _params(params)
    pt = rate_point(p, q)
    k = kappa(p, 0.5 * pt.h_tilde)
    return k * k / (2.0 * math.pi * math.sqrt(_vartheta_gap(p.beta, pt.gap)))


def _require_strictly_collapsed(p: ModelParams) -> None:
    if not p.beta > BETA_C:
        raise DomainError(f"needs beta > beta_c = {BETA_C!r}, got {p.beta!r}")


def g_tilde(params: ModelParams, x: float, order: int = 0) -> float:
    """Horizontal-extension objective ``x log(Gamma) - x psi(x^-2)`` and its derivatives."""
    p = _params(params)
    _require_strictly_collapsed(p)
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x!r}")
    q = x**-2
    pt = rate_point(p, q)
    log_gamma = math.log(p.gamma_beta)
    if order == 0:
        return x * (log_gamma - pt.psi)
    if order == 1:
        return log_gamma - pt.psi + 2.0 * q * pt.psi_prime
    if order == 2:
        psi2 = 1.0 / _big_g_at_gap(p.beta, pt.gap, 2)
        return -2.0 * x**-3 * (pt.psi_prime + 2.0 * q * psi2)
    raise ValueError(f"order must be 0, 1 or 2, got {order!r}")


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@lru_cache(maxsize=256)
def _a_beta(beta: float, lo: float, hi: float) -> float:
    p = ModelParams(beta)
    # g_tilde' -> +inf as x -> 0, so only the upper end needs a sign check
    while g_tilde(p, hi, 1) >= 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6:
            raise ConvergenceError("no maximizer of g_tilde found below x = 1e6")
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = g_tilde(p, c), g_tilde(p, d)
    while b - a > 1e-3:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = g_tilde(p, c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = g_tilde(p, d)
    # g_tilde' is decreasing; find its zero
    return increasing_root(lambda x: -g_tilde(p, x, 1), lambda x: -g_tilde(p, x, 2), 0.0,
                           a, b, bisect_width=1e-3, tol=1e-13)


def a_beta(params: ModelParams, bracket: tuple[float, float] = (1e-3, 50.0)) -> float:
    """Unique maximizer of :func:`g_tilde` on ``(0, inf)``."""
    p = _params(params)
    _require_strictly_collapsed(p)
    return _a_beta(p.beta, float(bracket[0]), float(bracket[1]))


@dataclass(frozen=True)
class CollapsedConstants:
    beta: float
    a_beta: float
    g_tilde_max: float
    g_tilde_second: float
    c_prefactor: float
    psi_prime: float
    k_circ: float
    k_hat: float
    k_bar: float
    k_beta: float
    k_beta_route_a: float
    k_beta_route_b: float

    @property
    def route_gap(self) -> float:
        return abs(self.k_beta_route_a - self.k_beta_route_b) / self.k_beta_route_a


def k_constants(params: ModelParams) -> CollapsedConstants:
    """Prefactors of the single-bead, extended-bead and full partition functions.

    ``k_beta`` is assembled twice: directly from the saddle data, and through the
    renewal sum over beads using the bead generating functions.
    """
    p = _params(params)
    _require_strictly_collapsed(p)
    beta = p.beta
    a = a_beta(p)
    q = a**-2
    pt = rate_point(p, q)
    g_max = g_tilde(p, a, 0)
    g2 = g_tilde(p, a, 2)
    cq = c_prefactor(p, q)
    saddle = math.sqrt(2.0 * math.pi) * cq * math.exp(pt.psi_prime) / (a * a * math.sqrt(abs(g2)))
    em = math.exp(-beta)
    k_circ = 2.0 * math.exp(beta) * saddle
    k_hat = k_circ * (1.0 + em) / (2.0 * (1.0 - em))
    k_bar = k_circ / (1.0 - em)

    bracket = (1.0 + em) * math.exp(zeta_beta(p)) - math.exp(0.5 * beta) * (1.0 - em)
    route_a = 2.0 * saddle / bracket**2
    d = delta_coeffs(p)
    route_b = (k_bar / (1.0 - d.delta2) + k_hat * d.delta1 / (1.0 - d.delta2) ** 2) / (1.0 - em)
    gap = abs(route_a - route_b) / route_a
    if gap > 1e-6:
        raise ArithmeticError(f"K_beta routes disagree at beta={beta!r}: relative gap {gap:.3e}")
    return CollapsedConstants(
        beta=beta, a_beta=a, g_tilde_max=g_max, g_tilde_second=g2, c_prefactor=cq,
        psi_prime=pt.psi_prime, k_circ=k_circ, k_hat=k_hat, k_bar=k_bar, k_beta=route_a,
        k_beta_route_a=route_a, k_beta_route_b=route_b,
    )
