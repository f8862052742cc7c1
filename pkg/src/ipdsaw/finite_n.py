"""Finite-``n`` counterparts of the area-tilt potential and their distance to the continuum."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .continuum import big_g, h_tilde
from .laplace import DomainError, ModelParams, _params, cgf_array
from .numerics import increasing_root


def _weights(n: int) -> np.ndarray:
    # step i of n is tilted by (h/2)(1 - (2i-1)/n)
    i = np.arange(1, n + 1, dtype=float)
    return 0.5 * (1.0 - (2.0 * i - 1.0) / n)


def _check(p: ModelParams, n: int, h) -> None:
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n!r}")
    limit = n * p.beta / (n - 1)
    if np.any(np.abs(np.asarray(h)) >= limit):
        raise DomainError(f"|h| must stay below n beta / (n-1) = {limit!r}")


def g_n(params: ModelParams, n: int, h: float, order: int = 0) -> float:
    """``G_n(h) = (1/n) sum_i L((h/2)(1 - (2i-1)/n))`` or a derivative (order <= 2)."""
    p = _params(params)
    _check(p, n, h)
    w = _weights(n)
    vals = cgf_array(p, h * w, order)
    if order:
        vals = vals * w**order
    return math.fsum(vals) / n


def g_n_grid(params: ModelParams, n: int, hs, order: int = 0) -> np.ndarray:
    """:func:`g_n` on an array of tilts."""
    p = _params(params)
    hs = np.asarray(hs, dtype=float)
    _check(p, n, hs)
    w = _weights(n)
    vals = cgf_array(p, np.outer(hs, w), order)
    if order:
        vals = vals * w**order
    return vals.sum(axis=1) / n


def h_n_q(params: ModelParams, n: int, q: float) -> float:
    """Unique ``h`` with ``G_n'(h) = q``."""
    p = _params(params)
    if not q > 0:
        raise DomainError(f"q must be positive, got {q!r}")
    _check(p, n, 0.0)
    limit = n * p.beta / (n - 1)
    return increasing_root(lambda h: g_n(p, n, h, 1), lambda h: g_n(p, n, h, 2), q,
                           0.0, limit, tol=1e-12)


def psi_nh(params: ModelParams, n: int, h: float, a: int, x: int) -> float:
    """Log-density of the ``h``-tilted ``n``-step law at area ``a`` and endpoint ``x``."""
    p = _params(params)
    return h * a / n - 0.5 * h * (1.0 - 1.0 / n) * x - n * g_n(p, n, h)


@dataclass(frozen=True)
class GapRow:
    n: int
    sup_gap: float
    scaled_gap: float  # n^2 * sup_gap


def em_gap_scan(params: ModelParams, n_list, K: float, order: int = 0,
                step: float = 1e-3) -> list[GapRow]:
    """Sup over ``[-beta+K, beta-K]`` of ``|G_n^(order) - G^(order)|`` for each ``n``."""
    p = _params(params)
    if not 0.0 < K < p.beta:
        raise DomainError(f"K must lie in (0, beta), got {K!r}")
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    m = int(round((2.0 * (p.beta - K)) / step))
    hs = np.linspace(-p.beta + K, p.beta - K, m + 1)
    cont = np.array([big_g(p, float(h), order) for h in hs])
    rows = []
    for n in n_list:
        disc = g_n_grid(p, int(n), hs, order)
        gap = float(np.max(np.abs(disc - cont)))
        rows.append(GapRow(int(n), gap, n * n * gap))
    return rows


def h_gap_scan(params: ModelParams, n_list, q: float) -> list[GapRow]:
    """``|h_n^q - h_tilde(q)|`` for each ``n``."""
    p = _params(params)
    target = h_tilde(p, q)
    rows = []
    for n in n_list:
        gap = abs(h_n_q(p, int(n), q) - target)
        rows.append(GapRow(int(n), gap, n * n * gap))
    return rows
