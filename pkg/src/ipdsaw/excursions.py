"""Probabilities of positive excursions with prescribed area under the step law.

``P(V_{n,k})`` is the probability that the walk from 0 satisfies ``X_i > 0`` for
``0 < i < n``, ``X_n = 0`` and ``X_1 + ... + X_n = k``. A forward sweep carries the
sub-probability ``W_i(x, a)`` of ``X_1..X_i > 0`` with ``X_i = x`` and area ``a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .budget import check_budget
from .laplace import ModelParams, _params


@dataclass(frozen=True)
class ExcursionTable:
    """``probabilities[k] = P(V_{n,k})`` for ``k <= area_cap``.

    ``tail_bound`` bounds the total mass discarded by the height cap up to step ``n``.
    """

    beta: float
    n: int
    area_cap: int
    height_cap: int
    probabilities: np.ndarray
    tail_bound: float

    def __getitem__(self, k: int) -> float:
        return float(self.probabilities[k])

    @property
    def exact(self) -> bool:
        return self.height_cap >= self.area_cap


def default_height_cap(beta: float, area_cap: int) -> int:
    return min(area_cap, int(12.0 / beta * math.sqrt(area_cap) + 50))


def _validate(n: int, area_cap: int, height_cap: int) -> None:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if area_cap < 1 or height_cap < 1:
        raise ValueError(f"caps must be positive, got area_cap={area_cap}, height_cap={height_cap}")


def excursion_sweep(params: ModelParams, n_max: int, area_cap: int,
                    height_cap: int | None = None) -> list[ExcursionTable]:
    """Excursion tables for every ``n = 1..n_max`` from one forward sweep."""
    p = _params(params)
    n_max, area_cap = int(n_max), int(area_cap)
    height_cap = default_height_cap(p.beta, area_cap) if height_cap is None else int(height_cap)
    _validate(n_max, area_cap, height_cap)
    height_cap = min(height_cap, area_cap)  # a positive path's height never exceeds its area
    H, A = height_cap, area_cap
    check_budget(4 * 8 * (H + 2) * (A + 1), f"excursion table {H}x{A}")

    rho = p.decay
    c = p.c_beta
    heights = np.arange(H + 1)
    return_weight = rho ** heights / c  # p(-x)
    return_weight[0] = 0.0
    # P(step >= d) = rho^d / (c (1 - rho)) for d >= 1
    tail_coef = 1.0 / (c * (1.0 - rho))

    tables = [ExcursionTable(p.beta, 1, A, H, _column(A, {0: 1.0 / c}), 0.0)]
    if n_max == 1:
        return tables

    w = np.zeros((H + 1, A + 1))
    w[heights[1:], heights[1:]] = rho ** heights[1:] / c
    pruned = 0.0
    if A > H:
        # first steps above the cap that could still close within the area cap
        pruned += math.fsum(rho ** y / c for y in range(H + 1, A + 1))

    for n in range(2, n_max + 1):
        # close the excursion: W_{n-1}(x, k) p(-x)
        probs = return_weight @ w
        tables.append(ExcursionTable(p.beta, n, A, H, probs, pruned))
        if n == n_max:
            break
        # mass about to jump above H from states that could still end inside the area cap
        live = A - H - 1
        if live >= 0:
            row_mass = w[:, :live + 1].sum(axis=1)
            pruned += float(np.dot(row_mass[1:], rho ** (H + 1 - heights[1:]))) * tail_coef
        w = _step(w, rho, c)
    return tables


def _column(A: int, entries: dict[int, float]) -> np.ndarray:
    col = np.zeros(A + 1)
    for k, v in entries.items():
        col[k] = v
    return col


def _step(w: np.ndarray, rho: float, c: float) -> np.ndarray:
    """One step of the walk restricted to heights ``1..H``, adding the new height to the area."""
    H = w.shape[0] - 1
    A = w.shape[1] - 1
    # s(y) = sum_x w(x) rho^|y-x| via a forward pass over x < y and a backward pass over x >= y
    below = np.zeros_like(w)
    at_or_above = np.zeros_like(w)
    for y in range(2, H + 1):
        below[y] = rho * (below[y - 1] + w[y - 1])
    at_or_above[H] = w[H]
    for y in range(H - 1, 0, -1):
        at_or_above[y] = w[y] + rho * at_or_above[y + 1]
    s = (below + at_or_above) / c
    out = np.zeros_like(w)
    for y in range(1, min(H, A) + 1):
        out[y, y:] = s[y, :A + 1 - y]
    return out


def excursion_table(params: ModelParams, n: int, area_cap: int,
                    height_cap: int | None = None) -> ExcursionTable:
    """``P(V_{n,k})`` for ``k <= area_cap`` with heights pruned above ``height_cap``."""
    return excursion_sweep(params, n, area_cap, height_cap)[-1]
