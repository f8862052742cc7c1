"""Partition functions by a transfer-matrix DP over stretches.

States are (consumed length ``l``, magnitude ``m`` of the last stretch). The two signs
are symmetric, so only positive last stretches are stored and sign changes are
tracked as same/opposite transitions. The opposite-sign kernel ``exp(beta min(m, m'))``
splits into a prefix sum of ``exp(F + beta m)`` over ``m <= m'`` plus ``exp(beta m')``
times a suffix sum over ``m > m'``, which makes the whole sweep ``O(l_max^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .budget import check_budget
from .laplace import ModelParams, _params
from .logweight import LogWeight
from .numerics import logsumexp
from .polymer import contact

VARIANTS = ("full", "circ", "hat_circ", "bar_circ", "c_end")
LOG2 = math.log(2.0)
EXACT_MAX_LENGTH = 30


@dataclass(frozen=True)
class StretchTable:
    """Forward DP weights, kept for backward sampling.

    ``log_f[l, m]`` is the log weight of prefixes of length ``l`` whose last stretch is
    ``+m`` (``m >= 1``); ``log_g[l]`` the same for prefixes ending with a zero stretch.
    The ``circ`` table admits only alternating nonzero stretches and has no ``log_g``.
    """

    beta: float
    l_max: int
    circ: bool
    log_f: np.ndarray
    log_g: np.ndarray


@dataclass(frozen=True)
class PartitionSeries:
    """``log Z_L`` of one variant for ``L = 0..l_max``; index 0 holds ``-inf``."""

    beta: float
    variant: str
    log_values: np.ndarray

    @property
    def l_max(self) -> int:
        return len(self.log_values) - 1

    def __getitem__(self, L: int) -> LogWeight:
        return LogWeight(float(self.log_values[L]))

    def __len__(self) -> int:
        return len(self.log_values)

    @property
    def values(self) -> list[LogWeight]:
        return [LogWeight(float(v)) for v in self.log_values]


def stretch_table(params: ModelParams, l_max: int, circ: bool = False) -> StretchTable:
    p = _params(params)
    l_max = int(l_max)
    if l_max < 1:
        raise ValueError(f"l_max must be at least 1, got {l_max}")
    # the table plus a few row-sized temporaries
    check_budget(8 * (l_max + 1) ** 2 + 64 * (l_max + 1), f"stretch table up to L={l_max}")
    beta = p.beta
    f = np.full((l_max + 1, l_max + 1), -np.inf)
    g = np.full(l_max + 1, -np.inf)
    mags = np.arange(l_max + 1)
    bm = beta * mags
    # a first stretch of magnitude m consumes m + 1
    f[mags[2:], mags[1:-1]] = 0.0
    if not circ:
        g[1] = 0.0
    with np.errstate(invalid="ignore"):
        for l in range(1, l_max):
            row = f[l]
            top = l_max - l - 1
            same = logsumexp(row[1:l])
            if not circ:
                g[l + 1] = np.logaddexp(g[l + 1], np.logaddexp(g[l], LOG2 + same))
            if top < 1 or (circ and same == -np.inf):
                continue
            below = np.logaddexp.accumulate(row + bm)
            at_or_above = np.logaddexp.accumulate(row[::-1])[::-1]
            above = np.append(at_or_above[1:], -np.inf)
            opp = np.logaddexp(below, bm + above)[1:top + 1]
            if not circ:
                opp = np.logaddexp(opp, np.logaddexp(same, g[l]))
            targets = l + mags[1:top + 1] + 1
            cols = mags[1:top + 1]
            f[targets, cols] = np.logaddexp(f[targets, cols], opp)
    return StretchTable(beta=beta, l_max=l_max, circ=circ, log_f=f, log_g=g)


def _ending_nonzero(table: StretchTable) -> np.ndarray:
    out = np.full(table.l_max + 1, -np.inf)
    for L in range(1, table.l_max + 1):
        out[L] = LOG2 + logsumexp(table.log_f[L, 1:L])
    return out


def hat_bar_from_circ(log_circ: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Extended-bead series from the single-bead series.

    ``bar[L] = sum_{k>=0} circ[L-k]`` (leading zero stretches of any number) and
    ``hat[L] = circ[L]/2 + sum_{k>=1} circ[L-k]``: without leading zeros a bead must
    start with the same sign as the previous bead's last stretch, or the two would merge.
    """
    bar = np.logaddexp.accumulate(log_circ)
    hat = np.logaddexp(log_circ - LOG2, np.append(-np.inf, bar[:-1]))
    return hat, bar


def stretch_dp(params: ModelParams, l_max: int, variant: str = "full") -> PartitionSeries:
    """Partition function series ``log Z_L`` for ``L <= l_max`` of the requested variant."""
    p = _params(params)
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    circ = variant in ("circ", "hat_circ", "bar_circ")
    table = stretch_table(p, l_max, circ=circ)
    nonzero_end = _ending_nonzero(table)
    if variant == "full":
        values = np.logaddexp(table.log_g, nonzero_end)
    elif variant in ("circ", "c_end"):
        values = nonzero_end
    else:
        hat, bar = hat_bar_from_circ(nonzero_end)
        values = hat if variant == "hat_circ" else bar
    return PartitionSeries(beta=p.beta, variant=variant, log_values=values)


def _add_shifted(dst: dict[int, int], src: dict[int, int], shift: int) -> None:
    for e, c in src.items():
        dst[e + shift] = dst.get(e + shift, 0) + c


def exact_coefficients(l_max: int, variant: str = "full") -> list[dict[int, int]]:
    """Coefficient maps ``m -> count`` of ``Z_L = sum_m count e^{beta m}`` in integers.

    A direct ``O(l_max^3)`` sweep over signed stretches with no symmetry reduction; it
    shares no code with :func:`stretch_dp` and serves as its exact oracle.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if not 1 <= l_max <= EXACT_MAX_LENGTH:
        raise ValueError(f"exact mode needs 1 <= l_max <= {EXACT_MAX_LENGTH}, got {l_max}")
    circ = variant in ("circ", "hat_circ", "bar_circ")

    def stretches(budget):
        for mag in range(budget):
            if mag == 0:
                if not circ:
                    yield 0
            else:
                yield mag
                yield -mag

    states: dict[tuple[int, int], dict[int, int]] = {}
    for s in stretches(l_max):
        states[(abs(s) + 1, s)] = {0: 1}
    for l in range(1, l_max + 1):
        for (ll, s), poly in sorted((k, v) for k, v in states.items() if k[0] == l):
            for s2 in stretches(l_max - l):
                if circ and s * s2 >= 0:
                    continue
                key = (l + abs(s2) + 1, s2)
                _add_shifted(states.setdefault(key, {}), poly, contact(s, s2))

    out: list[dict[int, int]] = [{} for _ in range(l_max + 1)]
    for (l, s), poly in states.items():
        if variant == "full" or s != 0:
            _add_shifted(out[l], poly, 0)
    if variant in ("hat_circ", "bar_circ"):
        circ_maps = out
        out = [{} for _ in range(l_max + 1)]
        for L in range(l_max + 1):
            for k in range(L + 1):
                src = circ_maps[L - k]
                if k == 0 and variant == "hat_circ":
                    # single-bead counts are even by the sign flip
                    src = {e: c // 2 for e, c in src.items()}
                _add_shifted(out[L], src, 0)
    return [dict(sorted((e, c) for e, c in d.items() if c)) for d in out]


def evaluate_coefficients(coeffs: dict[int, int], beta: float) -> LogWeight:
    """``log sum_m count e^{beta m}``."""
    if not coeffs:
        return LogWeight.zero()
    return LogWeight(logsumexp([math.log(c) + beta * m for m, c in coeffs.items()]))
