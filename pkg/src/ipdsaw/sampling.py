"""Exact Boltzmann sampling of trajectories and Monte Carlo checks of the escape constants.

Randomness comes from numpy's PCG64 generator. Monte Carlo work is split into fixed-size
chunks, each with its own stream spawned from ``SeedSequence(seed)``, so results depend
only on the seed and the sample count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .laplace import BETA_C, DomainError, ModelParams, _params, cgf
from .polymer import Trajectory
from .transfer import stretch_table

MC_CHUNK = 1 << 17


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def _chunk_rngs(seed: int, n: int):
    n_chunks = -(-n // MC_CHUNK)
    children = np.random.SeedSequence(int(seed)).spawn(n_chunks)
    for i, child in enumerate(children):
        size = min(MC_CHUNK, n - i * MC_CHUNK)
        yield size, np.random.Generator(np.random.PCG64(child))


@dataclass(frozen=True)
class SampleBatch:
    beta: float
    L: int
    seed: int
    trajectories: tuple[Trajectory, ...]

    def __len__(self) -> int:
        return len(self.trajectories)


def _draw(rng: np.random.Generator, cdf: np.ndarray) -> int:
    return int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))


def sample_polymer(params: ModelParams, L: int, count: int, seed: int) -> SampleBatch:
    """``count`` independent draws from the polymer measure ``e^{beta H} / Z_L``.

    The final stretch is drawn by its terminal weight; each earlier stretch is drawn
    from the DP weights of the prefix times the transition weight into the stretch
    already chosen.
    """
    p = _params(params)
    L, count = int(L), int(count)
    if L < 1:
        raise ValueError(f"L must be positive, got {L}")
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    table = stretch_table(p, L)
    f, g, beta = table.log_f, table.log_g, p.beta

    def to_cdf(logw: np.ndarray) -> np.ndarray:
        return np.cumsum(np.exp(logw - logw.max()))

    # terminal states: [zero, +1..+(L-1), -1..-(L-1)]
    terminal = to_cdf(np.concatenate(([g[L]], f[L, 1:L], f[L, 1:L])))

    @lru_cache(maxsize=50_000)
    def predecessors(l: int, mag: int) -> np.ndarray:
        # predecessors of a +mag stretch: [zero, +1..+(l-1) same sign, -1..-(l-1) opposite]
        ms = np.arange(1, l)
        opp = f[l, 1:l] + beta * np.minimum(ms, mag)
        return to_cdf(np.concatenate(([g[l]], f[l, 1:l], opp)))

    rng = make_rng(seed)
    out = []
    for _ in range(count):
        idx = _draw(rng, terminal)
        s = 0 if idx == 0 else (idx if idx < L else -(idx - L + 1))
        stretches = [s]
        l = L
        while True:
            l -= abs(stretches[-1]) + 1
            if l == 0:
                break
            last = stretches[-1]
            if last == 0:
                cdf = predecessors(l, 0)
                flip = 1
            else:
                # mirror so the stretch already chosen is positive
                cdf = predecessors(l, abs(last))
                flip = 1 if last > 0 else -1
            idx = _draw(rng, cdf)
            if idx == 0:
                prev = 0
            elif idx < l:
                prev = flip * idx
            else:
                prev = -flip * (idx - l + 1)
            stretches.append(prev)
        out.append(Trajectory(stretches[::-1]))
    return SampleBatch(beta=p.beta, L=L, seed=int(seed), trajectories=tuple(out))


def write_batch(batch: SampleBatch, path) -> None:
    """One trajectory per line as comma-separated stretches, after a ``#`` header."""
    lines = [f"# beta={batch.beta!r} L={batch.L} seed={batch.seed} count={len(batch)}"]
    lines += [",".join(str(s) for s in t.stretches) for t in batch.trajectories]
    Path(path).write_text("\n".join(lines) + "\n")


def read_batch(path) -> SampleBatch:
    text = Path(path).read_text().splitlines()
    header = dict(item.split("=", 1) for item in text[0].lstrip("# ").split())
    trajs = tuple(Trajectory([int(x) for x in line.split(",")]) for line in text[1:] if line)
    return SampleBatch(beta=float(header["beta"]), L=int(header["L"]), seed=int(header["seed"]),
                       trajectories=trajs)


def tilted_steps(params: ModelParams, h: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Increments with law proportional to ``e^{h k - beta |k| / 2}`` by inverse CDF.

    Each side of zero is geometric with ratio ``u = e^{h - beta/2}`` (``k >= 0``) or
    ``v = e^{-h - beta/2}`` (``k < 0``).
    """
    p = _params(params)
    if not abs(h) < 0.5 * p.beta:
        raise DomainError(f"tilt h={h!r} must satisfy |h| < beta/2")
    log_u = h - 0.5 * p.beta
    log_v = -h - 0.5 * p.beta
    mass_pos = 1.0 / -math.expm1(log_u)
    mass_neg = math.exp(log_v) / -math.expm1(log_v)
    nonneg = rng.random(size) < mass_pos / (mass_pos + mass_neg)
    # 1 - U lies in (0, 1], so the logarithm is finite
    e = np.log1p(-rng.random(size))
    pos = np.floor(e / log_u)
    neg = -1.0 - np.floor(e / log_v)
    return np.where(nonneg, pos, neg).astype(np.int64)


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    std_error: float
    cap_bias_bound: float
    n_samples: int


def mc_kappa(params: ModelParams, h: float, n_samples: int, step_cap: int, seed: int) -> MCEstimate:
    """Fraction of ``h``-tilted walks from 0 that stay positive, with a bias bound.

    A walk is resolved as soon as it drops to ``<= 0`` (failure), reaches a height ``x``
    where ``e^{-2 h x} <= 1e-17`` (success), or survives ``step_cap`` steps (success).
    Since ``e^{-2h X}`` is a martingale under the tilt, a walk at height ``x`` ever
    returns with probability at most ``e^{-2hx}``; a walk alive after ``step_cap`` steps
    fails later with probability at most ``sum_{j > cap} P(X_j <= 0)``, bounded by
    ``sum_{j > cap} e^{-j L(h)}``.
    """
    p = _params(params)
    if not 0.0 < h < 0.5 * p.beta:
        raise DomainError(f"mc_kappa needs 0 < h < beta/2, got h={h!r}")
    if n_samples < 1 or step_cap < 1:
        raise ValueError("n_samples and step_cap must be positive")
    retire = math.ceil(17.0 * math.log(10.0) / (2.0 * h))
    survived = 0
    for size, rng in _chunk_rngs(seed, n_samples):
        x = np.zeros(size, dtype=np.int64)
        for _ in range(step_cap):
            x = x + tilted_steps(p, h, x.size, rng)
            x = x[x > 0]
            survived += int(np.count_nonzero(x >= retire))
            x = x[x < retire]
            if x.size == 0:
                break
        survived += x.size
    est = survived / n_samples
    stderr = math.sqrt(est * (1.0 - est) / n_samples)
    rate = cgf(p, h)
    late = math.exp(-(step_cap + 1) * rate) / -math.expm1(-rate)
    return MCEstimate(est, stderr, math.exp(-2.0 * h * retire) + late, int(n_samples))


def mc_r_beta(params: ModelParams, n_samples: int, rho_cap: int, seed: int) -> MCEstimate:
    """Average of ``1{X_1 > 0} 1{X_rho = 0} Gamma^rho`` over untilted walks.

    ``rho`` is the first time the walk is ``<= 0``; walks still positive after
    ``rho_cap`` steps contribute zero, which underestimates by at most ``Gamma^rho_cap``.
    """
    p = _params(params)
    if not p.beta > BETA_C:
        raise DomainError(f"mc_r_beta needs beta > beta_c = {BETA_C!r}, got {p.beta!r}")
    if n_samples < 1 or rho_cap < 1:
        raise ValueError("n_samples and rho_cap must be positive")
    gamma = p.gamma_beta
    total = 0.0
    total_sq = 0.0
    for size, rng in _chunk_rngs(seed, n_samples):
        x = tilted_steps(p, 0.0, size, rng)
        x = x[x > 0]
        contrib = []
        for t in range(2, rho_cap + 1):
            if x.size == 0:
                break
            x = x + tilted_steps(p, 0.0, x.size, rng)
            hits = int(np.count_nonzero(x == 0))
            if hits:
                contrib.append((hits, gamma**t))
            x = x[x > 0]
        total += math.fsum(k * w for k, w in contrib)
        total_sq += math.fsum(k * w * w for k, w in contrib)
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    return MCEstimate(mean, math.sqrt(var / n_samples), gamma**rho_cap, int(n_samples))
