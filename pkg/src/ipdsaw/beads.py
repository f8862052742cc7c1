"""Bead decomposition of trajectories and the size of the largest bead."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .polymer import Trajectory
from .sampling import SampleBatch


def _stretches(traj: Trajectory | Sequence[int]) -> tuple[int, ...]:
    return traj.stretches if isinstance(traj, Trajectory) else tuple(traj)


@dataclass(frozen=True)
class BeadDecomposition:
    """Cuts ``tau_0 = 0 < tau_1 < ...`` after each extended bead.

    ``cum_lengths[j]`` is the number of monomers in the first ``j`` beads; zero stretches
    after the last nonzero stretch are counted in ``trailing_zeros`` instead.
    """

    tau: tuple[int, ...]
    cum_lengths: tuple[int, ...]
    trailing_zeros: int
    segments: tuple[tuple[int, ...], ...]

    @property
    def n_beads(self) -> int:
        return len(self.segments)

    @property
    def length(self) -> int:
        return self.cum_lengths[-1] + self.trailing_zeros

    def reassemble(self) -> tuple[int, ...]:
        out = tuple(s for seg in self.segments for s in seg)
        return out + (0,) * self.trailing_zeros


def decompose(traj: Trajectory | Sequence[int]) -> BeadDecomposition:
    """Split into extended beads: leading zero stretches, then a maximal alternating nonzero run."""
    s = _stretches(traj)
    tau, cum, segments = [0], [0], []
    i, n = 0, len(s)
    while i < n:
        j = i
        while j < n and s[j] == 0:
            j += 1
        if j == n:
            break
        j += 1
        while j < n and s[j] * s[j - 1] < 0:
            j += 1
        seg = s[i:j]
        segments.append(seg)
        tau.append(j)
        cum.append(cum[-1] + sum(abs(x) + 1 for x in seg))
        i = j
    return BeadDecomposition(tuple(tau), tuple(cum), n - tau[-1], tuple(segments))


def i_max(traj: Trajectory | Sequence[int]) -> int:
    """Largest ``sum_{u<=i<=v} (1 + |l_i|)`` over runs with ``l_i l_{i+1} < 0`` inside.

    A single stretch is a run, so a zero stretch counts as a run of length 1.
    """
    s = _stretches(traj)
    best = run = 0
    for idx, x in enumerate(s):
        if idx > 0 and s[idx - 1] * x < 0:
            run += 1 + abs(x)
        else:
            run = 1 + abs(x)
        best = max(best, run)
    return best


@dataclass(frozen=True)
class BeadSurvey:
    beta: float
    L: int
    k_grid: tuple[int, ...]
    empirical_prob: dict[int, float]
    counts: dict[int, int]
    n_samples: int

    @property
    def monotone(self) -> bool:
        probs = [self.empirical_prob[k] for k in sorted(self.k_grid)]
        return all(a <= b for a, b in zip(probs, probs[1:]))


def bead_survey(batch: SampleBatch, k_grid: Sequence[int]) -> BeadSurvey:
    """Fraction of sampled trajectories whose largest bead has at least ``L - k`` monomers."""
    if len(batch) == 0:
        raise ValueError("bead_survey needs a nonempty batch")
    sizes = [i_max(t) for t in batch.trajectories]
    grid = tuple(int(k) for k in k_grid)
    counts = {k: sum(1 for m in sizes if m >= batch.L - k) for k in grid}
    probs = {k: counts[k] / len(sizes) for k in grid}
    return BeadSurvey(batch.beta, batch.L, grid, probs, counts, len(sizes))


def write_survey_csv(survey: BeadSurvey, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "empirical_prob", "count"])
        for k in survey.k_grid:
            w.writerow([k, repr(survey.empirical_prob[k]), survey.counts[k]])
