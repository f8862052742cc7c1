"""Polymer configurations as signed vertical stretches, their energy and brute-force enumeration."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

MAX_BRUTE_FORCE_LENGTH = 14


@dataclass(frozen=True)
class Trajectory:
    """Stretches ``(l_1, ..., l_N)``; each is followed by one horizontal step."""

    stretches: tuple[int, ...]

    def __init__(self, stretches: Sequence[int]):
        object.__setattr__(self, "stretches", tuple(int(s) for s in stretches))
        if not self.stretches:
            raise ValueError("a trajectory has at least one stretch")

    @property
    def length(self) -> int:
        """Number of monomers, ``sum |l_i| + N``."""
        return sum(abs(s) for s in self.stretches) + len(self.stretches)

    @property
    def horizontal_extension(self) -> int:
        return len(self.stretches)

    def __len__(self) -> int:
        return len(self.stretches)

    def __iter__(self):
        return iter(self.stretches)


def contact(x: int, y: int) -> int:
    """Self-touchings between consecutive stretches: ``min(|x|, |y|)`` if they point opposite ways."""
    return min(abs(x), abs(y)) if x * y < 0 else 0


def hamiltonian(traj: Trajectory | Sequence[int]) -> int:
    """Number of self-touchings; the energy is ``beta`` times this."""
    s = traj.stretches if isinstance(traj, Trajectory) else tuple(traj)
    return sum(contact(a, b) for a, b in zip(s, s[1:]))


def iter_trajectories(L: int) -> Iterator[tuple[int, ...]]:
    """Every stretch sequence of total length ``L``."""
    if L < 1:
        return
    prefix: list[int] = []

    def rec(remaining: int):
        if remaining == 0:
            yield tuple(prefix)
            return
        for mag in range(remaining):
            for s in ((0,) if mag == 0 else (mag, -mag)):
                prefix.append(s)
                yield from rec(remaining - mag - 1)
                prefix.pop()

    yield from rec(L)


def enumerate_all(L: int) -> dict[int, int]:
    """Map from number of self-touchings to the count of trajectories of length ``L``."""
    if L > MAX_BRUTE_FORCE_LENGTH:
        raise ValueError(f"brute force is limited to L <= {MAX_BRUTE_FORCE_LENGTH}, got {L}")
    if L < 1:
        raise ValueError(f"L must be positive, got {L}")
    counts: Counter[int] = Counter()
    # contacts accumulate along the recursion instead of re-scanning each leaf
    def rec(remaining: int, last: int, energy: int):
        if remaining == 0:
            counts[energy] += 1
            return
        for mag in range(remaining):
            for s in ((0,) if mag == 0 else (mag, -mag)):
                rec(remaining - mag - 1, s, energy + contact(last, s))

    rec(L, 0, 0)
    return dict(sorted(counts.items()))
