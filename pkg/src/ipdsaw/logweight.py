"""Nonnegative weights stored by their logarithm."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, order=True)
class LogWeight:
    """A nonnegative number ``exp(log_value)``; ``-inf`` is zero.

    ``+`` combines by log-sum-exp and ``*`` adds logarithms.
    """

    log_value: float

    @classmethod
    def zero(cls) -> "LogWeight":
        return cls(-math.inf)

    @classmethod
    def one(cls) -> "LogWeight":
        return cls(0.0)

    @classmethod
    def from_value(cls, x: float) -> "LogWeight":
        if x < 0:
            raise ValueError(f"weights are nonnegative, got {x!r}")
        return cls(math.log(x) if x > 0 else -math.inf)

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    def __add__(self, other: "LogWeight") -> "LogWeight":
        return LogWeight(float(np.logaddexp(self.log_value, other.log_value)))

    def __mul__(self, other: "LogWeight") -> "LogWeight":
        if self.log_value == -math.inf or other.log_value == -math.inf:
            return LogWeight.zero()
        return LogWeight(self.log_value + other.log_value)

    def relative_error(self, other: "LogWeight") -> float:
        """``|x/y - 1|`` computed from the logs."""
        if self.log_value == other.log_value:
            return 0.0
        return abs(math.expm1(self.log_value - other.log_value))
