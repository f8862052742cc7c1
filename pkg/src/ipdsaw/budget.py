"""Memory budget for DP tables, configurable through ``IPDSAW_TABLE_BUDGET`` (bytes)."""

from __future__ import annotations

import os

ENV_VAR = "IPDSAW_TABLE_BUDGET"
DEFAULT_BUDGET = 2 * 1024**3


class TableBudgetError(MemoryError):
    """A DP table would exceed the configured memory budget."""


def table_budget() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    try:
        value = int(float(raw))
    except ValueError as exc:
        raise ValueError(f"{ENV_VAR} must be a byte count, got {raw!r}") from exc
    if value <= 0:
        raise ValueError(f"{ENV_VAR} must be positive, got {raw!r}")
    return value


def check_budget(n_bytes: int, what: str) -> None:
    budget = table_budget()
    if n_bytes > budget:
        raise TableBudgetError(f"{what} needs {n_bytes} bytes, over the {budget}-byte budget ({ENV_VAR})")
