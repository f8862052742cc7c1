"""Columnar CSV output with a JSON metadata sidecar."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__
from .excursions import ExcursionTable
from .transfer import PartitionSeries

FORMAT_VERSION = 1


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(float(x), ".17g")


def sidecar_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".json")


def _write_sidecar(path, meta: dict) -> None:
    meta = {"format_version": FORMAT_VERSION, "code_version": __version__, **meta}
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def write_series(series: PartitionSeries, path) -> None:
    """``L,log_value`` rows for ``L >= 1``."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["L", "log_value"])
        for L in range(1, series.l_max + 1):
            w.writerow([L, fmt(series.log_values[L])])
    _write_sidecar(path, {"kind": "partition_series", "beta": series.beta,
                          "variant": series.variant, "l_max": series.l_max})


def read_series(path) -> PartitionSeries:
    meta = json.loads(sidecar_path(path).read_text())
    values = np.full(meta["l_max"] + 1, -np.inf)
    with Path(path).open() as fh:
        for row in csv.DictReader(fh):
            values[int(row["L"])] = float(row["log_value"])
    return PartitionSeries(beta=meta["beta"], variant=meta["variant"], log_values=values)


def write_excursion(table: ExcursionTable, path) -> None:
    """``k,prob`` rows for every area up to the cap."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "prob"])
        for k, prob in enumerate(table.probabilities):
            w.writerow([k, fmt(prob)])
    _write_sidecar(path, {"kind": "excursion_table", "beta": table.beta, "n": table.n,
                          "area_cap": table.area_cap, "height_cap": table.height_cap,
                          "tail_bound": table.tail_bound})


def read_excursion(path) -> ExcursionTable:
    meta = json.loads(sidecar_path(path).read_text())
    probs = np.zeros(meta["area_cap"] + 1)
    with Path(path).open() as fh:
        for row in csv.DictReader(fh):
            probs[int(row["k"])] = float(row["prob"])
    return ExcursionTable(meta["beta"], meta["n"], meta["area_cap"], meta["height_cap"], probs,
                          meta["tail_bound"])
