"""Command-line front end: run one computation or the whole acceptance suite and emit a report.

Exit status is 0 when every requested check passes, 1 when a check fails, 2 for usage
errors and 3 for numerical or domain errors raised while computing.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__, checks
from .beads import bead_survey
from .continuum import k_constants
from .excursions import excursion_table
from .finite_n import em_gap_scan, h_gap_scan
from .identities import MIN_FIT_WINDOW, asymptotics_fit, llt_ratio
from .laplace import BETA_C, delta_coeffs, r_beta, zeta_beta, ModelParams
from .numerics import ConvergenceError
from .polymer import MAX_BRUTE_FORCE_LENGTH, enumerate_all
from .sampling import SampleBatch, sample_polymer, write_batch
from .transfer import VARIANTS, evaluate_coefficients, stretch_dp

SCHEMA_VERSION = 1
COMMANDS = ("constants", "partition", "excursion", "llt-scan", "em-scan", "fit", "sample", "beads",
            "verify-all")
EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    """A configuration that would violate a module precondition."""


@dataclass
class RunConfig:
    command: str
    beta: float = 2.0
    l_min: int = 300
    l_max: int = 12
    n: int = 10
    n_list: tuple[int, ...] = (100, 200, 500, 1000)
    q: float = 1.0
    q_list: tuple[float, ...] = ()
    K: float = 0.3
    order: int = 0
    area_cap: int = 100
    height_cap: int | None = None
    variant: str = "full"
    check_bruteforce: bool = False
    count: int = 1000
    seed: int = 0
    k_grid: tuple[int, ...] = (0, 10, 20, 40)
    output_path: str | None = None
    format: str = "json"
    timings: bool = False

    def echo(self) -> dict:
        """Fields that determine the result; where the report goes is left out."""
        d = asdict(self)
        for key in ("output_path", "format", "timings"):
            d.pop(key)
        return d

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ConfigError(f"--beta must be positive and finite, got {self.beta}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"--format must be json or csv, got {self.format!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"--seed must be a 64-bit unsigned integer, got {self.seed}")
        cmd = self.command
        if cmd == "partition":
            if self.l_max < 1:
                raise ConfigError(f"--lmax must be at least 1, got {self.l_max}")
            if self.variant not in VARIANTS:
                raise ConfigError(f"--variant must be one of {VARIANTS}")
        elif cmd == "excursion":
            if self.n < 1 or self.area_cap < 1:
                raise ConfigError("--n and --area-cap must be positive")
            if self.height_cap is not None and self.height_cap < 1:
                raise ConfigError("--height-cap must be positive")
        elif cmd == "llt-scan":
            if self.q <= 0:
                raise ConfigError(f"--q must be positive, got {self.q}")
            for n in self.n_list:
                if n < 2:
                    raise ConfigError(f"llt-scan needs n >= 2, got {n}")
                if (Fraction(str(self.q)) * n * n).denominator != 1:
                    raise ConfigError(f"q n^2 must be an integer, got q={self.q}, n={n}")
        elif cmd == "em-scan":
            if not 0 < self.K < self.beta:
                raise ConfigError(f"--K must lie in (0, beta), got {self.K}")
            if self.order not in (0, 1):
                raise ConfigError(f"--order must be 0 or 1, got {self.order}")
            if any(n < 2 for n in self.n_list):
                raise ConfigError("em-scan needs every n >= 2")
            if any(q <= 0 for q in self.q_list):
                raise ConfigError("--q-list entries must be positive")
        elif cmd == "fit":
            if not self.beta > BETA_C:
                raise ConfigError(f"fit needs beta > beta_c = {BETA_C!r}")
            if self.l_min < 1 or self.l_max - self.l_min < MIN_FIT_WINDOW:
                raise ConfigError(f"fit needs 1 <= lmin and lmax - lmin >= {MIN_FIT_WINDOW}")
        elif cmd in ("sample", "beads"):
            if self.l_max < 1:
                raise ConfigError(f"--L must be at least 1, got {self.l_max}")
            if self.count < (1 if cmd == "beads" else 0):
                raise ConfigError(f"--count too small: {self.count}")
            if cmd == "beads" and any(not 0 <= k <= self.l_max for k in self.k_grid):
                raise ConfigError("--k-grid entries must lie in [0, L]")


@dataclass
class Report:
    config: RunConfig
    rows: list[dict] = field(default_factory=list)
    checks: list[checks.CheckResult] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    batch: SampleBatch | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "code_version": __version__,
            "config": self.config.echo(),
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "rows": self.rows,
        }
        if self.config.timings:
            out["timings"] = self.timings
        return out

    def render(self) -> str:
        if self.config.format == "csv":
            return rows_to_csv(self.rows)
        return dumps(self.to_dict()) + "\n"


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    # keep integral values recognizable as floats
    return text if any(ch in text for ch in ".en") else text + ".0"


def dumps(obj, indent: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalars
        return dumps(obj.item(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    keys = list(rows[0])
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for row in rows:
        w.writerow([fmt_float(float(row[k])).strip('"') if isinstance(row[k], float) else row[k]
                    for k in keys])
    return buf.getvalue()


def _constants(cfg: RunConfig, rep: Report) -> None:
    p = ModelParams(cfg.beta)
    row = {"beta": p.beta, "beta_c": BETA_C, "c_beta": p.c_beta, "gamma_beta": p.gamma_beta}
    if p.beta >= BETA_C:
        d = delta_coeffs(p)
        row.update(zeta_beta=zeta_beta(p), r_beta=r_beta(p), delta1=d.delta1, delta2=d.delta2)
    if p.beta > BETA_C:
        k = k_constants(p)
        row.update(a_beta=k.a_beta, g_tilde_max=k.g_tilde_max, g_tilde_second=k.g_tilde_second,
                   c_prefactor=k.c_prefactor, k_circ=k.k_circ, k_hat=k.k_hat, k_bar=k.k_bar,
                   k_beta_route_a=k.k_beta_route_a, k_beta_route_b=k.k_beta_route_b,
                   route_gap=k.route_gap)
        chk = checks.CheckResult(0, "collapsed constants", "continuum_constants", "k_constants",
                                 "delta2 < 1 and K_beta route gap < 1e-9")
        chk.require(row["delta2"] < 1.0, f"delta2 = {row['delta2']!r}")
        chk.require(k.route_gap < 1e-9, f"route gap {k.route_gap:.3e}")
        chk.metrics.update(delta2=row["delta2"], route_gap=k.route_gap)
        rep.checks.append(chk)
    rep.rows.append(row)


def _partition(cfg: RunConfig, rep: Report) -> None:
    series = stretch_dp(cfg.beta, cfg.l_max, cfg.variant)
    rep.rows.extend({"L": L, "log_value": float(series.log_values[L])} for L in range(1, cfg.l_max + 1))
    if cfg.check_bruteforce:
        chk = checks.CheckResult(0, "brute-force equivalence", "exact_engines", "stretch_dp",
                                 "relative error < 1e-12 against enumerate_all")
        if cfg.variant != "full":
            chk.require(False, "brute-force comparison is defined for the full variant only")
        else:
            top = min(cfg.l_max, MAX_BRUTE_FORCE_LENGTH)
            err = max(series[L].relative_error(evaluate_coefficients(enumerate_all(L), cfg.beta))
                      for L in range(1, top + 1))
            chk.metrics.update(max_rel_error=err, l_checked=top)
            chk.require(err < 1e-12, f"relative error {err:.3e}")
        rep.checks.append(chk)


def _excursion(cfg: RunConfig, rep: Report) -> None:
    table = excursion_table(cfg.beta, cfg.n, cfg.area_cap, cfg.height_cap)
    rep.rows.extend({"k": k, "prob": float(pr)} for k, pr in enumerate(table.probabilities))
    chk = checks.CheckResult(0, "excursion table", "exact_engines", "excursion_table",
                             "total probability <= 1 and tail bound < 1e-14 of retained mass")
    total = float(table.probabilities.sum())
    chk.metrics.update(tail_bound=table.tail_bound, retained_mass=total, height_cap=table.height_cap)
    chk.require(total <= 1.0, f"probabilities sum to {total!r}")
    chk.require(table.tail_bound <= 1e-14 * total, f"tail bound {table.tail_bound:.3e}")
    rep.checks.append(chk)


def _llt_scan(cfg: RunConfig, rep: Report) -> None:
    q = Fraction(str(cfg.q))
    for n in cfg.n_list:
        rep.rows.append({"n": n, "q": cfg.q, "ratio": llt_ratio(cfg.beta, n, q)})


def _em_scan(cfg: RunConfig, rep: Report) -> None:
    for r in em_gap_scan(cfg.beta, cfg.n_list, cfg.K, cfg.order):
        rep.rows.append({"kind": f"G{cfg.order}", "n": r.n, "sup_gap": r.sup_gap, "scaled_gap": r.scaled_gap})
    for q in cfg.q_list:
        for r in h_gap_scan(cfg.beta, cfg.n_list, q):
            rep.rows.append({"kind": f"h_q{q:g}", "n": r.n, "sup_gap": r.sup_gap, "scaled_gap": r.scaled_gap})


def _fit(cfg: RunConfig, rep: Report) -> None:
    fit = asymptotics_fit(cfg.beta, cfg.l_min, cfg.l_max)
    k = k_constants(cfg.beta)
    rep.rows.append({"sqrt_coeff": fit.sqrt_coeff, "log_slope": fit.log_slope, "intercept": fit.intercept,
                     "rms_residual": fit.rms_residual, "g_tilde_max": k.g_tilde_max,
                     "log_k_beta": math.log(k.k_beta)})


def _sample(cfg: RunConfig, rep: Report) -> None:
    batch = sample_polymer(cfg.beta, cfg.l_max, cfg.count, cfg.seed)
    rep.batch = batch
    rep.rows.extend({"index": i, "stretches": ",".join(map(str, t.stretches))}
                    for i, t in enumerate(batch.trajectories))


def _beads(cfg: RunConfig, rep: Report) -> None:
    batch = sample_polymer(cfg.beta, cfg.l_max, cfg.count, cfg.seed)
    survey = bead_survey(batch, cfg.k_grid)
    rep.rows.extend({"k": k, "empirical_prob": survey.empirical_prob[k], "count": survey.counts[k]}
                    for k in survey.k_grid)
    chk = checks.CheckResult(0, "bead survey", "bead_analysis", "bead_survey",
                             "empirical probability nondecreasing in k")
    chk.require(survey.monotone, "survey curve is not monotone in k")
    rep.checks.append(chk)


def _verify_all(cfg: RunConfig, rep: Report) -> None:
    for check in checks.ALL_CHECKS:
        start = time.perf_counter()
        result = check(cfg.beta, cfg.seed)
        rep.timings[f"check_{result.id}"] = time.perf_counter() - start
        rep.checks.append(result)


_DISPATCH = {
    "constants": _constants, "partition": _partition, "excursion": _excursion, "llt-scan": _llt_scan,
    "em-scan": _em_scan, "fit": _fit, "sample": _sample, "beads": _beads, "verify-all": _verify_all,
}


def run(config: RunConfig) -> Report:
    """Validate ``config``, run its command and collect rows and checks."""
    config.validate()
    rep = Report(config)
    start = time.perf_counter()
    _DISPATCH[config.command](config, rep)
    rep.timings["total"] = time.perf_counter() - start
    return rep


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ipdsaw", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--beta", type=float, default=2.0)
    common.add_argument("--output", dest="output_path", default=None, help="write the report here")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--timings", action="store_true", help="include wall-clock times in the report")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("constants", parents=[common], help="closed-form scalars and collapsed constants")

    p = sub.add_parser("partition", parents=[common], help="partition function series")
    p.add_argument("--lmax", dest="l_max", type=int, default=12)
    p.add_argument("--variant", choices=VARIANTS, default="full")
    p.add_argument("--check-bruteforce", action="store_true")

    p = sub.add_parser("excursion", parents=[common], help="area-constrained excursion probabilities")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--area-cap", type=int, default=100)
    p.add_argument("--height-cap", type=int, default=None)

    p = sub.add_parser("llt-scan", parents=[common], help="local limit ratios over n")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--n-list", type=_ints, default=(16, 24, 32, 40, 48))

    p = sub.add_parser("em-scan", parents=[common], help="finite-n vs continuum potential gaps")
    p.add_argument("--n-list", type=_ints, default=(100, 200, 500, 1000))
    p.add_argument("--K", type=float, default=0.3)
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--q-list", type=_floats, default=())

    p = sub.add_parser("fit", parents=[common], help="fit the large-L exponents of Z_L")
    p.add_argument("--lmin", dest="l_min", type=int, default=300)
    p.add_argument("--lmax", dest="l_max", type=int, default=1000)

    for name, helptext in (("sample", "exact samples of the polymer measure"),
                           ("beads", "largest-bead survey over exact samples")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--L", dest="l_max", type=int, default=400 if name == "beads" else 12)
        p.add_argument("--count", type=int, default=10_000 if name == "beads" else 1000)
        p.add_argument("--seed", type=int, default=0)
        if name == "beads":
            p.add_argument("--k-grid", type=_ints, default=(0, 10, 20, 40))

    p = sub.add_parser("verify-all", parents=[common], help="run the full acceptance suite")
    p.add_argument("--seed", type=int, default=0)
    return parser


def config_from_args(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    return RunConfig(**ns)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        rep = run(cfg)
    except ConfigError as exc:
        print(f"ipdsaw {cfg.command}: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, ValueError, MemoryError, ConvergenceError) as exc:
        origin = f"{type(exc).__module__}.{type(exc).__name__}"
        print(f"ipdsaw {cfg.command}: {origin}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if cfg.command == "sample" and cfg.output_path:
        write_batch(rep.batch, cfg.output_path)
    elif cfg.output_path:
        Path(cfg.output_path).write_text(rep.render())
    else:
        sys.stdout.write(rep.render())
    for c in rep.checks:
        print(c.line(), file=sys.stderr if not cfg.output_path else sys.stdout)
        for failure in c.failures:
            print(f"    {failure}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
