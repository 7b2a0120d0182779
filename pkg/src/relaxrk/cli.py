"""Command-line experiment harness writing CSV tables.

Subcommands: ``integrate``, ``convergence``, ``entropy-trace``, ``gamma-trace``,
``residual-scan`` and ``burgers``. Every option may also be given in a
``key = value`` config file (``--config``) using the long flag name without the
leading dashes; command-line flags win. Failures exit with status 1 and print
one JSON line ``error: {...}`` to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from relaxrk.burgers1d import BurgersGrid, burgers_problem, smooth_initial, total_entropy, total_mass
from relaxrk.integrator import (
    IntegrationError,
    RelaxationConfig,
    StepMode,
    integrate,
    residual,
    rk_stages,
)
from relaxrk.problems import PROBLEM_NAMES, get_problem
from relaxrk.tableaus import CATALOG_NAMES, builtin

SUBCOMMANDS = ("integrate", "convergence", "entropy-trace", "gamma-trace", "residual-scan", "burgers")
ROOT_METHODS = {"brent": "brent", "bisection": "bisection", "newton": "newton_safeguarded"}
SLOPE_ROWS = 4


@dataclass(frozen=True)
class ExperimentSpec:
    subcommand: str = "integrate"
    method: str = "RK(4,4)"
    mode: StepMode = StepMode.RELAXATION
    dt: tuple = (0.05,)
    t_end: float = 5.0
    problem: str = "conserved-exp"
    root_method: str = "brent"
    tol: float = 1e-14
    output_path: Optional[str] = None
    cells: int = 64
    gammas: tuple = ()

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand {self.subcommand!r}")
        if not self.dt or any(not h > 0 for h in self.dt):
            raise ValueError("dt values must be positive")
        if any(a <= b for a, b in zip(self.dt, self.dt[1:])):
            raise ValueError("dt ladder must be strictly decreasing")
        if self.root_method not in ROOT_METHODS:
            raise ValueError(f"unknown root method {self.root_method!r}")
        object.__setattr__(self, "mode", StepMode(self.mode))

    def relaxation_config(self) -> RelaxationConfig:
        return RelaxationConfig(root_method=ROOT_METHODS[self.root_method], rel_tol=self.tol)


@dataclass(frozen=True)
class ConvergenceRow:
    dt: float
    error_l2: float
    observed_rate: Optional[float] = None
    failed: bool = False


def observed_rate(dt_prev: float, err_prev: float, dt: float, err: float) -> Optional[float]:
    if not (err_prev > 0 and err > 0 and math.isfinite(err_prev) and math.isfinite(err)):
        return None
    return math.log(err_prev / err) / math.log(dt_prev / dt)


def rows_from_errors(dts: Sequence[float], errors: Sequence[float],
                     failed: Sequence[bool] = ()) -> list[ConvergenceRow]:
    failed = list(failed) or [False] * len(dts)
    rows = []
    for k, (h, err) in enumerate(zip(dts, errors)):
        rate = None if k == 0 else observed_rate(dts[k - 1], errors[k - 1], h, err)
        rows.append(ConvergenceRow(float(h), float(err), rate, failed[k]))
    return rows


def fit_slope(dts: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log|value|`` against ``log dt``."""
    x = np.log(np.asarray(dts, dtype=float))
    y = np.log(np.abs(np.asarray(values, dtype=float)))
    return float(np.polyfit(x, y, 1)[0])


def summary_slope(rows: Sequence[ConvergenceRow], last: int = SLOPE_ROWS) -> float:
    good = [r for r in rows if not r.failed and r.error_l2 > 0 and math.isfinite(r.error_l2)]
    good = good[-last:]
    if len(good) < 2:
        return math.nan
    return fit_slope([r.dt for r in good], [r.error_l2 for r in good])


def run_convergence(spec: ExperimentSpec) -> list[ConvergenceRow]:
    entry = get_problem(spec.problem)
    prob = entry.problem
    if prob.exact_solution is None:
        raise ValueError(f"problem {spec.problem!r} has no exact solution")
    tab = builtin(spec.method)
    cfg = spec.relaxation_config()
    t0 = entry.default_tspan[0]
    errors, failed = [], []
    for h in spec.dt:
        try:
            tr = integrate(prob, tab, t0, entry.default_u0, h, spec.t_end, spec.mode, cfg)
        except IntegrationError:
            errors.append(math.nan)
            failed.append(True)
            continue
        exact = prob.exact_solution(tr.times[-1])
        errors.append(float(np.linalg.norm(tr.states[-1] - exact)))
        failed.append(False)
    return rows_from_errors(spec.dt, errors, failed)


def residual_table(prob, tab, t0: float, u0, dt: float,
                   gammas: Iterable[float]) -> list[tuple[float, float]]:
    """Residual ``r(gamma)`` of one step from ``(t0, u0)`` over a grid of gammas."""
    u0 = np.atleast_1d(np.asarray(u0, dtype=float))
    _, agg = rk_stages(prob, tab, t0, u0, dt)
    return [(float(g), residual(float(g), u0, agg, dt, prob.entropy)) for g in gammas]


def run_residual_scan(spec: ExperimentSpec, gammas: Iterable[float]) -> list[tuple[float, float]]:
    entry = get_problem(spec.problem)
    return residual_table(entry.problem, builtin(spec.method), entry.default_tspan[0],
                          entry.default_u0, spec.dt[0], gammas)


def run_traces(spec: ExperimentSpec) -> list[tuple[int, float, float]]:
    entry = get_problem(spec.problem)
    tr = integrate(entry.problem, builtin(spec.method), entry.default_tspan[0], entry.default_u0,
                   spec.dt[0], spec.t_end, spec.mode, spec.relaxation_config())
    values = tr.gammas if spec.subcommand == "gamma-trace" else tr.entropies
    return [(k, float(t), float(v)) for k, (t, v) in enumerate(zip(tr.times, values))]


def run_integrate(spec: ExperimentSpec) -> tuple[list[str], list[tuple]]:
    entry = get_problem(spec.problem)
    tr = integrate(entry.problem, builtin(spec.method), entry.default_tspan[0], entry.default_u0,
                   spec.dt[0], spec.t_end, spec.mode, spec.relaxation_config())
    dim = entry.problem.dimension
    header = ["step", "t", "gamma", "entropy"] + [f"u{i}" for i in range(dim)]
    rows = [
        (k, t, g, eta, *map(float, u))
        for k, (t, g, eta, u) in enumerate(zip(tr.times, tr.gammas, tr.entropies, tr.states))
    ]
    return header, rows


def run_burgers(spec: ExperimentSpec) -> list[tuple[int, float, float, float]]:
    grid = BurgersGrid(spec.cells)
    prob = burgers_problem(grid, smooth_initial)
    tr = integrate(prob, builtin(spec.method), 0.0, grid.sample(smooth_initial), spec.dt[0],
                   spec.t_end, spec.mode, spec.relaxation_config())
    return [(k, float(t), total_entropy(u, grid), total_mass(u, grid))
            for k, (t, u) in enumerate(zip(tr.times, tr.states))]


# {{{ output


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.17g}"


def format_csv(header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    for c in comments:
        buf.write(f"# {c}\n")
    return buf.getvalue()


def convergence_csv(rows: Sequence[ConvergenceRow]) -> str:
    return format_csv(
        ["dt", "error_l2", "observed_rate"],
        [(r.dt, r.error_l2, r.observed_rate) for r in rows],
        [f"summary_slope={summary_slope(rows):.17g}"],
    )


def read_convergence_csv(text: str) -> list[ConvergenceRow]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    return [
        ConvergenceRow(float(r["dt"]), float(r["error_l2"]),
                       float(r["observed_rate"]) if r["observed_rate"] else None)
        for r in reader
    ]


PLOT_TEMPLATE = """\
# Plot {csv} with matplotlib: python {script}
import csv
import matplotlib.pyplot as plt

with open({csv!r}) as fh:
    rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
header, data = rows[0], [[float(v) if v else float("nan") for v in r] for r in rows[1:]]
x, y = [r[{xcol}] for r in data], [r[{ycol}] for r in data]
{plot}(x, y, "o-")
plt.xlabel(header[{xcol}])
plt.ylabel(header[{ycol}])
plt.savefig({png!r}, bbox_inches="tight")
"""


def plot_script(csv_path: str, script_path: str, subcommand: str) -> str:
    xcol, ycol, plot = {
        "convergence": (0, 1, "plt.loglog"),
        "residual-scan": (0, 1, "plt.plot"),
        "burgers": (1, 2, "plt.plot"),
        "integrate": (1, 3, "plt.plot"),
    }.get(subcommand, (1, 2, "plt.plot"))
    png = str(Path(csv_path).with_suffix(".png"))
    return PLOT_TEMPLATE.format(csv=csv_path, script=script_path, xcol=xcol, ycol=ycol,
                                plot=plot, png=png)


# }}}

# {{{ argument handling


def parse_config_file(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("_", "-")] = value
    return out


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file mirroring these flags")
    common.add_argument("--method", choices=CATALOG_NAMES)
    common.add_argument("--mode", choices=[m.value for m in StepMode])
    dt = common.add_mutually_exclusive_group()
    dt.add_argument("--dt", type=float)
    dt.add_argument("--dt-ladder", dest="dt_ladder", help="comma-separated, decreasing")
    common.add_argument("--t-end", dest="t_end", type=float)
    common.add_argument("--problem", choices=PROBLEM_NAMES)
    common.add_argument("--root", choices=tuple(ROOT_METHODS))
    common.add_argument("--tol", type=float, help="relative root tolerance")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--plot-script", dest="plot_script", help="also write a plotting script")
    common.add_argument("--cells", type=int, help="grid cells (burgers)")
    common.add_argument("--gammas", help="comma-separated gamma grid (residual-scan)")

    parser = _Parser(prog="relaxrk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


CONVERGENCE_T_END = 2.0
DEFAULT_GAMMAS = tuple(np.round(np.linspace(-0.5, 1.5, 41), 12))


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    conf = parse_config_file(Path(args.config).read_text()) if args.config else {}

    def pick(attr: str, key: str, conv=str, default=None):
        val = getattr(args, attr, None)
        if val is not None:
            return val
        if key in conf:
            return conv(conf[key])
        return default

    ladder = pick("dt_ladder", "dt-ladder", str)
    single = pick("dt", "dt", float)
    if ladder is not None and single is not None and args.dt is None and args.dt_ladder is None:
        raise ValueError("config gives both dt and dt-ladder")
    if args.dt is not None:
        dts = (args.dt,)
    elif ladder is not None:
        dts = _floats(ladder)
    elif single is not None:
        dts = (single,)
    else:
        dts = (0.2, 0.1, 0.05, 0.025, 0.0125) if args.subcommand == "convergence" else (0.05,)

    gammas = pick("gammas", "gammas", str)
    return ExperimentSpec(
        subcommand=args.subcommand,
        method=pick("method", "method", default="RK(4,4)"),
        mode=StepMode(pick("mode", "mode", default="relaxation")),
        dt=dts,
        t_end=pick("t_end", "t-end", float,
                   CONVERGENCE_T_END if args.subcommand == "convergence" else 5.0),
        problem=pick("problem", "problem", default="conserved-exp"),
        root_method=pick("root", "root", default="brent"),
        tol=pick("tol", "tol", float, 1e-14),
        output_path=pick("out", "out"),
        cells=pick("cells", "cells", int, 64),
        gammas=_floats(gammas) if gammas else DEFAULT_GAMMAS,
    )


def execute(spec: ExperimentSpec) -> str:
    if spec.subcommand == "convergence":
        return convergence_csv(run_convergence(spec))
    if spec.subcommand == "residual-scan":
        return format_csv(["gamma", "r"], run_residual_scan(spec, spec.gammas))
    if spec.subcommand in ("entropy-trace", "gamma-trace"):
        return format_csv(["step", "t", "value"], run_traces(spec))
    if spec.subcommand == "burgers":
        return format_csv(["step", "t", "entropy", "mass"], run_burgers(spec))
    header, rows = run_integrate(spec)
    return format_csv(header, rows)


def _error_line(kind: str, message: str) -> str:
    return "error: " + json.dumps({"kind": kind, "message": message}, sort_keys=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        spec = spec_from_args(args)
        text = execute(spec)
        if spec.output_path:
            Path(spec.output_path).write_text(text)
        else:
            sys.stdout.write(text)
        if args.plot_script:
            csv_path = spec.output_path or "data.csv"
            Path(args.plot_script).write_text(plot_script(csv_path, args.plot_script, spec.subcommand))
    except IntegrationError as exc:
        print(_error_line("integration", str(exc)), file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        print(_error_line(type(exc).__name__, str(exc)), file=sys.stderr)
        return 1
    return 0


# }}}

if __name__ == "__main__":
    sys.exit(main())
