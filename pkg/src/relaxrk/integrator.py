r"""Relaxation Runge-Kutta stepping.

One explicit RK step produces stages :math:`y_i`, the update direction
:math:`d = \sum_i b_i f_i` and the quadrature estimate of the entropy change
:math:`e = \Delta t \sum_i b_i \langle \eta'(y_i), f_i \rangle`. The relaxation
parameter :math:`\gamma` is the positive root of

.. math::

    r(\gamma) = \eta(u + \gamma \Delta t\, d) - \eta(u) - \gamma e,

and the new state is :math:`u + \gamma \Delta t\, d`. The three step modes
differ only in how time is advanced:

* ``baseline``: :math:`\gamma \equiv 1`, :math:`t \mapsto t + \Delta t`;
* ``idt``: solved :math:`\gamma`, :math:`t \mapsto t + \Delta t`;
* ``relaxation``: solved :math:`\gamma`, :math:`t \mapsto t + \gamma \Delta t`.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from relaxrk.rootfind import (
    BracketError,
    RootConfig,
    RootFindingError,
    bracket_root,
    find_root,
)
from relaxrk.tableaus import ButcherTableau

logger = logging.getLogger(__name__)

MIN_GAMMA = 1e-3
ENDPOINT_SHRINKS = 5


class RelaxationError(RuntimeError):
    """The relaxation parameter could not be determined for a step."""


class IntegrationError(RuntimeError):
    """Integration aborted; ``trace`` holds everything computed before failure."""

    def __init__(self, message: str, trace: "SolveTrace"):
        super().__init__(message)
        self.trace = trace


class Classification(str, enum.Enum):
    CONSERVATIVE = "conservative"
    DISSIPATIVE = "dissipative"
    GENERAL = "general"


class StepMode(str, enum.Enum):
    BASELINE = "baseline"
    IDT = "idt"
    RELAXATION = "relaxation"


@dataclass(frozen=True)
class OdeProblem:
    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    entropy: Callable[[np.ndarray], float]
    entropy_gradient: Callable[[np.ndarray], np.ndarray]
    exact_solution: Optional[Callable[[float], np.ndarray]] = None
    linear_invariants: tuple = ()
    classification: Classification = Classification.GENERAL
    name: str = ""


@dataclass(frozen=True)
class StepAggregates:
    d: np.ndarray
    e: float
    stage_count: int
    # entropy-change estimates for additional gradients, same order as requested
    extra_e: tuple = ()
    # Δt Σ|b_i| ‖η'(y_i)‖ ‖f_i‖, the natural size of e
    e_scale: float = 0.0


@dataclass(frozen=True)
class RelaxationConfig:
    """Root-solve settings for the relaxation parameter.

    The absolute residual tolerance used in a step is
    ``rel_tol * max(1, |entropy(u)|)``.
    """

    root_method: str = "brent"
    rel_tol: float = 1e-14
    x_tol: float = 1e-15
    max_iters: int = 200

    def root_config(self, entropy_value: float = 1.0) -> RootConfig:
        return RootConfig(
            abs_tol=self.rel_tol * max(1.0, abs(entropy_value)),
            x_tol=self.x_tol,
            max_iters=self.max_iters,
            method=self.root_method,
        )


@dataclass(frozen=True)
class GammaDiagnostics:
    residual: float
    iterations: int
    degenerate: bool = False
    bracket: tuple = ()


@dataclass(frozen=True)
class StepOutput:
    u_new: np.ndarray
    t_new: float
    gamma: float
    residual_at_gamma: float
    residual_at_one: float
    rootfind_iterations: int
    flags: tuple = ()


@dataclass
class SolveTrace:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    gammas: list = field(default_factory=list)
    entropies: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    residuals_at_one: list = field(default_factory=list)
    iterations: list = field(default_factory=list)

    @property
    def step_count(self) -> int:
        return len(self.times) - 1

    def append(self, t: float, u: np.ndarray, gamma: float, entropy: float,
               residual: float = 0.0, residual_at_one: float = 0.0, iterations: int = 0):
        self.times.append(t)
        self.states.append(u)
        self.gammas.append(gamma)
        self.entropies.append(entropy)
        self.residuals.append(residual)
        self.residuals_at_one.append(residual_at_one)
        self.iterations.append(iterations)


def _as_state(u) -> np.ndarray:
    return np.atleast_1d(np.asarray(u, dtype=float))


def rk_stages(
    problem: OdeProblem,
    tab: ButcherTableau,
    t: float,
    u: np.ndarray,
    dt: float,
    extra_gradients: Sequence[Callable[[np.ndarray], np.ndarray]] = (),
) -> tuple[list[np.ndarray], StepAggregates]:
    """Evaluate the stages of an explicit method and accumulate ``d`` and ``e``."""
    if not tab.explicit:
        raise ValueError(f"tableau {tab.name} is not explicit")
    if not dt > 0:
        raise ValueError("dt must be positive")
    u = _as_state(u)
    A, b, c = tab.A, tab.b, tab.c
    s = tab.stages

    stages: list[np.ndarray] = []
    fs: list[np.ndarray] = []
    d = np.zeros_like(u)
    e = 0.0
    e_scale = 0.0
    extra = [0.0] * len(extra_gradients)
    for i in range(s):
        y = u.copy()
        for j in range(i):
            if A[i, j] != 0.0:
                y += (dt * A[i, j]) * fs[j]
        fi = _as_state(problem.rhs(t + c[i] * dt, y))
        if not np.all(np.isfinite(fi)):
            raise FloatingPointError(f"non-finite right-hand side at stage {i + 1}")
        stages.append(y)
        fs.append(fi)
        if b[i] != 0.0:
            d += b[i] * fi
            g = problem.entropy_gradient(y)
            e += b[i] * float(np.dot(g, fi))
            e_scale += abs(b[i]) * float(np.linalg.norm(g) * np.linalg.norm(fi))
            for k, grad in enumerate(extra_gradients):
                extra[k] += b[i] * float(np.dot(grad(y), fi))
    return stages, StepAggregates(
        d=d,
        e=dt * e,
        stage_count=s,
        extra_e=tuple(dt * v for v in extra),
        e_scale=dt * e_scale,
    )


def residual(gamma: float, u: np.ndarray, agg: StepAggregates, dt: float,
             entropy: Callable[[np.ndarray], float]) -> float:
    """Temporal entropy production ``r(gamma)``; exactly zero at ``gamma == 0``."""
    eta_u = entropy(u)
    if gamma == 0.0:
        return eta_u - eta_u
    val = entropy(u + (gamma * dt) * agg.d) - eta_u - gamma * agg.e
    if not math.isfinite(val):
        raise FloatingPointError(f"non-finite entropy evaluating r({gamma!r})")
    return val


def residual_derivative(gamma: float, u: np.ndarray, agg: StepAggregates, dt: float,
                        entropy_gradient: Callable[[np.ndarray], np.ndarray]) -> float:
    dtd = dt * agg.d
    val = float(np.dot(entropy_gradient(u + gamma * dtd), dtd)) - agg.e
    if not math.isfinite(val):
        raise FloatingPointError(f"non-finite entropy gradient evaluating r'({gamma!r})")
    return val


def solve_gamma(
    u: np.ndarray,
    agg: StepAggregates,
    dt: float,
    problem: OdeProblem,
    cfg: RootConfig,
    warm_start: float = 1.0,
) -> tuple[float, GammaDiagnostics]:
    """Find the positive root of the relaxation residual.

    A flat residual (``|r(1)|`` and ``|r'(1)|/2`` both within tolerance) yields
    ``gamma = 1``. The trivial root at zero is never returned.
    """
    if not warm_start > 0:
        raise ValueError("warm_start must be positive")
    u = _as_state(u)

    def r(g):
        return residual(g, u, agg, dt, problem.entropy)

    def dr(g):
        return residual_derivative(g, u, agg, dt, problem.entropy_gradient)

    r1 = r(1.0)
    if max(abs(r1), 0.5 * abs(dr(1.0))) <= cfg.abs_tol:
        return 1.0, GammaDiagnostics(r1, 0, degenerate=True)

    try:
        lo, hi = bracket_root(r, warm_start, cfg)
    except BracketError as exc:
        raise RelaxationError(f"could not bracket gamma: {exc}") from exc

    if hi <= 0.0:
        raise RelaxationError(f"only a non-positive root found, bracket [{lo!r}, {hi!r}]")
    if lo < MIN_GAMMA:
        lo = MIN_GAMMA
        if r(lo) * r(hi) > 0.0:
            raise RelaxationError(f"no root of r in [{MIN_GAMMA}, {hi!r}]")

    try:
        res = find_root(r, dr, lo, hi, cfg)
    except RootFindingError as exc:
        raise RelaxationError(str(exc)) from exc
    if res.root <= 0.0:
        raise RelaxationError(f"non-positive gamma {res.root!r}")
    return res.root, GammaDiagnostics(res.f_at_root, res.iterations, bracket=(lo, hi))


def solve_gamma_multi(
    u: np.ndarray,
    aggs: Sequence[StepAggregates],
    dt: float,
    entropies: Sequence[OdeProblem],
    cfg: RootConfig,
    warm_start: float = 1.0,
) -> float:
    """Smallest relaxation parameter over several convex entropies.

    ``entropies[k]`` supplies ``entropy``/``entropy_gradient``; ``aggs[k]`` must
    carry the estimate ``e`` computed with that gradient.
    """
    if len(aggs) != len(entropies) or not aggs:
        raise ValueError("need one aggregate per entropy")
    gammas = [solve_gamma(u, agg, dt, prob, cfg, warm_start)[0] for agg, prob in zip(aggs, entropies)]
    return min(gammas)


def step(
    problem: OdeProblem,
    tab: ButcherTableau,
    t: float,
    u: np.ndarray,
    dt: float,
    mode: StepMode | str = StepMode.RELAXATION,
    cfg: Optional[RelaxationConfig] = None,
    warm_start: float = 1.0,
) -> StepOutput:
    mode = StepMode(mode)
    cfg = cfg or RelaxationConfig()
    u = _as_state(u)
    _, agg = rk_stages(problem, tab, t, u, dt)
    flags = () if tab.nonneg_weights else ("negative_weights",)

    r1 = residual(1.0, u, agg, dt, problem.entropy)
    if mode is StepMode.BASELINE:
        u_new = u + dt * agg.d
        return StepOutput(u_new, t + dt, 1.0, r1, r1, 0, flags)

    root_cfg = cfg.root_config(problem.entropy(u))
    gamma, diag = solve_gamma(u, agg, dt, problem, root_cfg, warm_start)
    if diag.degenerate:
        flags += ("degenerate",)
    u_new = u + (gamma * dt) * agg.d
    t_new = t + gamma * dt if mode is StepMode.RELAXATION else t + dt
    return StepOutput(u_new, t_new, gamma, diag.residual, r1, diag.iterations, flags)


def integrate(
    problem: OdeProblem,
    tab: ButcherTableau,
    t0: float,
    u0,
    dt: float,
    t_end: float,
    mode: StepMode | str = StepMode.RELAXATION,
    cfg: Optional[RelaxationConfig] = None,
    max_steps: int = 10_000_000,
) -> SolveTrace:
    """Fixed-step integration from ``t0`` to ``t_end``.

    The previous step's gamma warm-starts each root solve and predicts the
    length of the last step. In relaxation mode the last step is re-shrunk up to
    five times so the realized final time is within ``1e-8 * dt`` of ``t_end``;
    the trace stores the realized times.
    """
    mode = StepMode(mode)
    cfg = cfg or RelaxationConfig()
    if not t_end > t0:
        raise ValueError("t_end must exceed t0")
    if not dt > 0:
        raise ValueError("dt must be positive")

    t = float(t0)
    u = _as_state(u0).copy()
    trace = SolveTrace()
    trace.append(t, u, 1.0, problem.entropy(u))
    gamma_prev = 1.0
    finish = t_end - 1e-12 * dt

    def advance(dt_try: float) -> StepOutput:
        return step(problem, tab, t, u, dt_try, mode, cfg, warm_start=gamma_prev)

    try:
        while t < finish:
            if trace.step_count >= max_steps:
                raise RuntimeError(f"exceeded {max_steps} steps")
            scale = gamma_prev if mode is StepMode.RELAXATION else 1.0
            final = t + scale * dt >= finish
            out = advance((t_end - t) / scale if final else dt)
            if mode is StepMode.RELAXATION and (final or out.t_new > t_end + 1e-8 * dt):
                for _ in range(ENDPOINT_SHRINKS):
                    if abs(out.t_new - t_end) <= 1e-8 * dt:
                        break
                    out = advance((t_end - t) / out.gamma)
            elif final:
                out = replace(out, t_new=t_end)
            t, u = out.t_new, out.u_new
            if mode is not StepMode.BASELINE:
                gamma_prev = out.gamma
            trace.append(t, u, out.gamma, problem.entropy(u), out.residual_at_gamma,
                         out.residual_at_one, out.rootfind_iterations)
    except (RelaxationError, FloatingPointError, RuntimeError) as exc:
        raise IntegrationError(f"integration failed at t={t!r}: {exc}", trace) from exc
    return trace


def closed_form_gamma_quadratic(u: np.ndarray, agg: StepAggregates, dt: float) -> float:
    """Positive root of ``r`` for ``eta(u) = |u|^2 / 2``."""
    dtd = dt * agg.d
    return 2.0 * (agg.e - float(np.dot(u, dtd))) / float(np.dot(dtd, dtd))
