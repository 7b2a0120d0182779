"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run standalone with ``python tests/test_acceptance.py`` or through pytest,
where the lines are repeated in the terminal summary.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import pytest

from relaxrk.burgers1d import BurgersGrid, burgers_problem, smooth_initial, total_entropy, total_mass
from relaxrk.cli import ExperimentSpec, fit_slope, run_convergence, summary_slope
from relaxrk.integrator import (
    OdeProblem,
    StepMode,
    closed_form_gamma_quadratic,
    integrate,
    residual,
    rk_stages,
    solve_gamma,
)
from relaxrk.problems import get_problem
from relaxrk.rootfind import RootConfig
from relaxrk.tableaus import builtin

CONVERGENCE_LADDER = (0.2, 0.1, 0.05, 0.025, 0.0125)
CONVERGENCE_T_END = 2.0
# first-step scaling studies; the coarse end of the ladder above is pre-asymptotic for r(1)
SCALING_LADDER = (0.05, 0.025, 0.0125, 0.00625)
HARMONIC_T_END = 5.0
BURGERS_DT = 0.003
TIGHT = RootConfig(abs_tol=1e-300, x_tol=1e-300)

RESULTS: dict[int, str] = {}


@dataclass(frozen=True)
class Outcome:
    passed: bool
    detail: str


def report(number: int, title: str, outcome: Outcome) -> None:
    line = f"criterion {number:2d} {'PASS' if outcome.passed else 'FAIL'}  {title}: {outcome.detail}"
    RESULTS[number] = line
    print(line)
    assert outcome.passed, line


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


# {{{ criteria


def conservation() -> Outcome:
    entry = get_problem("conserved-exp")
    prob, u0 = entry.problem, entry.default_u0
    eta0 = prob.entropy(u0)
    ok, parts = True, []
    for name in ("SSPRK(2,2)", "SSPRK(3,3)", "RK(4,4)", "BSRK(8,5)"):
        tr, sec = timed(integrate, prob, builtin(name), 0.0, u0, 0.05, 5.0, StepMode.RELAXATION)
        drift = max(abs(v - eta0) for v in tr.entropies) / eta0
        ok &= drift <= 1e-12 and sec < 1.0
        parts.append(f"{name} drift={drift:.1e} t={sec:.2f}s")
    return Outcome(ok, "; ".join(parts))


def dissipation() -> Outcome:
    entry = get_problem("dissipated-exp")
    prob, u0 = entry.problem, entry.default_u0
    ok, worst, t0 = True, -np.inf, time.perf_counter()
    for name in ("SSPRK(2,2)", "SSPRK(3,3)", "RK(4,4)", "BSRK(8,5)"):
        eta = integrate(prob, builtin(name), 0.0, u0, 0.05, 2.0, StepMode.RELAXATION).entropies
        for a, b in zip(eta, eta[1:]):
            ok &= b <= a + 1e-13 * abs(a)
            worst = max(worst, (b - a) / abs(a))
    sec = time.perf_counter() - t0
    return Outcome(ok and sec < 1.0, f"max relative step change={worst:.2e} t={sec:.2f}s")


def order_retention() -> Outcome:
    cases = [(m, "relaxation", p, 0.4) for m, p in (
        ("SSPRK(2,2)", 2), ("SSPRK(3,3)", 3), ("Heun(3,3)", 3), ("BSRK(3,3)", 3),
        ("RK(4,4)", 4), ("SSPRK(10,4)", 4))]
    cases += [("BSRK(8,5)", "relaxation", 5, 0.6), ("SSPRK(3,3)", "idt", 2, 0.6), ("RK(4,4)", "idt", 3, 0.6)]
    ok, parts, t0 = True, [], time.perf_counter()
    for name, mode, target, band in cases:
        rows = run_convergence(ExperimentSpec("convergence", name, mode, CONVERGENCE_LADDER,
                                              CONVERGENCE_T_END))
        slope = summary_slope(rows)
        ok &= abs(slope - target) <= band and not any(r.failed for r in rows)
        parts.append(f"{name}/{mode}={slope:.2f}")
    sec = time.perf_counter() - t0
    return Outcome(ok and sec < 5.0, " ".join(parts) + f" t={sec:.2f}s")


def first_step(name: str, h: float):
    entry = get_problem("conserved-exp")
    prob, u0 = entry.problem, entry.default_u0
    stages, agg = rk_stages(prob, builtin(name), 0.0, u0, h)
    return prob, u0, stages, agg


def residual_scaling() -> Outcome:
    ok, parts, t0 = True, [], time.perf_counter()
    for name, p in (("SSPRK(3,3)", 3), ("RK(4,4)", 4)):
        r1 = []
        for h in SCALING_LADDER:
            prob, u0, _, agg = first_step(name, h)
            r1.append(residual(1.0, u0, agg, h, prob.entropy))
        slope = fit_slope(SCALING_LADDER, r1)
        ok &= slope >= p + 0.6
        parts.append(f"{name} slope={slope:.2f} (need >= {p + 0.6:.1f})")
    sec = time.perf_counter() - t0
    return Outcome(ok and sec < 1.0, "; ".join(parts) + f" t={sec:.2f}s")


def gamma_deviation() -> Outcome:
    t0 = time.perf_counter()
    dev = []
    for h in SCALING_LADDER:
        prob, u0, _, agg = first_step("RK(4,4)", h)
        dev.append(solve_gamma(u0, agg, h, prob, TIGHT)[0] - 1.0)
    slope = fit_slope(SCALING_LADDER, dev)
    sec = time.perf_counter() - t0
    return Outcome(slope >= 4 - 1.4 and sec < 1.0, f"RK(4,4) slope={slope:.2f} (need >= 2.6) t={sec:.2f}s")


def superconvergence() -> Outcome:
    # <eta', f> vanishes identically on this problem, so the componentwise product
    # eta'(u) * f(t, u) (values in R^2) stands in for the scalar pairing
    t0 = time.perf_counter()
    tab = builtin("RK(4,4)")
    diffs = []
    for h in SCALING_LADDER:
        prob, _, stages, _ = first_step("RK(4,4)", h)

        def psi(t, u):
            return prob.entropy_gradient(u) * prob.rhs(t, u)

        num = sum(b * psi(c * h, y) for b, c, y in zip(tab.b, tab.c, stages))
        ref = sum(b * psi(c * h, prob.exact_solution(c * h)) for b, c in zip(tab.b, tab.c))
        diffs.append(float(np.linalg.norm(num - ref)))
    slope = fit_slope(SCALING_LADDER, diffs)
    sec = time.perf_counter() - t0
    return Outcome(slope >= 4 - 0.4 and sec < 1.0, f"RK(4,4) slope={slope:.2f} (need >= 3.6) t={sec:.2f}s")


def pendulum() -> Outcome:
    entry = get_problem("pendulum")
    prob, u0 = entry.problem, entry.default_u0
    eta0 = prob.entropy(u0)
    t0 = time.perf_counter()
    drift = {}
    for mode in (StepMode.BASELINE, StepMode.RELAXATION):
        tr = integrate(prob, builtin("RK(4,4)"), 0.0, u0, 0.9, 500.0, mode)
        drift[mode] = max(abs(v - eta0) for v in tr.entropies)
    sec = time.perf_counter() - t0
    base, rel = drift[StepMode.BASELINE], drift[StepMode.RELAXATION]
    ok = base >= 100 * rel and rel <= 1e-10 * abs(eta0) and sec < 1.0
    return Outcome(ok, f"baseline drift={base:.3e} relaxation drift={rel:.2e} t={sec:.2f}s")


def heun_bonus_order() -> Outcome:
    t0 = time.perf_counter()
    slopes = {}
    for mode in ("relaxation", "baseline"):
        rows = run_convergence(ExperimentSpec("convergence", "Heun(3,3)", mode, CONVERGENCE_LADDER,
                                              HARMONIC_T_END, "harmonic"))
        slopes[mode] = summary_slope(rows)
    sec = time.perf_counter() - t0
    ok = 3.6 <= slopes["relaxation"] <= 4.4 and 2.6 <= slopes["baseline"] <= 3.4 and sec < 2.0
    return Outcome(ok, f"relaxation={slopes['relaxation']:.3f} baseline={slopes['baseline']:.3f} t={sec:.2f}s")


def random_quadratic_problems(count: int, seed: int = 20191):
    """Skew-minus-PSD linear systems with eta = |u|^2 / 2.

    Draws whose step ``|dt d|`` is below a tenth of ``|u|`` are redrawn: there the
    root is conditioned by round-off in eta rather than by the solver. Draws with
    no positive root (step too large for the system) are redrawn as well.
    """
    rng = np.random.default_rng(seed)
    names = ("SSPRK(2,2)", "SSPRK(3,3)", "RK(4,4)", "BSRK(8,5)", "SSPRK(10,4)")
    while count:
        dim = int(rng.integers(2, 7))
        S = rng.normal(size=(dim, dim))
        L = rng.normal(size=(dim, dim)) * rng.uniform(0.0, 0.5)
        M = (S - S.T) - L @ L.T
        prob = OdeProblem(dim, lambda t, u, M=M: M @ u, lambda u: 0.5 * float(u @ u), lambda u: u)
        u = rng.normal(size=dim)
        h = rng.uniform(0.05, 0.5)
        tab = builtin(names[count % len(names)])
        _, agg = rk_stages(prob, tab, 0.0, u, h)
        if np.linalg.norm(h * agg.d) < 0.1 * np.linalg.norm(u):
            continue
        if closed_form_gamma_quadratic(u, agg, h) <= 0.01:
            continue
        count -= 1
        yield prob, u, h, agg


def closed_form() -> Outcome:
    t0 = time.perf_counter()
    worst = 0.0
    for prob, u, h, agg in random_quadratic_problems(50):
        gamma, _ = solve_gamma(u, agg, h, prob, TIGHT)
        worst = max(worst, abs(gamma - closed_form_gamma_quadratic(u, agg, h)))
    sec = time.perf_counter() - t0
    return Outcome(worst <= 1e-12 and sec < 1.0, f"max |gamma difference|={worst:.1e} t={sec:.2f}s")


def burgers() -> Outcome:
    grid = BurgersGrid(64)
    prob = burgers_problem(grid, smooth_initial)
    u0 = grid.sample(smooth_initial)
    eta0, mass_scale = total_entropy(u0, grid), grid.dx * np.sum(np.abs(u0))
    mass0 = total_mass(u0, grid)
    t0 = time.perf_counter()
    ok, parts = True, []
    for mode in StepMode:
        tr = integrate(prob, builtin("RK(4,4)"), 0.0, u0, BURGERS_DT, 0.3, mode)
        mass = max(abs(total_mass(u, grid) - mass0) for u in tr.states) / mass_scale
        ok &= mass <= 1e-13
        text = f"{mode.value} mass={mass:.1e}"
        if mode is StepMode.RELAXATION:
            ent = max(abs(v - eta0) for v in tr.entropies) / eta0
            ok &= ent <= 1e-11
            text += f" entropy={ent:.1e}"
        parts.append(text)
    sec = time.perf_counter() - t0
    return Outcome(ok and sec < 2.0, "; ".join(parts) + f" t={sec:.2f}s")


def residual_shape() -> Outcome:
    t0 = time.perf_counter()
    ok, parts = True, []
    grid = np.linspace(-1.0, 3.0, 401)
    for name in ("SSPRK(3,3)", "RK(4,4)"):
        prob, u0, _, agg = first_step(name, 0.1)
        scale = prob.entropy(u0)
        root, _ = solve_gamma(u0, agg, 0.1, prob, TIGHT)
        vals = np.array([residual(g, u0, agg, 0.1, prob.entropy) for g in grid])
        zero = residual(0.0, u0, agg, 0.1, prob.entropy)
        # samples within 1e-9 of a root carry no sign information
        inner = (grid > 1e-9) & (grid < root - 1e-9)
        outer = (grid < -1e-9) | (grid > root + 1e-9)
        second = vals[:-2] - 2 * vals[1:-1] + vals[2:]
        good = (zero == 0.0 and np.all(vals[inner] < 0) and np.all(vals[outer] > 0)
                and np.min(second) >= -1e-10 * scale)
        ok &= bool(good) and inner.sum() > 0
        parts.append(f"{name} root={root:.6f} min second difference={np.min(second):.1e}")
    sec = time.perf_counter() - t0
    return Outcome(ok and sec < 1.0, "; ".join(parts) + f" t={sec:.2f}s")


CRITERIA = {
    1: ("conservation", conservation),
    2: ("dissipation", dissipation),
    3: ("order retention", order_retention),
    4: ("residual at one scaling", residual_scaling),
    5: ("gamma deviation", gamma_deviation),
    6: ("quadrature superconvergence", superconvergence),
    7: ("pendulum long run", pendulum),
    8: ("Heun bonus order", heun_bonus_order),
    9: ("closed-form gamma", closed_form),
    10: ("Burgers conservation", burgers),
    11: ("residual shape", residual_shape),
}

# }}}


@pytest.mark.parametrize("number", list(CRITERIA))
def test_criterion(number):
    title, fn = CRITERIA[number]
    report(number, title, fn())


if __name__ == "__main__":
    failed = 0
    for number, (title, fn) in CRITERIA.items():
        try:
            report(number, title, fn())
        except AssertionError:
            failed += 1
    raise SystemExit(1 if failed else 0)
