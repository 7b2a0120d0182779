"""ODE test problems with entropy functionals and, where known, exact solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from relaxrk.integrator import Classification, OdeProblem


@dataclass(frozen=True)
class ProblemCatalogEntry:
    name: str
    problem: OdeProblem
    default_u0: np.ndarray
    default_tspan: tuple[float, float]
    default_dt: float
    metadata: dict = field(default_factory=dict)


def _entry(name, problem, u0, tspan, dt, **metadata) -> ProblemCatalogEntry:
    u0 = np.atleast_1d(np.asarray(u0, dtype=float))
    u0.setflags(write=False)
    return ProblemCatalogEntry(name, problem, u0, tspan, dt, metadata)


def conserved_exp_entropy() -> ProblemCatalogEntry:
    """``u' = (-exp(u2), exp(u1))`` with conserved ``exp(u1) + exp(u2)``."""
    sqe = math.sqrt(math.e)
    s = sqe + math.e

    def rhs(t, u):
        return np.array([-math.exp(u[1]), math.exp(u[0])])

    def entropy(u):
        return math.exp(u[0]) + math.exp(u[1])

    def gradient(u):
        return np.exp(u)

    def exact(t):
        est = math.exp(s * t)
        return np.array([
            math.log(math.e + math.e**1.5) - math.log(sqe + est),
            s * t + math.log(s) - math.log(sqe + est),
        ])

    prob = OdeProblem(2, rhs, entropy, gradient, exact, (), Classification.CONSERVATIVE,
                      "conserved-exp")
    return _entry("conserved-exp", prob, [1.0, 0.5], (0.0, 5.0), 0.05)


def dissipated_exp_entropy() -> ProblemCatalogEntry:
    """Scalar ``u' = -exp(u)`` dissipating ``exp(u)``."""

    def rhs(t, u):
        return -np.exp(u)

    def entropy(u):
        return math.exp(u[0])

    def gradient(u):
        return np.exp(u)

    def exact(t):
        return np.array([-math.log(math.exp(-0.5) + t)])

    prob = OdeProblem(1, rhs, entropy, gradient, exact, (), Classification.DISSIPATIVE,
                      "dissipated-exp")
    return _entry("dissipated-exp", prob, [0.5], (0.0, 2.0), 0.05)


def nonlinear_pendulum() -> ProblemCatalogEntry:
    def rhs(t, u):
        return np.array([-math.sin(u[1]), u[0]])

    def entropy(u):
        return 0.5 * u[0] ** 2 - math.cos(u[1])

    def gradient(u):
        return np.array([u[0], math.sin(u[1])])

    prob = OdeProblem(2, rhs, entropy, gradient, None, (), Classification.CONSERVATIVE, "pendulum")
    return _entry(
        "pendulum",
        prob,
        [1.5, 1.0],
        (0.0, 500.0),
        0.9,
        convex_region="|u2| < pi/2",
        leaves_convex_region=True,
    )


def _rotation(u0: np.ndarray, angle: float) -> np.ndarray:
    ca, sa = math.cos(angle), math.sin(angle)
    return np.array([ca * u0[0] - sa * u0[1], sa * u0[0] + ca * u0[1]])


def _quadratic_entropy(u) -> float:
    return 0.5 * float(np.dot(u, u))


def _identity_gradient(u) -> np.ndarray:
    return np.array(u, dtype=float)


def oscillators(u0=(1.0, 0.0)) -> tuple[ProblemCatalogEntry, ProblemCatalogEntry]:
    """Harmonic and nonlinear oscillators, both with energy ``|u|^2 / 2``.

    The nonlinear oscillator keeps ``|u|`` fixed, so its exact solution is a
    rotation of ``u0`` with angular speed ``|u0|^2``.
    """
    u0 = np.asarray(u0, dtype=float)
    speed = float(np.dot(u0, u0))

    def harmonic_rhs(t, u):
        return np.array([-u[1], u[0]])

    def nonlinear_rhs(t, u):
        n2 = u[0] ** 2 + u[1] ** 2
        return np.array([-n2 * u[1], n2 * u[0]])

    harmonic = OdeProblem(2, harmonic_rhs, _quadratic_entropy, _identity_gradient,
                          lambda t: _rotation(u0, t), (), Classification.CONSERVATIVE, "harmonic")
    nonlinear = OdeProblem(2, nonlinear_rhs, _quadratic_entropy, _identity_gradient,
                           lambda t: _rotation(u0, speed * t), (), Classification.CONSERVATIVE,
                           "nonlinear-oscillator")
    return (
        _entry("harmonic", harmonic, u0, (0.0, 5.0), 0.1),
        _entry("nonlinear-oscillator", nonlinear, u0, (0.0, 5.0), 0.1),
    )


def lotka_volterra(alpha=1.0, beta=1.0, delta=1.0, gamma=1.0, u0=(1.0, 2.0)) -> ProblemCatalogEntry:
    """Predator-prey model with the logarithmic first integral.

    ``V(u) = delta*u1 - gamma*log(u1) + beta*u2 - alpha*log(u2)`` is convex on
    the positive quadrant and constant along solutions. Parameter defaults are
    arbitrary choices, not taken from any reference experiment.
    """

    def rhs(t, u):
        return np.array([u[0] * (alpha - beta * u[1]), u[1] * (delta * u[0] - gamma)])

    def entropy(u):
        if u[0] <= 0 or u[1] <= 0:
            return math.nan
        return delta * u[0] - gamma * math.log(u[0]) + beta * u[1] - alpha * math.log(u[1])

    def gradient(u):
        return np.array([delta - gamma / u[0], beta - alpha / u[1]])

    prob = OdeProblem(2, rhs, entropy, gradient, None, (), Classification.CONSERVATIVE,
                      "lotka-volterra")
    return _entry("lotka-volterra", prob, u0, (0.0, 20.0), 0.1, domain="u1 > 0, u2 > 0")


_FACTORIES: dict[str, Callable[[], ProblemCatalogEntry]] = {
    "conserved-exp": conserved_exp_entropy,
    "dissipated-exp": dissipated_exp_entropy,
    "pendulum": nonlinear_pendulum,
    "harmonic": lambda: oscillators()[0],
    "nonlinear-oscillator": lambda: oscillators()[1],
    "lotka-volterra": lotka_volterra,
}

PROBLEM_NAMES = tuple(_FACTORIES)


def get_problem(name: str) -> ProblemCatalogEntry:
    try:
        return _FACTORIES[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; available: {', '.join(PROBLEM_NAMES)}") from None
