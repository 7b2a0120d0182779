"""Periodic inviscid Burgers with an entropy-conservative two-point flux.

Semi-discretization on ``N`` uniform cells::

    du_j/dt = -(F(u_j, u_{j+1}) - F(u_{j-1}, u_j)) / dx,
    F(l, r) = (l**2 + l*r + r**2) / 6.

The flux telescopes against ``u_j``, so ``dx * sum(u**2) / 2`` is conserved by
the semi-discrete system, and the mass ``dx * sum(u)`` by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from relaxrk.integrator import Classification, OdeProblem


@dataclass(frozen=True)
class BurgersGrid:
    cells: int
    x_lo: float = 0.0
    x_hi: float = 1.0

    def __post_init__(self):
        if self.cells < 4:
            raise ValueError("need at least 4 cells")
        if not self.x_hi > self.x_lo:
            raise ValueError("empty domain")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.cells) + 0.5) * self.dx

    def sample(self, initial: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        return np.asarray(initial(self.centers), dtype=float)


def ec_flux(ul, ur):
    return (ul * ul + ul * ur + ur * ur) / 6.0


def burgers_rhs(u: np.ndarray, dx: float) -> np.ndarray:
    flux = ec_flux(u, np.roll(u, -1))  # F_{j+1/2}
    return -(flux - np.roll(flux, 1)) / dx


def _check_length(u: np.ndarray, grid: BurgersGrid) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.cells,):
        raise ValueError(f"state has shape {u.shape}, grid has {grid.cells} cells")
    return u


def total_entropy(u: np.ndarray, grid: BurgersGrid) -> float:
    u = _check_length(u, grid)
    return 0.5 * grid.dx * float(np.dot(u, u))


def total_mass(u: np.ndarray, grid: BurgersGrid) -> float:
    u = _check_length(u, grid)
    return grid.dx * float(np.sum(u))


def burgers_problem(grid: BurgersGrid, initial: Callable[[np.ndarray], np.ndarray]) -> OdeProblem:
    dx = grid.dx
    u0 = grid.sample(initial)
    weights = np.full(grid.cells, dx)

    return OdeProblem(
        dimension=grid.cells,
        rhs=lambda t, u: burgers_rhs(u, dx),
        entropy=lambda u: total_entropy(u, grid),
        entropy_gradient=lambda u: dx * np.asarray(u, dtype=float),
        exact_solution=None,
        linear_invariants=((weights, float(weights @ u0)),),
        classification=Classification.CONSERVATIVE,
        name=f"burgers-{grid.cells}",
    )


def smooth_initial(x: np.ndarray) -> np.ndarray:
    return 0.5 + np.sin(2 * np.pi * x)
