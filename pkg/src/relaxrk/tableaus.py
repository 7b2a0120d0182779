"""Explicit Butcher tableaus: validation, order conditions and a small catalog.

Coefficients are stored as float64 arrays. Catalog entries whose sources give
rational coefficients are written as :class:`fractions.Fraction` literals and
converted once, so the abscissae ``c = A @ 1`` are exact before rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as F
from pathlib import Path
from typing import Sequence

import numpy as np

STRUCTURE_TOL = 1e-14
ORDER_TOL = 1e-12


class TableauError(ValueError):
    """Raised for malformed or inconsistent tableaus."""


@dataclass(frozen=True)
class ButcherTableau:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    claimed_order: int
    name: str
    source: str = ""

    @property
    def stages(self) -> int:
        return self.b.shape[0]

    @property
    def explicit(self) -> bool:
        return bool(np.all(np.triu(self.A) == 0.0))

    @property
    def nonneg_weights(self) -> bool:
        return bool(np.all(self.b >= 0.0))

    def __hash__(self) -> int:
        return hash((self.name, self.A.tobytes(), self.b.tobytes(), self.c.tobytes()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ButcherTableau):
            return NotImplemented
        return (
            self.name == other.name
            and self.claimed_order == other.claimed_order
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.c, other.c)
        )


@dataclass(frozen=True)
class TableauReport:
    satisfied_order: int
    nonneg_weights: bool
    existence_A: float
    existence_B: float
    residuals: dict = field(default_factory=dict, compare=False)


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.setflags(write=False)
    return arr


def new_tableau(A, b, c, claimed_order: int, name: str, source: str = "") -> ButcherTableau:
    """Build a validated tableau.

    Raises :class:`TableauError` on shape mismatch, ``A @ 1 != c`` or
    ``sum(b) != 1`` beyond ``1e-14``.
    """
    A = np.atleast_2d(np.array(A, dtype=float))
    b = np.atleast_1d(np.array(b, dtype=float))
    c = np.atleast_1d(np.array(c, dtype=float))
    s = b.shape[0]
    if s < 1:
        raise TableauError("tableau needs at least one stage")
    if A.shape != (s, s) or c.shape != (s,) or b.ndim != 1:
        raise TableauError(f"dimension mismatch: A{A.shape}, b{b.shape}, c{c.shape}")
    if claimed_order < 1:
        raise TableauError("claimed_order must be positive")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
        raise TableauError("non-finite coefficient")
    row_err = np.max(np.abs(A.sum(axis=1) - c))
    if row_err > STRUCTURE_TOL:
        raise TableauError(f"row sums of A differ from c by {row_err:.3e}")
    sum_err = abs(b.sum() - 1.0)
    if sum_err > STRUCTURE_TOL:
        raise TableauError(f"weights sum to {b.sum()!r}, not 1")
    return ButcherTableau(_frozen(A), _frozen(b), _frozen(c), int(claimed_order), name, source)


def _order_residuals(tab: ButcherTableau) -> dict[int, list[float]]:
    A, b, c = tab.A, tab.b, tab.c
    Ac = A @ c
    return {
        1: [b.sum() - 1.0],
        2: [b @ c - 1 / 2],
        3: [b @ c**2 - 1 / 3, b @ Ac - 1 / 6],
        4: [
            b @ c**3 - 1 / 4,
            (b * c) @ Ac - 1 / 8,
            b @ (A @ c**2) - 1 / 12,
            b @ (A @ Ac) - 1 / 24,
        ],
    }


def check_order_conditions(tab: ButcherTableau) -> TableauReport:
    """Closed-form order conditions through order 4 plus the existence sums.

    ``existence_A`` is ``sum_ij b_i a_ij`` and ``existence_B`` is
    ``sum_ij b_i (a_ij - b_j)``; a positive root of the relaxation residual is
    guaranteed for small steps when the first is positive and the second
    negative.
    """
    residuals = _order_residuals(tab)
    satisfied = 0
    for k in (1, 2, 3, 4):
        if max(abs(r) for r in residuals[k]) <= ORDER_TOL:
            satisfied = k
        else:
            break
    ex_a = float(tab.b @ tab.A.sum(axis=1))
    ex_b = float(ex_a - tab.b.sum() ** 2)
    return TableauReport(satisfied, tab.nonneg_weights, ex_a, ex_b, residuals)


# {{{ catalog


def _rational(A_rows, b, claimed_order, name, source) -> ButcherTableau:
    s = len(b)
    A = [[F(0)] * s for _ in range(s)]
    for i, row in enumerate(A_rows):
        for j, v in enumerate(row):
            A[i][j] = F(v)
    c = [sum(row, F(0)) for row in A]
    return new_tableau(
        [[float(v) for v in row] for row in A],
        [float(F(v)) for v in b],
        [float(v) for v in c],
        claimed_order,
        name,
        source,
    )


def _ssprk104_rows():
    sixth, fifteenth = F(1, 6), F(1, 15)
    rows = [[]]
    for i in range(1, 5):
        rows.append([sixth] * i)
    for i in range(5, 10):
        rows.append([fifteenth] * 5 + [sixth] * (i - 5))
    return rows


_CATALOG_SPECS = {
    "SSPRK(2,2)": (
        [[], [1]],
        [F(1, 2), F(1, 2)],
        2,
        "Shu & Osher (1988), two-stage SSP method",
    ),
    "SSPRK(3,3)": (
        [[], [1], [F(1, 4), F(1, 4)]],
        [F(1, 6), F(1, 6), F(2, 3)],
        3,
        "Shu & Osher (1988), three-stage SSP method",
    ),
    "SSPRK(10,4)": (
        _ssprk104_rows(),
        [F(1, 10)] * 10,
        4,
        "ten-stage fourth-order SSP method; Butcher form derived from the Shu-Osher "
        "coefficients (alpha_65=2/5, alpha_11,5=9/25, alpha_11,10=3/5, beta=alpha/6)",
    ),
    "RK(4,4)": (
        [[], [F(1, 2)], [0, F(1, 2)], [0, 0, 1]],
        [F(1, 6), F(1, 3), F(1, 3), F(1, 6)],
        4,
        "classical fourth-order Runge-Kutta method",
    ),
    "Heun(3,3)": (
        [[], [F(1, 3)], [0, F(2, 3)]],
        [F(1, 4), 0, F(3, 4)],
        3,
        "Heun's third-order method",
    ),
    "BSRK(3,3)": (
        [[], [F(1, 2)], [0, F(3, 4)]],
        [F(2, 9), F(1, 3), F(4, 9)],
        3,
        "Bogacki & Shampine (1989) 3(2) pair, third-order weights without the FSAL stage",
    ),
    "BSRK(8,5)": (
        [
            [],
            [F(1, 6)],
            [F(2, 27), F(4, 27)],
            [F(183, 1372), F(-162, 343), F(1053, 1372)],
            [F(68, 297), F(-4, 11), F(42, 143), F(1960, 3861)],
            [F(597, 22528), F(81, 352), F(63099, 585728), F(58653, 366080), F(4617, 20480)],
            [
                F(174197, 959244),
                F(-30942, 79937),
                F(8152137, 19744439),
                F(666106, 1039181),
                F(-29421, 29068),
                F(482048, 414219),
            ],
            [
                F(587, 8064),
                0,
                F(4440339, 15491840),
                F(24353, 124800),
                F(387, 44800),
                F(2152, 5985),
                F(7267, 94080),
            ],
        ],
        [
            F(587, 8064),
            0,
            F(4440339, 15491840),
            F(24353, 124800),
            F(387, 44800),
            F(2152, 5985),
            F(7267, 94080),
            0,
        ],
        5,
        "Bogacki & Shampine (1996) 5(4)8 pair, fifth-order weights; "
        "transcribed from nodepy 1.1.1 loadRKM('BS5')",
    ),
}

CATALOG_NAMES: tuple[str, ...] = tuple(_CATALOG_SPECS)

_cache: dict[str, ButcherTableau] = {}


def builtin(name: str) -> ButcherTableau:
    """Return a catalog tableau by name, e.g. ``builtin("RK(4,4)")``."""
    if name not in _CATALOG_SPECS:
        raise KeyError(f"unknown tableau {name!r}; available: {', '.join(CATALOG_NAMES)}")
    if name not in _cache:
        rows, b, p, source = _CATALOG_SPECS[name]
        _cache[name] = _rational(rows, b, p, name, source)
    return _cache[name]


# }}}

# {{{ text format


def parse_tableau(text: str) -> ButcherTableau:
    """Parse ``s p name`` followed by s rows of A, one row b and one row c."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise TableauError("empty tableau file")
    header = lines[0].split(maxsplit=2)
    if len(header) < 2:
        raise TableauError("header must be 's p name'")
    try:
        s, p = int(header[0]), int(header[1])
    except ValueError as exc:
        raise TableauError(f"bad header {lines[0]!r}") from exc
    name = header[2] if len(header) > 2 else "custom"
    if len(lines) != s + 3:
        raise TableauError(f"expected {s + 3} non-empty lines, got {len(lines)}")

    def row(ln: str) -> list[float]:
        vals = [float(tok) for tok in ln.split()]
        if len(vals) != s:
            raise TableauError(f"expected {s} values in row {ln!r}")
        return vals

    A = [row(ln) for ln in lines[1 : s + 1]]
    return new_tableau(A, row(lines[s + 1]), row(lines[s + 2]), p, name, source="text file")


def load_tableau(path: str | Path) -> ButcherTableau:
    return parse_tableau(Path(path).read_text())


def format_tableau(tab: ButcherTableau) -> str:
    def fmt(v: Sequence[float]) -> str:
        return " ".join(f"{x:.17g}" for x in v)

    out = [f"{tab.stages} {tab.claimed_order} {tab.name}"]
    out += [fmt(r) for r in tab.A]
    out += [fmt(tab.b), fmt(tab.c)]
    return "\n".join(out) + "\n"


# }}}
