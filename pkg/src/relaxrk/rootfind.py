"""Safeguarded scalar root finding: bracketing, bisection, Brent, Newton."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

EPS = 2.220446049250313e-16

INITIAL_HALF_WIDTH = 0.1
GROWTH = 2.0
MAX_EXPANSIONS = 50

METHODS = ("bisection", "brent", "newton_safeguarded")


class RootFindingError(RuntimeError):
    pass


class BracketError(RootFindingError):
    """No sign change was found while expanding around the starting point."""


@dataclass(frozen=True)
class RootConfig:
    abs_tol: float = 1e-14
    x_tol: float = 1e-15
    max_iters: int = 200
    method: str = "brent"

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.x_tol > 0:
            raise ValueError("x_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.method not in METHODS:
            raise ValueError(f"unknown root method {self.method!r}")


@dataclass(frozen=True)
class RootResult:
    root: float
    f_at_root: float
    iterations: int
    converged: bool
    bracket_width: float = math.nan


def _guarded(f: Callable[[float], float]) -> Callable[[float], float]:
    def g(x: float) -> float:
        try:
            return float(f(x))
        except ArithmeticError:
            return math.nan
    return g


def bracket_root(f: Callable[[float], float], x0: float, cfg: RootConfig) -> tuple[float, float]:
    """Expand geometrically around ``x0`` until ``f`` changes sign.

    The lower end starts at ``x0 - 0.1`` and the upper end at ``x0 + 0.1``. The
    upper end is pushed outwards first (distance from ``x0`` doubling each
    time), then the lower end. Searching upwards first keeps the bracket away
    from roots below ``x0`` that are not the one sought, such as the trivial
    root of a relaxation residual at zero. The returned pair is the two
    neighbouring probes that enclose the first sign change. A direction is
    abandoned once ``f`` stops being finite there (overflow included).
    """
    f = _guarded(f)
    f0 = f(x0)
    if not math.isfinite(f0):
        raise BracketError(f"f is not finite at x0={x0!r}")
    if f0 == 0.0:
        return x0, x0 + INITIAL_HALF_WIDTH

    lo = x0 - INITIAL_HALF_WIDTH
    flo = f(lo)
    if math.isfinite(flo) and flo * f0 <= 0.0:
        return lo, x0

    prev, fprev = x0, f0
    w = INITIAL_HALF_WIDTH
    for _ in range(MAX_EXPANSIONS):
        hi = x0 + w
        fhi = f(hi)
        if not math.isfinite(fhi):
            break
        if fhi * fprev <= 0.0:
            return prev, hi
        prev, fprev = hi, fhi
        w *= GROWTH

    if not math.isfinite(flo):
        raise BracketError(f"f is not finite at {lo!r}")
    prev, fprev = lo, flo
    w = GROWTH * INITIAL_HALF_WIDTH
    for _ in range(MAX_EXPANSIONS):
        lo = x0 - w
        flo = f(lo)
        if not math.isfinite(flo):
            break
        if flo * fprev <= 0.0:
            return lo, prev
        prev, fprev = lo, flo
        w *= GROWTH
    raise BracketError(f"no sign change within {MAX_EXPANSIONS} expansions around {x0!r}")


def _check_bracket(flo: float, fhi: float, lo: float, hi: float) -> None:
    if not lo < hi:
        raise RootFindingError(f"invalid bracket [{lo!r}, {hi!r}]")
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise RootFindingError("f is not finite at the bracket ends")
    if flo * fhi > 0.0:
        raise RootFindingError(f"no sign change on [{lo!r}, {hi!r}]: f={flo!r}, {fhi!r}")


def _bisection(f, lo, hi, flo, fhi, cfg: RootConfig) -> RootResult:
    for it in range(1, cfg.max_iters + 1):
        mid = lo + 0.5 * (hi - lo)
        if not lo < mid < hi:
            # bracket is down to adjacent floats
            x, fx = (lo, flo) if abs(flo) <= abs(fhi) else (hi, fhi)
            return RootResult(x, fx, it - 1, True, hi - lo)
        fm = f(mid)
        if fm == 0.0:
            return RootResult(mid, fm, it, True, 0.0)
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        x, fx = (lo, flo) if abs(flo) <= abs(fhi) else (hi, fhi)
        if abs(fx) <= cfg.abs_tol or hi - lo <= cfg.x_tol:
            return RootResult(x, fx, it, True, hi - lo)
    raise RootFindingError(f"bisection did not converge in {cfg.max_iters} iterations")


def _brent(f, lo, hi, flo, fhi, cfg: RootConfig) -> RootResult:
    # Brent (1973), zero(): b is the best estimate, c the contrapoint.
    a, fa, b, fb = lo, flo, hi, fhi
    c, fc = a, fa
    d = e = b - a
    for it in range(1, cfg.max_iters + 1):
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * EPS * abs(b) + 0.5 * cfg.x_tol
        m = 0.5 * (c - b)
        width = abs(c - b)
        if abs(fb) <= cfg.abs_tol or fb == 0.0 or width <= cfg.x_tol:
            return RootResult(b, fb, it - 1, True, width)
        if abs(m) <= tol1:
            # interval is at floating resolution around b
            return RootResult(b, fb, it - 1, True, width)
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        if abs(d) > tol1:
            b = b + d
        else:
            b = b + math.copysign(tol1, m)
        # keep every evaluation inside the original bracket
        b = min(max(b, lo), hi)
        fb = f(b)
        if not math.isfinite(fb):
            raise RootFindingError(f"f is not finite at {b!r}")
    raise RootFindingError(f"brent did not converge in {cfg.max_iters} iterations")


def _newton(f, fprime, lo, hi, flo, fhi, cfg: RootConfig) -> RootResult:
    x = lo + 0.5 * (hi - lo)
    for it in range(1, cfg.max_iters + 1):
        fx = f(x)
        if not math.isfinite(fx):
            raise RootFindingError(f"f is not finite at {x!r}")
        if fx == 0.0 or abs(fx) <= cfg.abs_tol:
            return RootResult(x, fx, it, True, hi - lo)
        if (fx < 0.0) == (flo < 0.0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        if hi - lo <= cfg.x_tol:
            return RootResult(x, fx, it, True, hi - lo)
        mid = lo + 0.5 * (hi - lo)
        if not lo < mid < hi:
            return RootResult(x, fx, it, True, hi - lo)
        dfx = fprime(x)
        if not math.isfinite(dfx) or abs(dfx) < 1e-300:
            x = mid
            continue
        xn = x - fx / dfx
        x = xn if lo < xn < hi else mid
    raise RootFindingError(f"newton did not converge in {cfg.max_iters} iterations")


def find_root(
    f: Callable[[float], float],
    fprime: Optional[Callable[[float], float]],
    lo: float,
    hi: float,
    cfg: RootConfig,
) -> RootResult:
    """Locate a root of ``f`` on a sign-change bracket ``[lo, hi]``.

    Convergence means ``|f(root)| <= cfg.abs_tol`` or a final bracket width of at
    most ``cfg.x_tol`` (or the bracket has shrunk to adjacent floats). ``f`` is
    never evaluated outside ``[lo, hi]``.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return RootResult(lo, flo, 0, True, hi - lo)
    if fhi == 0.0:
        return RootResult(hi, fhi, 0, True, hi - lo)
    _check_bracket(flo, fhi, lo, hi)
    if cfg.method == "bisection":
        return _bisection(f, lo, hi, flo, fhi, cfg)
    if cfg.method == "brent":
        return _brent(f, lo, hi, flo, fhi, cfg)
    if fprime is None:
        raise ValueError("newton_safeguarded requires fprime")
    return _newton(f, fprime, lo, hi, flo, fhi, cfg)
