"""Scalar root finding and fixed-point helpers.

Thin wrappers over :func:`scipy.optimize.brentq` that translate failures
into the package exceptions, plus bracket expansion and a damped
fixed-point iteration.
"""

from __future__ import annotations

import math
from typing import Callable

from scipy.optimize import brentq

from .errors import BracketFailure, NonConvergence

XTOL = 1e-14
RTOL = 4 * 2.220446049250313e-16


def find_root(f: Callable[[float], float], lo: float, hi: float, *,
              xtol: float = XTOL, rtol: float = RTOL, maxiter: int = 500) -> float:
    """Root of ``f`` on ``[lo, hi]``; endpoints must bracket a sign change."""
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketFailure(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={flo!r}, f(hi)={fhi!r}")
    try:
        return brentq(f, lo, hi, xtol=xtol, rtol=rtol, maxiter=maxiter)
    except RuntimeError as exc:  # brentq raises on maxiter
        raise NonConvergence(str(exc), iterations=maxiter) from exc


def expand_upper(f: Callable[[float], float], lo: float, hi: float, *,
                 cap: float, factor: float = 2.0) -> tuple[float, float]:
    """Grow ``hi`` geometrically until ``f`` changes sign relative to ``f(lo)``.

    Returns the tightest bracket ``(a, b)`` seen. Raises
    :class:`BracketFailure` once ``hi`` would exceed ``cap``.
    """
    sign_lo = f(lo) > 0
    a = lo
    while True:
        fh = f(hi)
        if (fh > 0) != sign_lo or fh == 0.0:
            return a, hi
        if hi >= cap:
            raise BracketFailure(f"no sign change below {cap:g}")
        a = hi
        hi = min(hi * factor, cap)


def damped_fixed_point(g: Callable[[float], float], x0: float, *,
                       damping: float = 0.5, tol: float = 1e-12,
                       maxiter: int = 100_000) -> tuple[float, int]:
    """Iterate ``x <- (1 - damping) x + damping g(x)`` until ``|g(x) - x| <= tol``.

    Returns ``(x, iterations)``.
    """
    x = x0
    for it in range(1, maxiter + 1):
        gx = g(x)
        if not math.isfinite(gx):
            raise NonConvergence("fixed-point map returned a non-finite value",
                                 iterations=it)
        r = gx - x
        if abs(r) <= tol:
            return gx, it
        x = x + damping * r
    raise NonConvergence(f"damped iteration did not converge in {maxiter} steps",
                         iterations=maxiter, residual=abs(r))
