"""Long-run spatial equilibria: core-periphery vs. symmetric configurations.

Real incomes at the two focal configurations solve scalar fixed points:

* core (all entrepreneurs in one region): ``Omega_C = alpha / (sigma - m(Omega_C))``;
* symmetric split: ``ln Omega_B = ln(alpha / (sigma - m_B)) - m_B / (sigma - 1) * L``
  with ``L = ln(2 / (1 + tau**(1 - sigma)))``.

The sustain point ``tau1`` bounds the trade costs at which the core survives
a deviation; the break point ``tau0`` bounds those at which the symmetric
split is unstable. Either may hold for every ``tau``, represented by
:data:`EVERYWHERE`.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .demand import ShareSchedule, regularity_margin
from .errors import AssumptionViolation, BracketFailure, DomainError, NotDefined
from .roots import expand_upper, find_root

log = logging.getLogger(__name__)

TAU_LO = 1.0 + 1e-6
TAU_HI0 = 2.0
TAU_CAP = 1e8
TAU_CAP_WIDE = 1e300
ROOT_RTOL = 1e-12
ALPHA_CAP = 1e12


class Everywhere(enum.Enum):
    """Marker for a critical point that holds at every trade cost (or productivity)."""

    EVERYWHERE = "everywhere"

    def __repr__(self) -> str:
        return "EVERYWHERE"

    def __str__(self) -> str:
        return self.value


EVERYWHERE = Everywhere.EVERYWHERE
Critical = Union[float, Everywhere]


class Regime(str, enum.Enum):
    SYMMETRIC_ONLY = "SymmetricOnly"
    BISTABLE = "Bistable"
    CORE_PERIPHERY_ONLY = "CorePeripheryOnly"


@dataclass(frozen=True)
class CriticalPoints:
    tau_break: Critical
    tau_sustain: Critical

    def __post_init__(self):
        b, s = self.tau_break, self.tau_sustain
        if isinstance(b, float) and isinstance(s, float) and not b <= s:
            log.warning("break point %.12g exceeds sustain point %.12g", b, s)


@dataclass(frozen=True)
class Thresholds:
    alpha_1: Critical
    alpha_inf: Critical


@dataclass(frozen=True)
class EquilibriumClass:
    regime: Regime
    black_hole: bool


def _check_regular(ss: ShareSchedule, sigma: float) -> None:
    if sigma <= 1:
        raise DomainError("sigma must exceed 1")
    point, value = regularity_margin(ss, sigma)
    if value >= 1.0:
        raise AssumptionViolation(
            f"income effects too strong for sigma={sigma}: "
            f"m * elasticity / (sigma - m) = {value:.4g} at Omega={point:.4g}")


def _penalty(tau: float, sigma: float) -> float:
    """``ln(2 / (1 + tau**(1 - sigma)))``; ``ln 2`` in the autarky limit."""
    if math.isinf(tau):
        return math.log(2.0)
    return math.log(2.0 / (1.0 + tau ** (1.0 - sigma)))


def solve_core_real_income(alpha: float, sigma: float,
                           ss: ShareSchedule) -> tuple[float, float]:
    """``(Omega_C, m_C)`` with ``Omega_C = alpha / (sigma - m(Omega_C))``."""
    _check_regular(ss, sigma)
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    la = math.log(alpha)

    def resid(x: float) -> float:
        return x + math.log(sigma - ss(math.exp(x))) - la

    x = find_root(resid, la - math.log(sigma), la - math.log(sigma - 1.0))
    om = math.exp(x)
    return om, ss(om)


def solve_symmetric_real_income(alpha: float, sigma: float, tau: float,
                                ss: ShareSchedule, *,
                                extra_share: float = 0.0) -> tuple[float, float]:
    """``(Omega_B, m_B)`` at the symmetric split; ``tau`` may be ``math.inf``.

    ``extra_share`` is added to ``m`` in the earnings denominator only
    (the land model uses ``eta * (sigma - 1)``).
    """
    _check_regular(ss, sigma)
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    if not tau >= 1:
        raise DomainError("tau must be at least 1")
    la = math.log(alpha)
    pen = _penalty(tau, sigma) / (sigma - 1.0)

    def resid(x: float) -> float:
        m = ss(math.exp(x))
        return x - la + math.log(sigma - m - extra_share) + m * pen

    lo = la - math.log(sigma - extra_share) - pen
    hi = la - math.log(sigma - 1.0 - extra_share)
    om = math.exp(find_root(resid, lo, hi))
    return om, ss(om)


def periphery_shadow(alpha: float, sigma: float, tau: float, Omega_C: float,
                     ss: ShareSchedule, *, share_at: str = "core") -> tuple[float, float]:
    """Earnings and real income of one entrepreneur deviating to the periphery.

    ``share_at="core"`` prices core entrepreneurs' spending at ``m(Omega_C)``.
    ``share_at="periphery"`` evaluates that share at the deviator's own real
    income instead and solves the resulting joint fixed point.
    """
    if share_at not in ("core", "periphery"):
        raise ValueError(f"unknown share_at {share_at!r}")
    if tau == 1.0:
        return Omega_C, Omega_C
    phi = tau ** (1.0 - sigma)
    ltau = math.log(tau)

    def earnings(m: float) -> float:
        return (phi / sigma) * (m * alpha / (sigma - m)
                                + 0.5 * alpha * (1.0 + phi ** -2))

    if share_at == "core":
        pi_s = earnings(ss(Omega_C))
        lp = math.log(pi_s)
        x = find_root(lambda x: x + ss(math.exp(x)) * ltau - lp, lp - ltau, lp)
        return pi_s, math.exp(x)

    def resid(x: float) -> float:
        m = ss(math.exp(x))
        return x + m * ltau - math.log(earnings(m))

    lo = math.log(earnings(0.0)) - ltau
    hi = math.log(earnings(1.0))
    om = math.exp(find_root(resid, lo, hi))
    return earnings(ss(om)), om


def sustain_function(tau: float, m_C: float, sigma: float) -> float:
    """Zero exactly where a deviator to the periphery is indifferent.

    Negative values mean the core is sustainable (deviator strictly worse off).
    """
    k = sigma - m_C
    return (1.0 - (2.0 * sigma / k) * tau ** (m_C + 1.0 - sigma)
            + ((sigma + m_C) / k) * tau ** (2.0 * (1.0 - sigma)))


def _scan_spurious(f, lo: float, hi: float, n: int = 400) -> list[float]:
    """Sign changes of ``f`` on a log grid over ``(lo, hi)``."""
    taus = np.geomspace(lo, hi, n)
    vals = np.array([f(float(t)) for t in taus])
    idx = np.nonzero(np.sign(vals[1:]) != np.sign(vals[:-1]))[0]
    return [float(taus[i]) for i in idx]


def _tau_root(f, cap: float) -> float:
    """Root of ``f`` above ``TAU_LO``: double ``tau`` up to ``TAU_CAP``, then square it.

    Squaring only kicks in when ``cap`` exceeds ``TAU_CAP``; roots past
    ``TAU_CAP`` occur when the share sits just below ``sigma - 1``.
    """
    try:
        a, b = expand_upper(f, TAU_LO, TAU_HI0, cap=min(cap, TAU_CAP))
    except BracketFailure:
        if cap <= TAU_CAP:
            raise
        a, b = TAU_CAP, TAU_CAP ** 2
        sign_lo = f(a) > 0
        while (f(b) > 0) == sign_lo:
            if b >= cap:
                raise BracketFailure(f"no sign change below {cap:g}") from None
            a, b = b, min(b * b, cap)
    return find_root(f, a, b, xtol=1e-300, rtol=ROOT_RTOL)


def sustain_point(alpha: float, sigma: float, ss: ShareSchedule, *,
                  cap: float = TAU_CAP, scan: bool = False) -> Critical:
    """Largest trade cost at which the core-periphery pattern is sustainable.

    Raises :class:`BracketFailure` if the root lies above ``cap``.
    """
    _, m_C = solve_core_real_income(alpha, sigma, ss)
    return sustain_point_from_share(m_C, sigma, cap=cap, scan=scan)


def sustain_point_from_share(m_C: float, sigma: float, *, cap: float = TAU_CAP,
                             scan: bool = False) -> Critical:
    if m_C >= sigma - 1.0:
        return EVERYWHERE

    def f(t: float) -> float:
        return sustain_function(t, m_C, sigma)

    if f(TAU_LO) >= 0.0:
        return 1.0
    root = _tau_root(f, cap)
    if scan:
        extra = [t for t in _scan_spurious(f, TAU_LO, min(cap, TAU_CAP))
                 if abs(t / root - 1) > 0.05]
        if extra:
            log.warning("sustain function changes sign away from tau1=%g near %s",
                        root, extra)
    return root


def break_ratio(m: float, sigma: float) -> float:
    """Right-hand side of the break condition ``tau**(1 - sigma) = ratio(m)``."""
    return ((sigma - 1.0 - m) / (sigma - 1.0 + m)) * ((sigma - m) / (sigma + m))


def break_function(tau: float, alpha: float, sigma: float, ss: ShareSchedule) -> float:
    """Nonnegative where the symmetric split is unstable."""
    _, m_B = solve_symmetric_real_income(alpha, sigma, tau, ss)
    phi = 0.0 if math.isinf(tau) else tau ** (1.0 - sigma)
    return phi - break_ratio(m_B, sigma)


def break_point(alpha: float, sigma: float, ss: ShareSchedule, *,
                cap: float = TAU_CAP) -> Critical:
    """Largest trade cost at which the symmetric equilibrium is unstable.

    Raises :class:`BracketFailure` if the root lies above ``cap``.
    """
    _, m_inf = solve_symmetric_real_income(alpha, sigma, math.inf, ss)
    if m_inf >= sigma - 1.0:
        return EVERYWHERE

    def h(t: float) -> float:
        return break_function(t, alpha, sigma, ss)

    if h(TAU_LO) < 0.0:
        return 1.0
    return _tau_root(h, cap)


def critical_points(alpha: float, sigma: float, ss: ShareSchedule, *,
                    cap: float = TAU_CAP) -> CriticalPoints:
    return CriticalPoints(break_point(alpha, sigma, ss, cap=cap),
                          sustain_point(alpha, sigma, ss, cap=cap))


def _alpha_threshold(sigma: float, ss: ShareSchedule, share_of_alpha) -> Critical:
    if not 1.0 < sigma <= 2.0:
        raise NotDefined("productivity thresholds exist only for sigma in (1, 2]")
    target = sigma - 1.0
    if ss.inf >= target:
        return EVERYWHERE
    if ss.sup <= target:
        raise NotDefined(f"share never reaches sigma - 1 = {target:g}")

    def g(la: float) -> float:
        return share_of_alpha(math.exp(la)) - target

    lo = hi = 0.0
    while g(lo) >= 0:
        lo -= 1.0
        if lo < -math.log(ALPHA_CAP):
            raise NotDefined("threshold below the searchable productivity range")
    while g(hi) < 0:
        hi += 1.0
        if hi > math.log(ALPHA_CAP):
            raise NotDefined("threshold above the searchable productivity range")
    return math.exp(find_root(g, lo, hi, xtol=1e-14))


def alpha_threshold_sustain(sigma: float, ss: ShareSchedule) -> Critical:
    """Productivity above which the core is sustainable at every trade cost."""
    return _alpha_threshold(sigma, ss, lambda a: solve_core_real_income(a, sigma, ss)[1])


def alpha_threshold_break(sigma: float, ss: ShareSchedule) -> Critical:
    """Productivity above which the symmetric split is unstable at every trade cost."""
    return _alpha_threshold(
        sigma, ss, lambda a: solve_symmetric_real_income(a, sigma, math.inf, ss)[1])


def thresholds(sigma: float, ss: ShareSchedule) -> Thresholds:
    return Thresholds(alpha_threshold_sustain(sigma, ss), alpha_threshold_break(sigma, ss))


def _le(tau: float, crit: Critical) -> bool:
    return crit is EVERYWHERE or tau <= crit


def classify_from_points(tau: float, cp: CriticalPoints) -> EquilibriumClass:
    """Regime at ``tau`` given precomputed critical points (ties: weak inequalities)."""
    black_hole = cp.tau_break is EVERYWHERE
    if black_hole or _le(tau, cp.tau_break):
        regime = Regime.CORE_PERIPHERY_ONLY
    elif _le(tau, cp.tau_sustain):
        regime = Regime.BISTABLE
    else:
        regime = Regime.SYMMETRIC_ONLY
    return EquilibriumClass(regime, black_hole)


def core_sustainable_at(alpha: float, sigma: float, tau: float, ss: ShareSchedule) -> bool:
    """``tau <= tau1`` decided by the sign of the sustain function at ``tau``."""
    _, m_C = solve_core_real_income(alpha, sigma, ss)
    if m_C >= sigma - 1.0 or tau == 1.0:
        return True
    if math.isinf(tau):
        return False
    return sustain_function(tau, m_C, sigma) <= 0.0


def symmetric_unstable_at(alpha: float, sigma: float, tau: float, ss: ShareSchedule) -> bool:
    """``tau <= tau0`` decided by the sign of the break condition at ``tau``."""
    return break_function(tau, alpha, sigma, ss) >= 0.0


def is_black_hole(alpha: float, sigma: float, ss: ShareSchedule) -> bool:
    _, m_inf = solve_symmetric_real_income(alpha, sigma, math.inf, ss)
    return m_inf >= sigma - 1.0


def classify(alpha: float, sigma: float, tau: float, ss: ShareSchedule) -> EquilibriumClass:
    """Which of the two focal configurations are stable at ``(alpha, sigma, tau)``.

    Works from the signs of the sustain and break conditions at ``tau`` rather
    than from their roots, so it stays defined when a root exceeds any bracket
    cap. Under root uniqueness this equals :func:`classify_from_points`.
    """
    if not tau >= 1:
        raise DomainError("tau must be at least 1")
    black_hole = is_black_hole(alpha, sigma, ss)
    if black_hole or symmetric_unstable_at(alpha, sigma, tau, ss):
        regime = Regime.CORE_PERIPHERY_ONLY
    elif core_sustainable_at(alpha, sigma, tau, ss):
        regime = Regime.BISTABLE
    else:
        regime = Regime.SYMMETRIC_ONLY
    return EquilibriumClass(regime, black_hole)
