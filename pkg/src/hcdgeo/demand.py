"""Heterothetic Cobb-Douglas preferences over agriculture (A) and manufacturing (M).

Utility ``u > 1`` is defined implicitly by

    ln u = sum_i w_i(u) ln(C_i / gamma) - sum_i w_i(u) ln(w_i(u) / w(u)),

with ``w = w_A + w_M``. The weight family used here is
``w_A(u) = a + b u**(-eps_u)`` and ``w_M(u) = 1``, so the manufacturing
expenditure share ``w_M / w`` rises with utility.

Real income ``Omega`` is the utility-equivalent income,
``ln Omega(u) = ln gamma + ln u / w(u)``. The equilibrium layers work with
a :class:`ShareSchedule`, which maps ``Omega`` to the manufacturing share.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Any

import numpy as np

from .errors import DomainError, NonConvergence
from .roots import damped_fixed_point, find_root

FD_STEP = 1e-6  # step in ln(Omega) for elasticity checks
FP_TOL = 1e-12
FP_MAXITER = 100_000
FP_DAMPING = 0.5


@dataclass(frozen=True)
class WeightSchedule:
    """Weights ``w_A(u) = a + b u^-eps_u`` and ``w_M(u) = 1``.

    ``b = 0`` or ``eps_u = 0`` gives homothetic Cobb-Douglas with constant
    weights ``(a + b, 1)``.
    """

    a: float = 0.25
    b: float = 1.0
    eps_u: float = 1.0

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or self.eps_u < 0:
            raise DomainError("weight parameters must be non-negative")
        if self.a + self.b <= 0:
            raise DomainError("agriculture weight must be positive")

    def omega_A(self, u: float) -> float:
        return self.a + self.b * u ** (-self.eps_u)

    def omega_M(self, u: float) -> float:
        return 1.0

    def omega(self, u: float) -> float:
        return 1.0 + self.omega_A(u)

    def share_M(self, u: float) -> float:
        return 1.0 / self.omega(u)

    @property
    def homothetic(self) -> bool:
        return self.b == 0 or self.eps_u == 0

    @property
    def share_floor(self) -> float:
        """Lower bound on both expenditure shares over ``u >= 1`` (0 if none)."""
        top = 1.0 + self.a + self.b
        if self.homothetic:
            return min(self.a + self.b, 1.0) / top
        return min(self.a, 1.0) / top

    @property
    def omega_bounds(self) -> tuple[float, float]:
        """Range of the total weight ``w(u)`` over ``u >= 1``."""
        if self.homothetic:
            w = 1.0 + self.a + self.b
            return w, w
        return 1.0 + self.a, 1.0 + self.a + self.b


# ---------------------------------------------------------------------------
# Share schedules m(Omega)
# ---------------------------------------------------------------------------

class ShareSchedule(ABC):
    """Manufacturing expenditure share as a function of real income."""

    kind: str = ""

    @abstractmethod
    def __call__(self, omega: float) -> float: ...

    @property
    @abstractmethod
    def sup(self) -> float:
        """Supremum of ``m`` over ``Omega > 0``."""

    @property
    @abstractmethod
    def inf(self) -> float:
        """Infimum of ``m`` over the schedule's domain."""

    @property
    def domain_lo(self) -> float:
        """Smallest admissible real income (exclusive)."""
        return 0.0

    def elasticity(self, omega: float, h: float = FD_STEP) -> float:
        """``d ln m / d ln Omega`` by a centred difference of step ``h`` in logs."""
        lo = omega * math.exp(-h)
        hi = omega * math.exp(h)
        return (math.log(self(hi)) - math.log(self(lo))) / (2 * h)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class Constant(ShareSchedule):
    """Homothetic benchmark: ``m(Omega) = m0``."""

    m0: float = 0.5
    kind = "Constant"

    def __post_init__(self):
        if not 0.0 <= self.m0 < 1.0:
            raise DomainError(f"constant share must lie in [0, 1), got {self.m0}")

    def __call__(self, omega: float) -> float:
        return self.m0

    @property
    def sup(self) -> float:
        return self.m0

    @property
    def inf(self) -> float:
        return self.m0

    def elasticity(self, omega: float, h: float = FD_STEP) -> float:
        return 0.0


@dataclass(frozen=True)
class DirectLogistic(ShareSchedule):
    """``m(Omega) = m_min + (m_max - m_min) Omega^e / (Omega^e + kappa)``."""

    m_min: float = 0.2
    m_max: float = 0.95
    kappa: float = 1.0
    eps_m: float = 2.0
    kind = "DirectLogistic"

    def __post_init__(self):
        if not 0.0 < self.m_min < self.m_max < 1.0:
            raise DomainError("need 0 < m_min < m_max < 1")
        if self.kappa <= 0 or self.eps_m <= 0:
            raise DomainError("kappa and eps_m must be positive")

    def __call__(self, omega: float) -> float:
        if omega <= 0:
            return self.m_min
        z = self.eps_m * math.log(omega) - math.log(self.kappa)
        if z >= 0:
            s = 1.0 / (1.0 + math.exp(-z))
        else:
            e = math.exp(z)
            s = e / (1.0 + e)
        return self.m_min + (self.m_max - self.m_min) * s

    @property
    def sup(self) -> float:
        return self.m_max

    @property
    def inf(self) -> float:
        return self.m_min


@dataclass(frozen=True)
class ComposedHCD(ShareSchedule):
    """Share implied by a weight schedule: ``w_M / w`` at ``u = u(Omega)``."""

    weights: WeightSchedule = field(default_factory=WeightSchedule)
    gamma: float = 1e-6
    kind = "ComposedHCD"

    def __post_init__(self):
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")

    def __call__(self, omega: float) -> float:
        if omega <= self.gamma:
            return self.weights.share_M(1.0)
        return self.weights.share_M(u_of_real_income(omega, self.weights, self.gamma))

    @property
    def sup(self) -> float:
        return 1.0 / self.weights.omega_bounds[0]

    @property
    def inf(self) -> float:
        return 1.0 / self.weights.omega_bounds[1]

    @property
    def domain_lo(self) -> float:
        return self.gamma

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "gamma": self.gamma, **asdict(self.weights)}


SCHEDULES = {cls.kind: cls for cls in (Constant, DirectLogistic, ComposedHCD)}


def schedule_from_dict(spec: dict[str, Any]) -> ShareSchedule:
    """Build a share schedule from ``{"kind": ..., **params}``."""
    spec = dict(spec)
    try:
        kind = spec.pop("kind")
        cls = SCHEDULES[kind]
    except KeyError as exc:
        raise DomainError(f"unknown or missing schedule kind: {spec!r}") from exc
    if cls is ComposedHCD:
        gamma = spec.pop("gamma", 1e-6)
        return ComposedHCD(WeightSchedule(**spec), gamma)
    return cls(**spec)


def share_of_real_income(omega: float, ss: ShareSchedule) -> float:
    """Manufacturing expenditure share at real income ``omega``."""
    if omega <= 0:
        raise DomainError("real income must be positive")
    return ss(omega)


# ---------------------------------------------------------------------------
# Preference maps
# ---------------------------------------------------------------------------

def _entropy_term(ws: WeightSchedule, u: float) -> float:
    wa, wm = ws.omega_A(u), ws.omega_M(u)
    w = wa + wm
    return -(wa * math.log(wa / w) + wm * math.log(wm / w))


def _solve_log_utility(rhs, x_hi: float, method: str) -> float:
    """Solve ``x = rhs(x)`` for ``x = ln u > 0`` where ``rhs`` is nonincreasing."""
    if method not in ("damped", "bisect"):
        raise ValueError(f"unknown method {method!r}")
    if method == "damped":
        try:
            x, _ = damped_fixed_point(rhs, rhs(0.0), damping=FP_DAMPING,
                                      tol=FP_TOL, maxiter=FP_MAXITER)
            if x > 0:
                return x
        except NonConvergence:
            pass
    return find_root(lambda x: rhs(x) - x, 0.0, x_hi, xtol=1e-15)


def utility_from_consumption(C_A: float, C_M: float, ws: WeightSchedule,
                             gamma: float, *, method: str = "damped") -> float:
    """Utility level of the bundle ``(C_A, C_M)``; requires ``C_i > gamma``."""
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if C_A <= gamma or C_M <= gamma:
        raise DomainError("consumption must exceed the subsistence quantity")
    la, lm = math.log(C_A / gamma), math.log(C_M / gamma)

    def rhs(x: float) -> float:
        u = math.exp(x)
        return ws.omega_A(u) * la + ws.omega_M(u) * lm + _entropy_term(ws, u)

    x_hi = ws.omega_bounds[1] * (max(la, lm) + math.log(2.0)) + 1.0
    return math.exp(_solve_log_utility(rhs, x_hi, method))


def indirect_utility(P_A: float, P_M: float, y: float, ws: WeightSchedule,
                     gamma: float, *, method: str = "damped") -> float:
    """Indirect utility: the unique ``v > 1`` with
    ``ln v = sum_i w_i(v) ln(y / (gamma P_i))``.

    ``method="bisect"`` skips the damped iteration and brackets directly.
    """
    if min(P_A, P_M, y) <= 0:
        raise DomainError("prices and income must be positive")
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    floor = ws.share_floor
    if floor > 0:
        if y * floor <= max(P_A, P_M) * gamma:
            raise DomainError("income does not cover the subsistence bound")
    elif y <= max(P_A, P_M) * gamma:
        raise DomainError("income does not cover the subsistence bound")
    la = math.log(y / (gamma * P_A))
    lm = math.log(y / (gamma * P_M))

    def rhs(x: float) -> float:
        u = math.exp(x)
        return ws.omega_A(u) * la + ws.omega_M(u) * lm

    x_hi = ws.omega_bounds[1] * max(la, lm) + 1.0
    return math.exp(_solve_log_utility(rhs, x_hi, method))


def real_income_of_u(u: float, ws: WeightSchedule, gamma: float) -> float:
    if u <= 1:
        raise DomainError("utility must exceed 1")
    return math.exp(math.log(gamma) + math.log(u) / ws.omega(u))


def u_of_real_income(omega: float, ws: WeightSchedule, gamma: float) -> float:
    """Inverse of :func:`real_income_of_u` by monotone bracketing in ``ln u``."""
    if omega <= gamma:
        raise DomainError("real income must exceed gamma")
    t = math.log(omega / gamma)
    if ws.homothetic:
        return math.exp(t * ws.omega(1.0))
    w_lo, w_hi = ws.omega_bounds
    # x / w(e^x) is increasing; w in [w_lo, w_hi] brackets x
    lo, hi = t * w_lo, t * w_hi
    if hi - lo <= 0:
        return math.exp(lo)
    x = find_root(lambda x: x / ws.omega(math.exp(x)) - t, lo, hi,
                  xtol=1e-300, rtol=1e-15)
    return math.exp(x)


def expenditure(u: float, P_A: float, P_M: float, ws: WeightSchedule,
                gamma: float) -> float:
    """Minimum spending reaching utility ``u`` at prices ``(P_A, P_M)``."""
    if u <= 1:
        raise DomainError("utility must exceed 1")
    if P_A <= 0 or P_M <= 0:
        raise DomainError("prices must be positive")
    m = ws.share_M(u)
    log_e = math.log(real_income_of_u(u, ws, gamma)) + m * math.log(P_M) \
        + (1.0 - m) * math.log(P_A)
    return math.exp(log_e)


# ---------------------------------------------------------------------------
# Assumption checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DemandConfig:
    gamma: float = 1e-6
    s_lower: float = 0.1
    grid: tuple[float, float] = (1e-3, 1e3)
    n_grid: int = 2001

    def __post_init__(self):
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")
        if not 0 < self.s_lower < 1:
            raise DomainError("s_lower must lie in (0, 1)")
        if not self.grid[0] < self.grid[1]:
            raise DomainError("grid must be ascending")

    def omega_grid(self, ss: ShareSchedule | None = None) -> np.ndarray:
        lo, hi = self.grid
        if ss is not None and ss.domain_lo > 0:
            lo = max(lo, ss.domain_lo * 1.01)
        return np.geomspace(lo, hi, self.n_grid)


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    passed: bool
    worst_point: float
    worst_value: float
    threshold: float


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, check_id: str) -> CheckResult:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def failed(self) -> list[str]:
        return [c.check_id for c in self.checks if not c.passed]

    def to_list(self) -> list[dict[str, Any]]:
        return [asdict(c) for c in self.checks]

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_list(), **kw)


def elasticity_profile(ss: ShareSchedule, grid: np.ndarray) -> np.ndarray:
    return np.array([ss.elasticity(float(w)) for w in grid])


def fixed_point_margin(ss: ShareSchedule, sigma: float, grid: np.ndarray) -> tuple[float, float]:
    """Max over ``grid`` of ``m * (d ln m / d ln Omega) / (sigma - m)``.

    Real-income fixed points are unique while this stays below one.
    Returns ``(worst_point, worst_value)``.
    """
    vals = np.array([ss(float(w)) * ss.elasticity(float(w)) / (sigma - ss(float(w)))
                     for w in grid])
    i = int(np.argmax(vals))
    return float(grid[i]), float(vals[i])


def validate_assumptions(ws: WeightSchedule, ss: ShareSchedule, cfg: DemandConfig,
                         sigma: float, tau: float) -> ValidationReport:
    """Run the regularity checks and report pass/fail per check.

    Checks: ``A1-i`` share floor, ``A1-ii`` weights nonincreasing,
    ``A5`` share monotone, ``A6`` income elasticity of the share below
    ``sigma - 1``, ``FP`` uniqueness margin of the real-income fixed points,
    ``L4`` subsistence bound ``gamma sigma tau / s_lower < 1``.
    """
    if sigma <= 1:
        raise DomainError("sigma must exceed 1")
    if tau < 1:
        raise DomainError("tau must be at least 1")
    checks = []

    omegas = cfg.omega_grid(ss)
    u_hi = max(u_of_real_income(cfg.grid[1], ws, cfg.gamma), 10.0) \
        if cfg.grid[1] > cfg.gamma else 10.0
    us = np.geomspace(1.0, u_hi, cfg.n_grid)

    shares = np.array([min(ws.omega_A(u), ws.omega_M(u)) / ws.omega(u) for u in us])
    i = int(np.argmin(shares))
    checks.append(CheckResult("A1-i", bool(shares[i] >= cfg.s_lower),
                              float(us[i]), float(shares[i]), cfg.s_lower))

    wa = np.array([ws.omega_A(u) for u in us])
    wm = np.array([ws.omega_M(u) for u in us])
    rise = np.maximum(np.diff(wa), np.diff(wm))
    i = int(np.argmax(rise))
    strict = bool(np.any(np.diff(wa) < 0) or np.any(np.diff(wm) < 0))
    checks.append(CheckResult("A1-ii", bool(rise[i] <= 0 and strict),
                              float(us[i]), float(rise[i]), 0.0))

    ms = np.array([ss(float(w)) for w in omegas])
    dm = np.diff(ms)
    i = int(np.argmin(dm))
    checks.append(CheckResult("A5", bool(dm[i] >= 0), float(omegas[i]),
                              float(dm[i]), 0.0))

    el = elasticity_profile(ss, omegas)
    i = int(np.argmax(el))
    checks.append(CheckResult("A6", bool(el[i] < sigma - 1), float(omegas[i]),
                              float(el[i]), sigma - 1))

    pt, val = fixed_point_margin(ss, sigma, omegas)
    checks.append(CheckResult("FP", val < 1.0, pt, val, 1.0))

    bound = cfg.gamma * sigma * tau / cfg.s_lower
    checks.append(CheckResult("L4", bound < 1.0, float(tau), bound, 1.0))
    return ValidationReport(tuple(checks))


@lru_cache(maxsize=256)
def regularity_margin(ss: ShareSchedule, sigma: float) -> tuple[float, float]:
    """Cached :func:`fixed_point_margin` on the default operating grid."""
    cfg = DemandConfig(grid=(1e-4, 1e4), n_grid=801)
    return fixed_point_margin(ss, sigma, cfg.omega_grid(ss))
