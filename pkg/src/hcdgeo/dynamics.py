"""Structural-change outputs, growth trajectories and migration dynamics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .demand import ShareSchedule
from .errors import DomainError, NoConvergenceWithinHorizon
from .short_run import EconomyParams, solve_short_run
from .spatial import (Regime, core_sustainable_at, is_black_hole,
                      solve_core_real_income, solve_symmetric_real_income,
                      symmetric_unstable_at)

LAMBDA_DOT_TOL = 1e-10
EDGE_TOL = 1e-8
DEFAULT_STEP = 0.01
DEFAULT_HORIZON = 100_000
LOCAL_DELTA = 1e-3
SETTLE_TOL = 1e-4


@dataclass(frozen=True)
class StructuralOutputs:
    L_M: float
    Y: float
    Y_pc: float
    m_tilde: float
    pi_tilde: float


def structural_outputs(m: float, params: EconomyParams) -> StructuralOutputs:
    """Sectoral employment, national income, income share and earnings premium at share ``m``."""
    if not 0.0 <= m < 1.0:
        raise DomainError("m must lie in [0, 1)")
    s = params.sigma
    k = s - m
    Y = params.alpha * (1.0 + 1.0 / k)
    return StructuralOutputs(L_M=(s - 1.0) / k, Y=Y, Y_pc=0.5 * Y,
                             m_tilde=1.0 / (1.0 + k), pi_tilde=1.0 / k)


# --- migration dynamics -----------------------------------------------------

PATH_HEADER = ("t", "lambda", "Omega1", "Omega2")


@dataclass
class TatonnementResult:
    limit: float
    path: np.ndarray = field(repr=False)  # rows (t, lambda, Omega1, Omega2)
    steps: int = 0

    @property
    def converged_to(self) -> str:
        if abs(self.limit - 0.5) < SETTLE_TOL:
            return "symmetric"
        if self.limit <= EDGE_TOL or self.limit >= 1.0 - EDGE_TOL:
            return "core"
        return "interior"


def tatonnement(lambda0: float, params: EconomyParams, ss: ShareSchedule, *,
                step: float = DEFAULT_STEP, horizon: int = DEFAULT_HORIZON,
                record: bool = True) -> TatonnementResult:
    """Integrate ``dlam/dt = lam (1 - lam) (Omega1 - Omega2)`` from ``lambda0``.

    Forward Euler with an adaptive step: the initial step is ``step``
    divided by the typical real income, it doubles after each accepted
    step and halves whenever a step would overshoot (reverse the sign of
    the drift or leave ``(0, 1)``). Stops when ``|dlam/dt| < 1e-10`` or
    ``lam`` is within ``1e-8`` of 0 or 1 and returns the absorbing point.
    """
    if not 0.0 < lambda0 < 1.0:
        raise DomainError("lambda0 must lie in (0, 1)")
    if math.isinf(params.tau):
        raise DomainError("migration dynamics need a finite trade cost")

    def drift(lam, guess):
        sol = solve_short_run(lam, params, ss, initial=guess)
        return lam * (1.0 - lam) * (sol.Omega[0] - sol.Omega[1]), sol

    lam = lambda0
    v, sol = drift(lam, None)
    dt = step / (0.5 * (sol.Omega[0] + sol.Omega[1]))
    t = 0.0
    rows = [(t, lam, *sol.Omega)]
    n = 0
    while n < horizon:
        if lam <= EDGE_TOL or lam >= 1.0 - EDGE_TOL:
            lam = 0.0 if lam < 0.5 else 1.0
            break
        if abs(v) < LAMBDA_DOT_TOL:
            # the logistic factor stalls the drift near an edge the gap still points to
            gap = sol.Omega[0] - sol.Omega[1]
            if lam * (1.0 - lam) < SETTLE_TOL and (gap > 0) == (lam > 0.5) and gap != 0.0:
                lam = 0.0 if lam < 0.5 else 1.0
            break
        n += 1
        trial = lam + dt * v
        if not 0.0 < trial < 1.0:
            # jumping past the boundary: settle for a step that halves the gap
            gap = (1.0 - lam) if v > 0 else lam
            trial = lam + math.copysign(0.5 * gap, v)
            dt = 0.5 * gap / abs(v)
        v_new, sol_new = drift(trial, sol.pi)
        if v_new != 0.0 and (v_new > 0) != (v > 0):
            dt *= 0.5
            continue
        t += dt
        lam, v, sol = trial, v_new, sol_new
        if record:
            rows.append((t, lam, *sol.Omega))
        dt *= 2.0
    else:
        raise NoConvergenceWithinHorizon(
            f"no absorbing point within {horizon} steps (lambda={lam:.6g})",
            iterations=horizon, residual=abs(v), path=np.array(rows))
    if record and rows[-1][1] != lam:
        rows.append((t, lam, *sol.Omega))
    return TatonnementResult(lam, np.array(rows), n)


@dataclass(frozen=True)
class OracleClass:
    """Stability of the two focal configurations as seen by the migration dynamics."""

    symmetric_stable: bool
    core_stable: bool
    limits: tuple[float, float]

    @property
    def regime(self) -> Regime:
        if self.symmetric_stable and self.core_stable:
            return Regime.BISTABLE
        if self.core_stable:
            return Regime.CORE_PERIPHERY_ONLY
        if self.symmetric_stable:
            return Regime.SYMMETRIC_ONLY
        raise DomainError("neither focal configuration attracts nearby starts")


def oracle_class(params: EconomyParams, ss: ShareSchedule, *,
                 delta: float = LOCAL_DELTA, starts: tuple[float, float] = (0.45, 0.55),
                 **kw) -> OracleClass:
    """Classify by running the dynamics.

    Symmetric stability: a start at ``1/2 + delta`` returns to one half.
    Core stability: a start at ``1 - delta_c`` runs off to full agglomeration.
    A deviating periphery is small only next to the imports it competes with,
    so ``delta_c = min(delta, phi / 100)``, floored at ten edge tolerances.
    ``limits`` are the absorbing points from ``starts``.
    """
    kw.setdefault("record", False)
    delta_c = max(min(delta, 0.01 * params.phi), 10.0 * EDGE_TOL)
    sym = tatonnement(0.5 + delta, params, ss, **kw).converged_to == "symmetric"
    core = tatonnement(1.0 - delta_c, params, ss, **kw).converged_to == "core"
    limits = tuple(tatonnement(s, params, ss, **kw).limit for s in starts)
    return OracleClass(sym, core, limits)


# --- growth trajectories ----------------------------------------------------

RULES = ("hysteresis", "symmetric", "core")
TRAJECTORY_HEADER = ("alpha", "class", "black_hole", "lambda_selected", "Omega", "m",
                     "L_M", "Y", "m_tilde", "pi_tilde")


@dataclass(frozen=True)
class TrajectoryRecord:
    alpha: float
    regime: Regime
    black_hole: bool
    lambda_selected: float
    Omega: float
    m: float
    L_M: float
    Y: float
    m_tilde: float
    pi_tilde: float

    def csv_row(self) -> tuple:
        return (self.alpha, self.regime.value, self.black_hole, self.lambda_selected,
                self.Omega, self.m, self.L_M, self.Y, self.m_tilde, self.pi_tilde)


def _select(rule: str, current: float | None, sym_ok: bool, core_ok: bool) -> float:
    if rule == "symmetric":
        return 0.5 if sym_ok else 1.0
    if rule == "core":
        return 1.0 if core_ok else 0.5
    # hysteresis: keep the current configuration while it stays stable
    if current == 0.5 and sym_ok:
        return 0.5
    if current == 1.0 and core_ok:
        return 1.0
    if current is None:
        return 0.5 if sym_ok else 1.0
    return 1.0 if current == 0.5 else 0.5


def growth_trajectory(alpha_grid: Sequence[float], sigma: float, tau: float,
                      ss: ShareSchedule, rule: str = "hysteresis") -> list[TrajectoryRecord]:
    """Equilibrium path as productivity rises along ``alpha_grid``.

    ``tau`` may be ``math.inf``, the autarky limit in which the regime
    changes sit exactly at the productivity thresholds.
    """
    if rule not in RULES:
        raise ValueError(f"unknown selection rule {rule!r}")
    grid = [float(a) for a in alpha_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("alpha grid must be strictly ascending")
    out: list[TrajectoryRecord] = []
    current: float | None = None
    for alpha in grid:
        bh = is_black_hole(alpha, sigma, ss)
        sym_ok = not (bh or symmetric_unstable_at(alpha, sigma, tau, ss))
        core_ok = core_sustainable_at(alpha, sigma, tau, ss)
        if sym_ok and core_ok:
            regime = Regime.BISTABLE
        elif sym_ok:
            regime = Regime.SYMMETRIC_ONLY
        else:
            regime = Regime.CORE_PERIPHERY_ONLY
        current = _select(rule, current, sym_ok, core_ok)
        if current == 0.5:
            om, m = solve_symmetric_real_income(alpha, sigma, tau, ss)
        else:
            om, m = solve_core_real_income(alpha, sigma, ss)
        so = structural_outputs(m, EconomyParams(alpha, sigma, tau))
        out.append(TrajectoryRecord(alpha, regime, bh, current, om, m, so.L_M, so.Y,
                                    so.m_tilde, so.pi_tilde))
    return out


def regime_transitions(records: Sequence[TrajectoryRecord]) -> list[tuple[float, float, Regime, Regime]]:
    """``(alpha_before, alpha_after, old, new)`` at each change of regime."""
    return [(a.alpha, b.alpha, a.regime, b.regime)
            for a, b in zip(records, records[1:]) if a.regime != b.regime]


__all__ = ["StructuralOutputs", "structural_outputs", "TatonnementResult", "tatonnement",
           "OracleClass", "oracle_class", "TrajectoryRecord", "growth_trajectory",
           "regime_transitions", "PATH_HEADER", "TRAJECTORY_HEADER", "RULES"]
