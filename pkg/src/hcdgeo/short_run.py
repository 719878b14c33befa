"""Short-run equilibrium for a given allocation of entrepreneurs.

Normalizations: wage ``w = alpha``, f.o.b. price ``p = 1``, one firm per
entrepreneur, agricultural price ``P_A = 1``, half the unit mass of
workers in each region. Region 1 hosts the share ``lam`` of
entrepreneurs.

For region r with partner s and ``phi = tau**(1 - sigma)`` the unknowns
``(pi_r, Omega_r)`` solve

    sigma pi_r = E_r / D_r + phi E_s / D_s,
    E_r = lam_r m(Omega_r) pi_r + alpha / 2,   D_r = lam_r + (1 - lam_r) phi,
    ln pi_r = ln Omega_r + m(Omega_r) ln P_M_r,  P_M_r = D_r**(1 / (1 - sigma)).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .demand import ShareSchedule
from .errors import DomainError, NonConvergence
from .roots import find_root


@dataclass(frozen=True)
class EconomyParams:
    alpha: float
    sigma: float
    tau: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if not self.sigma > 1:
            raise DomainError("sigma must exceed 1")
        if not self.tau >= 1:
            raise DomainError("tau must be at least 1")

    @property
    def phi(self) -> float:
        """Freeness of trade ``tau**(1 - sigma)``."""
        if math.isinf(self.tau):
            return 0.0
        return self.tau ** (1.0 - self.sigma)

    @property
    def wage(self) -> float:
        return self.alpha

    @property
    def mu(self) -> float:
        """Marginal product of labour in manufacturing implied by ``p = 1``."""
        return self.alpha * self.sigma / (self.sigma - 1.0)


def price_index(lambda_r: float, params: EconomyParams) -> float:
    """Manufacturing price index in a region hosting ``lambda_r`` of the firms."""
    if not 0.0 <= lambda_r <= 1.0:
        raise DomainError("lambda_r must lie in [0, 1]")
    d = lambda_r + (1.0 - lambda_r) * params.phi
    return d ** (1.0 / (1.0 - params.sigma))


def real_income_at(pi: float, P_M: float, ss: ShareSchedule) -> float:
    """Solve ``ln pi = ln Omega + m(Omega) ln P_M`` for ``Omega`` (``P_M >= 1``)."""
    log_p = math.log(P_M)
    if log_p == 0.0:
        return pi
    lp = math.log(pi)

    def resid(x: float) -> float:
        return x + ss(math.exp(x)) * log_p - lp

    # m in [0, 1) puts ln Omega in [ln pi - ln P_M, ln pi]
    return math.exp(find_root(resid, lp - log_p, lp, xtol=1e-15))


CSV_HEADER = ("lambda", "pi1", "pi2", "PM1", "PM2", "Omega1", "Omega2",
              "m1", "m2", "residual")


@dataclass(frozen=True)
class ShortRunSolution:
    lam: float
    pi: tuple[float, float]
    P_M: tuple[float, float]
    Omega: tuple[float, float]
    m: tuple[float, float]
    residual: float
    iterations: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    def csv_row(self) -> tuple[float, ...]:
        return (self.lam, *self.pi, *self.P_M, *self.Omega, *self.m, self.residual)

    def mirrored(self) -> "ShortRunSolution":
        """Same solution with the region labels swapped."""
        flip = lambda t: (t[1], t[0])  # noqa: E731
        return ShortRunSolution(1.0 - self.lam, flip(self.pi), flip(self.P_M),
                                flip(self.Omega), flip(self.m), self.residual,
                                self.iterations)


def _earnings_given_shares(lam: float, m1: float, m2: float, alpha: float,
                           sigma: float, phi: float, d1: float, d2: float):
    """Solve the two sales equations, linear in ``pi`` once shares are fixed."""
    l1, l2 = lam, 1.0 - lam
    h = 0.5 * alpha
    # sigma pi1 = (l1 m1 pi1 + h)/d1 + phi (l2 m2 pi2 + h)/d2, and symmetrically
    a11 = sigma - l1 * m1 / d1
    a12 = -phi * l2 * m2 / d2
    a21 = -phi * l1 * m1 / d1
    a22 = sigma - l2 * m2 / d2
    b1 = h / d1 + phi * h / d2
    b2 = h / d2 + phi * h / d1
    det = a11 * a22 - a12 * a21
    return (b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det


def short_run_residual(lam: float, pi: tuple[float, float], omega: tuple[float, float],
                       params: EconomyParams, ss: ShareSchedule) -> float:
    """Max absolute log-residual of the sales and real-income equations."""
    sigma, phi, alpha = params.sigma, params.phi, params.alpha
    l = (lam, 1.0 - lam)
    d = (l[0] + l[1] * phi, l[1] + l[0] * phi)
    m = (ss(omega[0]), ss(omega[1]))
    e = (l[0] * m[0] * pi[0] + 0.5 * alpha, l[1] * m[1] * pi[1] + 0.5 * alpha)
    out = 0.0
    for r, s in ((0, 1), (1, 0)):
        sales = e[r] / d[r] + phi * e[s] / d[s]
        out = max(out, abs(math.log(sigma * pi[r]) - math.log(sales)))
        pm = d[r] ** (1.0 / (1.0 - sigma))
        out = max(out, abs(math.log(pi[r]) - math.log(omega[r]) - m[r] * math.log(pm)))
    return out


def solve_short_run(lam: float, params: EconomyParams, ss: ShareSchedule, *,
                    damping: float = 0.5, tol: float = 1e-13, maxiter: int = 10_000,
                    initial: tuple[float, float] | None = None) -> ShortRunSolution:
    """Short-run equilibrium at entrepreneur share ``lam`` in region 1.

    Outer damped fixed point on ``(pi1, pi2)``; each sweep recovers real
    incomes region by region, then re-solves the sales equations with the
    implied shares held fixed. At ``lam`` in {0, 1} the empty region's
    values are those of a single atomistic deviator.
    """
    if not 0.0 <= lam <= 1.0:
        raise DomainError("lambda must lie in [0, 1]")
    alpha, sigma, phi = params.alpha, params.sigma, params.phi
    d1 = lam + (1.0 - lam) * phi
    d2 = (1.0 - lam) + lam * phi
    pm1 = d1 ** (1.0 / (1.0 - sigma))
    pm2 = d2 ** (1.0 / (1.0 - sigma))

    if initial is None:
        p0 = alpha / (sigma - ss(alpha / sigma))
        pi1 = pi2 = p0
    else:
        pi1, pi2 = initial

    trace = 0
    step = math.inf
    for trace in range(1, maxiter + 1):
        om1 = real_income_at(pi1, pm1, ss)
        om2 = real_income_at(pi2, pm2, ss)
        n1, n2 = _earnings_given_shares(lam, ss(om1), ss(om2), alpha, sigma,
                                        phi, d1, d2)
        step = max(abs(math.log(n1 / pi1)), abs(math.log(n2 / pi2)))
        if step <= tol:
            pi1, pi2 = n1, n2
            break
        pi1 = pi1 * (n1 / pi1) ** damping
        pi2 = pi2 * (n2 / pi2) ** damping
    else:
        raise NonConvergence(
            f"short-run iteration stalled after {maxiter} sweeps "
            f"(last log step {step:.3e})", iterations=maxiter, residual=step)

    om1 = real_income_at(pi1, pm1, ss)
    om2 = real_income_at(pi2, pm2, ss)
    res = short_run_residual(lam, (pi1, pi2), (om1, om2), params, ss)
    return ShortRunSolution(lam, (pi1, pi2), (pm1, pm2), (om1, om2),
                            (ss(om1), ss(om2)), res, trace)


def real_income_gap(lam: float, params: EconomyParams, ss: ShareSchedule,
                    **kw) -> float:
    """``Omega1 - Omega2`` at the short-run equilibrium for ``lam``."""
    sol = solve_short_run(lam, params, ss, **kw)
    return sol.Omega[0] - sol.Omega[1]


def adding_up_gap(sol: ShortRunSolution, params: EconomyParams) -> float:
    """Relative gap in: manufacturing revenue = wage bill + entrepreneur spending."""
    lam = sol.lam
    lhs = params.sigma * (lam * sol.pi[0] + (1 - lam) * sol.pi[1])
    rhs = params.alpha + lam * sol.m[0] * sol.pi[0] + (1 - lam) * sol.m[1] * sol.pi[1]
    return abs(lhs - rhs) / rhs


__all__ = ["EconomyParams", "ShortRunSolution", "CSV_HEADER", "price_index",
           "real_income_at", "solve_short_run", "short_run_residual",
           "real_income_gap", "adding_up_gap"]
