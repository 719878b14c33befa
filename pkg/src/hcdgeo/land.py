"""Symmetric-equilibrium stability with immobile structures (land) in manufacturing.

Manufacturing uses a Cobb-Douglas bundle of labour and structures with
structure share ``eta``; ``eta = 0`` is the baseline economy. Units of
structures are chosen so that their rental price is ``rho = lam * pi``.
Ratios of region-1 to region-2 values are written ``x_hat``. With
``k = eta (sigma - 1)`` and ``phi = tau**(1 - sigma)``:

    pi_hat    = (lam_hat pi_hat)**(-k) (E_hat + phi D_hat) / (phi E_hat + D_hat)
    E_hat     = (alpha + 2 (m_r + k) lam_r pi_r) / (alpha + 2 (m_s + k) lam_s pi_s)
    D_hat     = (X + phi) / (phi X + 1),   X = lam_hat**(1 - k) pi_hat**(-k)

Log-linearizing at the symmetric point in ``ln lam_hat`` gives a 3x3
linear system for the elasticities of ``(pi_hat, E_hat, D_hat)``; the
stability elasticity is ``E(Omega) = E(pi) + m / (sigma - 1) E(D)``.

The expenditure block linearizes to ``E(E) = c m_tilde (1 + E(pi))``
with ``m_tilde = (m + k) / sigma``. The exact value is ``c = 1``, the
share of entrepreneur spending in regional manufacturing expenditure;
``coefficient=2`` reproduces a doubled variant for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .demand import ShareSchedule
from .errors import DegenerateDenominator, DomainError, SingularSystem
from .spatial import solve_symmetric_real_income

DEGENERATE_TOL = 1e-14


def trade_friction_index(tau: float, sigma: float) -> float:
    """``Z = (1 - phi) / (1 + phi)``: 0 under free trade, 1 in autarky."""
    if not tau >= 1:
        raise DomainError("tau must be at least 1")
    if not sigma > 1:
        raise DomainError("sigma must exceed 1")
    if math.isinf(tau):
        return 1.0
    phi = tau ** (1.0 - sigma)
    return (1.0 - phi) / (1.0 + phi)


def tau_of_Z(Z: float, sigma: float) -> float:
    """Inverse of :func:`trade_friction_index`."""
    if not 0.0 <= Z <= 1.0:
        raise DomainError("Z must lie in [0, 1]")
    if Z == 1.0:
        return math.inf
    phi = (1.0 - Z) / (1.0 + Z)
    return phi ** (1.0 / (1.0 - sigma))


def m_tilde_ext(m: float, sigma: float, eta: float) -> float:
    return (m + eta * (sigma - 1.0)) / sigma


def symmetric_earnings_ext(alpha: float, sigma: float, m: float, eta: float) -> float:
    """Entrepreneur earnings at the symmetric point, ``alpha / (sigma - m - eta (sigma - 1))``."""
    den = sigma - (m + eta * (sigma - 1.0))
    if not den > 0:
        raise DomainError(f"earnings denominator {den!r} is not positive")
    return alpha / den


def _check_box(m: float, sigma: float, eta: float, Z: float) -> None:
    if not 0.0 <= m < 1.0:
        raise DomainError("m must lie in [0, 1)")
    if not sigma > 1.0:
        raise DomainError("sigma must exceed 1")
    if not 0.0 <= eta <= 1.0:
        raise DomainError("eta must lie in [0, 1]")
    if not 0.0 <= Z <= 1.0:
        raise DomainError("Z must lie in [0, 1]")


def stability_elasticity(m: float, sigma: float, eta: float, Z: float, *,
                         coefficient: float = 1.0) -> float:
    """Closed-form ``E(Omega)``; the symmetric point is stable iff it is negative."""
    _check_box(m, sigma, eta, Z)
    k = eta * (sigma - 1.0)
    q = coefficient * m_tilde_ext(m, sigma, eta)
    den = 1.0 - q * Z + k * (1.0 - Z * Z)
    if abs(den) <= DEGENERATE_TOL:
        raise DegenerateDenominator(f"denominator {den!r} vanishes")
    num = 1.0 - Z * Z + (m / (sigma - 1.0)) * Z * (1.0 - q * Z)
    return -1.0 + num / den


def linear_system(m: float, sigma: float, eta: float, Z: float, *,
                  coefficient: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """``(A, b)`` with ``A @ (E(pi), E(E), E(D)) = b``."""
    k = eta * (sigma - 1.0)
    q = coefficient * m_tilde_ext(m, sigma, eta)
    A = np.array([[1.0 + k, -Z, Z],
                  [-q, 1.0, 0.0],
                  [Z * k, 0.0, 1.0]])
    b = np.array([-k, q, Z * (1.0 - k)])
    return A, b


def _det3(a: np.ndarray) -> float:
    return (a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]))


def solve_elasticities(m: float, sigma: float, eta: float, Z: float, *,
                       coefficient: float = 1.0) -> tuple[float, float, float]:
    """``(E(pi), E(E), E(D))`` by Cramer's rule."""
    _check_box(m, sigma, eta, Z)
    A, b = linear_system(m, sigma, eta, Z, coefficient=coefficient)
    det = _det3(A)
    if abs(det) <= DEGENERATE_TOL:
        raise SingularSystem(f"determinant {det!r} vanishes")
    out = []
    for j in range(3):
        Aj = A.copy()
        Aj[:, j] = b
        out.append(_det3(Aj) / det)
    return out[0], out[1], out[2]


def elasticity_via_linear_system(m: float, sigma: float, eta: float, Z: float, *,
                                 coefficient: float = 1.0) -> float:
    e_pi, _, e_d = solve_elasticities(m, sigma, eta, Z, coefficient=coefficient)
    return e_pi + (m / (sigma - 1.0)) * e_d


def hat_residuals(lambda_hat: float, pi_hat: float, E_hat: float, Delta_hat: float,
                  m_r: float, m_s: float, lambda_levels: tuple[float, float],
                  pi_levels: tuple[float, float], params, eta: float) -> np.ndarray:
    """Log-residuals of the three ratio equations (zero when all hold).

    ``params`` supplies ``alpha``, ``sigma`` and ``phi``; ``lambda_levels``
    and ``pi_levels`` are the regional levels entering expenditure.
    """
    if min(lambda_hat, pi_hat, E_hat, Delta_hat) <= 0:
        raise DomainError("ratios must be positive")
    alpha, sigma, phi = params.alpha, params.sigma, params.phi
    k = eta * (sigma - 1.0)
    (lr, ls), (pr, ps) = lambda_levels, pi_levels
    r1 = (math.log(pi_hat) + k * math.log(lambda_hat * pi_hat)
          - math.log((E_hat + phi * Delta_hat) / (phi * E_hat + Delta_hat)))
    r2 = math.log(E_hat) - math.log((alpha + 2.0 * (m_r + k) * lr * pr)
                                    / (alpha + 2.0 * (m_s + k) * ls * ps))
    X = lambda_hat ** (1.0 - k) * pi_hat ** (-k)
    r3 = math.log(Delta_hat) - math.log((X + phi) / (phi * X + 1.0))
    return np.array([r1, r2, r3])


def linearized_hat_rows(m: float, sigma: float, eta: float, Z: float, *,
                        coefficient: float = 1.0) -> np.ndarray:
    """Jacobian of :func:`hat_residuals` in ``ln`` of ``(lam_hat, pi_hat, E_hat, D_hat)``.

    Levels move with the ratios (``lam_r = lam_hat / (1 + lam_hat)`` and
    ``pi_r = pi sqrt(pi_hat)``); rows match the linear system used by
    :func:`solve_elasticities`.
    """
    k = eta * (sigma - 1.0)
    q = coefficient * m_tilde_ext(m, sigma, eta)
    return np.array([[k, 1.0 + k, -Z, Z],
                     [-q, -q, 1.0, 0.0],
                     [-Z * (1.0 - k), Z * k, 0.0, 1.0]])


def critical_Z(m: float, sigma: float, eta: float, *,
               coefficient: float = 1.0) -> list[float]:
    """Values of ``Z`` in ``(0, 1)`` at which ``E(Omega)`` changes sign.

    The numerator of ``E(Omega)`` is quadratic in ``Z``:
    ``(k - 1 - mu q) Z**2 + (mu + q) Z - k`` with ``mu = m / (sigma - 1)``.
    """
    k = eta * (sigma - 1.0)
    q = coefficient * m_tilde_ext(m, sigma, eta)
    mu = m / (sigma - 1.0)
    a, b, c = k - 1.0 - mu * q, mu + q, -k
    if a == 0.0:
        roots = [-c / b] if b != 0.0 else []
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0:
            return []
        s = math.sqrt(disc)
        # stable quadratic formula
        t = -0.5 * (b + math.copysign(s, b))
        roots = [t / a] + ([c / t] if t != 0.0 else [])
    return sorted(z for z in roots if 0.0 < z < 1.0)


def symmetric_real_income_ext(alpha: float, sigma: float, tau: float, eta: float,
                              ss: ShareSchedule) -> tuple[float, float]:
    """Symmetric ``(Omega, m)`` with land: extended earnings, baseline price-index penalty."""
    return solve_symmetric_real_income(alpha, sigma, tau, ss, extra_share=eta * (sigma - 1.0))


@dataclass(frozen=True)
class StabilityReport:
    Z: float
    m: float
    m_tilde_ext: float
    elasticity: float
    stable: bool


SCAN_HEADER = ("m", "sigma", "eta", "tau", "Z", "elasticity", "stable")


def stability_report(alpha: float, sigma: float, tau: float, eta: float, ss: ShareSchedule,
                     *, coefficient: float = 1.0) -> StabilityReport:
    """Stability of the symmetric point with ``m`` taken from the extended symmetric solve."""
    _, m = symmetric_real_income_ext(alpha, sigma, tau, eta, ss)
    Z = trade_friction_index(tau, sigma)
    e = stability_elasticity(m, sigma, eta, Z, coefficient=coefficient)
    return StabilityReport(Z, m, m_tilde_ext(m, sigma, eta), e, e < 0.0)


__all__ = ["trade_friction_index", "tau_of_Z", "m_tilde_ext", "symmetric_earnings_ext",
           "stability_elasticity", "linear_system", "solve_elasticities",
           "elasticity_via_linear_system", "hat_residuals", "linearized_hat_rows",
           "critical_Z", "symmetric_real_income_ext", "StabilityReport",
           "stability_report", "SCAN_HEADER"]
