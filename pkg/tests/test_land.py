import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hcdgeo import land
from hcdgeo.demand import Constant, DirectLogistic
from hcdgeo.errors import DegenerateDenominator, DomainError
from hcdgeo.short_run import EconomyParams
from hcdgeo.spatial import break_point, solve_symmetric_real_income

import oracles

ms = st.floats(0.01, 0.99)
sigmas = st.floats(1.05, 8.0)
etas = st.floats(0.0, 1.0)
zs = st.floats(0.0, 1.0)


def test_friction_index_examples():
    assert land.trade_friction_index(1.0, 3.0) == 0.0
    assert land.trade_friction_index(math.inf, 3.0) == 1.0
    assert land.trade_friction_index(1e12, 3.0) == pytest.approx(1.0, abs=1e-15)
    assert land.trade_friction_index(3.0, 2.0) == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(DomainError):
        land.trade_friction_index(0.5, 2.0)


@given(st.floats(1.0, 1e3), st.floats(1.001, 2.0), sigmas)
def test_friction_index_monotone_and_invertible(tau, k, sigma):
    z = land.trade_friction_index(tau, sigma)
    assert land.trade_friction_index(tau * k, sigma) >= z
    if 0 < z < 1 - 1e-9:
        assert land.tau_of_Z(z, sigma) == pytest.approx(tau, rel=1e-7)


def test_symmetric_earnings_examples():
    assert land.symmetric_earnings_ext(1.0, 2.0, 0.5, 0.5) == pytest.approx(1.0, rel=1e-15)
    assert land.symmetric_earnings_ext(2.0, 3.0, 0.4, 0.25) == pytest.approx(2 / 2.1, rel=1e-15)
    assert land.symmetric_earnings_ext(1.3, 1.7, 0.6, 0.0) == pytest.approx(1.3 / 1.1, rel=1e-15)
    assert land.symmetric_earnings_ext(1.0, 2.0, 0.6, 0.5) > land.symmetric_earnings_ext(1.0, 2.0, 0.5, 0.5)


def test_elasticity_examples():
    assert land.stability_elasticity(0.3, 2.0, 1.0, 0.0) == pytest.approx(-0.5, abs=1e-15)
    assert land.stability_elasticity(0.5, 2.0, 0.7, 1.0) == pytest.approx(-0.5, abs=1e-15)
    assert land.stability_elasticity(0.8, 1.5, 0.2, 1.0) == pytest.approx(0.6, abs=1e-15)
    assert land.stability_elasticity(0.4, 3.0, 0.0, 0.0) == 0.0
    assert land.elasticity_via_linear_system(0.4, 3.0, 0.0, 0.0) == pytest.approx(0.0, abs=1e-15)


@given(ms, sigmas, st.floats(0.01, 1.0))
def test_limit_identities(m, sigma, eta):
    z0 = -1.0 / (1.0 + 1.0 / (eta * (sigma - 1)))
    assert land.stability_elasticity(m, sigma, eta, 0.0) == pytest.approx(z0, abs=1e-12)
    assert land.stability_elasticity(m, sigma, eta, 1.0) == pytest.approx(m / (sigma - 1) - 1, abs=1e-12)


@given(ms, sigmas, etas, zs)
def test_closed_form_matches_substitution_oracle(m, sigma, eta, z):
    ref = oracles.elasticity_by_substitution(m, sigma, eta, z)
    assert land.stability_elasticity(m, sigma, eta, z) == pytest.approx(ref, rel=1e-10, abs=1e-12)
    ref2 = oracles.elasticity_by_substitution(m, sigma, eta, z, c=2.0)
    try:
        val = land.stability_elasticity(m, sigma, eta, z, coefficient=2.0)
    except DegenerateDenominator:
        return
    assert val == pytest.approx(ref2, rel=1e-8, abs=1e-10)


def test_closed_form_matches_linear_solve_on_draws():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(10_000):
        m, sigma, eta, z = rng.uniform(0, 1), rng.uniform(1.01, 10), rng.uniform(0, 1), rng.uniform(0, 1)
        a = land.stability_elasticity(m, sigma, eta, z)
        b = land.elasticity_via_linear_system(m, sigma, eta, z)
        worst = max(worst, abs(a - b))
    assert worst <= 1e-12


def test_linear_solve_satisfies_system():
    A, b = land.linear_system(0.4, 2.5, 0.3, 0.6)
    x = np.array(land.solve_elasticities(0.4, 2.5, 0.3, 0.6))
    assert np.allclose(A @ x, b, rtol=0, atol=1e-14)


def test_krugman_nesting_maps_to_break_point():
    for m0, sigma in ((0.5, 5.0), (0.3, 2.0), (0.6, 1.7)):
        (z,) = land.critical_Z(m0, sigma, 0.0)
        assert abs(land.stability_elasticity(m0, sigma, 0.0, z)) <= 1e-12
        tau0 = break_point(1.0, sigma, Constant(m0))
        assert land.tau_of_Z(z, sigma) == pytest.approx(tau0, rel=1e-6)
        assert land.tau_of_Z(z, sigma) == pytest.approx(oracles.constant_break_point(m0, sigma), rel=1e-10)


def test_doubled_coefficient_misses_break_point():
    (z,) = land.critical_Z(0.5, 5.0, 0.0, coefficient=2.0)
    assert land.tau_of_Z(z, 5.0) == pytest.approx(1.17844, abs=1e-5)
    assert abs(land.tau_of_Z(z, 5.0) - oracles.constant_break_point(0.5, 5.0)) > 0.05


def test_degenerate_denominator():
    # with the doubled coefficient 1 - 2 m_tilde Z vanishes at eta = 0, m_tilde Z = 1/2
    m, sigma = 0.8, 1.6
    z = sigma / (2 * m)  # 2 (m / sigma) z = 1
    with pytest.raises(DegenerateDenominator):
        land.stability_elasticity(m, sigma, 0.0, z, coefficient=2.0)


def test_helpman_dispersion_at_low_trade_costs():
    for eta in (0.05, 0.3, 1.0):
        for m, sigma in ((0.5, 1.6), (0.9, 1.2), (0.3, 4.0)):
            zs_ = np.linspace(0.0, 1.0, 2001)
            e = np.array([land.stability_elasticity(m, sigma, eta, z) for z in zs_])
            assert e[0] < 0
            first = np.argmax(e >= 0) if np.any(e >= 0) else len(e)
            assert first > 0 and np.all(e[:first] < 0)
            roots = land.critical_Z(m, sigma, eta)
            if roots:
                assert zs_[first - 1] < roots[0] <= zs_[min(first, 2000)]


def test_unstable_at_autarky_iff_black_hole_condition():
    assert land.stability_elasticity(0.8, 1.5, 0.4, 1.0) > 0
    assert land.stability_elasticity(0.4, 1.5, 0.4, 1.0) < 0


# --- hat system ------------------------------------------------------------------------

def _levels(lh, ph, pi):
    return (lh / (1 + lh), 1 / (1 + lh)), (pi * math.sqrt(ph), pi / math.sqrt(ph))


def test_hat_residuals_zero_at_symmetry():
    p = EconomyParams(1.2, 2.5, 1.7)
    pi = land.symmetric_earnings_ext(1.2, 2.5, 0.4, 0.3)
    r = land.hat_residuals(1.0, 1.0, 1.0, 1.0, 0.4, 0.4, (0.5, 0.5), (pi, pi), p, 0.3)
    assert np.all(r == 0.0)


@given(st.floats(0.2, 5.0), etas, ms)
def test_hat_residuals_free_trade_closed_form(lh, eta, m):
    sigma, alpha = 2.5, 1.2
    p = EconomyParams(alpha, sigma, 1.0)
    k = eta * (sigma - 1)
    ph = lh ** (-k / (1 + k))  # pi_hat = (lam_hat pi_hat)**(-k)
    lam, pis = _levels(lh, ph, 1.0)
    eh = (alpha + 2 * (m + k) * lam[0] * pis[0]) / (alpha + 2 * (m + k) * lam[1] * pis[1])
    r = land.hat_residuals(lh, ph, eh, 1.0, m, m, lam, pis, p, eta)
    assert np.max(np.abs(r)) <= 1e-13


def test_hat_rows_match_finite_differences():
    for m, sigma, eta, tau in ((0.4, 2.5, 0.3, 1.7), (0.5, 5.0, 0.0, 1.12), (0.7, 1.6, 0.9, 4.0)):
        alpha = 1.3
        p = EconomyParams(alpha, sigma, tau)
        pi = land.symmetric_earnings_ext(alpha, sigma, m, eta)

        def F(x):
            lh, ph, eh, dh = np.exp(x)
            lam, pis = _levels(lh, ph, pi)
            return land.hat_residuals(lh, ph, eh, dh, m, m, lam, pis, p, eta)

        h = 1e-6
        J = np.column_stack([(F(h * e) - F(-h * e)) / (2 * h) for e in np.eye(4)])
        Z = land.trade_friction_index(tau, sigma)
        assert np.allclose(J, land.linearized_hat_rows(m, sigma, eta, Z), rtol=0, atol=1e-6)
        # rows rearrange to the linear system in the elasticities
        A, b = land.linear_system(m, sigma, eta, Z)
        rows = land.linearized_hat_rows(m, sigma, eta, Z)
        assert np.allclose(rows[:, 1:], A) and np.allclose(-rows[:, 0], b)


def test_hat_residuals_reject_nonpositive():
    with pytest.raises(DomainError):
        land.hat_residuals(0.0, 1, 1, 1, 0.4, 0.4, (0.5, 0.5), (1, 1), EconomyParams(1, 2, 2), 0.3)


# --- reports ------------------------------------------------------------------------

def test_extension_nests_baseline_symmetric_solve():
    dl = DirectLogistic()
    assert land.symmetric_real_income_ext(1.2, 1.7, 3.0, 0.0, dl) == solve_symmetric_real_income(1.2, 1.7, 3.0, dl)
    om1, _ = land.symmetric_real_income_ext(1.2, 1.7, 3.0, 0.2, dl)
    assert om1 > solve_symmetric_real_income(1.2, 1.7, 3.0, dl)[0]


def test_stability_report_fields():
    rep = land.stability_report(1.0, 5.0, 1.05, 0.0, Constant(0.5))
    assert rep.m == 0.5 and rep.m_tilde_ext == pytest.approx(0.1)
    assert rep.Z == pytest.approx(land.trade_friction_index(1.05, 5.0))
    assert rep.stable is False and rep.elasticity > 0
    assert land.stability_report(1.0, 5.0, 2.0, 0.0, Constant(0.5)).stable is True
