import logging
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hcdgeo import spatial as sp
from hcdgeo.demand import Constant, DirectLogistic
from hcdgeo.errors import AssumptionViolation, BracketFailure, NotDefined
from hcdgeo.spatial import EVERYWHERE, Regime

import oracles

DL = DirectLogistic()
C5 = Constant(0.5)
# a share well above sigma - 1 = 0.5 at sigma = 1.5
HIGH = DirectLogistic(0.6, 0.9, 1.0, 2.0)


# --- core and symmetric real incomes ---------------------------------------------

def test_core_constant_closed_form():
    om, m = sp.solve_core_real_income(2.0, 4.0, C5)
    assert om == pytest.approx(2 / 3.5, rel=1e-14)
    for m0, a, s in ((0.1, 0.3, 1.2), (0.9, 7.0, 3.0)):
        assert sp.solve_core_real_income(a, s, Constant(m0))[0] == pytest.approx(a / (s - m0), rel=1e-14)


def test_core_matches_bisection_oracle():
    om, m = sp.solve_core_real_income(3.0, 1.7, DL)
    assert om == pytest.approx(oracles.core_by_bisection(3.0, 1.7, DL), rel=1e-12)
    assert om == pytest.approx(3.0 / (1.7 - DL(om)), rel=1e-12)


def test_core_comparative_statics():
    oms = [sp.solve_core_real_income(a, 1.7, DL) for a in np.geomspace(0.1, 20, 40)]
    assert all(b[0] > a[0] and b[1] > a[1] for a, b in zip(oms, oms[1:]))
    by_sigma = [sp.solve_core_real_income(2.0, s, DL) for s in np.linspace(1.6, 6, 40)]
    assert all(b[0] < a[0] and b[1] < a[1] for a, b in zip(by_sigma, by_sigma[1:]))


def test_symmetric_closed_form_and_free_trade():
    om, m = sp.solve_symmetric_real_income(2.0, 2.0, 2.0, C5)
    assert om == pytest.approx(math.sqrt(4 / 3), rel=1e-13)
    assert sp.solve_symmetric_real_income(1.7, 1.7, 1.0, DL)[0] == pytest.approx(
        sp.solve_core_real_income(1.7, 1.7, DL)[0], rel=1e-13)


def test_symmetric_matches_oracle_and_decreases_in_tau():
    taus = [1.0, 1.5, 3.0, 10.0, 100.0, math.inf]
    oms = [sp.solve_symmetric_real_income(1.2, 1.7, t, DL)[0] for t in taus]
    for t, om in zip(taus, oms):
        assert om == pytest.approx(oracles.symmetric_by_bisection(1.2, 1.7, t, DL), rel=1e-12)
    assert all(b < a for a, b in zip(oms, oms[1:]))


def test_infinite_tau_mode_limit():
    a = sp.solve_symmetric_real_income(2.0, 3.0, math.inf, DL)[0]
    b = sp.solve_symmetric_real_income(2.0, 3.0, 1e8, DL)[0]
    assert a == pytest.approx(b, rel=1e-8)
    # at sigma = 1.7 the 1e8 solution still carries phi = 1e8**-0.7
    a = sp.solve_symmetric_real_income(2.0, 1.7, math.inf, DL)[0]
    b = sp.solve_symmetric_real_income(2.0, 1.7, 1e8, DL)[0]
    assert 0 < (b - a) / a < 1e8 ** -0.7


def test_regularity_gate():
    steep = DirectLogistic(0.05, 0.95, 1.0, 12.0)
    with pytest.raises(AssumptionViolation):
        sp.solve_core_real_income(1.0, 1.05, steep)


# --- periphery deviator and sustain function --------------------------------------

def test_periphery_free_trade():
    om_c, _ = sp.solve_core_real_income(2.0, 1.7, DL)
    pi_s, om_s = sp.periphery_shadow(2.0, 1.7, 1.0, om_c, DL)
    assert pi_s == om_c and om_s == om_c


def test_periphery_constant_hand_value():
    pi_s, om_s = sp.periphery_shadow(2.0, 2.0, 1.5, 2 / 1.5, C5)
    assert pi_s == pytest.approx((1 / 3) * (2 / 3 + 3.25), rel=1e-14)
    assert om_s == pytest.approx(pi_s * 1.5 ** -0.5, rel=1e-13)


def test_periphery_matches_hand_oracle():
    om_c, m_c = sp.solve_core_real_income(2.2, 1.7, DL)
    pi_s, om_s = sp.periphery_shadow(2.2, 1.7, 4.0, om_c, DL)
    ref = oracles.periphery_by_hand(2.2, 1.7, 4.0, m_c, DL)
    assert pi_s == pytest.approx(ref[0], rel=1e-14)
    assert om_s == pytest.approx(ref[1], rel=1e-12)


def test_periphery_printed_variant_differs():
    om_c, _ = sp.solve_core_real_income(2.2, 1.7, DL)
    a = sp.periphery_shadow(2.2, 1.7, 4.0, om_c, DL)
    b = sp.periphery_shadow(2.2, 1.7, 4.0, om_c, DL, share_at="periphery")
    assert b[0] < a[0]  # periphery share is smaller
    with pytest.raises(ValueError):
        sp.periphery_shadow(2.2, 1.7, 4.0, om_c, DL, share_at="x")


def test_sustain_function_examples():
    assert sp.sustain_function(1.0, 0.3, 2.5) == 0.0
    assert sp.sustain_function(1.05, 0.5, 5.0) < 0
    assert sp.sustain_function(100.0, 0.8, 1.5) < 0
    om_c = 1 / 4.5
    _, om_s = sp.periphery_shadow(1.0, 5.0, 1.05, om_c, C5)
    assert om_s < om_c


@given(st.floats(0.0, 0.99), st.floats(1.01, 10.0))
def test_sustain_root_at_one(m, s):
    assert abs(sp.sustain_function(1.0, m, s)) <= 1e-12


@given(st.floats(0.2, 8.0), st.floats(1.6, 6.0), st.floats(1.0001, 50.0))
def test_sustain_sign_matches_direct_comparison(alpha, sigma, tau):
    om_c, m_c = sp.solve_core_real_income(alpha, sigma, DL)
    _, om_s = sp.periphery_shadow(alpha, sigma, tau, om_c, DL)
    f = sp.sustain_function(tau, m_c, sigma)
    if abs(f) > 1e-10:
        assert (f > 0) == (om_s > om_c)


def test_sustain_point_matches_scan():
    t1 = sp.sustain_point(1.0, 5.0, C5, scan=True)
    assert t1 == pytest.approx(oracles.sustain_by_scan(0.5, 5.0), rel=1e-10)
    assert sp.sustain_function(t1 * 0.99, 0.5, 5.0) < 0 < sp.sustain_function(t1 * 1.01, 0.5, 5.0)


def test_sustain_everywhere_when_share_large():
    assert sp.sustain_point(5.0, 1.5, HIGH) is EVERYWHERE
    assert sp.sustain_point_from_share(0.8, 1.5) is EVERYWHERE


def test_sustain_beyond_default_cap():
    # just below alpha_1 the root is astronomically large
    a1 = sp.alpha_threshold_sustain(1.7, DL)
    with pytest.raises(BracketFailure):
        sp.sustain_point(a1 * 0.98, 1.7, DL)
    t = sp.sustain_point(a1 * 0.98, 1.7, DL, cap=1e300)
    assert 1e8 < t < 1e300


def test_sustain_point_increasing_in_alpha():
    ts = [sp.sustain_point(a, 1.7, DL, cap=1e300) for a in np.linspace(0.3, 1.2, 25)]
    assert all(b > a for a, b in zip(ts, ts[1:]))


def test_no_spurious_sustain_roots(caplog):
    with caplog.at_level(logging.WARNING):
        for a in np.linspace(0.2, 1.2, 8):
            sp.sustain_point(a, 1.7, DL, scan=True)
    assert "changes sign" not in caplog.text


# --- break point ------------------------------------------------------------------

def test_break_point_constant():
    t0 = sp.break_point(1.0, 5.0, C5)
    assert t0 == pytest.approx(oracles.constant_break_point(0.5, 5.0), rel=1e-10)
    assert t0 == pytest.approx(1.1196, abs=1e-3)
    assert 5.0 ** 0 * t0 ** -4 == pytest.approx(0.636364, abs=1e-6)
    assert sp.break_point(3.0, 2.5, Constant(0.0)) == 1.0


def test_break_point_everywhere():
    assert sp.break_point(5.0, 1.5, HIGH) is EVERYWHERE


def test_break_point_root_is_sign_change():
    t0 = sp.break_point(1.0, 1.7, DL)
    assert sp.break_function(t0 * 0.999, 1.0, 1.7, DL) > 0 > sp.break_function(t0 * 1.001, 1.0, 1.7, DL)
    _, m_b = sp.solve_symmetric_real_income(1.0, 1.7, t0, DL)
    assert t0 ** -0.7 == pytest.approx(sp.break_ratio(m_b, 1.7), rel=1e-10)


def test_critical_point_ordering_grid():
    for a in np.geomspace(0.2, 1.3, 12):
        cp = sp.critical_points(a, 1.7, DL, cap=1e300)
        assert cp.tau_break < cp.tau_sustain


# --- thresholds --------------------------------------------------------------------

def test_thresholds_closed_form():
    # m(Omega) = sigma - 1 = 0.7 at Omega = sqrt(2) for the default logistic
    th = sp.thresholds(1.7, DL)
    assert th.alpha_1 == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert th.alpha_inf == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-12)
    assert 0 < th.alpha_1 < th.alpha_inf


def test_thresholds_not_defined():
    with pytest.raises(NotDefined):
        sp.alpha_threshold_sustain(2.5, DL)
    with pytest.raises(NotDefined):
        sp.alpha_threshold_break(1.99, DirectLogistic(0.1, 0.5))
    th = sp.thresholds(1.5, Constant(0.8))
    assert th.alpha_1 is EVERYWHERE and th.alpha_inf is EVERYWHERE


def test_thresholds_meet_critical_behaviour():
    th = sp.thresholds(1.7, DL)
    assert sp.sustain_point(th.alpha_1 * 1.001, 1.7, DL) is EVERYWHERE
    assert sp.break_point(th.alpha_inf * 1.001, 1.7, DL) is EVERYWHERE
    assert sp.break_point(th.alpha_inf * 0.9, 1.7, DL) is not EVERYWHERE


# --- classification ---------------------------------------------------------------

def test_classify_examples():
    assert sp.classify(2.0, 5.0, 2.0, C5).regime is Regime.SYMMETRIC_ONLY
    assert sp.classify(2.0, 5.0, 1.05, C5).regime is Regime.CORE_PERIPHERY_ONLY
    c = sp.classify(5.0, 1.5, 1e6, HIGH)
    assert c.regime is Regime.CORE_PERIPHERY_ONLY and c.black_hole


def test_classify_ties_follow_weak_inequalities():
    cp = sp.critical_points(1.0, 5.0, C5)
    assert sp.classify_from_points(cp.tau_break, cp).regime is Regime.CORE_PERIPHERY_ONLY
    assert sp.classify_from_points(cp.tau_sustain, cp).regime is Regime.BISTABLE
    assert sp.classify_from_points(cp.tau_sustain * 1.0001, cp).regime is Regime.SYMMETRIC_ONLY


@given(st.floats(0.2, 3.5), st.floats(1.01, 1e4))
def test_sign_classification_matches_roots(alpha, tau):
    cp = sp.critical_points(alpha, 1.7, DL, cap=1e300) if not (
        1.35 < alpha < 1.42) else None
    if cp is None:
        return
    for crit in (cp.tau_break, cp.tau_sustain):
        if crit is not EVERYWHERE and abs(math.log(tau / crit)) < 1e-9:
            return
    assert sp.classify(alpha, 1.7, tau, DL) == sp.classify_from_points(tau, cp)


@given(st.floats(0.2, 8.0), st.floats(1.6, 6.0), st.floats(1.0001, 1e3))
def test_symmetric_income_below_core(alpha, sigma, tau):
    om_b, m_b = sp.solve_symmetric_real_income(alpha, sigma, tau, DL)
    om_c, m_c = sp.solve_core_real_income(alpha, sigma, DL)
    assert om_b < om_c and m_b <= m_c
    assert alpha / (sigma - m_b) <= alpha / (sigma - m_c)
