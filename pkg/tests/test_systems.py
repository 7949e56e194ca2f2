import math

import numpy as np
import pytest

from weakchaos.lyapunov import (SeparationSeries, map_lyapunov_spectrum, standard_lyapunov)
from weakchaos.spaceform import SpaceForm, random_state
from weakchaos.systems import (CAT_MATRIX, LogisticParams, OrbitCollapseWarning, anosov_verify,
                               cat_map_iterate, cat_map_jacobian, cat_orbit_jacobians,
                               critical_orbit_sensitivity, edge_of_chaos_param,
                               geodesic_separation_series, logistic_sensitivity_series,
                               q_sensitivity_fit, q_sensitivity_scan, superstable_params)

import oracles as O


# cat map -----------------------------------------------------------------------

def test_cat_map_examples():
    assert cat_map_iterate((0.0, 0.0), 7) == (0.0, 0.0)
    x, y = cat_map_iterate((0.5, 0.25), 1)
    assert (x, y) == (0.25, 0.75)
    np.testing.assert_array_equal(cat_map_jacobian((0.3, 0.9)), [[2, 1], [1, 1]])


def test_cat_map_validation():
    with pytest.raises(ValueError):
        cat_map_iterate((1.0, 0.0), 1)
    with pytest.raises(ValueError):
        cat_map_iterate((0.1, 0.1), -1)
    with pytest.raises(ValueError):
        cat_orbit_jacobians((0.1, 0.1), -2)


def test_cat_map_preserves_area():
    assert np.linalg.det(CAT_MATRIX) == pytest.approx(1.0, abs=1e-15)
    jac = cat_orbit_jacobians((0.1, 0.7), 50)
    assert jac.shape == (50, 2, 2) and jac.flags.c_contiguous
    np.testing.assert_allclose(np.linalg.det(jac), 1.0, atol=1e-14)


def test_cat_spectrum():
    l1, l2 = map_lyapunov_spectrum(cat_orbit_jacobians((0.1, 0.2), 1_000_000))
    assert l1 == pytest.approx(O.CAT_LN_MU, abs=1e-4)
    assert l2 == pytest.approx(-O.CAT_LN_MU, abs=1e-4)
    assert abs(l1 + l2) <= 1e-8


def test_anosov_default_passes():
    rep = anosov_verify()
    assert rep.passed
    assert rep.contraction_rate == pytest.approx(O.CAT_LAMBDA, rel=1e-15)
    assert rep.expansion_rate == pytest.approx(O.CAT_MU, rel=1e-15)
    assert rep.constant <= 1 + 1e-9
    assert rep.checks["flow_direction"]["passed"] is None
    assert len(rep.profile) == 30
    # the stable and unstable directions are orthogonal for a symmetric matrix
    assert abs(np.dot(rep.stable, rep.unstable)) <= 1e-15


def test_anosov_identity_is_not_hyperbolic():
    rep = anosov_verify(matrix=np.eye(2))
    assert not rep.passed
    assert not rep.checks["expansion"]["passed"]
    assert not rep.checks["contraction"]["passed"]


def test_anosov_validation():
    with pytest.raises(ValueError):
        anosov_verify(samples=10)
    with pytest.raises(ValueError):
        anosov_verify(t_max=5)


# quadratic map ---------------------------------------------------------------

def test_logistic_params():
    for bad in (0.0, -1.0, 2.5, float("nan")):
        with pytest.raises(ValueError):
            LogisticParams(bad)
    assert LogisticParams(2).a == 2.0


def test_logistic_full_chaos():
    s = logistic_sensitivity_series(2.0, N=1_000_000)
    assert standard_lyapunov(s, 1.0).value == pytest.approx(O.LN2, abs=0.01)


def test_logistic_periodic_window_is_negative():
    s = logistic_sensitivity_series(0.5, N=10_000)
    assert standard_lyapunov(s, 0.5).value < 0


def test_logistic_series_validation():
    with pytest.raises(ValueError):
        logistic_sensitivity_series(2.0, x0=1.0)
    with pytest.raises(ValueError):
        logistic_sensitivity_series(2.0, N=10)


def test_orbit_collapse_is_reported():
    with pytest.warns(OrbitCollapseWarning):
        s = logistic_sensitivity_series(1.0, x0=0.0, N=1000)
    assert np.all(np.isfinite(s.log_deltas))
    # a = 1 makes 0 -> 1 -> 0 a superstable 2-cycle
    with pytest.warns(OrbitCollapseWarning):
        critical_orbit_sensitivity(1.0, N=1000)


def test_superstable_sequence():
    A, est = superstable_params()
    assert A[0] == 1.0
    assert all(b > a for a, b in zip(A, A[1:]))
    ratios = [(A[i] - A[i - 1]) / (A[i + 1] - A[i]) for i in range(2, len(A) - 1)]
    assert ratios[-1] == pytest.approx(4.669201609, abs=1e-3)


def test_edge_parameter():
    a = edge_of_chaos_param()
    assert 1.4011551 < a < 1.4011552
    assert a == pytest.approx(O.A_INFINITY, abs=1e-12)


def test_edge_exponent_vanishes():
    a = edge_of_chaos_param()
    s = logistic_sensitivity_series(a, N=100_000)
    assert abs(standard_lyapunov(s, 0.5).value) <= 0.01
    for off in (0.05, 0.1, 0.2):
        above = standard_lyapunov(logistic_sensitivity_series(a + off, N=100_000), 0.5)
        assert above.value > 0.1
    for off in (0.01, 0.03, 0.1):
        below = standard_lyapunov(logistic_sensitivity_series(a - off, N=100_000), 0.5)
        assert below.value < 0


@pytest.mark.parametrize("a", (2.0, 1.8))
def test_sensitivity_matches_central_difference(a):
    from weakchaos import kernels
    x0, h = 0.2, 1e-10
    s = logistic_sensitivity_series(a, x0=x0, N=1000)
    for n in range(1, 31):
        fd = (kernels.logistic_iterate(a, x0 + h, n) - kernels.logistic_iterate(a, x0 - h, n)) / (2 * h)
        assert abs(fd) == pytest.approx(math.exp(s.log_deltas[n - 1]), rel=0.01)


@pytest.mark.parametrize("q", (0.2, 0.4, 0.6, 0.8))
def test_q_fit_recovers_synthetic_q(q):
    t = np.arange(1.0, 1001.0)
    lam = 0.7
    c = 1 - q
    logs = np.log1p(c * lam * t) / c
    fit = q_sensitivity_fit(SeparationSeries.from_log(t, logs))
    assert fit.q_sen == pytest.approx(q, abs=0.02)
    assert fit.lambda_q == pytest.approx(lam, rel=0.05)
    assert not fit.at_grid_edge


def test_q_fit_example():
    from weakchaos.qcalc import q_exponential
    t = np.arange(1.0, 1001.0)
    fit = q_sensitivity_fit(SeparationSeries(t, [q_exponential(0.4, 0.8 * x) for x in t]))
    assert fit.q_sen == pytest.approx(0.4, abs=0.02)
    assert fit.lambda_q == pytest.approx(0.8, abs=0.05)


def test_q_fit_flags_exponential_growth():
    t = np.arange(1.0, 1001.0)
    fit = q_sensitivity_fit(SeparationSeries.from_log(t, 0.3 * t))
    assert fit.at_grid_edge


def test_q_scan_shapes_and_validation():
    t = np.arange(1.0, 501.0)
    s = SeparationSeries.from_log(t, np.log1p(0.5 * t) / 0.5)
    q, qual, slope = q_sensitivity_scan(s)
    assert q.shape == qual.shape == slope.shape == (99,)
    with pytest.raises(ValueError):
        q_sensitivity_scan(s, q_grid=[0.5] * 5)
    with pytest.raises(ValueError):
        q_sensitivity_fit(SeparationSeries.from_log(t[:50], t[:50]))
    flat = SeparationSeries.from_log(t, np.zeros_like(t))
    with pytest.raises(ValueError):
        q_sensitivity_fit(flat)


def test_edge_envelope_q():
    s = critical_orbit_sensitivity(edge_of_chaos_param(), N=100_000)
    fit = q_sensitivity_fit(s)
    assert 0.15 <= fit.q_sen <= 0.35


# geodesic flows ---------------------------------------------------------------

@pytest.mark.parametrize("K", (-0.25, -1.0, -4.0))
def test_geodesic_separation_rate(K, rng):
    s = SpaceForm(K)
    st = random_state(s, rng)
    d = s.project_tangent(st.position, rng.standard_normal(3))
    series = geodesic_separation_series(s, st, d, 30.0)
    assert standard_lyapunov(series).value == pytest.approx(math.sqrt(-K), rel=0.02)


def test_geodesic_separation_validation(rng):
    s = SpaceForm(-1.0)
    st = random_state(s, rng)
    with pytest.raises(ValueError):
        geodesic_separation_series(s, st, np.zeros(3), 10.0)
    with pytest.raises(ValueError):
        geodesic_separation_series(s, st, st.velocity, 10.0)
    with pytest.raises(ValueError):
        geodesic_separation_series(s, st, st.velocity, -1.0)
