import math

import numpy as np
import pytest

from weakchaos.jacobi import (Bounded, Exponential, JacobiCoeffs, JacobiState, Linear,
                              Polynomial, classify_separation, jacobi_closed_form,
                              jacobi_integrate, jacobi_series, jacobi_trajectory,
                              wronskian_drift)
from weakchaos.lyapunov import SeparationSeries

import oracles as O


def test_coefficients_must_match():
    with pytest.raises(ValueError):
        JacobiCoeffs((1.0, 2.0), (1.0,))
    with pytest.raises(ValueError):
        JacobiState(float("nan"), 0.0)


def test_closed_form_examples():
    c01 = JacobiCoeffs((0.0,), (1.0,))
    assert jacobi_closed_form(-1.0, c01, 10.0)[0] == pytest.approx(O.SINH_10, rel=1e-15)
    assert jacobi_closed_form(0.0, c01, 7.0) == [7.0]
    assert jacobi_closed_form(-4.0, JacobiCoeffs((1.0,), (0.0,)), 1.0)[0] == pytest.approx(
        O.COSH_2, rel=1e-15)


def test_closed_form_b_is_initial_derivative():
    for K in (-4.0, -1.0, 0.0, 1.0, 9.0):
        c = JacobiCoeffs((0.3,), (-1.7,))
        h = 1e-6
        d = (jacobi_closed_form(K, c, 2 * h)[0] - jacobi_closed_form(K, c, 0.0)[0]) / (2 * h)
        # one-sided from t = 0, second-order corrected by the symmetric point
        d0 = (-3 * jacobi_closed_form(K, c, 0.0)[0] + 4 * jacobi_closed_form(K, c, h)[0]
              - jacobi_closed_form(K, c, 2 * h)[0]) / (2 * h)
        assert d0 == pytest.approx(-1.7, abs=1e-6)
        assert d == pytest.approx(-1.7, abs=1e-4)


@pytest.mark.parametrize("K", (-4.0, -1.0, 0.0, 1.0))
def test_closed_form_solves_the_ode(K):
    c = JacobiCoeffs((0.4, -1.0), (1.1, 0.2))
    h = 1e-3
    for t in (0.5, 2.0, 3.0):
        jm, j0, jp = (np.array(jacobi_closed_form(K, c, s)) for s in (t - h, t, t + h))
        second = (jp - 2 * j0 + jm) / h**2
        np.testing.assert_allclose(second, -K * j0, atol=1e-5 * max(1.0, np.abs(j0).max()))


def test_integrate_examples():
    out = jacobi_integrate(-1.0, JacobiState(0.0, 1.0), 10.0, 1e-3)
    assert out.value == pytest.approx(O.SINH_10, rel=1e-8)
    for t in (0.0, 3.3, 50.0):
        assert jacobi_integrate(0.0, JacobiState(1.0, 0.0), t, 1e-3).value == 1.0
    assert abs(jacobi_integrate(1.0, JacobiState(0.0, 1.0), math.pi, 1e-3).value) <= 1e-7


def test_integrate_rejects_bad_step():
    for dt in (0.0, -1.0):
        with pytest.raises(ValueError):
            jacobi_integrate(-1.0, JacobiState(0.0, 1.0), 1.0, dt)


@pytest.mark.parametrize("K", (-4.0, -1.0, 0.0, 1.0))
def test_trajectory_matches_closed_form(K, rng):
    a, b = rng.uniform(-1, 1, 2)
    times, Js, Ps = jacobi_trajectory(K, JacobiState(a, b), 10.0, 1e-3, 200)
    c = JacobiCoeffs((a,), (b,))
    closed = np.array([jacobi_closed_form(K, c, t)[0] for t in times])
    scale = np.array([abs(a * jacobi_closed_form(K, JacobiCoeffs((1.0,), (0.0,)), t)[0])
                      + abs(b * jacobi_closed_form(K, JacobiCoeffs((0.0,), (1.0,)), t)[0])
                      for t in times])
    assert np.all(np.abs(Js - closed) <= 1e-8 * scale + 1e-300)


@pytest.mark.parametrize("K", (-4.0, -1.0, 0.0, 1.0))
def test_wronskian_is_conserved(K):
    assert wronskian_drift(K, JacobiState(1.0, 0.0), JacobiState(0.0, 1.0), 10.0, 1e-3) <= 1e-9
    assert wronskian_drift(K, JacobiState(0.3, -0.2), JacobiState(-1.0, 2.0), 10.0, 1e-3) <= 1e-9


def test_classify_examples():
    t = np.linspace(5.0, 30.0, 500)
    sinh = SeparationSeries(t, np.sinh(t))
    cls = classify_separation(sinh)
    assert isinstance(cls, Exponential) and cls.rate == pytest.approx(1.0, abs=0.02)
    assert isinstance(classify_separation(jacobi_series(0.0, 30.0, 500)), Linear)
    sq = classify_separation(SeparationSeries(t, t**2))
    assert isinstance(sq, Polynomial) and sq.degree == pytest.approx(2.0, abs=0.05)


def test_classify_bounded():
    t = np.linspace(1.0, 100.0, 400)
    cls = classify_separation(SeparationSeries(t, 2.0 + 1e-4 * np.sin(t)))
    assert isinstance(cls, Bounded) and cls.mean == pytest.approx(2.0, rel=1e-4)


def test_classify_rejects_short_series():
    t = np.linspace(1.0, 2.0, 49)
    with pytest.raises(ValueError):
        classify_separation(SeparationSeries(t, t))


@pytest.mark.parametrize("K", (0.0, -0.01, -0.1, -0.25, -1.0, -4.0))
def test_no_intermediate_growth_class_for_nonpositive_curvature(K):
    cls = classify_separation(jacobi_series(K, 30.0, 3000))
    assert isinstance(cls, (Linear, Exponential))
