import math

import numpy as np
import pytest

from weakchaos.jacobi import JacobiState, jacobi_series
from weakchaos.lyapunov import (SeparationSeries, SingularJacobianError, benettin_flow_exponent,
                                deformed_lyapunov, deformed_series, map_lyapunov_spectrum,
                                modified_lyapunov, standard_lyapunov)

import oracles as O


def _series(t, f):
    t = np.asarray(t, dtype=float)
    return SeparationSeries(t, f(t))


def test_series_validation():
    with pytest.raises(ValueError):
        SeparationSeries([1.0, 2.0], [1.0, 0.0])
    with pytest.raises(ValueError):
        SeparationSeries([1.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        SeparationSeries([1.0, 2.0, 3.0], [1.0, 2.0])
    with pytest.raises(TypeError):
        SeparationSeries([1.0], [1.0], log_deltas=[0.0])


def test_series_holds_values_beyond_float_range():
    s = SeparationSeries.from_log([1.0, 2.0], [10.0, 1000.0])
    assert math.isinf(s.deltas[1])
    assert s.log_deltas[1] == 1000.0


def test_standard_examples():
    est = standard_lyapunov(_series(np.linspace(0, 20, 201), lambda t: np.exp(2 * t)), 1.0)
    assert est.value == pytest.approx(2.0, abs=1e-10)
    assert est.stderr >= 0.0
    jac = jacobi_series(-1.0, 30.0, 3000)
    assert standard_lyapunov(jac).value == pytest.approx(1.0, abs=0.02)
    cube = standard_lyapunov(_series(np.linspace(50, 100, 1001), lambda t: t**3), 1.0)
    assert abs(cube.value) <= 0.07


def test_standard_window_and_minimum():
    s = _series(np.linspace(1, 10, 100), np.exp)
    est = standard_lyapunov(s, 0.5)
    assert est.window == (s.times[50], s.times[-1])
    with pytest.raises(ValueError):
        standard_lyapunov(s, 0.05)
    with pytest.raises(ValueError):
        standard_lyapunov(s, 0.0)


def test_modified_examples():
    t = np.linspace(1, 100, 500)
    assert modified_lyapunov(SeparationSeries(t, t**2.5)).value == pytest.approx(2.5, abs=1e-10)
    flat = jacobi_series(0.0, 30.0, 1000)
    assert modified_lyapunov(flat).value == pytest.approx(1.0, abs=1e-6)
    assert modified_lyapunov(_series(np.linspace(10, 30, 1001), np.exp), 1.0).value > 10


def test_deformed_examples():
    early = deformed_lyapunov(0.5, _series(np.linspace(15, 30, 1001), np.exp), 1.0)
    late = deformed_lyapunov(0.5, _series(np.linspace(30, 60, 1001), np.exp), 1.0)
    assert abs(early.value) <= 0.05
    assert abs(late.value) < abs(early.value)
    assert early.method == "deformed(q=0.5)"
    t = np.linspace(0.02, 60, 3000)
    transformed = deformed_series(0.5, SeparationSeries(t, np.exp(t)))
    assert modified_lyapunov(transformed).value == pytest.approx(1.0, abs=0.1)


def test_deformed_double_exponential():
    t = np.linspace(0, 100, 2001)
    s = SeparationSeries.from_log(t, np.exp(0.1 * t))
    assert deformed_lyapunov(0.5, s).value == pytest.approx(0.1, abs=0.01)


@pytest.mark.parametrize("factor", (1e-6, 0.3, 7.0, 1e8))
def test_scale_invariance_of_slope_estimators(factor):
    t = np.linspace(1, 40, 800)
    for s in (SeparationSeries(t, np.exp(0.7 * t)), SeparationSeries(t, t**1.5 + 3)):
        scaled = s.scaled(factor)
        for est in (standard_lyapunov, modified_lyapunov):
            assert est(scaled).value == pytest.approx(est(s).value, abs=1e-9)


def test_deformed_estimate_depends_on_scale():
    # the inverse tau_q map is not homogeneous, so rescaling changes the result
    t = np.linspace(1, 30, 600)
    s = SeparationSeries(t, t)
    a = deformed_lyapunov(0.5, s).value
    b = deformed_lyapunov(0.5, s.scaled(1e6)).value
    assert abs(a - b) > 1e-3


def test_time_shift_covariance():
    t = np.linspace(0, 30, 601)
    s = SeparationSeries(t, np.exp(0.4 * t) * (2 + np.sin(t)))
    shifted = SeparationSeries(t + 17.0, s.deltas)
    assert standard_lyapunov(shifted).value == pytest.approx(standard_lyapunov(s).value, abs=1e-9)


def test_ordering_triple():
    t = np.linspace(0.05, 80, 1600)
    for chi in (0.5, 1.0, 2.0):
        s = SeparationSeries.from_log(t, chi * t)
        for q in (0.3, 0.5, 0.7):
            assert standard_lyapunov(s).value == pytest.approx(chi, rel=1e-9)
            assert abs(deformed_lyapunov(q, s).value) <= 0.05
            assert modified_lyapunov(deformed_series(q, s)).value == pytest.approx(1.0, abs=0.1)


@pytest.mark.parametrize("K,target,tol", [(-1.0, 1.0, 0.01), (-4.0, 2.0, 0.02)])
def test_benettin_examples(K, target, tol):
    est = benettin_flow_exponent(K, JacobiState(0.6, -0.8), 100.0)
    assert est.value == pytest.approx(target, abs=tol)


def test_benettin_flat_is_small():
    assert abs(benettin_flow_exponent(0.0, JacobiState(0.0, 1.0), 100.0).value) <= 0.05


@pytest.mark.parametrize("K", (-0.25, -1.0, -4.0))
def test_benettin_matches_standard(K):
    std = standard_lyapunov(jacobi_series(K, 30.0, 3000)).value
    ben = benettin_flow_exponent(K, JacobiState(1.0, 0.3), 30.0).value
    assert ben == pytest.approx(std, rel=0.02)


def test_benettin_validation():
    with pytest.raises(ValueError):
        benettin_flow_exponent(-1.0, JacobiState(0.0, 0.0), 10.0)
    with pytest.raises(ValueError):
        benettin_flow_exponent(-1.0, JacobiState(0.0, 1.0), 10.0, dt=0.0)
    with pytest.raises(ValueError):
        benettin_flow_exponent(-1.0, JacobiState(0.0, 1.0), 10.0, renorm_every=0)


def test_map_spectrum_examples():
    diag = np.tile([[2.0, 0.0], [0.0, 0.5]], (10_000, 1, 1))
    l1, l2 = map_lyapunov_spectrum(diag)
    assert l1 == pytest.approx(O.LN2, abs=1e-12) and l2 == pytest.approx(-O.LN2, abs=1e-12)
    cat = np.tile([[2.0, 1.0], [1.0, 1.0]], (10_000, 1, 1))
    l1, l2 = map_lyapunov_spectrum(cat)
    assert l1 == pytest.approx(O.CAT_LN_MU, abs=1e-4)
    assert l2 == pytest.approx(-O.CAT_LN_MU, abs=1e-4)
    assert abs(l1 + l2) <= 1e-8
    # the start-up transient decays like 1/N
    l1, _ = map_lyapunov_spectrum(np.tile([[2.0, 1.0], [1.0, 1.0]], (1_000_000, 1, 1)))
    assert l1 == pytest.approx(O.CAT_LN_MU, abs=1e-6)


def test_map_spectrum_rotations(rng):
    angles = rng.uniform(0, 2 * np.pi, 10_000)
    rot = np.stack([np.stack([np.cos(angles), -np.sin(angles)], -1),
                    np.stack([np.sin(angles), np.cos(angles)], -1)], 1)
    l1, l2 = map_lyapunov_spectrum(rot)
    assert abs(l1) <= 1e-9 and abs(l2) <= 1e-9


def test_map_spectrum_area_preserving_sum(rng):
    jac = []
    for _ in range(20_000):
        a, b, c = rng.uniform(-2, 2, 3)
        a = a if abs(a) > 0.1 else 1.0
        jac.append([[a, b], [c, (1 + b * c) / a]])
    l1, l2 = map_lyapunov_spectrum(np.array(jac))
    assert abs(l1 + l2) <= 1e-8
    assert l1 >= l2


def test_map_spectrum_errors():
    with pytest.raises(ValueError):
        map_lyapunov_spectrum(np.tile(np.eye(2), (10, 1, 1)))
    sing = np.tile(np.eye(2), (10_000, 1, 1))
    sing[1234] = [[1.0, 2.0], [0.5, 1.0]]
    with pytest.raises(SingularJacobianError) as info:
        map_lyapunov_spectrum(sing)
    assert info.value.index == 1234
