"""Exponent estimators over separation series and tangent dynamics.

The standard rate of a separation series delta(t) is the slope of
ln(delta) against t. The modified exponent regresses on ln(t) instead and
reads off a power-law degree. The deformed rate is the standard rate after
every delta is re-measured through the inverse tau_q map, which turns
e^(chi t) into something linear in t and so drives the rate to zero.

Also the Benettin renormalized tangent evolution for geodesic flows on space
forms and the two-exponent spectrum of planar maps.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .qcalc import DeformParam, deformed_log_distance

__all__ = [
    "ExponentEstimate",
    "SeparationSeries",
    "SingularJacobianError",
    "benettin_flow_exponent",
    "deformed_lyapunov",
    "deformed_series",
    "map_lyapunov_spectrum",
    "modified_lyapunov",
    "standard_lyapunov",
]

MIN_WINDOW = 10


class SingularJacobianError(ArithmeticError):
    def __init__(self, index):
        super().__init__(f"Jacobian at step {index} is singular (|det| < 1e-300)")
        self.index = index


class SeparationSeries:
    """Sampled separations (t, delta(t)).

    Separations are stored as logarithms so that series growing past the
    float range (long chaotic orbits, double exponentials) stay usable;
    ``deltas`` exponentiates on demand and may contain ``inf``.
    """

    __slots__ = ("times", "log_deltas")

    def __init__(self, times, deltas=None, *, log_deltas=None):
        times = np.array(times, dtype=float)
        if (deltas is None) == (log_deltas is None):
            raise TypeError("give exactly one of deltas or log_deltas")
        if deltas is not None:
            deltas = np.asarray(deltas, dtype=float)
            if np.any(~(deltas > 0.0)):
                raise ValueError("separations must be positive")
            with np.errstate(over="ignore"):
                logs = np.log(deltas)
        else:
            logs = np.array(log_deltas, dtype=float)
            if np.any(~np.isfinite(logs)):
                raise ValueError("log separations must be finite")
        if times.ndim != 1 or times.shape != logs.shape:
            raise ValueError("times and separations must be 1-d and of equal length")
        if times.size and np.any(np.diff(times) <= 0.0):
            raise ValueError("times must be strictly increasing")
        times.flags.writeable = False
        logs.flags.writeable = False
        self.times = times
        self.log_deltas = logs

    @classmethod
    def from_log(cls, times, log_deltas):
        return cls(times, log_deltas=log_deltas)

    @property
    def deltas(self):
        with np.errstate(over="ignore"):
            return np.exp(self.log_deltas)

    def __len__(self):
        return self.times.size

    def __repr__(self):
        return f"SeparationSeries(n={len(self)}, t=[{self.times[0]:g}, {self.times[-1]:g}])"

    def window(self, lo, hi):
        """Sub-series with lo <= t <= hi."""
        m = (self.times >= lo) & (self.times <= hi)
        return SeparationSeries.from_log(self.times[m], self.log_deltas[m])

    def scaled(self, factor):
        return SeparationSeries.from_log(self.times, self.log_deltas + math.log(factor))


@dataclass(frozen=True)
class ExponentEstimate:
    value: float
    stderr: float
    window: tuple
    method: str

    def __float__(self):
        return self.value


def _tail(n, tail_fraction):
    if not (0.0 < tail_fraction <= 1.0):
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction!r}")
    k = int(math.ceil(n * tail_fraction - 1e-12))
    if k < MIN_WINDOW:
        raise ValueError(f"estimation window has {k} points; at least {MIN_WINDOW} needed")
    return n - k


def _slope(x, y):
    """OLS slope and its standard error."""
    xm = x.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ValueError("degenerate regression window")
    b = float(dx @ (y - y.mean())) / sxx
    r = y - y.mean() - b * dx
    dof = x.size - 2
    se = math.sqrt(max(float(r @ r), 0.0) / dof / sxx) if dof > 0 else 0.0
    return b, se


def standard_lyapunov(series: SeparationSeries, tail_fraction: float = 0.5) -> ExponentEstimate:
    """Least-squares slope of ln(delta) vs t over the final tail of the series."""
    i0 = _tail(len(series), tail_fraction)
    t = series.times[i0:]
    b, se = _slope(t, series.log_deltas[i0:])
    return ExponentEstimate(b, se, (float(t[0]), float(t[-1])), "standard")


def modified_lyapunov(series: SeparationSeries, tail_fraction: float = 0.5) -> ExponentEstimate:
    """Power-law degree: slope of ln(delta) vs ln(t) over the tail window."""
    i0 = _tail(len(series), tail_fraction)
    t = series.times[i0:]
    if t[0] <= 0.0:
        raise ValueError("modified exponent needs positive times in the window")
    b, se = _slope(np.log(t), series.log_deltas[i0:])
    return ExponentEstimate(b, se, (float(t[0]), float(t[-1])), "modified")


def _log_deformed(q, log_deltas):
    """ln of tau_q^-1(delta) from ln(delta), accurate at both ends."""
    d = q if isinstance(q, DeformParam) else DeformParam(q)
    L = np.asarray(log_deltas, dtype=float)
    out = np.empty_like(L)
    tiny = L < -30.0
    # tau_q^-1(delta) ~ (1-q) delta / ln(2-q) for small delta
    out[tiny] = L[tiny] + math.log(d.one_minus_q) - math.log(d.log_base)
    out[~tiny] = np.log(deformed_log_distance(d, L[~tiny]))
    return out


def deformed_series(q, series: SeparationSeries) -> SeparationSeries:
    """The series with every separation re-measured by the inverse tau_q map."""
    return SeparationSeries.from_log(series.times, _log_deformed(q, series.log_deltas))


def deformed_lyapunov(q, series: SeparationSeries, tail_fraction: float = 0.5) -> ExponentEstimate:
    """Standard estimator applied after the tau_q re-measurement of distances."""
    d = q if isinstance(q, DeformParam) else DeformParam(q)
    est = standard_lyapunov(deformed_series(d, series), tail_fraction)
    return ExponentEstimate(est.value, est.stderr, est.window, f"deformed(q={d.q:g})")


def benettin_flow_exponent(K: float, init, T: float, dt: float = 1e-3,
                           renorm_every: int = 10, transient: float = 0.5) -> ExponentEstimate:
    """Largest exponent of J'' = -K J by renormalized tangent evolution.

    The pair (J, J') is advanced with RK4 and rescaled to unit Euclidean norm
    every ``renorm_every`` steps. The first ``transient`` fraction of the run
    only aligns the vector with the most expanding direction; the logs of
    the rescaling factors over the rest are summed and divided by the
    elapsed time. ``stderr`` is half the difference between the rates of the
    two halves of that measuring interval.
    """
    if not T > 0.0:
        raise ValueError(f"T must be positive, got {T!r}")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if int(renorm_every) != renorm_every or renorm_every < 1:
        raise ValueError(f"renorm_every must be a positive integer, got {renorm_every!r}")
    if not 0.0 <= transient < 1.0:
        raise ValueError(f"transient must lie in [0, 1), got {transient!r}")
    J, P = float(init.value), float(init.derivative)
    r0 = math.hypot(J, P)
    if r0 == 0.0:
        raise ValueError("initial tangent vector is zero")
    J, P = J / r0, P / r0
    n = max(4, math.ceil(T / dt - 1e-9))
    h = T / n
    n0 = int(n * transient)
    n1 = (n - n0) // 2
    n2 = n - n0 - n1
    K, m = float(K), int(renorm_every)
    if n0:
        _, J, P = kernels.benettin_jacobi(K, J, P, h, n0, m)
    s1, J, P = kernels.benettin_jacobi(K, J, P, h, n1, m)
    s2, J, P = kernels.benettin_jacobi(K, J, P, h, n2, m)
    value = (s1 + s2) / ((n1 + n2) * h)
    stderr = 0.5 * abs(s1 / (n1 * h) - s2 / (n2 * h))
    return ExponentEstimate(value, stderr, (n0 * h, float(T)), "benettin")


def map_lyapunov_spectrum(jacobians, min_length: int = 10_000):
    """Both Lyapunov exponents of a planar map from its Jacobian sequence.

    ``jacobians`` is an (N, 2, 2) array or any iterable of 2x2 matrices.
    Returns the time-averaged log stretching factors, largest first.
    """
    jac = np.ascontiguousarray(
        np.asarray(jacobians if isinstance(jacobians, np.ndarray) else list(jacobians), dtype=float)
    )
    if jac.ndim != 3 or jac.shape[1:] != (2, 2):
        raise ValueError("expected a sequence of 2x2 matrices")
    N = jac.shape[0]
    if N < min_length:
        raise ValueError(f"need at least {min_length} Jacobians, got {N}")
    s1, s2, bad = kernels.map_spectrum_2x2(jac)
    if bad >= 0:
        raise SingularJacobianError(bad)
    l1, l2 = s1 / N, s2 / N
    return (l1, l2) if l1 >= l2 else (l2, l1)
