"""Jacobi fields along geodesics of space forms.

In a parallel orthonormal (Fermi) frame along a unit-speed geodesic the
normal components of a Jacobi field decouple into J'' + K J = 0. Each one
is a scalar solution of that equation, oscillating when K > 0 and growing
like e^(sqrt(-K) t) when K < 0.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .lyapunov import SeparationSeries

__all__ = [
    "Bounded",
    "Exponential",
    "JacobiCoeffs",
    "JacobiState",
    "Linear",
    "Polynomial",
    "classify_separation",
    "jacobi_closed_form",
    "jacobi_integrate",
    "jacobi_series",
    "wronskian_drift",
]


@dataclass(frozen=True)
class JacobiCoeffs:
    """Initial values ``a`` and initial derivatives ``b`` per Fermi direction."""

    a: tuple
    b: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in np.atleast_1d(self.a))
        b = tuple(float(x) for x in np.atleast_1d(self.b))
        if len(a) != len(b):
            raise ValueError("a and b must have the same length")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class JacobiState:
    value: float
    derivative: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and math.isfinite(self.derivative)):
            raise ValueError("Jacobi state must be finite")


def _cos_sin_like(K, t):
    """Return (C(t), S(t)) with C'' = -K C, C(0)=1, C'(0)=0 and S(0)=0, S'(0)=1."""
    if K < 0.0:
        w = math.sqrt(-K)
        return math.cosh(w * t), math.sinh(w * t) / w
    if K == 0.0:
        return 1.0, t
    w = math.sqrt(K)
    return math.cos(w * t), math.sin(w * t) / w


def jacobi_closed_form(K: float, c: JacobiCoeffs, t: float) -> list:
    """Components a_i C(t) + b_i S(t) of the Jacobi field at time t.

    The sinh/sin term carries the 1/sqrt(|K|) factor so that b_i is exactly
    the initial derivative J_i'(0).
    """
    if t < 0.0:
        raise ValueError("t must be non-negative")
    C, S = _cos_sin_like(K, t)
    return [ai * C + bi * S for ai, bi in zip(c.a, c.b)]


def jacobi_integrate(K: float, init: JacobiState, t: float, dt: float) -> JacobiState:
    """RK4 integration of J'' = -K J from ``init`` over [0, t]."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    if t == 0.0:
        return init
    n = max(1, math.ceil(t / dt - 1e-9))
    J, P = kernels.rk4_jacobi(float(K), init.value, init.derivative, t / n, n)
    return JacobiState(J, P)


def jacobi_trajectory(K: float, init: JacobiState, t: float, dt: float, samples: int):
    """Times and (J, J') at ``samples`` uniform times in (0, t], plus t = 0.

    The step is shrunk so that each sample interval holds a whole number of
    steps.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    per = max(1, math.ceil((t / samples) / dt - 1e-9))
    h = t / (samples * per)
    Js, Ps = kernels.rk4_jacobi_samples(float(K), init.value, init.derivative, h, samples, per)
    times = np.arange(samples + 1) * (t / samples)
    return times, Js, Ps


def wronskian_drift(K: float, first: JacobiState, second: JacobiState, t: float, dt: float,
                    samples: int = 100) -> float:
    """Largest change of J1 J2' - J2 J1' along two numeric solutions.

    Each change is measured relative to |J1 J2'| + |J2 J1'| (the size of the
    terms being cancelled) or 1, whichever is larger, so that growing
    solutions at K < 0 are judged by the precision actually available.
    """
    _, J1, P1 = jacobi_trajectory(K, first, t, dt, samples)
    _, J2, P2 = jacobi_trajectory(K, second, t, dt, samples)
    W = J1 * P2 - J2 * P1
    scale = np.maximum(np.abs(J1 * P2) + np.abs(J2 * P1), 1.0)
    return float(np.max(np.abs(W - W[0]) / scale))


def jacobi_series(K: float, T: float, samples: int, dt: float = 1e-3,
                  init: JacobiState = JacobiState(0.0, 1.0)) -> SeparationSeries:
    """|J(t)| sampled at ``samples`` uniform times in (0, T] by RK4 integration."""
    times, Js, _ = jacobi_trajectory(K, init, T, dt, samples)
    return SeparationSeries(times[1:], np.abs(Js[1:]))


# growth classes -------------------------------------------------------------

@dataclass(frozen=True)
class Bounded:
    mean: float


@dataclass(frozen=True)
class Linear:
    degree: float


@dataclass(frozen=True)
class Polynomial:
    degree: float


@dataclass(frozen=True)
class Exponential:
    rate: float


def _lstsq_line(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    r = y - A @ coef
    return coef[0], float(r @ r)


def classify_separation(series: SeparationSeries, linear_tol: float = 0.1,
                        bounded_tol: float = 0.01):
    """Asymptotic growth class of a separation series from its tail half.

    Fits ln(delta) against t (exponential model) and against ln t (power-law
    model) and keeps the model with the smaller residual sum of squares. A
    power law of degree within ``linear_tol`` of 1 is reported as Linear.
    A tail whose spread is below ``bounded_tol`` of its mean is Bounded.
    """
    n = len(series)
    if n < 50:
        raise ValueError(f"classification needs at least 50 samples, got {n}")
    t = series.times[n // 2:]
    L = series.log_deltas[n // 2:]
    if t[0] <= 0.0:
        raise ValueError("tail window must have positive times")
    if not np.all(np.isfinite(L)):
        raise ValueError("tail window contains zero separations")

    # (max - min)/mean of delta, scaled by max(delta) to stay in range
    scaled = np.exp(L - np.max(L))
    if (1.0 - np.min(scaled)) / np.mean(scaled) < bounded_tol:
        return Bounded(float(np.exp(np.max(L)) * np.mean(scaled)))

    rate, rss_exp = _lstsq_line(t, L)
    degree, rss_pow = _lstsq_line(np.log(t), L)
    if rss_exp == rss_pow:
        raise ValueError("exponential and power-law fits are tied; classification is ambiguous")
    if rss_exp < rss_pow:
        return Exponential(float(rate))
    if abs(degree - 1.0) <= linear_tol:
        return Linear(float(degree))
    return Polynomial(float(degree))
