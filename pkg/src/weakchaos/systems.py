"""Concrete dynamical systems for the estimators.

Geodesic flows on space forms enter through their Jacobi fields. The cat map
(x, y) -> (2x + y, x + y) mod 1 is a uniformly hyperbolic torus automorphism
whose splitting and constants are known exactly. The quadratic map
x -> 1 - a x^2 supplies the period-doubling accumulation point, where the
sensitivity envelope is fitted by a q-exponential.
"""

from dataclasses import dataclass, field
import functools
import math
from typing import NamedTuple
import warnings

import mpmath
import numpy as np

from . import kernels
from .jacobi import JacobiState, jacobi_trajectory
from .lyapunov import SeparationSeries
from .spaceform import PhaseState, SpaceForm

__all__ = [
    "CAT_MATRIX",
    "AnosovReport",
    "LogisticParams",
    "OrbitCollapseWarning",
    "QSensitivityFit",
    "anosov_verify",
    "cat_map_iterate",
    "cat_map_jacobian",
    "cat_orbit_jacobians",
    "critical_orbit_sensitivity",
    "edge_of_chaos_param",
    "geodesic_separation_series",
    "logistic_sensitivity_series",
    "q_sensitivity_fit",
    "q_sensitivity_scan",
    "superstable_params",
]

CAT_MATRIX = np.array([[2.0, 1.0], [1.0, 1.0]])


# geodesic flows ------------------------------------------------------------

def geodesic_separation_series(s: SpaceForm, st: PhaseState, direction, T: float,
                               samples: int = 3000, dt: float = 1e-3) -> SeparationSeries:
    """Infinitesimal separation of geodesics leaving ``st`` as ``direction`` tilts them.

    ``direction`` is a tangent vector at the base point; its component normal
    to the velocity fixes the Fermi direction of the Jacobi field, which starts
    at J(0) = 0 with unit initial rate. On a space form every normal component
    obeys J'' + K J = 0, so the field is integrated in scalar form and |J| is
    sampled at ``samples`` uniform times in (0, T].
    """
    if not T > 0.0:
        raise ValueError(f"T must be positive, got {T!r}")
    if samples < 50:
        raise ValueError(f"need at least 50 samples, got {samples}")
    st.validate(s)
    w = s.check_tangent(st.position, direction)
    if not np.any(w):
        raise ValueError("direction must be non-zero")
    normal = w - s.bilinear(w, st.velocity) * st.velocity
    if s.bilinear(normal, normal) <= 1e-24 * max(s.bilinear(w, w), 1e-300):
        raise ValueError("direction has no component normal to the geodesic")
    times, Js, _ = jacobi_trajectory(s.curvature, JacobiState(0.0, 1.0), T, dt, samples)
    return SeparationSeries(times[1:], np.abs(Js[1:]))


# cat map -------------------------------------------------------------------

def cat_map_iterate(state, n: int):
    """n applications of (x, y) -> (2x + y mod 1, x + y mod 1)."""
    x, y = float(state[0]), float(state[1])
    if not (0.0 <= x < 1.0 and 0.0 <= y < 1.0):
        raise ValueError("state must lie in [0, 1)^2")
    if n < 0:
        raise ValueError("n must be non-negative")
    return kernels.cat_map_iterate(x, y, int(n))


def cat_map_jacobian(state=None) -> np.ndarray:
    """Differential of the cat map; the same integer matrix at every point."""
    return CAT_MATRIX.copy()


def cat_orbit_jacobians(state, n: int) -> np.ndarray:
    """Jacobians along the first ``n`` points of the orbit of ``state``."""
    cat_map_iterate(state, 0)
    if n < 0:
        raise ValueError("n must be non-negative")
    # the differential does not depend on the orbit point
    return np.ascontiguousarray(np.broadcast_to(CAT_MATRIX, (int(n), 2, 2)))


@dataclass
class AnosovReport:
    expansion_rate: float
    contraction_rate: float
    constant: float
    unstable: tuple
    stable: tuple
    flow_direction: object = None
    checks: dict = field(default_factory=dict)
    profile: tuple = ()

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values() if c["passed"] is not None)


def _mp_eig_2x2(M):
    """Eigenpairs of a real 2x2 matrix with real spectrum, sorted by |eigenvalue|."""
    a, b = M[0][0], M[0][1]
    c, d = M[1][0], M[1][1]
    tr = a + d
    det = a * d - b * c
    disc = tr * tr / 4 - det
    if disc < 0:
        raise ValueError("matrix has complex eigenvalues")
    r = mpmath.sqrt(disc)
    pairs = []
    for ev in (tr / 2 + r, tr / 2 - r):
        if b != 0:
            v = (b, ev - a)
        elif c != 0:
            v = (ev - d, c)
        else:
            v = (mpmath.mpf(1), mpmath.mpf(0)) if not pairs else (mpmath.mpf(0), mpmath.mpf(1))
        n = mpmath.sqrt(v[0] ** 2 + v[1] ** 2)
        pairs.append((ev, (v[0] / n, v[1] / n)))
    pairs.sort(key=lambda p: abs(p[0]))
    return pairs


def anosov_verify(samples: int = 100, t_max: int = 30, tolerance: float = 1e-9,
                  matrix=None, seed: int = 42, dps: int = 50) -> AnosovReport:
    """Check the uniform hyperbolicity properties of a linear torus map.

    The splitting comes from the eigenvectors of the map matrix (the cat map
    by default). Along the orbits of ``samples`` random points the tangent
    vectors are pushed with the Jacobian at each orbit point, in ``dps``-digit
    arithmetic so that the stable direction survives t_max expansions:

    * invariance: d f maps each eigen-direction onto itself;
    * contraction: |d f^t Y| <= c lambda^t |Y| for stable Y;
    * expansion: |d f^-t Z| <= c mu^-t |Z| for unstable Z;

    for every 1 <= t <= t_max, with c = 1 and relative slack ``tolerance``.
    ``profile`` lists (t, worst stable ratio, worst unstable ratio).
    Contraction and expansion also require lambda < 1 < mu. The flow
    direction check does not apply to a map and is reported as ``None``.
    """
    if samples < 100:
        raise ValueError("need at least 100 sample points")
    if t_max < 10:
        raise ValueError("t_max must be at least 10")
    M = CAT_MATRIX if matrix is None else np.asarray(matrix, dtype=float)
    rng = np.random.Generator(np.random.Philox(seed))
    points = rng.random((samples, 2))
    Minv = np.linalg.inv(M)

    with mpmath.workdps(dps):
        A = [[mpmath.mpf(float(M[i, j])) for j in range(2)] for i in range(2)]
        det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        Ainv = [[A[1][1] / det, -A[0][1] / det], [-A[1][0] / det, A[0][0] / det]]
        (lam, vs), (mu, vu) = _mp_eig_2x2(A)
        lam, mu = abs(lam), abs(mu)

        def apply(B, v):
            return (B[0][0] * v[0] + B[0][1] * v[1], B[1][0] * v[0] + B[1][1] * v[1])

        def norm(v):
            return mpmath.sqrt(v[0] ** 2 + v[1] ** 2)

        def jac_at(point, inverse):
            # the map is linear on the torus, so its differential is the
            # same matrix at every orbit point
            return Ainv if inverse else A

        worst_invariance = mpmath.mpf(0)
        c_stable = mpmath.mpf(0)
        c_unstable = mpmath.mpf(0)
        per_t = [[mpmath.mpf(0), mpmath.mpf(0)] for _ in range(t_max)]
        for p in points:
            x = p
            for v in (vs, vu):
                w = apply(jac_at(x, False), v)
                cross = abs(w[0] * v[1] - w[1] * v[0]) / norm(w)
                worst_invariance = max(worst_invariance, cross)
            scale = mpmath.mpf(rng.uniform(0.5, 2.0))
            Y = (scale * vs[0], scale * vs[1])
            Z = (scale * vu[0], scale * vu[1])
            nY, nZ = norm(Y), norm(Z)
            xf = xb = x
            for t in range(1, t_max + 1):
                Y = apply(jac_at(xf, False), Y)
                Z = apply(jac_at(xb, True), Z)
                xf = (M @ xf) % 1.0
                xb = (Minv @ xb) % 1.0
                rs = norm(Y) / (lam ** t * nY)
                ru = norm(Z) / (mu ** (-t) * nZ)
                per_t[t - 1][0] = max(per_t[t - 1][0], rs)
                per_t[t - 1][1] = max(per_t[t - 1][1], ru)
                c_stable = max(c_stable, rs)
                c_unstable = max(c_unstable, ru)

        tol = mpmath.mpf(tolerance)
        invariance_ok = bool(worst_invariance <= tol)
        contraction_ok = bool(lam < 1 - tol and c_stable <= 1 + tol)
        expansion_ok = bool(mu > 1 + tol and c_unstable <= 1 + tol)
        report = AnosovReport(
            expansion_rate=float(mu),
            contraction_rate=float(lam),
            constant=float(max(c_stable, c_unstable)),
            unstable=(float(vu[0]), float(vu[1])),
            stable=(float(vs[0]), float(vs[1])),
            checks={
                "flow_direction": {"passed": None, "note": "not applicable to a discrete map"},
                "invariance": {"passed": invariance_ok, "max_residual": float(worst_invariance)},
                "contraction": {"passed": contraction_ok, "rate": float(lam),
                                "measured_constant": float(c_stable)},
                "expansion": {"passed": expansion_ok, "rate": float(mu),
                              "measured_constant": float(c_unstable)},
            },
            profile=tuple((t + 1, float(a), float(b)) for t, (a, b) in enumerate(per_t)),
        )
    return report


# quadratic map ---------------------------------------------------------------

class OrbitCollapseWarning(RuntimeWarning):
    """The orbit landed exactly on the critical point; sensitivity is zero from there on."""


@dataclass(frozen=True)
class LogisticParams:
    """Parameter of x -> 1 - a x^2 on [-1, 1]."""

    a: float

    def __post_init__(self):
        a = float(self.a)
        if not (0.0 < a <= 2.0):
            raise ValueError(f"need 0 < a <= 2, got {self.a!r}")
        object.__setattr__(self, "a", a)


def _as_logistic(p):
    return p if isinstance(p, LogisticParams) else LogisticParams(p)


def logistic_sensitivity_series(p, x0: float = 0.2, N: int = 100_000) -> SeparationSeries:
    """xi(n) = |prod_{i<n} f'(x_i)| for n = 1..N, accumulated in log space.

    If the orbit lands exactly on x = 0 the sensitivity vanishes from then on;
    the series is truncated before that point and an
    :class:`OrbitCollapseWarning` is issued.
    """
    p = _as_logistic(p)
    if not (-1.0 < x0 < 1.0):
        raise ValueError(f"x0 must lie in (-1, 1), got {x0!r}")
    if N < 1000:
        raise ValueError(f"N must be at least 1000, got {N}")
    logs, hit = kernels.logistic_log_sensitivity(p.a, float(x0), int(N))
    times = np.arange(1, N + 1, dtype=float)
    if hit >= 0:
        warnings.warn(f"orbit hit x = 0 at iterate {hit}; sensitivity is zero from n = {hit + 1}",
                      OrbitCollapseWarning, stacklevel=2)
        times, logs = times[:hit], logs[:hit]
    return SeparationSeries.from_log(times, logs)


def critical_orbit_sensitivity(p, N: int = 100_000) -> SeparationSeries:
    """Sensitivity along the orbit of the critical point x = 0.

    Measured from the critical value x_1 = f(0) = 1 onwards, with time
    counted from the critical point: xi(t) = |dx_t / dx_1| for t = 2..N+1.
    At the period-doubling accumulation point the record values of this
    series fall on t = 2^k, where the q-exponential bound is attained.
    """
    p = _as_logistic(p)
    logs, hit = kernels.logistic_log_sensitivity(p.a, 1.0, int(N))
    times = np.arange(2, N + 2, dtype=float)
    if hit >= 0:
        warnings.warn(f"critical orbit is superstable (returns to 0 at step {hit})",
                      OrbitCollapseWarning, stacklevel=2)
        times, logs = times[:hit], logs[:hit]
    return SeparationSeries.from_log(times, logs)


FEIGENBAUM_DELTA_GUESS = 4.669


def superstable_params(k_max: int = 20, tol: float = 1e-12):
    """Parameters A_k where x = 0 lies on a superstable cycle of period 2^k.

    A_1 = 1 exactly; later ones are bracketed from the previous two using the
    geometric convergence of the sequence and refined by bisection on
    f_a^(2^k)(0). Stops once the extrapolated accumulation point moves by
    less than ``tol`` or at k = k_max.
    """
    def g(a, k):
        return kernels.logistic_iterate(a, 0.0, 2 ** k)

    def bisect(k, lo, hi):
        flo = g(lo, k)
        fhi = g(hi, k)
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        if (flo > 0.0) == (fhi > 0.0):
            raise ArithmeticError(f"no sign change bracketing the period-2^{k} parameter")
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                return mid
            fm = g(mid, k)
            if fm == 0.0:
                return mid
            if (fm > 0.0) == (flo > 0.0):
                lo, flo = mid, fm
            else:
                hi = mid

    A = [1.0, bisect(2, 1.2, 1.36)]
    estimates = []
    for k in range(3, k_max + 1):
        step = (A[-1] - A[-2]) / FEIGENBAUM_DELTA_GUESS
        A.append(bisect(k, A[-1] + 0.5 * step, A[-1] + 1.2 * step))
        ratio = (A[-2] - A[-3]) / (A[-1] - A[-2])
        estimates.append(A[-1] + (A[-1] - A[-2]) / (ratio - 1.0))
        if len(estimates) >= 2 and abs(estimates[-1] - estimates[-2]) < tol:
            break
    return A, estimates


@functools.lru_cache(maxsize=None)
def edge_of_chaos_param() -> float:
    """Period-doubling accumulation point a_inf ~ 1.4011551890920 of x -> 1 - a x^2."""
    _, estimates = superstable_params()
    return estimates[-1]


class QSensitivityFit(NamedTuple):
    q_sen: float
    lambda_q: float
    fit_quality: float
    at_grid_edge: bool = False
    envelope_points: int = 0


def _records(series, min_envelope, min_records):
    if len(series) < min_envelope:
        raise ValueError(f"envelope has {len(series)} points; at least {min_envelope} needed")
    t = series.times
    L = series.log_deltas
    if t[0] <= 0.0:
        raise ValueError("times must be positive")
    prev = np.concatenate(([-np.inf], np.maximum.accumulate(L)[:-1]))
    rec = L > prev
    if rec.sum() < min_records:
        raise ValueError(f"envelope has only {int(rec.sum())} records; at least {min_records} needed")
    return rec


def _default_q_grid(q_grid):
    if q_grid is None:
        q_grid = np.round(np.arange(1, 100) * 0.01, 10)
    q_grid = np.asarray(q_grid, dtype=float)
    if q_grid.size < 20:
        raise ValueError("q grid needs at least 20 values")
    if np.any((q_grid <= 0.0) | (q_grid >= 1.0)):
        raise ValueError("q grid must lie inside (0, 1)")
    return q_grid


def q_sensitivity_scan(series: SeparationSeries, q_grid=None, min_envelope: int = 100,
                       min_records: int = 8):
    """Per-q fit of the sensitivity records: arrays (q, fit_quality, lambda_q).

    Entries where the q-logarithm overflows are NaN.
    """
    q_grid = _default_q_grid(q_grid)
    rec = _records(series, min_envelope, min_records)
    tr = series.times[rec]
    Lr = series.log_deltas[rec]
    A = np.vstack([1.0 / tr, np.ones_like(tr)]).T
    quality = np.full(q_grid.size, np.nan)
    slope = np.full(q_grid.size, np.nan)
    for i, q in enumerate(q_grid):
        c = 1.0 - q
        with np.errstate(over="ignore", invalid="ignore"):
            y = np.expm1(c * Lr) / c
        if not np.all(np.isfinite(y)):
            continue
        b = y / tr
        with np.errstate(over="ignore", invalid="ignore"):
            coef, _, _, _ = np.linalg.lstsq(A, b, rcond=None)
            r = b - A @ coef
            qual = float(r @ r) / float(b @ b) if np.any(b) else math.inf
        if math.isfinite(qual):
            quality[i] = qual
            slope[i] = coef[1]
    return q_grid, quality, slope


def q_sensitivity_fit(series: SeparationSeries, q_grid=None, min_envelope: int = 100,
                      min_records: int = 8) -> QSensitivityFit:
    """Entropic index q_sen for which ln_q of the sensitivity envelope is linear in t.

    The upper envelope is the running maximum of xi; the fit uses the
    samples where it increases (the records). For each q in the grid,
    ln_q(xi) on the records is regressed on t with every residual taken
    relative to t, so that each record counts equally whatever its scale;
    ``fit_quality`` is the relative residual energy (0 for an exact
    q-exponential). The q with the smallest residual is returned with its
    slope as lambda_q. ``at_grid_edge`` flags a minimum on the boundary of the
    grid, the signature of faster-than-q-exponential growth.
    """
    q_grid, quality, slope = q_sensitivity_scan(series, q_grid, min_envelope, min_records)
    if np.all(np.isnan(quality)):
        raise ArithmeticError("q-logarithm overflows for every q in the grid")
    i = int(np.nanargmin(quality))
    q_sen = float(q_grid[i])
    edge = q_sen in (float(q_grid.min()), float(q_grid.max()))
    n_rec = int(_records(series, min_envelope, min_records).sum())
    return QSensitivityFit(q_sen, float(slope[i]), float(quality[i]), edge, n_rec)
