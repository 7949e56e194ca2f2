"""Constant-curvature model geometries.

Each space form is realized as an embedded model:

* K < 0: the upper sheet of the hyperboloid <x, x> = 1/K in Minkowski space
  with bilinear form -x0 y0 + x1 y1 + ... + xn yn;
* K = 0: affine space R^n;
* K > 0: the round sphere |x|^2 = 1/K in R^(n+1).

The Riemannian metric is the restriction of the ambient bilinear form to
tangent vectors. Geodesics are available in closed form and by RK4
integration of the ambient equation x'' = -K g(x', x') x with reprojection
after every step.

All ambient inner products are compensated, so constraint residuals stay
meaningful on the hyperboloid at distances where the coordinates are huge.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels

__all__ = [
    "PhaseState",
    "SpaceForm",
    "TangentFrame",
    "circle_defect_curvature",
    "curvature_tensor_apply",
    "distance",
    "exp_map",
    "geodesic_flow_closed",
    "geodesic_flow_numeric",
    "metric_inner",
    "random_state",
    "sectional_curvature",
    "tangent_frame",
]

TANGENCY_TOL = 1e-6
SURFACE_TOL = 1e-6


@dataclass(frozen=True)
class SpaceForm:
    """Simply connected model geometry of constant sectional curvature."""

    curvature: float
    dimension: int = 2

    def __post_init__(self):
        K = float(self.curvature)
        if not math.isfinite(K):
            raise ValueError("curvature must be finite")
        if int(self.dimension) != self.dimension or self.dimension < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.dimension!r}")
        object.__setattr__(self, "curvature", K)
        object.__setattr__(self, "dimension", int(self.dimension))

    @property
    def K(self) -> float:
        return self.curvature

    @property
    def ambient_dim(self) -> int:
        return self.dimension if self.curvature == 0.0 else self.dimension + 1

    @property
    def radius(self) -> float:
        """Curvature radius 1/sqrt(|K|); infinite when flat."""
        if self.curvature == 0.0:
            return math.inf
        return 1.0 / math.sqrt(abs(self.curvature))

    def bilinear(self, u, v):
        """Ambient bilinear form (Minkowski for K < 0, Euclidean otherwise).

        Evaluated with compensated products and sums: far from the origin of
        the hyperboloid the terms are ~cosh^2 t while the result is O(1).
        """
        return kernels.bilinear_form(self.curvature, u, v)

    def origin(self) -> np.ndarray:
        """Base point (R, 0, ..., 0) for curved models, the zero vector when flat."""
        p = np.zeros(self.ambient_dim)
        if self.curvature != 0.0:
            p[0] = self.radius
        return p

    def surface_residual(self, p) -> float:
        p = np.asarray(p, dtype=float)
        if self.curvature == 0.0:
            return 0.0
        # relative to the scale of the point so large hyperboloid points pass
        scale = max(float(np.dot(p, p)), 1.0 / abs(self.curvature))
        return abs(self.bilinear(p, p) - 1.0 / self.curvature) / scale

    def tangency_residual(self, p, v) -> float:
        if self.curvature == 0.0:
            return 0.0
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        scale = max(float(np.linalg.norm(p) * np.linalg.norm(v)), 1e-300)
        return abs(self.bilinear(p, v)) / max(scale, 1.0)

    def check_point(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.ambient_dim,):
            raise ValueError(f"point must have {self.ambient_dim} coordinates, got shape {p.shape}")
        if self.surface_residual(p) > SURFACE_TOL:
            raise ValueError("point is off the model surface")
        if self.curvature < 0.0 and p[0] <= 0.0:
            raise ValueError("hyperboloid point must lie on the upper sheet")
        return p

    def check_tangent(self, p, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.ambient_dim,):
            raise ValueError(f"tangent vector must have {self.ambient_dim} coordinates")
        if self.tangency_residual(p, v) > TANGENCY_TOL:
            raise ValueError("vector is not tangent at the base point")
        return v

    def project_tangent(self, p, v) -> np.ndarray:
        """Orthogonal projection of an ambient vector onto T_p."""
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.curvature == 0.0:
            return v.copy()
        return v - (self.bilinear(p, v) / self.bilinear(p, p)) * p


@dataclass(frozen=True)
class PhaseState:
    """Point on a space form together with a unit tangent velocity."""

    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.array(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.array(self.velocity, dtype=float))
        self.position.flags.writeable = False
        self.velocity.flags.writeable = False

    def validate(self, s: SpaceForm, tol: float = 1e-9) -> "PhaseState":
        s.check_point(self.position)
        s.check_tangent(self.position, self.velocity)
        speed = metric_inner(s, self.position, self.velocity, self.velocity)
        # relative to the coordinate size, the precision float64 can carry
        scale = max(float(np.dot(self.velocity, self.velocity)), 1.0)
        if abs(speed - 1.0) > tol * scale:
            raise ValueError(f"velocity is not unit speed: g(v,v) = {speed!r}")
        return self


@dataclass(frozen=True)
class TangentFrame:
    basepoint: np.ndarray
    vectors: tuple


def metric_inner(s: SpaceForm, p, u, v) -> float:
    """g_p(u, v): ambient bilinear form restricted to T_p."""
    s.check_tangent(p, u)
    s.check_tangent(p, v)
    return s.bilinear(u, v)


def tangent_frame(s: SpaceForm, p, vectors) -> TangentFrame:
    """Gram-Schmidt an ordered list of tangent vectors into a g-orthonormal frame.

    Linearly dependent input raises ``ValueError``.
    """
    p = s.check_point(p)
    basis = []
    for v in vectors:
        w = s.check_tangent(p, v).copy()
        for _ in range(2):  # second pass cleans up rounding
            for e in basis:
                w = w - s.bilinear(w, e) * e
        n2 = s.bilinear(w, w)
        scale = s.bilinear(np.asarray(v, float), np.asarray(v, float))
        if n2 <= 1e-20 * max(scale, 1e-300):
            raise ValueError("frame vectors are linearly dependent")
        basis.append(w / math.sqrt(n2))
    return TangentFrame(p, tuple(basis))


def curvature_tensor_apply(s: SpaceForm, p, X, Y, Z) -> np.ndarray:
    """R(X, Y)Z = K (g(Y, Z) X - g(Z, X) Y) on a space form."""
    X = s.check_tangent(p, X)
    Y = s.check_tangent(p, Y)
    Z = s.check_tangent(p, Z)
    return s.curvature * (s.bilinear(Y, Z) * X - s.bilinear(Z, X) * Y)


def sectional_curvature(s: SpaceForm, frame: TangentFrame) -> float:
    """g(R(e1, e2)e2, e1) for the plane spanned by an orthonormal pair."""
    if len(frame.vectors) != 2:
        raise ValueError("sectional curvature needs a frame of exactly two vectors")
    e1, e2 = frame.vectors
    R = curvature_tensor_apply(s, frame.basepoint, e1, e2, e2)
    return s.bilinear(R, e1)


def _norm(s: SpaceForm, v) -> float:
    return math.sqrt(max(s.bilinear(v, v), 0.0))


def exp_map(s: SpaceForm, p, v) -> np.ndarray:
    """Point reached at arc length |v| along the geodesic from p in direction v."""
    p = np.asarray(p, dtype=float)
    v = s.check_tangent(p, v)
    t = _norm(s, v)
    if t == 0.0:
        return p.copy()
    K = s.curvature
    if K == 0.0:
        return p + v
    R = s.radius
    u = v / t
    if K < 0.0:
        return math.cosh(t / R) * p + R * math.sinh(t / R) * u
    return math.cos(t / R) * p + R * math.sin(t / R) * u


def distance(s: SpaceForm, x, y) -> float:
    """Geodesic distance.

    Nearby hyperboloid points use the Minkowski chord c of x - y as
    2R asinh(c/2R); distant ones use R arccosh(K <x, y>). On the sphere the
    angle is 2 atan2(|x - y|, |x + y|). Each form is used where it is well
    conditioned.
    """
    x = s.check_point(x)
    y = s.check_point(y)
    return _chord_distance(s, x, y)


def geodesic_flow_closed(s: SpaceForm, st: PhaseState, t: float) -> PhaseState:
    """Exact geodesic flow for time t (unit speed, so t is arc length)."""
    x, v = st.position, st.velocity
    K = s.curvature
    if t == 0.0:
        return PhaseState(x, v)
    if K == 0.0:
        return PhaseState(x + t * v, v)
    R = s.radius
    a = t / R
    if K < 0.0:
        ch, sh = math.cosh(a), math.sinh(a)
        return PhaseState(ch * x + (R * sh) * v, (sh / R) * x + ch * v)
    c, sn = math.cos(a), math.sin(a)
    return PhaseState(c * x + (R * sn) * v, (-sn / R) * x + c * v)


def geodesic_flow_numeric(s: SpaceForm, st: PhaseState, t: float, dt: float) -> PhaseState:
    """RK4 integration of the ambient geodesic equation with reprojection.

    The step count is ceil(t/dt) with the step shortened to land exactly on t.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    if t == 0.0:
        return PhaseState(st.position, st.velocity)
    n = max(1, math.ceil(t / dt - 1e-9))
    x, v = kernels.geodesic_rk4(s.curvature, st.position, st.velocity, t / n, n)
    return PhaseState(x, v)


def circle_defect_curvature(
    s: SpaceForm,
    p,
    frame: TangentFrame,
    radii=(0.1, 0.05, 0.025),
    segments: int = 512,
    return_levels: bool = False,
):
    """Estimate the sectional curvature of a plane from geodesic circle lengths.

    For each radius r the circle of radius r in the plane of ``frame`` is
    pushed through the exponential map and its length l_r measured as a
    geodesic polygon. The polygon length is Richardson-extrapolated in the
    chord count (``segments`` and ``2*segments`` chords, error O(m^-2)), then
    (3/pi)(2 pi r - l_r)/r^3 is formed and extrapolated to r -> 0 assuming
    an even error series in r. Radii should form a halving ladder.

    With ``return_levels`` the per-radius estimates are returned too.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 2:
        raise ValueError("need at least two radii for the r -> 0 extrapolation")
    if any(r <= 0.0 for r in radii):
        raise ValueError("radii must be positive")
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing")
    if radii[0] > 0.5:
        raise ValueError("largest radius must be at most 0.5")
    if segments < 64:
        raise ValueError("need at least 64 segments")
    K = s.curvature
    if K > 0.0 and radii[0] >= math.pi / math.sqrt(K):
        raise ValueError("radius exceeds the injectivity radius of the sphere")
    if len(frame.vectors) != 2:
        raise ValueError("frame must span a plane")
    p = s.check_point(p)
    e1, e2 = frame.vectors

    def polygon_length(r, m):
        theta = 2.0 * np.pi * np.arange(m + 1) / m
        pts = [exp_map(s, p, r * (math.cos(a) * e1 + math.sin(a) * e2)) for a in theta]
        return math.fsum(_chord_distance(s, pts[i], pts[i + 1]) for i in range(m))

    estimates = []
    for r in radii:
        l1 = polygon_length(r, segments)
        l2 = polygon_length(r, 2 * segments)
        length = (4.0 * l2 - l1) / 3.0
        estimates.append(3.0 / math.pi * (2.0 * math.pi * r - length) / r**3)

    # Richardson in r over the ladder; level k removes the r^(2k) term
    table = [estimates]
    level = estimates
    k = 1
    while len(level) > 1:
        nxt = []
        for i in range(len(level) - 1):
            ratio = (radii[i] / radii[i + k]) ** (2 * k)
            nxt.append((ratio * level[i + 1] - level[i]) / (ratio - 1.0))
        table.append(nxt)
        level = nxt
        k += 1
    if return_levels:
        return level[0], estimates
    return level[0]


def _chord_distance(s, x, y):
    K = s.curvature
    diff = x - y
    if K == 0.0:
        return math.sqrt(float(np.dot(diff, diff)))
    R = s.radius
    if K > 0.0:
        # well conditioned from 0 up to the antipode
        add = x + y
        return 2.0 * R * math.atan2(math.sqrt(float(np.dot(diff, diff))),
                                    math.sqrt(float(np.dot(add, add))))
    ch = K * s.bilinear(x, y)  # cosh(d / R)
    if ch >= 2.0:
        # far apart: the chord would inherit the rounding of each point off
        # the surface, ~|x|^2 eps, while cosh(d/R) is known to relative eps
        return R * math.acosh(ch)
    chord = math.sqrt(max(s.bilinear(diff, diff), 0.0))
    return 2.0 * R * math.asinh(chord / (2.0 * R))


def random_state(s: SpaceForm, rng: np.random.Generator, spread: float = 1.0) -> PhaseState:
    """Random unit-speed state: a point at geodesic distance < ``spread``
    from the origin, with a uniformly random unit direction."""
    o = s.origin()
    n = s.dimension
    basis = [np.eye(s.ambient_dim)[i] for i in range(s.ambient_dim - n, s.ambient_dim)]

    def unit_tangent_at_origin():
        w = rng.standard_normal(n)
        w /= np.linalg.norm(w)
        return sum(wi * b for wi, b in zip(w, basis))

    r = spread * rng.random()
    p = exp_map(s, o, r * unit_tangent_at_origin()) if r > 0 else o.copy()
    v = s.project_tangent(p, rng.standard_normal(s.ambient_dim))
    v = v / _norm(s, v)
    return PhaseState(p, v)
