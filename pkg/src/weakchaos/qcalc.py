"""q-deformed real calculus.

The tau_q map ``((2-q)**x - 1)/(1-q)`` identifies the reals with the
q-deformed reals; its inverse re-measures a distance on a logarithmic scale.
Also here: the q-exponential / q-logarithm pair and the Tsallis entropy with
its composition law for independent systems.

All functions are pure and accept only ``0 < q < 1``.
"""

from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "DeformParam",
    "Distribution",
    "DomainError",
    "deformed_distance",
    "deformed_log_distance",
    "q_exponential",
    "q_logarithm",
    "tau_q",
    "tau_q_inv",
    "tsallis_compose",
    "tsallis_entropy",
]

NORMALIZATION_TOL = 1e-12


class DomainError(ValueError):
    """Argument outside the domain (or representable range) of a q-function."""


@dataclass(frozen=True)
class DeformParam:
    """Entropic index q, restricted to the open interval (0, 1)."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not (0.0 < q < 1.0):
            raise ValueError(f"entropic index must satisfy 0 < q < 1, got {self.q!r}")
        object.__setattr__(self, "q", q)

    @property
    def one_minus_q(self) -> float:
        return 1.0 - self.q

    @property
    def log_base(self) -> float:
        """ln(2 - q), computed without cancellation as q -> 1."""
        return math.log1p(1.0 - self.q)

    @property
    def lower_bound(self) -> float:
        """Infimum -1/(1-q) of the range of tau_q."""
        return -1.0 / (1.0 - self.q)


def _as_param(d) -> DeformParam:
    return d if isinstance(d, DeformParam) else DeformParam(d)


@dataclass(frozen=True)
class Distribution:
    """Discrete probability vector, validated at construction."""

    probabilities: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.probabilities)
        if not p:
            raise ValueError("distribution needs at least one outcome")
        if any(v < 0.0 or not math.isfinite(v) for v in p):
            raise ValueError("probabilities must be finite and non-negative")
        total = math.fsum(p)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1 within {NORMALIZATION_TOL}")
        object.__setattr__(self, "probabilities", p)

    def __len__(self):
        return len(self.probabilities)

    def product(self, other: "Distribution") -> "Distribution":
        """Joint distribution of two independent systems (outer product, flattened)."""
        joint = [a * b for a in self.probabilities for b in other.probabilities]
        # renormalize the rounding residue so the joint passes validation
        total = math.fsum(joint)
        return Distribution(tuple(v / total for v in joint))


def tau_q(d, x: float) -> float:
    """Map x to ((2-q)**x - 1)/(1-q).

    Evaluated as ``expm1(x ln(2-q)) / (1-q)`` which stays accurate as q -> 1.
    Raises :class:`DomainError` when the result overflows.
    """
    d = _as_param(d)
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    try:
        return math.expm1(x * d.log_base) / d.one_minus_q
    except OverflowError as exc:
        raise DomainError(f"tau_q({x!r}) overflows for q={d.q}") from exc


def tau_q_inv(d, y: float) -> float:
    """Inverse of :func:`tau_q`: ln(1 + (1-q) y) / ln(2-q), for y > -1/(1-q)."""
    d = _as_param(d)
    arg = d.one_minus_q * y
    if not arg > -1.0:
        raise DomainError(f"tau_q_inv needs y > {d.lower_bound!r}, got {y!r}")
    return math.log1p(arg) / d.log_base


def deformed_distance(d, delta: float) -> float:
    """Separation ``delta >= 0`` re-measured through the inverse tau_q map."""
    if delta < 0.0:
        raise DomainError(f"distance must be non-negative, got {delta!r}")
    return tau_q_inv(d, delta)


def deformed_log_distance(d, log_delta):
    """:func:`deformed_distance` applied to ``exp(log_delta)``, vectorized.

    Works directly from log-separations so that series whose separation
    exceeds the float range (double exponentials, long chaotic orbits) can be
    re-measured. ``log_delta = -inf`` maps to 0.
    """
    d = _as_param(d)
    L = np.asarray(log_delta, dtype=float)
    c = d.one_minus_q
    out = np.empty_like(L)
    small = L < 30.0
    out[small] = np.log1p(c * np.exp(L[small]))
    big = ~small
    # ln(1 + c e^L) = L + ln c + ln(1 + e^-L / c)
    out[big] = L[big] + math.log(c) + np.log1p(np.exp(-L[big]) / c)
    out /= d.log_base
    if out.ndim == 0:
        return float(out)
    return out


def q_exponential(d, x: float) -> float:
    """[1 + (1-q) x]**(1/(1-q)), cut off to 0 where the base is non-positive."""
    d = _as_param(d)
    c = d.one_minus_q
    base = c * x
    if base <= -1.0:
        return 0.0
    try:
        return math.exp(math.log1p(base) / c)
    except OverflowError as exc:
        raise DomainError(f"q_exponential({x!r}) overflows for q={d.q}") from exc


def q_logarithm(d, x: float) -> float:
    """(x**(1-q) - 1)/(1-q) for x > 0; inverse of :func:`q_exponential`."""
    d = _as_param(d)
    if not x > 0.0:
        raise DomainError(f"q_logarithm needs x > 0, got {x!r}")
    c = d.one_minus_q
    return math.expm1(c * math.log(x)) / c


def tsallis_entropy(d, p) -> float:
    """S_q = (1 - sum p_i**q) / (q - 1).

    Written as ``sum p_i * ln_q(1/p_i)``, a sum of non-negative terms, so the
    q -> 1 limit reproduces the Shannon entropy to full precision and
    deterministic distributions give exactly 0.
    """
    d = _as_param(d)
    if not isinstance(p, Distribution):
        p = Distribution(tuple(p))
    c = d.one_minus_q
    terms = []
    for pi in p.probabilities:
        if pi > 0.0:
            # p ln_q(1/p) = p (p**(q-1) - 1)/(1-q)
            terms.append(pi * math.expm1(-c * math.log(pi)) / c)
    return math.fsum(terms)


def tsallis_compose(d, sa: float, sb: float) -> float:
    """Entropy of two independent systems: sa + sb + (1-q) sa sb."""
    d = _as_param(d)
    if sa < 0.0 or sb < 0.0:
        raise DomainError("entropies must be non-negative")
    return sa + sb + d.one_minus_q * sa * sb
