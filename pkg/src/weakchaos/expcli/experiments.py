"""Registered experiments and the runner that executes them.

Each experiment declares its parameter schema, a validity check that runs
before anything touches the disk, and a body that writes CSV series and
records headline estimates with acceptance bands.
"""

from dataclasses import dataclass, field
import math
import os
import time

import numpy as np

from .. import kernels
from ..jacobi import (JacobiCoeffs, JacobiState, Linear, classify_separation,
                      jacobi_closed_form, jacobi_series, jacobi_trajectory, wronskian_drift)
from ..lyapunov import (SeparationSeries, benettin_flow_exponent, deformed_series,
                        map_lyapunov_spectrum, modified_lyapunov, standard_lyapunov)
from ..qcalc import DeformParam, Distribution, tsallis_compose, tsallis_entropy
from ..spaceform import SpaceForm, circle_defect_curvature, random_state, tangent_frame
from ..systems import (anosov_verify, cat_map_iterate, cat_orbit_jacobians,
                       critical_orbit_sensitivity, edge_of_chaos_param,
                       geodesic_separation_series, logistic_sensitivity_series,
                       q_sensitivity_fit, q_sensitivity_scan)
from .config import InvalidParameters, Param, RunConfig
from .emit import emit_series, emit_table, write_summary

__all__ = [
    "Experiment",
    "NumericFailure",
    "OutputDirError",
    "REGISTRY",
    "RunSummary",
    "make_rng",
    "run_experiment",
    "validate",
]


class NumericFailure(ArithmeticError):
    """An experiment produced a non-finite or otherwise unusable estimate."""


class OutputDirError(OSError):
    pass


def make_rng(seed):
    """Counter-based Philox-4x64 generator keyed by the 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    params: tuple
    check: object
    body: object


@dataclass
class RunSummary:
    experiment: str
    params: dict
    estimates: list
    passed: bool
    duration_seconds: float
    outputs: list
    backend: str = kernels.BACKEND

    def to_json(self):
        return {
            "experiment": self.experiment,
            "params": self.params,
            "estimates": self.estimates,
            "pass": self.passed,
            "duration_seconds": self.duration_seconds,
            "outputs": self.outputs,
            "backend": self.backend,
        }

    def estimate(self, name):
        for e in self.estimates:
            if e["name"] == name:
                return e
        raise KeyError(name)


@dataclass
class _Context:
    cfg: RunConfig
    outdir: str
    rng: np.random.Generator
    estimates: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    @property
    def p(self):
        return self.cfg.parameters

    def path(self, tag):
        return os.path.join(self.outdir, f"{self.cfg.experiment}.{tag}.csv")

    def series(self, tag, series, extra=None):
        self.outputs.append(emit_series(series, self.path(tag), extra))

    def table(self, tag, columns, rows):
        self.outputs.append(emit_table(self.path(tag), columns, rows))

    def estimate(self, name, value, stderr=None, lo=None, hi=None, strict=False):
        value = float(value)
        if not math.isfinite(value):
            raise NumericFailure(f"estimate {name!r} is not finite ({value!r})")
        if lo is None and hi is None:
            ok = None
        else:
            lo_ok = lo is None or (value > lo if strict else value >= lo)
            hi_ok = hi is None or (value < hi if strict else value <= hi)
            ok = bool(lo_ok and hi_ok)
        self.estimates.append({
            "name": name,
            "value": value,
            "stderr": None if stderr is None else float(stderr),
            "band": [lo, hi],
            "pass": ok,
        })


# curvature-defect --------------------------------------------------------------

def _check_curvature(p):
    r = p["radii"]
    if len(r) < 2 or any(x <= 0 for x in r) or any(b >= a for a, b in zip(r, r[1:])):
        raise InvalidParameters("radii must be at least two strictly decreasing positive values")
    if r[0] > 0.5:
        raise InvalidParameters("largest radius must be at most 0.5")
    if p["K"] > 0 and r[0] >= math.pi / math.sqrt(p["K"]):
        raise InvalidParameters("largest radius exceeds the injectivity radius of the sphere")
    if p["segments"] < 64:
        raise InvalidParameters("segments must be at least 64")
    if p["dimension"] < 2:
        raise InvalidParameters("dimension must be at least 2")
    if not p["tol"] > 0:
        raise InvalidParameters("tol must be positive")


def _run_curvature(ctx):
    p = ctx.p
    s = SpaceForm(p["K"], p["dimension"])
    st = random_state(s, ctx.rng)
    other = s.project_tangent(st.position, ctx.rng.standard_normal(s.ambient_dim))
    frame = tangent_frame(s, st.position, [st.velocity, other])
    est, levels = circle_defect_curvature(s, st.position, frame, p["radii"], p["segments"],
                                          return_levels=True)
    ctx.table("levels", ["r", "defect_estimate"], list(zip(p["radii"], levels)))
    ctx.estimate("curvature", est, lo=p["K"] - p["tol"], hi=p["K"] + p["tol"])


# jacobi-check --------------------------------------------------------------

def _check_jacobi(p):
    if not (p["t"] > 0 and p["dt"] > 0):
        raise InvalidParameters("t and dt must be positive")
    if p["dt"] > p["t"]:
        raise InvalidParameters("dt must not exceed t")
    if p["samples"] < 1:
        raise InvalidParameters("samples must be positive")


def _run_jacobi(ctx):
    p = ctx.p
    K, t = p["K"], p["t"]
    a, b = ctx.rng.uniform(-1.0, 1.0, 2)
    times, Js, _ = jacobi_trajectory(K, JacobiState(a, b), t, p["dt"], p["samples"])
    c = JacobiCoeffs((a,), (b,))
    closed = np.array([jacobi_closed_form(K, c, ti)[0] for ti in times])
    # scale by the uncancelled size of the two terms a C(t) and b S(t)
    scale = np.array([abs(a * u) + abs(b * v) for u, v in
                      (jacobi_closed_form(K, JacobiCoeffs((1.0, 0.0), (0.0, 1.0)), ti)
                       for ti in times)])
    err = np.abs(Js - closed)
    rel = np.divide(err, scale, out=np.zeros_like(err), where=scale > 0)
    ctx.table("trajectory", ["t", "J_closed", "J_numeric", "rel_err"],
              list(zip(times, closed, Js, rel)))
    drift = wronskian_drift(K, JacobiState(1.0, 0.0), JacobiState(0.0, 1.0), t, p["dt"])
    ctx.estimate("max_rel_err", float(rel.max()), lo=0.0, hi=p["tol"])
    ctx.estimate("wronskian_drift", drift, lo=0.0, hi=p["wronskian_tol"])


# geodesic-lyapunov --------------------------------------------------------------

def _check_negative_flow(p):
    if not p["K"] < 0:
        raise InvalidParameters("this experiment needs negative curvature K < 0")
    if not (p["T"] > 0 and p["dt"] > 0) or p["dt"] > p["T"]:
        raise InvalidParameters("need 0 < dt <= T")
    if p["samples"] < 50:
        raise InvalidParameters("samples must be at least 50")
    if not 0 < p["tail"] <= 1:
        raise InvalidParameters("tail must lie in (0, 1]")
    if p["samples"] * p["tail"] < 20:
        raise InvalidParameters("tail window holds fewer than 20 samples")
    if "q" in p and not 0 < p["q"] < 1:
        raise InvalidParameters("q must lie in (0, 1)")


def _flow_series(ctx):
    p = ctx.p
    s = SpaceForm(p["K"], 2)
    st = random_state(s, ctx.rng)
    w = s.project_tangent(st.position, ctx.rng.standard_normal(s.ambient_dim))
    return geodesic_separation_series(s, st, w, p["T"], p["samples"], p["dt"])


def _run_geodesic(ctx):
    p = ctx.p
    target = math.sqrt(-p["K"])
    lo, hi = target * (1 - p["rel_tol"]), target * (1 + p["rel_tol"])
    series = _flow_series(ctx)
    ctx.series("separation", series)
    std = standard_lyapunov(series, p["tail"])
    init = JacobiState(*ctx.rng.standard_normal(2))
    ben = benettin_flow_exponent(p["K"], init, p["T"], p["dt"], p["renorm_every"])
    ctx.estimate("standard", std.value, std.stderr, lo, hi)
    ctx.estimate("benettin", ben.value, ben.stderr, lo, hi)


def _check_geodesic(p):
    _check_negative_flow(p)
    if p["renorm_every"] < 1:
        raise InvalidParameters("renorm_every must be positive")


# deformed-lyapunov --------------------------------------------------------------

def _run_deformed(ctx):
    p = ctx.p
    q = DeformParam(p["q"])
    target = math.sqrt(-p["K"])
    series = _flow_series(ctx)
    dseries = deformed_series(q, series)
    ctx.series("separation", series, {"delta_deformed": dseries.deltas})
    half = series.window(0.0, 0.5 * p["T"])

    std = standard_lyapunov(series, p["tail"])
    d_full = standard_lyapunov(dseries, p["tail"])
    d_half = standard_lyapunov(deformed_series(q, half), p["tail"])
    mod = modified_lyapunov(dseries, p["tail"])
    cls = classify_separation(dseries, linear_tol=p["linear_tol"])

    ctx.estimate("standard", std.value, std.stderr,
                 target * (1 - p["rel_tol"]), target * (1 + p["rel_tol"]))
    ctx.estimate("deformed", d_full.value, d_full.stderr, -p["abs_tol"], p["abs_tol"])
    ctx.estimate("deformed_half_T", d_half.value, d_half.stderr)
    ctx.estimate("deformed_decrease", abs(d_half.value) - abs(d_full.value), lo=0.0, strict=True)
    ctx.estimate("modified_of_deformed", mod.value, mod.stderr,
                 1 - p["linear_tol"], 1 + p["linear_tol"])
    ctx.estimate("deformed_is_linear", 1.0 if isinstance(cls, Linear) else 0.0, lo=1.0, hi=1.0)


# modified-exponent --------------------------------------------------------------

def _check_modified(p):
    _check_negative_flow(p)
    if not p["power"] > 0:
        raise InvalidParameters("power must be positive")


def _run_modified(ctx):
    p = ctx.p
    q = DeformParam(p["q"])
    series = _flow_series(ctx)
    dseries = deformed_series(q, series)
    t = series.times
    flat = jacobi_series(0.0, p["T"], p["samples"], p["dt"])
    power = SeparationSeries(t, t ** p["power"])
    ctx.series("separation", {
        "t": t,
        "delta_flat": flat.deltas,
        "delta_power": power.deltas,
        "delta": series.deltas,
        "delta_deformed": dseries.deltas,
        "ln_t": np.log(t),
    })
    m_flat = modified_lyapunov(flat, p["tail"])
    m_pow = modified_lyapunov(power, p["tail"])
    m_def = modified_lyapunov(dseries, p["tail"])
    m_raw = modified_lyapunov(series, p["tail"])
    ctx.estimate("modified_flat", m_flat.value, m_flat.stderr, 1 - 1e-6, 1 + 1e-6)
    ctx.estimate("modified_power", m_pow.value, m_pow.stderr,
                 p["power"] - 1e-9, p["power"] + 1e-9)
    ctx.estimate("modified_of_deformed", m_def.value, m_def.stderr,
                 1 - p["linear_tol"], 1 + p["linear_tol"])
    ctx.estimate("modified_raw", m_raw.value, m_raw.stderr)


# anosov --------------------------------------------------------------

def _check_anosov(p):
    if p["samples"] < 100:
        raise InvalidParameters("samples must be at least 100")
    if p["t_max"] < 10:
        raise InvalidParameters("t_max must be at least 10")
    if p["iterates"] < 10_000:
        raise InvalidParameters("iterates must be at least 10000")
    if not p["tol"] > 0:
        raise InvalidParameters("tol must be positive")


def _run_anosov(ctx):
    p = ctx.p
    tol = p["tol"]
    seed = int(ctx.rng.integers(0, 2**63))
    rep = anosov_verify(p["samples"], p["t_max"], tol, seed=seed)
    ctx.table("profile", ["t", "stable_ratio", "unstable_ratio"], list(rep.profile))

    start = ctx.rng.random(2)
    end = cat_map_iterate(start, p["iterates"])
    chi1, chi2 = map_lyapunov_spectrum(cat_orbit_jacobians(start, p["iterates"]))
    ctx.table("orbit", ["x0", "y0", "x_end", "y_end", "iterates"],
              [(start[0], start[1], end[0], end[1], p["iterates"])])

    mu = (3 + math.sqrt(5)) / 2
    lam = (3 - math.sqrt(5)) / 2
    ln_mu = math.log(mu)
    chk = rep.checks
    ctx.estimate("expansion_rate", rep.expansion_rate, lo=mu - tol, hi=mu + tol)
    ctx.estimate("contraction_rate", rep.contraction_rate, lo=lam - tol, hi=lam + tol)
    ctx.estimate("constant", rep.constant, lo=0.0, hi=1.0 + tol)
    ctx.estimate("invariance_residual", chk["invariance"]["max_residual"], lo=0.0, hi=tol)
    for name in ("invariance", "contraction", "expansion"):
        ctx.estimate(f"{name}_ok", 1.0 if chk[name]["passed"] else 0.0, lo=1.0, hi=1.0)
    ctx.estimate("chi1", chi1, lo=ln_mu - p["spectrum_tol"], hi=ln_mu + p["spectrum_tol"])
    ctx.estimate("chi2", chi2, lo=-ln_mu - p["spectrum_tol"], hi=-ln_mu + p["spectrum_tol"])
    ctx.estimate("chi_sum", chi1 + chi2, lo=-p["sum_tol"], hi=p["sum_tol"])


# logistic-edge --------------------------------------------------------------

def _check_logistic(p):
    a = p["a"]
    if a != "edge" and not 0 < a <= 2:
        raise InvalidParameters("a must lie in (0, 2] or be 'edge'")
    if not -1 < p["x0"] < 1:
        raise InvalidParameters("x0 must lie in (-1, 1)")
    if p["N"] < 1000 or p["N_chaotic"] < 1000:
        raise InvalidParameters("N and N_chaotic must be at least 1000")
    if not 0 <= p["q_lo"] <= p["q_hi"] <= 1:
        raise InvalidParameters("need 0 <= q_lo <= q_hi <= 1")


def _run_logistic(ctx):
    p = ctx.p
    a = edge_of_chaos_param() if p["a"] == "edge" else p["a"]
    tol = p["exp_tol"]

    chaotic = logistic_sensitivity_series(2.0, p["x0"], p["N_chaotic"])
    edge = logistic_sensitivity_series(a, p["x0"], p["N"])
    crit = critical_orbit_sensitivity(a, p["N"])
    L = crit.log_deltas
    record = L > np.concatenate(([-np.inf], np.maximum.accumulate(L)[:-1]))
    ctx.series("sensitivity", edge)
    ctx.series("critical", crit, {"record": record.astype(int)})

    grid, quality, slope = q_sensitivity_scan(crit)
    ctx.table("qscan", ["q", "fit_quality", "lambda_q"], list(zip(grid, quality, slope)))
    fit = q_sensitivity_fit(crit)

    s_edge = standard_lyapunov(edge)
    s_chaos = standard_lyapunov(chaotic)
    ctx.estimate("a", a)
    ctx.estimate("standard_chaotic", s_chaos.value, s_chaos.stderr,
                 math.log(2) - tol, math.log(2) + tol)
    ctx.estimate("standard_edge", s_edge.value, s_edge.stderr, -tol, tol)
    ctx.estimate("q_sen", fit.q_sen, lo=p["q_lo"], hi=p["q_hi"])
    ctx.estimate("lambda_q", fit.lambda_q)
    ctx.estimate("fit_quality", fit.fit_quality)
    ctx.estimate("records", fit.envelope_points)


# entropy-compose --------------------------------------------------------------

def _check_entropy(p):
    if not 0 < p["q"] < 1:
        raise InvalidParameters("q must lie in (0, 1)")
    if p["trials"] < 1:
        raise InvalidParameters("trials must be positive")
    if not 1 <= p["max_outcomes"] <= 64:
        raise InvalidParameters("max_outcomes must lie in [1, 64]")


def _run_entropy(ctx):
    p = ctx.p
    d = DeformParam(p["q"])
    rng = ctx.rng
    rows = []
    for i in range(p["trials"]):
        na, nb = (int(x) for x in rng.integers(1, p["max_outcomes"] + 1, 2))
        pa = rng.dirichlet(np.ones(na))
        pb = rng.dirichlet(np.ones(nb))
        joint = np.outer(pa, pb).ravel()
        sa = tsallis_entropy(d, Distribution(pa / pa.sum()))
        sb = tsallis_entropy(d, Distribution(pb / pb.sum()))
        sab = tsallis_entropy(d, Distribution(joint / joint.sum()))
        comp = tsallis_compose(d, sa, sb)
        rows.append((i, na, nb, sa, sb, sab, comp, abs(sab - comp)))
    ctx.table("trials", ["trial", "n_a", "n_b", "S_a", "S_b", "S_ab", "composed", "abs_err"], rows)
    ctx.estimate("max_abs_err", max(r[-1] for r in rows), lo=0.0, hi=p["tol"])


# registry --------------------------------------------------------------

_FLOW = (
    Param("K", "float", -1.0, "curvature, must be negative"),
    Param("T", "float", 60.0, "integration horizon"),
    Param("dt", "float", 1e-3, "RK4 step"),
    Param("samples", "int", 3000, "sample count over (0, T]"),
    Param("tail", "float", 0.5, "fraction of samples in the estimation window"),
)

REGISTRY = {e.name: e for e in (
    Experiment(
        "curvature-defect", "sectional curvature from geodesic circle length defect",
        (Param("K", "float", 1.0, "curvature"),
         Param("dimension", "int", 2, "manifold dimension"),
         Param("radii", "floats", (0.1, 0.05, 0.025), "halving radius ladder"),
         Param("segments", "int", 512, "polygon chords per circle"),
         Param("tol", "float", 1e-3, "absolute acceptance band")),
        _check_curvature, _run_curvature),
    Experiment(
        "jacobi-check", "RK4 Jacobi fields against the closed form, plus Wronskian drift",
        (Param("K", "float", -1.0, "curvature"),
         Param("t", "float", 10.0, "horizon"),
         Param("dt", "float", 1e-3, "RK4 step"),
         Param("samples", "int", 1000, "comparison points"),
         Param("tol", "float", 1e-8, "relative error band"),
         Param("wronskian_tol", "float", 1e-9, "Wronskian drift band")),
        _check_jacobi, _run_jacobi),
    Experiment(
        "geodesic-lyapunov", "standard and renormalized exponents of a negatively curved flow",
        (Param("K", "float", -1.0, "curvature, must be negative"),
         Param("T", "float", 30.0, "integration horizon"),
         Param("dt", "float", 1e-3, "RK4 step"),
         Param("samples", "int", 3000, "sample count over (0, T]"),
         Param("tail", "float", 0.5, "fraction of samples in the estimation window"),
         Param("renorm_every", "int", 10, "steps between renormalizations"),
         Param("rel_tol", "float", 0.02, "relative band around sqrt(-K)")),
        _check_geodesic, _run_geodesic),
    Experiment(
        "deformed-lyapunov", "exponential separation re-measured by the deformed distance",
        _FLOW + (Param("q", "float", 0.5, "deformation index in (0, 1)"),
                 Param("abs_tol", "float", 0.05, "band for the deformed exponent"),
                 Param("rel_tol", "float", 0.02, "relative band around sqrt(-K)"),
                 Param("linear_tol", "float", 0.1, "band around degree 1")),
        _check_negative_flow, _run_deformed),
    Experiment(
        "modified-exponent", "power-law degree of flat, synthetic and deformed separations",
        _FLOW + (Param("q", "float", 0.5, "deformation index in (0, 1)"),
                 Param("power", "float", 2.5, "degree of the synthetic power law"),
                 Param("linear_tol", "float", 0.1, "band around degree 1")),
        _check_modified, _run_modified),
    Experiment(
        "anosov", "hyperbolic splitting and exponent spectrum of the cat map",
        (Param("samples", "int", 100, "sample points"),
         Param("t_max", "int", 30, "longest iterate checked"),
         Param("tol", "float", 1e-9, "tolerance of the splitting checks"),
         Param("iterates", "int", 1_000_000, "orbit length for the spectrum"),
         Param("spectrum_tol", "float", 1e-4, "band around +-ln(mu)"),
         Param("sum_tol", "float", 1e-8, "band for the exponent sum")),
        _check_anosov, _run_anosov),
    Experiment(
        "logistic-edge", "sensitivity of x -> 1 - a x^2 at the chaos threshold",
        (Param("a", "float|edge", "edge", "map parameter, or 'edge' for the accumulation point"),
         Param("N", "int", 100_000, "iterates at a"),
         Param("x0", "float", 0.2, "initial point"),
         Param("N_chaotic", "int", 1_000_000, "iterates of the a = 2 control run"),
         Param("exp_tol", "float", 0.01, "band for the standard exponents"),
         Param("q_lo", "float", 0.15, "lower bound for q_sen"),
         Param("q_hi", "float", 0.35, "upper bound for q_sen")),
        _check_logistic, _run_logistic),
    Experiment(
        "entropy-compose", "composition rule of the q-entropy on independent products",
        (Param("q", "float", 0.5, "entropic index in (0, 1)"),
         Param("trials", "int", 200, "random distribution pairs"),
         Param("max_outcomes", "int", 8, "largest alphabet per factor"),
         Param("tol", "float", 1e-12, "absolute band")),
        _check_entropy, _run_entropy),
)}


def validate(cfg: RunConfig):
    """Raise InvalidParameters if the resolved parameters do not fit together."""
    REGISTRY[cfg.experiment].check(cfg.parameters)


def _prepare_outdir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise OutputDirError(f"cannot create output directory {path!r}: {exc.strerror}") from exc
    if not os.path.isdir(path) or not os.access(path, os.W_OK | os.X_OK):
        raise OutputDirError(f"output directory {path!r} is not writable")


def run_experiment(cfg: RunConfig) -> RunSummary:
    """Run one registered experiment, write its files and return the summary.

    The CSV outputs depend only on ``cfg``. The JSON summary additionally
    carries the wall-clock duration.
    """
    exp = REGISTRY[cfg.experiment]
    exp.check(cfg.parameters)
    _prepare_outdir(cfg.output_dir)
    ctx = _Context(cfg, cfg.output_dir, make_rng(cfg.seed))
    t0 = time.perf_counter()
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        exp.body(ctx)
    tag = "estimates"
    ctx.table(tag, ["name", "value", "stderr", "lower", "upper", "pass"],
              [(e["name"], e["value"], "" if e["stderr"] is None else e["stderr"],
                "" if e["band"][0] is None else e["band"][0],
                "" if e["band"][1] is None else e["band"][1],
                "" if e["pass"] is None else e["pass"]) for e in ctx.estimates])
    passed = all(e["pass"] is not False for e in ctx.estimates)
    summary = RunSummary(cfg.experiment, cfg.resolved(), ctx.estimates, passed,
                         time.perf_counter() - t0, list(ctx.outputs))
    json_path = os.path.join(cfg.output_dir, f"{cfg.experiment}.summary.json")
    summary.outputs.append(json_path)
    write_summary(json_path, summary.to_json())
    return summary
