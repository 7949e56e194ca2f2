"""Run configuration built from defaults, flat key=value files and flags.

Resolution order is defaults, then the config file, then command-line
flags; later sources win. Config files hold one ``key=value`` per line;
blank lines and ``#`` comments are ignored.
"""

from dataclasses import dataclass, field
import math
import os
import re

__all__ = [
    "ConfigError",
    "InvalidParameters",
    "Param",
    "RunConfig",
    "UnknownExperiment",
    "parse_config",
    "parse_config_file",
]

DEFAULT_SEED = 42
DEFAULT_OUT = "results"
_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
RESERVED = ("experiment", "seed", "out", "config")


class ConfigError(ValueError):
    """Configuration that cannot be read or does not match the schema."""


class UnknownExperiment(ConfigError):
    pass


class InvalidParameters(ValueError):
    """Parameters are individually well-typed but do not make sense together."""


def _to_float(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(text)
    return v


def _to_int(text):
    try:
        return int(text)
    except ValueError:
        v = float(text)
        if not v.is_integer():
            raise
        return int(v)


def _to_float_list(text):
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    if not parts:
        raise ValueError(text)
    return tuple(_to_float(p) for p in parts)


def _to_float_or_edge(text):
    if str(text).strip().lower() == "edge":
        return "edge"
    return _to_float(text)


CONVERTERS = {
    "float": _to_float,
    "int": _to_int,
    "floats": _to_float_list,
    "float|edge": _to_float_or_edge,
}


@dataclass(frozen=True)
class Param:
    name: str
    kind: str
    default: object
    help: str = ""

    def convert(self, text, where=""):
        try:
            return CONVERTERS[self.kind](text)
        except (TypeError, ValueError):
            raise ConfigError(f"{where}parameter {self.name!r} expects {self.kind}, got {text!r}") from None


@dataclass
class RunConfig:
    experiment: str
    parameters: dict
    seed: int = DEFAULT_SEED
    output_dir: str = DEFAULT_OUT
    sources: dict = field(default_factory=dict)

    def resolved(self):
        out = {"experiment": self.experiment, "seed": self.seed}
        out.update({k: list(v) if isinstance(v, tuple) else v for k, v in self.parameters.items()})
        return out


def _to_seed(text, where=""):
    try:
        v = int(str(text), 0)
    except ValueError:
        raise ConfigError(f"{where}seed must be an unsigned 64-bit integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise ConfigError(f"{where}seed must be an unsigned 64-bit integer, got {text!r}")
    return v


def parse_config_file(path):
    """Read a flat key=value file into an ordered dict of raw strings.

    Raises :class:`ConfigError` naming the offending line number.
    """
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.rstrip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if not _KEY.match(key) or not value:
                raise ConfigError(f"{path}:{lineno}: malformed line {raw.rstrip()!r}")
            entries[key] = (value, f"{path}:{lineno}: ")
    return entries


def _parse_flags(args):
    flags = {}
    i = 0
    while i < len(args):
        tok = args[i]
        if not tok.startswith("--") or len(tok) < 3:
            raise ConfigError(f"expected --key value, got {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            if i + 1 >= len(args):
                raise ConfigError(f"flag --{key} needs a value")
            value = args[i + 1]
            i += 1
        if not _KEY.match(key):
            raise ConfigError(f"malformed flag --{key}")
        flags[key] = (value, f"--{key}: ")
        i += 1
    return flags


def parse_config(args, file=None, registry=None) -> RunConfig:
    """Resolve a :class:`RunConfig` from flag tokens and an optional file.

    ``args`` are tokens such as ``["--experiment", "jacobi-check", "--K", "-1"]``;
    ``--config`` inside ``args`` names the file when ``file`` is not given.
    """
    if registry is None:
        from .experiments import REGISTRY as registry
    flags = _parse_flags(list(args))
    if "config" in flags:
        file = file or flags.pop("config")[0]
    from_file = parse_config_file(file) if file else {}

    merged = dict(from_file)
    merged.update(flags)
    if "experiment" not in merged:
        raise ConfigError("no experiment given (use --experiment NAME)")
    name = merged.pop("experiment")[0]
    if name not in registry:
        raise UnknownExperiment(
            f"unknown experiment {name!r}; registered: {', '.join(sorted(registry))}")
    schema = {p.name: p for p in registry[name].params}

    seed = DEFAULT_SEED
    out = DEFAULT_OUT
    params = {p.name: p.default for p in schema.values()}
    sources = {k: "default" for k in params}
    for key, (value, where) in merged.items():
        if key == "seed":
            seed = _to_seed(value, where)
        elif key == "out":
            out = value
        elif key in schema:
            params[key] = schema[key].convert(value, where)
            sources[key] = "flag" if key in flags else "file"
        else:
            raise ConfigError(f"{where}unknown key {key!r} for experiment {name!r}")
    return RunConfig(name, params, seed, os.fspath(out), sources)
