"""Command-line entry point.

    weakchaos run --experiment NAME [--config FILE] [--KEY VALUE ...] [--out DIR] [--seed U64]
    weakchaos list

Exit codes: 0 all bands met, 1 a band was missed, 2 usage or configuration
error, 3 numeric failure, 4 output directory not writable, 5 parameters
that are well-formed but inconsistent.
"""

import argparse
import json
import sys

from .. import kernels
from ..lyapunov import SingularJacobianError
from .config import ConfigError, InvalidParameters, parse_config
from .experiments import REGISTRY, NumericFailure, run_experiment

__all__ = ["main", "EXIT_PASS", "EXIT_FAIL", "EXIT_USAGE", "EXIT_NUMERIC", "EXIT_OUTPUT",
           "EXIT_PARAMS"]

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_OUTPUT = 4
EXIT_PARAMS = 5


def _list(out):
    for name, exp in REGISTRY.items():
        print(f"{name}: {exp.description}", file=out)
        for p in exp.params:
            default = ",".join(map(str, p.default)) if isinstance(p.default, tuple) else p.default
            print(f"    --{p.name} <{p.kind}> (default {default})  {p.help}", file=out)
    print("common: --config <file> --out <dir> (default results) --seed <u64> (default 42)",
          file=out)


def _parser():
    ap = argparse.ArgumentParser(prog="weakchaos", allow_abbrev=False,
                                 description="Run reproducible chaos experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list experiments and their parameters")
    run = sub.add_parser("run", help="run one experiment", allow_abbrev=False,
                         description="Any --KEY VALUE pair sets an experiment parameter.")
    run.add_argument("--experiment", required=True)
    run.add_argument("--config")
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = _parser()
    try:
        ns, rest = ap.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    if ns.command == "list":
        if rest:
            print(f"weakchaos: unexpected arguments {rest}", file=sys.stderr)
            return EXIT_USAGE
        _list(sys.stdout)
        return EXIT_PASS

    try:
        cfg = parse_config(["--experiment", ns.experiment] + rest, ns.config)
    except (ConfigError, OSError) as exc:
        print(f"weakchaos: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        summary = run_experiment(cfg)
    except InvalidParameters as exc:
        print(f"weakchaos: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except OSError as exc:
        print(f"weakchaos: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except (NumericFailure, SingularJacobianError, ArithmeticError, FloatingPointError) as exc:
        print(f"weakchaos: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    for e in summary.estimates:
        mark = {True: "ok", False: "MISS", None: "--"}[e["pass"]]
        print(f"{e['name']:>22} = {e['value']:.10g}  [{mark}]")
    print(json.dumps({"experiment": summary.experiment, "pass": summary.passed,
                      "duration_seconds": round(summary.duration_seconds, 3),
                      "backend": kernels.BACKEND}))
    return EXIT_PASS if summary.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
