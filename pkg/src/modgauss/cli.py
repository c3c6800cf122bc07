"""Command-line driver: identity suites, parameter scans and instance generation.

    modgauss run --suite modular-identities --seed 0 --out reports/
    modgauss scan --quantity lambda1_Am --over mass --values 0.5 1 2 5
    modgauss generate --n 4 --count 3 --out instances/

Random instances use numpy's PCG64 generator seeded with ``[seed, suite
tag, N, instance]``.  Settings come from flags, then from an optional TOML
file given with ``--config``, then from built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from . import suites
from .dilation import random_abstract_subspace

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_CONFIG_KEYS = ("seed", "dims", "tol", "grid_n", "box", "out", "format", "instances")
_DEFAULTS = {"seed": 0, "dims": [2, 4, 8, 16], "tol": None, "grid_n": 4096, "box": 8.0, "out": "reports", "format": "csv"}


class UsageError(ValueError):
    pass


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    unknown = sorted(set(data) - set(_CONFIG_KEYS))
    if unknown:
        raise UsageError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return data


def merge_settings(args: argparse.Namespace) -> dict:
    """Flags win over the config file, which wins over defaults."""
    settings = dict(_DEFAULTS)
    settings.update(load_config(getattr(args, "config", None)))
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def build_config(settings: dict) -> suites.RunConfig:
    try:
        return suites.RunConfig(
            seed=int(settings["seed"]),
            dims=tuple(int(n) for n in settings["dims"]),
            instances=dict(settings.get("instances", {})),
            tol=settings["tol"],
            grid_n=int(settings["grid_n"]),
            box=float(settings["box"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def write_suite_reports(results: list[suites.SuiteResult], name: str, out: Path, fmt: str) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    checks = [c for r in results for c in r.checks]
    summary = {
        "suite": name,
        "n_checks": len(checks),
        "n_pass": sum(c.passed for c in checks),
        "worst_residual": max((c.residual for c in checks), default=0.0),
        "worst_residual_over_tolerance": max((r.worst_ratio() for r in results), default=0.0),
        "per_suite": {r.suite: {"n_checks": len(r.checks), "n_pass": r.n_pass} for r in results},
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if fmt == "csv":
        body = "".join(
            suites.checks_csv(r) if k == 0 else suites.checks_csv(r).split("\n", 1)[1] for k, r in enumerate(results)
        )
        (out / "checks.csv").write_text(body)
    else:
        rows = [dict(suite=r.suite, **c.to_dict()) for r in results for c in r.checks]
        (out / "checks.json").write_text(json.dumps(rows, indent=1) + "\n")
    for r in results:
        for fname, text in r.files.items():
            (out / fname).write_text(text)
    return summary


def run_suite(name: str, cfg: suites.RunConfig, out: Path, fmt: str = "csv") -> int:
    """Run a suite (or ``all``), write reports under ``out``, return the exit code."""
    if name != "all" and name not in suites.SUITES:
        print(f"error: unknown suite {name!r}; available: {', '.join(suites.SUITES + ('all',))}", file=sys.stderr)
        return EXIT_USAGE
    names = suites.SUITES if name == "all" else (name,)
    results = [suites.run(n, cfg) for n in names]
    summary = write_suite_reports(results, name, out, fmt)
    print(f"{name}: {summary['n_pass']}/{summary['n_checks']} checks passed, worst residual {summary['worst_residual']:.3e}")
    failing = [(r.suite, c) for r in results for c in r.failing()]
    for suite, c in failing:
        print(f"FAILED [{suite}] {c.identity_name}: residual {c.residual:.3e} > tolerance {c.tolerance:.1e}", file=sys.stderr)
    return EXIT_FAIL if failing else EXIT_OK


def _cmd_run(args) -> int:
    settings = merge_settings(args)
    return run_suite(args.suite, build_config(settings), Path(settings["out"]), settings["format"])


def _cmd_scan(args) -> int:
    settings = merge_settings(args)
    cfg = build_config(settings)
    if args.values is not None:
        values = args.values
    elif args.over == "dims":
        values = list(cfg.dims)
    else:
        raise UsageError(f"--values is required when scanning over {args.over}")
    if args.over == "dims":
        values = [int(v) for v in values]
    try:
        rows = suites.scan(args.quantity, args.over, values, cfg)
    except (KeyError, ValueError) as exc:
        raise UsageError(exc.args[0]) from exc
    if settings["format"] == "json":
        text = json.dumps([{"parameter": p, "value": v} for p, v in rows], indent=1) + "\n"
    else:
        text = suites.rows_to_csv(["parameter", args.quantity], rows)
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_generate(args) -> int:
    settings = merge_settings(args)
    out = Path(settings["out"])
    out.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        rng = np.random.default_rng([int(settings["seed"]), args.n, k])
        ab = random_abstract_subspace(args.n, rng)
        (out / f"abstract_n{args.n}_seed{settings['seed']}_{k}.json").write_text(ab.to_json() + "\n")
    print(f"wrote {args.count} instances to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modgauss", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file with default settings (flags take precedence)")
    common.add_argument("--seed", type=int)
    common.add_argument("--dims", type=int, nargs="*", help="complex dimensions N (even)")
    common.add_argument("--grid-n", dest="grid_n", type=int, help="spectral grid points for the entropy suite")
    common.add_argument("--box", type=float, help="half-length of the periodic box for the entropy suite")
    common.add_argument("--tol", type=float, help="replace the identity tolerances of the algebraic suites")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("json", "csv"))

    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", parents=[common], help="run an identity suite")
    p_run.add_argument("--suite", required=True, choices=suites.SUITES + ("all",))
    p_run.set_defaults(func=_cmd_run)

    p_scan = sub.add_parser("scan", parents=[common], help="tabulate a quantity over a parameter")
    p_scan.add_argument("--quantity", required=True, help=f"one of: {', '.join(sorted(suites.SCANS))}")
    p_scan.add_argument("--over", required=True, choices=("dims", "squeeze", "mass"))
    p_scan.add_argument("--values", type=float, nargs="*", help="parameter values (default: --dims for dims scans)")
    p_scan.add_argument("--output", help="write the table here instead of stdout")
    p_scan.set_defaults(func=_cmd_scan)

    p_gen = sub.add_parser("generate", parents=[common], help="write random abstract subspaces as JSON")
    p_gen.add_argument("--n", type=int, default=4)
    p_gen.add_argument("--count", type=int, default=1)
    p_gen.set_defaults(func=_cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
