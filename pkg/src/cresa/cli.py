"""Command-line entry point.

    cresa analyze CONFIG [--n N] [--seed S] [--m M] [--grid I,J] [--out DIR]
    cresa converge CONFIG --sizes 100,500,1000 [--repeats 10] [--m 100,500] [--grid 10,10 --grid 20,20]
    cresa list-models

The output directory is, in order of precedence: ``--out``, the
``CRESA_OUTPUT_DIR`` environment variable, the config's ``[output] dir``,
and ``results/<config name>``.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from .config import ExperimentConfig, load_config, parse_int, parse_list
from .errors import CREError
from .estimators import GridParams
from .experiment import convergence_csv, convergence_study, run_experiment, write_convergence
from .models import MODELS

OUTPUT_ENV = "CRESA_OUTPUT_DIR"


def _int_list(text: str) -> list[int]:
    return [parse_int(t) for t in parse_list(text)]


def _grid_pair(text: str) -> tuple[int, int]:
    parts = _int_list(text)
    if len(parts) == 1:
        parts *= 2
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected I,J, got {text!r}")
    return parts[0], parts[1]


def _output_dir(args: argparse.Namespace, config: ExperimentConfig) -> Path:
    if args.out:
        return Path(args.out)
    if os.environ.get(OUTPUT_ENV):
        return Path(os.environ[OUTPUT_ENV]) / (config.name or config.model)
    if config.output_dir:
        return Path(config.output_dir)
    return Path("results") / (config.name or config.model)


def _apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    changes: dict = {}
    if getattr(args, "n", None) is not None:
        changes["n"] = args.n
    if args.seed is not None:
        changes["seed"] = args.seed
    grid = config.grid
    m = args.m[0] if isinstance(args.m, list) and args.m else args.m
    if m is not None or args.grid:
        i, j = args.grid[0] if args.grid else (grid.I, grid.J)
        changes["grid"] = GridParams(m=m if m is not None else grid.m, I=i, J=j)
    return config.replace(**changes) if changes else config


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _apply_overrides(load_config(args.config), args)
    if args.workers is not None:
        config = config.replace(workers=args.workers)
    report = run_experiment(config)
    out = _output_dir(args, config)
    written = report.write(out)
    print(report.summary())
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_converge(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    base = config.grid
    ms = args.m or [base.m]
    pairs = args.grid or [(base.I, base.J)]
    grids = [GridParams(m=m, I=i, J=j) for m in ms for (i, j) in pairs]
    rows = convergence_study(
        config,
        sizes=args.sizes,
        repeats=args.repeats,
        quantity=args.quantity,
        target=args.target,
        grids=grids,
    )
    if args.out:
        out = Path(args.out)
    else:
        out = _output_dir(argparse.Namespace(out=None), config) / "convergence.csv"
    write_convergence(rows, out)
    sys.stdout.write(convergence_csv(rows))
    print(f"wrote {out}")
    return 0


def cmd_list_models(args: argparse.Namespace) -> int:
    for name, model in MODELS.items():
        print(f"{name:<16} inputs: {', '.join(model.labels):<28} {model.description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cresa", description="CRE-based global sensitivity analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run every method in a config and write the report")
    p.add_argument("config")
    p.add_argument("--n", type=int, help="given-data sample size")
    p.add_argument("--seed", type=int)
    p.add_argument("--m", type=int, help="samples per grid for one-variable conditioning")
    p.add_argument("--grid", type=_grid_pair, action="append", help="I,J grid counts for pair conditioning")
    p.add_argument("--workers", type=int, help="threads for the conditional estimates")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("converge", help="estimator mean/spread/time over growing sample sizes")
    p.add_argument("config")
    p.add_argument("--sizes", type=_int_list, help="comma-separated ascending sample sizes")
    p.add_argument("--repeats", type=int)
    p.add_argument("--quantity", choices=("cre", "conditional_cre_1", "conditional_cre_2", "kappa"))
    p.add_argument("--target", help="input label(s) or 'output'")
    p.add_argument("--seed", type=int)
    p.add_argument("--m", type=_int_list, help="one or more m values, comma-separated")
    p.add_argument("--grid", type=_grid_pair, action="append", help="I,J (repeatable)")
    p.add_argument("--out", help="CSV path")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("list-models", help="show the built-in models")
    p.set_defaults(func=cmd_list_models)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CREError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
