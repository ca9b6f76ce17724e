"""Command line entry point.

Exit codes: 0 success, 1 config error, 2 solver error, 3 partial sweep failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import DEFAULT_CAP, ConfigError, SweepConfig, parse_config
from .params import classify_regime
from .runner import FIGURES, SolverError, reproduce_figure, run_single, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_PARTIAL = 0, 1, 2, 3


def _load(path, **kw):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}") from None
    return parse_config(text, **kw)


def cmd_run(args) -> int:
    cfg = _load(args.config)
    if isinstance(cfg, SweepConfig):
        raise ConfigError("config has sweep.* keys; use the 'sweep' command")
    table = run_single(cfg)
    if args.out:
        table.write(args.out)
    else:
        sys.stdout.write(table.to_csv())
    if cfg.solver == "both":
        print(f"max deviation analytic vs oracle: {table.meta('max_deviation')}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args.config, out_dir=args.out, cap=args.cap)
    if not isinstance(cfg, SweepConfig):
        cfg = SweepConfig(base=cfg, axes=(), out_dir=Path(args.out), cap=args.cap)
    result = run_sweep(cfg, workers=args.workers)
    print(f"{len(result.tables)} tables written to {args.out}; index at {result.index_path}")
    if result.failures:
        for values, err in result.failures:
            print(f"FAILED {values}: {err}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_reproduce(args) -> int:
    paths = reproduce_figure(args.figure, args.out, n_points=args.n_points, workers=args.workers)
    print(f"{args.figure}: wrote {len(paths)} file(s) under {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args.config, cap=args.cap)
    run = cfg.base if isinstance(cfg, SweepConfig) else cfg
    if isinstance(cfg, SweepConfig):
        cfg.check_cap()
        print(f"valid sweep: {cfg.size} point(s) over {', '.join(n for n, _ in cfg.axes)}")
    else:
        print("valid run config")
    rep = classify_regime(run.params)
    print(f"memory ratio gamma/lambda = {rep.memory_ratio:g} ({rep.markovianity_label}); "
          f"gamma/kappa = {rep.damping_ratio:g} ({rep.damping_label})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbattery", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one configuration and emit CSV")
    p.add_argument("config")
    p.add_argument("--out", help="CSV file (default: stdout)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a Cartesian parameter sweep")
    p.add_argument("config")
    p.add_argument("--out", default="sweep_out", help="output directory")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum number of sweep points")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="write a figure dataset")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--out", required=True)
    p.add_argument("--n-points", type=int, default=2000)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("validate", help="check a config without running it")
    p.add_argument("config")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as e:
        print(f"solver error: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
