"""Command-line driver.

    grclock sync --preset fig3b --out runs/fig3b
    grclock squeeze-scan --config my.json --out runs/scan
    grclock gr-budget --out runs/budget

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import evolve, experiments


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grclock")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in experiments.KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--out", type=Path, required=True, help="output directory")
        p.add_argument(
            "--preset",
            choices=sorted(experiments.PRESETS),
            help="use a shipped parameter set instead of a config file",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.preset:
            cfg = experiments.preset_config(args.preset)
            if cfg.kind != args.command:
                raise experiments.ConfigError(
                    f"preset {args.preset!r} belongs to the {cfg.kind!r} subcommand"
                )
        elif args.config:
            cfg = experiments.ExperimentConfig.from_json(args.config.read_text())
            if cfg.kind != args.command:
                raise experiments.ConfigError(
                    f"config kind {cfg.kind!r} does not match subcommand {args.command!r}"
                )
        else:
            cfg = experiments.ExperimentConfig(kind=args.command)
    except (experiments.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        experiments.run(cfg, args.out)
    except (experiments.ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (evolve.PropagationError, ArithmeticError, MemoryError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
