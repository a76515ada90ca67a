"""Command-line driver.

    clockfigs render --fig fig3 --in runs/fig3b --out plots/fig3.svg

Exit codes: 0 success, 2 missing/ill-formed input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FIGURE_IDS, InputError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clockfigs")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from an experiment output directory")
    p.add_argument("--fig", required=True, choices=FIGURE_IDS, help="figure id")
    p.add_argument("--in", dest="in_dir", type=Path, required=True, help="experiment output directory")
    p.add_argument("--out", type=Path, required=True, help="output SVG path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.fig, args.in_dir, args.out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
