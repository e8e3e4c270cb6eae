"""Command-line figure rendering from pulse-design CSV/JSON files.

Exit codes: 0 on success, 1 on bad or missing input data, 2 on bad
arguments.
"""

from __future__ import annotations

import argparse
import sys

from .figures import plot_contour, plot_sweep, plot_trajectory
from .io import PlotDataError


def _parse_mark(spec: str):
    try:
        a, b = spec.split(",")
        return float(a), float(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"mark must be formatted as t1,t2 — got {spec!r}"
        ) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stirap-plot",
        description="Render figures from stirap-spring CSV/JSON outputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_traj = sub.add_parser("trajectory", help="multi-panel trajectory figure")
    p_traj.add_argument("--traj", required=True, help="trajectory CSV")
    p_traj.add_argument("--sequence", required=True, help="solve JSON")
    p_traj.add_argument("--out", required=True, help="output image (.png/.svg)")

    p_sweep = sub.add_parser("sweep", help="efficiency versus duration figure")
    p_sweep.add_argument("--sweep", required=True, help="sweep CSV")
    p_sweep.add_argument("--overlay", "--extra-csv", default=None,
                         help="optional external baseline CSV "
                              "(duration,efficiency columns)")
    p_sweep.add_argument("--out", required=True, help="output image (.png/.svg)")

    p_cont = sub.add_parser("contour", help="switch-time efficiency map")
    p_cont.add_argument("--contour", required=True, help="contour CSV")
    p_cont.add_argument("--mark", type=_parse_mark, default=None,
                        help="draw an X at t1,t2")
    p_cont.add_argument("--out", required=True, help="output image (.png/.svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "trajectory":
            out = plot_trajectory(args.traj, args.sequence, args.out)
        elif args.command == "sweep":
            out = plot_sweep(args.sweep, args.overlay, args.out)
        else:
            out = plot_contour(args.contour, args.out, mark=args.mark)
    except (PlotDataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
