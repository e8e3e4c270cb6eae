"""Command-line front end: single solves, trajectory dumps, sweeps, contours.

All figure data leaves this tool as CSV/JSON; rendering is a separate
concern.  Sweep and contour grids run in a process pool (capped by the
``STIRAP_THREADS`` environment variable) and the records are sorted by key
before writing, so the output is byte-identical no matter how many workers
ran.  Structurally invalid grid points are recorded with an error code in
the ``valid`` column rather than fabricated numbers.

Exit codes: 0 on success, 2 on bad arguments, 3 when every requested
record is structurally invalid.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import PulseDesignError, SystemParams
from .optimal import sequence_from_switch_times, solve_optimal
from .polynomial import solve_polynomial
from .spin import METHODS, efficiency_of, signal_for_method, simulate_spin
from .spring import simulate_spring
from .suboptimal import solve_suboptimal

SWEEP_HEADER = "method,gamma,duration,efficiency,spring_cost,valid"
CONTOUR_HEADER = "t1,t2,efficiency,valid"

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_ALL_INVALID = 3


@dataclass(frozen=True)
class SweepRecord:
    method: str
    gamma: float
    duration: float
    efficiency: float | None
    spring_cost: float | None
    valid: str  # "ok" or an error code

    @property
    def is_valid(self) -> bool:
        return self.valid == "ok"


@dataclass(frozen=True)
class ContourRecord:
    t1: float
    t2: float
    efficiency: float | None
    valid: str

    @property
    def is_valid(self) -> bool:
        return self.valid == "ok"


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.15g}"


def _worker_count(n_tasks: int, workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("STIRAP_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(workers, n_tasks))


def _run_pool(task, args_list, workers):
    n = _worker_count(len(args_list), workers)
    if n <= 1 or len(args_list) <= 1:
        return [task(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=n) as pool:
        chunk = max(1, len(args_list) // (4 * n))
        return list(pool.map(task, args_list, chunksize=chunk))


def _sweep_task(args) -> SweepRecord:
    method, gamma, duration, steps = args
    try:
        params = SystemParams(gamma=gamma, duration=duration)
        signal = signal_for_method(method, params)
        eff = simulate_spin(signal, params, steps=steps).efficiency
        cost = simulate_spring(signal, params, steps=steps).cost
        return SweepRecord(method, gamma, duration, eff, cost, "ok")
    except PulseDesignError as exc:
        return SweepRecord(method, gamma, duration, None, None, exc.code)


def run_sweep(
    gammas,
    t_min: float,
    t_max: float,
    t_step: float,
    methods,
    steps: int = 20000,
    workers: int | None = None,
) -> list[SweepRecord]:
    """Evaluate every (method, gamma, duration) combination on the grid.

    Records come back sorted by (method, gamma, duration); structural
    failures are per-record error codes and do not stop the run.
    """
    if t_min <= 0 or t_step <= 0:
        raise ValueError("need t_min > 0 and t_step > 0")
    durations = []
    t = t_min
    while t <= t_max + 1e-9 * t_step:
        durations.append(round(t, 12))
        t += t_step
    tasks = [
        (method, gamma, duration, steps)
        for method in methods
        for gamma in gammas
        for duration in durations
    ]
    records = _run_pool(_sweep_task, tasks, workers)
    records.sort(key=lambda r: (r.method, r.gamma, r.duration))
    return records


def _contour_task(args) -> ContourRecord:
    gamma, duration, t1, t2, steps = args
    try:
        params = SystemParams(gamma=gamma, duration=duration)
        seq = sequence_from_switch_times(params, t1, t2)
        eff = simulate_spin(seq.as_control_signal(), params, steps=steps).efficiency
        return ContourRecord(t1, t2, eff, "ok")
    except PulseDesignError as exc:
        return ContourRecord(t1, t2, None, exc.code)


def run_contour(
    gamma: float,
    duration: float,
    t1_grid,
    t2_grid,
    steps: int = 20000,
    workers: int | None = None,
) -> list[ContourRecord]:
    """Efficiency of the optimal-structure sequence over a switch-time grid.

    Grid points that leave the structure's validity region (negative
    elements, bad ordering) are recorded invalid.
    """
    tasks = [
        (gamma, duration, float(t1), float(t2), steps)
        for t1 in t1_grid
        for t2 in t2_grid
    ]
    records = _run_pool(_contour_task, tasks, workers)
    records.sort(key=lambda r: (r.t1, r.t2))
    return records


def write_sweep_csv(records, path) -> None:
    with open(path, "w") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for r in records:
            fh.write(
                f"{r.method},{_fmt(r.gamma)},{_fmt(r.duration)},"
                f"{_fmt(r.efficiency)},{_fmt(r.spring_cost)},{r.valid}\n"
            )


def write_contour_csv(records, path) -> None:
    with open(path, "w") as fh:
        fh.write(CONTOUR_HEADER + "\n")
        for r in records:
            fh.write(
                f"{_fmt(r.t1)},{_fmt(r.t2)},{_fmt(r.efficiency)},{r.valid}\n"
            )


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, num = spec.split(":")
        return np.linspace(float(lo), float(hi), int(num))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"grid must be formatted as start:stop:count, got {spec!r}"
        ) from exc


def _parse_floats(spec: str) -> list[float]:
    return [float(x) for x in spec.split(",") if x]


def _solve_payload(method: str, degree: int | None, params: SystemParams) -> dict:
    if method == "poly":
        if degree is None:
            raise argparse.ArgumentTypeError("--method poly requires --degree")
        return solve_polynomial(degree, params.duration).to_json_dict() | {
            "gamma": params.gamma
        }
    if method == "suboptimal":
        return solve_suboptimal(params).to_json_dict()
    if method == "optimal":
        return solve_optimal(params).to_json_dict()
    raise argparse.ArgumentTypeError(f"unknown method {method!r}")


def _cmd_solve(args) -> int:
    params = SystemParams(gamma=args.gamma, duration=args.duration)
    payload = _solve_payload(args.method, args.degree, params)
    text = json.dumps(payload, indent=2)
    print(text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def _method_name(args) -> str:
    if args.method == "poly":
        if args.degree is None:
            raise argparse.ArgumentTypeError("--method poly requires --degree")
        return f"poly{args.degree}"
    return args.method


def _cmd_simulate(args) -> int:
    params = SystemParams(gamma=args.gamma, duration=args.duration)
    method = _method_name(args)
    signal = signal_for_method(method, params)
    traj = simulate_spin(signal, params, steps=args.steps, settle=args.settle)
    traj.to_csv(args.out)
    print(f"wrote {args.out}: efficiency {traj.efficiency:.15g}", file=sys.stderr)
    if args.spring_out:
        simulate_spring(signal, params, steps=args.steps).to_csv(args.spring_out)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(json.dumps(_solve_payload(args.method, args.degree, params), indent=2) + "\n")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    methods = [m for m in args.methods.split(",") if m]
    for m in methods:
        if m not in METHODS:
            raise argparse.ArgumentTypeError(
                f"unknown method {m!r}; choose from {','.join(METHODS)}"
            )
    records = run_sweep(
        _parse_floats(args.gamma), args.t_min, args.t_max, args.t_step,
        methods, steps=args.steps, workers=args.workers,
    )
    write_sweep_csv(records, args.out)
    if records and not any(r.is_valid for r in records):
        print("all sweep records are structurally invalid", file=sys.stderr)
        return EXIT_ALL_INVALID
    return EXIT_OK


def _cmd_contour(args) -> int:
    records = run_contour(
        args.gamma, args.duration, _parse_grid(args.t1), _parse_grid(args.t2),
        steps=args.steps, workers=args.workers,
    )
    write_contour_csv(records, args.out)
    if records and not any(r.is_valid for r in records):
        print("all contour records are structurally invalid", file=sys.stderr)
        return EXIT_ALL_INVALID
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stirap-spring",
        description="Shortcut-to-adiabaticity pulse sequences for a lossy "
        "three-level system, designed on the mapped oscillator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, poly=True):
        p.add_argument("--gamma", type=float, required=True, help="decay rate")
        p.add_argument("--duration", type=float, required=True, help="total time")
        if poly:
            p.add_argument("--degree", type=int, default=None,
                           help="polynomial degree (with --method poly)")

    p_solve = sub.add_parser("solve", help="solve one pulse sequence")
    p_solve.add_argument("--method", required=True,
                         choices=("suboptimal", "optimal", "poly"))
    add_common(p_solve)
    p_solve.add_argument("--json", default=None, help="write the sequence JSON here")
    p_solve.set_defaults(func=_cmd_solve)

    p_sim = sub.add_parser("simulate", help="dump a Bloch trajectory CSV")
    p_sim.add_argument("--method", required=True,
                       choices=("suboptimal", "optimal", "poly"))
    add_common(p_sim)
    p_sim.add_argument("--steps", type=int, default=20000)
    p_sim.add_argument("--settle", type=float, default=0.0,
                       help="extra evolution time past the duration")
    p_sim.add_argument("--out", required=True, help="trajectory CSV path")
    p_sim.add_argument("--spring-out", default=None,
                       help="also dump the oscillator trajectory CSV here")
    p_sim.add_argument("--json", default=None, help="also write the sequence JSON")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="efficiency versus duration grid")
    p_sweep.add_argument("--gamma", required=True,
                         help="comma-separated decay rates")
    p_sweep.add_argument("--t-min", type=float, required=True)
    p_sweep.add_argument("--t-max", type=float, required=True)
    p_sweep.add_argument("--t-step", type=float, required=True)
    p_sweep.add_argument("--methods", required=True,
                         help=f"comma-separated subset of {','.join(METHODS)}")
    p_sweep.add_argument("--steps", type=int, default=20000)
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.add_argument("--out", required=True, help="sweep CSV path")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_cont = sub.add_parser("contour", help="efficiency over a switch-time grid")
    p_cont.add_argument("--gamma", type=float, required=True)
    p_cont.add_argument("--duration", type=float, required=True)
    p_cont.add_argument("--t1", required=True, help="grid start:stop:count")
    p_cont.add_argument("--t2", required=True, help="grid start:stop:count")
    p_cont.add_argument("--steps", type=int, default=20000)
    p_cont.add_argument("--workers", type=int, default=None)
    p_cont.add_argument("--out", required=True, help="contour CSV path")
    p_cont.set_defaults(func=_cmd_contour)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))  # exits with code 2
    except (PulseDesignError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
