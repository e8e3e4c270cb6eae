"""Bloch-equation validation of control signals on the three-level system.

A control signal is converted into a mixing-angle history: kicks become
instantaneous angle jumps, the smooth part integrates into ramps.  The
real-valued Bloch system is then stepped with fixed-step RK4, the grid
forced onto every jump instant and switch time so the right-hand side
stays smooth within a step; jumps are applied between steps, leaving the
state continuous.  Fixed stepping keeps the sampled output bit-for-bit
reproducible across runs, which the sweep front end relies on.

The transfer figure of merit is the final target-state population
``X(T)^2``, evaluated exactly at the stated duration.  An optional settle
window can extend the evolution past it (the damping then eats whatever
is left in the intermediate state), but the headline efficiency never
includes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .core import (
    HALF_PI,
    AreaMismatchError,
    ControlSignal,
    SmoothPiece,
    SpinStateXYZ,
    SystemParams,
    control_area,
)
from .polynomial import polynomial_control_signal, solve_polynomial
from .suboptimal import solve_suboptimal

_AREA_PRECONDITION_TOL = 1e-10

METHODS = ("suboptimal", "optimal", "poly8", "poly10", "poly12")


@dataclass(frozen=True)
class ThetaTrajectory:
    """Piecewise mixing angle reconstructed from a control signal.

    Right-continuous at kick instants; monotone nondecreasing whenever the
    smooth control is nonnegative.  ``bases[i]`` is the angle just after
    the jump (if any) at ``starts[i]``.
    """

    duration: float
    starts: np.ndarray
    ends: np.ndarray
    bases: np.ndarray
    pieces: tuple[SmoothPiece | None, ...]
    theta_end: float

    def segment_theta(self, index: int, ts: np.ndarray) -> np.ndarray:
        """Angle evaluated with segment ``index``'s own formula."""
        base = self.bases[index]
        piece = self.pieces[index]
        if piece is None:
            return np.full_like(np.asarray(ts, float), base)
        start = self.starts[index]
        return base + piece.antiderivative(ts) - piece.antiderivative(start)

    def __call__(self, t):
        scalar = np.isscalar(t)
        ts = np.atleast_1d(np.asarray(t, float))
        idx = np.clip(np.searchsorted(self.starts, ts, side="right") - 1, 0, len(self.starts) - 1)
        out = np.empty_like(ts)
        for i in range(len(self.starts)):
            mask = idx == i
            if mask.any():
                out[mask] = self.segment_theta(i, ts[mask])
        out[ts >= self.duration] = self.theta_end
        return float(out[0]) if scalar else out.reshape(np.shape(t))


def theta_trajectory(signal: ControlSignal, check_area: bool = True) -> ThetaTrajectory:
    """Integrate a control signal into its mixing-angle history.

    Raises
    ------
    AreaMismatchError
        If the signal area differs from ``pi/2`` by more than 1e-10 (and
        the check is not explicitly disabled for diagnostics).
    """
    area = control_area(signal)
    if check_area and abs(area - HALF_PI) > _AREA_PRECONDITION_TOL:
        raise AreaMismatchError(
            f"signal area {area!r} differs from pi/2 by more than "
            f"{_AREA_PRECONDITION_TOL}"
        )
    bps = signal.breakpoints()
    kicks = {i.time: i.magnitude for i in signal.impulses}
    starts = bps[:-1]
    ends = bps[1:]
    bases = []
    pieces = []
    theta = 0.0
    for a, b in zip(starts, ends):
        theta += kicks.get(float(a), 0.0)
        bases.append(theta)
        piece = _covering_piece(signal, float(a), float(b))
        pieces.append(piece)
        if piece is not None:
            theta += float(piece.antiderivative(b) - piece.antiderivative(a))
    theta += kicks.get(float(bps[-1]), 0.0) if len(bps) > 1 else 0.0
    return ThetaTrajectory(
        duration=signal.duration,
        starts=np.asarray(starts, float),
        ends=np.asarray(ends, float),
        bases=np.array(bases),
        pieces=tuple(pieces),
        theta_end=theta,
    )


def _covering_piece(signal: ControlSignal, a: float, b: float) -> SmoothPiece | None:
    tol = 1e-12 * max(1.0, signal.duration)
    for p in signal.pieces:
        if p.start <= a + tol and b <= p.end + tol:
            return None if (p.is_constant and p.level == 0.0) else p
    return None


@dataclass(frozen=True)
class SpinTrajectory:
    """Sampled Bloch motion with populations and transfer diagnostics.

    ``efficiency`` is the target population at the stated duration;
    ``settled_efficiency`` (present only when a settle window was
    requested) is the value at the end of the extended evolution.  The
    ``norm_decay_residual`` measures how well the squared Bloch length
    obeys its loss balance: it should equal one minus the decay rate times
    the integrated intermediate population.
    """

    params: SystemParams
    times: np.ndarray
    theta: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    efficiency: float
    norm_decay_residual: float
    settled_efficiency: float | None = None

    @property
    def populations(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(initial, intermediate, target) populations per sample."""
        return self.Z**2, self.Y**2, self.X**2

    @property
    def states(self) -> list[SpinStateXYZ]:
        return [
            SpinStateXYZ(float(x), float(y), float(z))
            for x, y, z in zip(self.X, self.Y, self.Z)
        ]

    def to_csv(self, path) -> None:
        """Write ``t,theta,X,Y,Z,pop1,pop2,pop3`` rows at 15 significant digits."""
        pop1, pop2, pop3 = self.populations
        with open(path, "w") as fh:
            fh.write("t,theta,X,Y,Z,pop1,pop2,pop3\n")
            for row in zip(self.times, self.theta, self.X, self.Y, self.Z,
                           pop1, pop2, pop3):
                fh.write(",".join(f"{x:.15g}" for x in row) + "\n")


def _rk4_segment(state, gamma, h, sin_n, cos_n, sin_m, cos_m):
    """RK4 steps of the Bloch system across one smooth-angle segment."""
    Z, Y, X = state
    Zs = [Z]
    Ys = [Y]
    Xs = [X]
    g = gamma
    h2 = h / 2.0
    h6 = h / 6.0
    for i in range(len(sin_m)):
        s0 = sin_n[i]
        c0 = cos_n[i]
        sm = sin_m[i]
        cm = cos_m[i]
        s1 = sin_n[i + 1]
        c1 = cos_n[i + 1]
        k1z = 0.5 * s0 * Y
        k1y = 0.5 * (-s0 * Z - g * Y + c0 * X)
        k1x = -0.5 * c0 * Y
        z = Z + h2 * k1z
        y = Y + h2 * k1y
        x = X + h2 * k1x
        k2z = 0.5 * sm * y
        k2y = 0.5 * (-sm * z - g * y + cm * x)
        k2x = -0.5 * cm * y
        z = Z + h2 * k2z
        y = Y + h2 * k2y
        x = X + h2 * k2x
        k3z = 0.5 * sm * y
        k3y = 0.5 * (-sm * z - g * y + cm * x)
        k3x = -0.5 * cm * y
        z = Z + h * k3z
        y = Y + h * k3y
        x = X + h * k3x
        k4z = 0.5 * s1 * y
        k4y = 0.5 * (-s1 * z - g * y + c1 * x)
        k4x = -0.5 * c1 * y
        Z += h6 * (k1z + 2.0 * (k2z + k3z) + k4z)
        Y += h6 * (k1y + 2.0 * (k2y + k3y) + k4y)
        X += h6 * (k1x + 2.0 * (k2x + k3x) + k4x)
        Zs.append(Z)
        Ys.append(Y)
        Xs.append(X)
    return (Z, Y, X), Zs, Ys, Xs


def simulate_spin(
    signal: ControlSignal,
    params: SystemParams,
    steps: int = 20000,
    settle: float = 0.0,
    check_area: bool = True,
) -> SpinTrajectory:
    """Integrate the Bloch system along a control signal from the north pole.

    Parameters
    ----------
    signal : ControlSignal
        Control to validate; kicks enter as instantaneous angle jumps.
    params : SystemParams
        Decay rate and duration.
    steps : int
        Number of RK4 steps across the duration (at least 1000), shared
        proportionally among the smooth-angle segments.
    settle : float
        Optional extra evolution time past the duration, at the final
        angle, with no control.
    check_area : bool
        Disable only for diagnostics of deliberately non-transferring
        signals.
    """
    if steps < 1000:
        raise ValueError(f"steps must be at least 1000, got {steps}")
    theta = theta_trajectory(signal, check_area=check_area)
    gamma = params.gamma
    T = params.duration
    times: list[np.ndarray] = []
    thetas: list[np.ndarray] = []
    zs: list[list[float]] = []
    ys: list[list[float]] = []
    xs: list[list[float]] = []
    state = (1.0, 0.0, 0.0)  # (Z, Y, X): north pole
    y2_integral = 0.0
    for i in range(len(theta.starts)):
        a, b = float(theta.starts[i]), float(theta.ends[i])
        n = max(int(math.ceil(steps * (b - a) / T)), 2)
        ts = np.linspace(a, b, n + 1)
        mids = 0.5 * (ts[:-1] + ts[1:])
        th_n = theta.segment_theta(i, ts)
        th_m = theta.segment_theta(i, mids)
        state, seg_z, seg_y, seg_x = _rk4_segment(
            state, gamma, (b - a) / n,
            np.sin(th_n).tolist(), np.cos(th_n).tolist(),
            np.sin(th_m).tolist(), np.cos(th_m).tolist(),
        )
        y_arr = np.array(seg_y)
        y2_integral += simpson(y_arr * y_arr, x=ts) if n >= 2 else 0.0
        if times:
            times[-1] = times[-1][:-1]
            thetas[-1] = thetas[-1][:-1]
            for acc in (zs, ys, xs):
                acc[-1] = acc[-1][:-1]
        times.append(ts)
        thetas.append(th_n)
        zs.append(seg_z)
        ys.append(seg_y)
        xs.append(seg_x)
    Zf, Yf, Xf = state
    efficiency = Xf * Xf
    r2_final = Zf * Zf + Yf * Yf + Xf * Xf
    residual = abs(r2_final - 1.0 + gamma * y2_integral)

    settled = None
    if settle > 0.0:
        n = max(int(math.ceil(steps * settle / T)), 2)
        ts = np.linspace(T, T + settle, n + 1)
        th = np.full(n + 1, theta.theta_end)
        sn = np.sin(th).tolist()
        cn = np.cos(th).tolist()
        state, seg_z, seg_y, seg_x = _rk4_segment(
            state, gamma, settle / n, sn, cn, sn[:-1], cn[:-1]
        )
        times[-1] = times[-1][:-1]
        thetas[-1] = thetas[-1][:-1]
        for acc in (zs, ys, xs):
            acc[-1] = acc[-1][:-1]
        times.append(ts)
        thetas.append(th)
        zs.append(seg_z)
        ys.append(seg_y)
        xs.append(seg_x)
        settled = state[2] ** 2

    theta_samples = np.concatenate(thetas)
    theta_samples[0] = 0.0  # angle before the initial kick
    theta_samples[-1] = theta.theta_end
    return SpinTrajectory(
        params=params,
        times=np.concatenate(times),
        theta=theta_samples,
        Z=np.array([v for seg in zs for v in seg]),
        Y=np.array([v for seg in ys for v in seg]),
        X=np.array([v for seg in xs for v in seg]),
        efficiency=efficiency,
        norm_decay_residual=residual,
        settled_efficiency=settled,
    )


def signal_for_method(method: str, params: SystemParams) -> ControlSignal:
    """Control signal of one of the named synthesis methods."""
    from .optimal import solve_optimal  # deferred: optimal imports spring

    if method == "suboptimal":
        return solve_suboptimal(params).as_control_signal()
    if method == "optimal":
        return solve_optimal(params).as_control_signal()
    if method.startswith("poly"):
        degree = int(method[4:])
        poly = solve_polynomial(degree, params.duration)
        return polynomial_control_signal(poly, params.gamma)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def efficiency_of(method: str, params: SystemParams, steps: int = 20000) -> float:
    """Final target population achieved by a named method's signal."""
    signal = signal_for_method(method, params)
    return simulate_spin(signal, params, steps=steps).efficiency
