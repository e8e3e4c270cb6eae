"""Damped driven oscillator propagation and cost evaluation.

The mapped oscillator obeys ``y' = v``, ``v' = -y/4 - (gamma/2) v - u/2``:
unit angular frequency 1/2, damping ``gamma/2``, drive ``-u/2``.  In the
underdamped regime the free motion has envelope ``exp(-gamma t/4)`` and
angular factor ``sqrt(4 - gamma^2)/4``, which stays regular down to
``gamma = 0`` (pure sinusoid), so no special casing is needed there.

Propagation is exact on zero and constant-control segments; only
polynomial segments are stepped with fixed-step RK4.  Impulses are applied
as their exact jump map ``v -> v - magnitude/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .core import (
    ControlSignal,
    MalformedSignalError,
    SmoothPiece,
    SpringState,
    SystemParams,
)

# Lower bound on quadrature samples per smooth segment; kinks live at the
# segment boundaries, so each segment is sampled densely on its own grid.
MIN_SEGMENT_SAMPLES = 2000


def free_evolution(y0: float, v0: float, gamma: float, dt: float) -> SpringState:
    """Exact underdamped free motion over an interval ``dt``.

    Parameters
    ----------
    y0, v0 : float
        Displacement and velocity at the start of the interval.
    gamma : float
        Decay rate; must satisfy ``0 <= gamma < 2``.
    dt : float
        Interval length, ``dt >= 0``.
    """
    if not 0.0 <= gamma < 2.0:
        raise ValueError(f"free_evolution requires 0 <= gamma < 2, got {gamma}")
    if dt < 0.0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    y, v = _free_arrays(y0, v0, gamma, np.asarray([dt]))
    return SpringState(float(y[0]), float(v[0]))


def _free_arrays(y0, v0, gamma, ts):
    """Vectorized closed-form free motion evaluated at offsets ``ts``."""
    a = gamma / 4.0
    w = math.sqrt(4.0 - gamma * gamma) / 4.0
    env = np.exp(-a * ts)
    cw = np.cos(w * ts)
    sw = np.sin(w * ts)
    y = env * (y0 * cw + (v0 + a * y0) / w * sw)
    v = env * (v0 * cw - (y0 / 4.0 + a * v0) / w * sw)
    return y, v


def _const_forced_arrays(y0, v0, gamma, level, ts):
    """Constant-control motion: shift to the forced equilibrium y* = -2u."""
    ystar = -2.0 * level
    y, v = _free_arrays(y0 - ystar, v0, gamma, ts)
    return y + ystar, v


def reference_cost(params: SystemParams) -> float:
    """Dynamics-free lower bound ``pi^2 gamma / duration`` on the loss cost.

    It is the cost of parking the displacement at the constant value
    ``-pi/duration`` that satisfies the integral constraint alone, ignoring
    how the oscillator could ever get there.
    """
    return math.pi**2 * params.gamma / params.duration


@dataclass(frozen=True)
class SpringTrajectory:
    """Sampled oscillator motion with its loss cost.

    ``cost`` is ``gamma * integral(y^2)``; ``endpoint_residual`` is
    ``max(|y(T)|, |v(T)|)`` after the final kick, i.e. the failure to
    return to equilibrium.
    """

    params: SystemParams
    times: np.ndarray
    y: np.ndarray
    v: np.ndarray
    cost: float
    endpoint_residual: float

    @property
    def states(self) -> list[SpringState]:
        return [SpringState(float(a), float(b)) for a, b in zip(self.y, self.v)]

    def to_csv(self, path) -> None:
        """Write ``t,y,v`` rows at 15 significant digits."""
        with open(path, "w") as fh:
            fh.write("t,y,v\n")
            for t, y, v in zip(self.times, self.y, self.v):
                fh.write(f"{t:.15g},{y:.15g},{v:.15g}\n")


def _segment_samples(length: float, total: float, steps: int) -> int:
    n = max(int(math.ceil(steps * length / total)), MIN_SEGMENT_SAMPLES)
    return n + (n % 2)  # even interval count for Simpson


def _piece_for_interval(signal: ControlSignal, a: float, b: float) -> SmoothPiece | None:
    tol = 1e-12 * max(1.0, signal.duration)
    for p in signal.pieces:
        if p.start <= a + tol and b <= p.end + tol:
            return p
        if p.start < b - tol and a < p.end - tol:
            # partial overlap cannot happen with breakpoint-aligned intervals
            raise MalformedSignalError(
                f"smooth piece [{p.start}, {p.end}] is not aligned with [{a}, {b}]"
            )
    return None


def _rk4_poly_segment(y, v, gamma, piece, ts):
    """Fixed-step RK4 across ``ts`` for a polynomial control segment."""
    mids = 0.5 * (ts[:-1] + ts[1:])
    u_n = np.asarray(piece.value(ts), float).tolist()
    u_m = np.asarray(piece.value(mids), float).tolist()
    ys = [y]
    vs = [v]
    hg = gamma / 2.0
    h = ts[1] - ts[0]
    for i in range(len(ts) - 1):
        u0, um, u1 = u_n[i], u_m[i], u_n[i + 1]
        k1y = v
        k1v = -0.25 * y - hg * v - 0.5 * u0
        y2 = y + 0.5 * h * k1y
        v2 = v + 0.5 * h * k1v
        k2y = v2
        k2v = -0.25 * y2 - hg * v2 - 0.5 * um
        y3 = y + 0.5 * h * k2y
        v3 = v + 0.5 * h * k2v
        k3y = v3
        k3v = -0.25 * y3 - hg * v3 - 0.5 * um
        y4 = y + h * k3y
        v4 = v + h * k3v
        k4y = v4
        k4v = -0.25 * y4 - hg * v4 - 0.5 * u1
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        ys.append(y)
        vs.append(v)
    return np.array(ys), np.array(vs)


def simulate_spring(
    signal: ControlSignal, params: SystemParams, steps: int = 20000
) -> SpringTrajectory:
    """Propagate the oscillator through a control signal from equilibrium.

    Parameters
    ----------
    signal : ControlSignal
        Control to apply; its duration must match ``params.duration``.
    params : SystemParams
        Decay rate and duration.
    steps : int
        Target number of samples across the whole duration (at least 100);
        every smooth segment additionally gets at least
        ``MIN_SEGMENT_SAMPLES`` samples of its own.

    Returns
    -------
    SpringTrajectory
        Right-continuous samples (post-kick values at impulse instants),
        Simpson-quadrature cost and the endpoint residual.
    """
    if steps < 100:
        raise ValueError(f"steps must be at least 100, got {steps}")
    if abs(signal.duration - params.duration) > 1e-9 * max(1.0, params.duration):
        raise MalformedSignalError("signal duration does not match params.duration")
    T = params.duration
    gamma = params.gamma
    kicks = {i.time: i.magnitude for i in signal.impulses}
    bps = signal.breakpoints()

    times: list[np.ndarray] = []
    ys: list[np.ndarray] = []
    vs: list[np.ndarray] = []
    y, v = 0.0, 0.0
    if bps[0] in kicks:
        v -= kicks[bps[0]] / 2.0
    cost = 0.0
    for a, b in zip(bps[:-1], bps[1:]):
        n = _segment_samples(b - a, T, steps)
        ts = np.linspace(a, b, n + 1)
        piece = _piece_for_interval(signal, a, b)
        if piece is None or piece.is_constant:
            level = 0.0 if piece is None else piece.level
            seg_y, seg_v = _const_forced_arrays(y, v, gamma, level, ts - a)
        else:
            seg_y, seg_v = _rk4_poly_segment(y, v, gamma, piece, ts)
        cost += gamma * simpson(seg_y * seg_y, x=ts)
        if times:
            # drop the duplicated boundary sample kept from the previous
            # segment; y is continuous there and v was pre-kick
            times[-1] = times[-1][:-1]
            ys[-1] = ys[-1][:-1]
            vs[-1] = vs[-1][:-1]
        times.append(ts)
        ys.append(seg_y)
        vs.append(seg_v)
        y, v = float(seg_y[-1]), float(seg_v[-1])
        if b in kicks and b > bps[0]:
            v -= kicks[b] / 2.0
            vs[-1] = vs[-1].copy()
            vs[-1][-1] = v
    t_all = np.concatenate(times)
    y_all = np.concatenate(ys)
    v_all = np.concatenate(vs)
    residual = max(abs(y), abs(v))
    return SpringTrajectory(
        params=params,
        times=t_all,
        y=y_all,
        v=v_all,
        cost=cost,
        endpoint_residual=residual,
    )
