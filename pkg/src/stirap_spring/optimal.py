"""Optimal five-element sequence and its Pontryagin verification.

The optimal structure is kick-coast-(kick, hold)-(release, kick)-coast-kick:
unlike the intuitive sequence, the hold segment starts *after* the first
velocity zero, at a switch time where the switching function (not the
velocity) vanishes.  A second kick then cancels the velocity so the hold
can begin closer to equilibrium, cutting the loss cost.

Both switch times solve transcendental equations obtained by propagating
the normalized adjoint pair (lam_y, lam_v) off the hold segment, on which
it is pinned at (gamma, 2).  The zero-switching-function condition at the
boundaries reads ``lam_v = 2``; eliminating the hyperbolic pair turns it
into ``cosh(gamma t/4) = (2 A - sqrt(B^4 - A^2 B^2 + 4 B^2)) / (A^2 - B^2)``
with trigonometric coefficients A, B of the scaled interval.  The solver
works on the residual of that form directly, bracketed between the
turning time and the singular-arc duration bound, and falls back to the
algebraically equivalent residual ``A cosh + B sinh - 2`` when ``A^2 - B^2``
degenerates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import (
    HALF_PI,
    BracketError,
    NegativeElementError,
    PulseSequence,
    SingularCoefficientError,
    SwitchOrderingError,
    SystemParams,
)
from .spring import simulate_spring
from .suboptimal import min_singular_duration, turning_time

_BRACKET_SCAN = 2000
_RESIDUAL_TOL = 1e-12
_DEGENERATE_TOL = 1e-9

# Adjoint values pinned on the hold segment: lam_v = 2, lam_y = gamma.
LAM_V_SINGULAR = 2.0


class MultipleRootsWarning(UserWarning):
    """More than one sign change found in a switching-time bracket."""


@dataclass(frozen=True)
class AdjointState:
    """Normalized multiplier pair; the switching function vanishes at lam_v = 2."""

    lam_y: float
    lam_v: float

    @classmethod
    def on_singular_arc(cls, gamma: float) -> "AdjointState":
        """Constant value the pair is pinned to on the hold segment."""
        return cls(lam_y=gamma, lam_v=LAM_V_SINGULAR)


def _first_interval_coeffs(gamma: float, t1: float) -> tuple[float, float]:
    """Hyperbolic coefficients (A, B) for the leading coast interval."""
    k = math.sqrt(4.0 - gamma * gamma)
    tt = k * t1 / 4.0
    st = math.sin(tt)
    if abs(st) < 1e-14 or gamma == 0.0:
        raise SingularCoefficientError(
            f"coefficient denominator vanishes at t1={t1}, gamma={gamma}"
        )
    A = gamma * st / k + math.cos(tt)
    B = (-k * gamma * math.sin(2.0 * tt) + gamma**2 * math.cos(2.0 * tt)
         - 3.0 * gamma**2 + 8.0) / (2.0 * st * gamma * k)
    return A, B


def _last_interval_coeffs(gamma: float, tau: float) -> tuple[float, float]:
    """Hyperbolic coefficients (A, B) for the trailing coast interval of length tau."""
    k = math.sqrt(4.0 - gamma * gamma)
    tt = k * tau / 4.0
    st = math.sin(tt)
    if abs(st) < 1e-14 or gamma == 0.0:
        raise SingularCoefficientError(
            f"coefficient denominator vanishes at tau={tau}, gamma={gamma}"
        )
    A = math.cos(tt) - gamma * st / k
    B = (k * gamma * math.sin(2.0 * tt) + gamma**2 * math.cos(2.0 * tt)
         - 3.0 * gamma**2 + 8.0) / (2.0 * st * gamma * k)
    return A, B


def _switch_residual(gamma: float, span: float, coeffs) -> float:
    """Residual whose root makes lam_v hit 2 at the far end of a coast interval."""
    A, B = coeffs(gamma, span)
    c = math.cosh(gamma * span / 4.0)
    denom = A * A - B * B
    if abs(denom) < _DEGENERATE_TOL:
        # quadratic-solution form degenerates; use the underlying condition
        return A * c + B * math.sinh(gamma * span / 4.0) - LAM_V_SINGULAR
    disc = max(B**4 - A**2 * B**2 + 4.0 * B**2, 0.0)
    return c - (2.0 * A - math.sqrt(disc)) / denom


def _bracketed_root(f, lo: float, hi: float, what: str) -> float:
    xs = np.linspace(lo, hi, _BRACKET_SCAN + 1)
    fs = np.array([f(x) for x in xs])
    idx = np.nonzero(fs[:-1] * fs[1:] < 0.0)[0]
    if len(idx) == 0:
        exact = np.nonzero(fs == 0.0)[0]
        if len(exact):
            return float(xs[exact[0]])
        raise BracketError(
            f"no sign change of the {what} residual in ({lo:.6g}, {hi:.6g})"
        )
    if len(idx) > 1:
        warnings.warn(
            f"{len(idx)} sign changes of the {what} residual in "
            f"({lo:.6g}, {hi:.6g}); taking the smallest root",
            MultipleRootsWarning,
            stacklevel=3,
        )
    root = brentq(f, float(xs[idx[0]]), float(xs[idx[0] + 1]), xtol=1e-13, rtol=1e-15)
    if abs(f(root)) > _RESIDUAL_TOL:
        raise BracketError(f"{what} root did not converge: residual {f(root):.3e}")
    return float(root)


def solve_switch_time_t1(gamma: float) -> float:
    """Entry time of the hold segment, past the free turning point.

    Bracketed between the turning time (where the intuitive sequence
    enters) and the singular-arc duration bound.
    """
    if not 0.0 < gamma < 2.0:
        raise ValueError(f"gamma must satisfy 0 < gamma < 2, got {gamma}")
    lo = turning_time(gamma) * (1.0 + 1e-12)
    hi = min_singular_duration(gamma) * (1.0 - 1e-12)
    return _bracketed_root(
        lambda t: _switch_residual(gamma, t, _first_interval_coeffs), lo, hi,
        "entry switch-time",
    )


def solve_switch_time_t2(gamma: float, duration: float) -> float:
    """Release time of the hold segment, solved on the backward interval.

    The trailing coast length ``duration - t2`` satisfies its own
    transcendental equation, independent of the duration; it is bracketed
    between the intuitive trailing length and the singular-arc bound.

    Raises
    ------
    SwitchOrderingError
        If the resulting release time does not come after the entry time.
    """
    if not 0.0 < gamma < 2.0:
        raise ValueError(f"gamma must satisfy 0 < gamma < 2, got {gamma}")
    k = math.sqrt(4.0 - gamma * gamma)
    alpha = math.atan2(k, gamma)
    lo = 4.0 * (math.pi - alpha) / k * (1.0 + 1e-12)
    hi = min_singular_duration(gamma) * (1.0 - 1e-12)
    tau = _bracketed_root(
        lambda t: _switch_residual(gamma, t, _last_interval_coeffs), lo, hi,
        "release switch-time",
    )
    t2 = duration - tau
    t1 = solve_switch_time_t1(gamma)
    if t2 <= t1:
        raise SwitchOrderingError(
            f"release time {t2:.6g} does not follow entry time {t1:.6g} "
            f"(duration {duration} too short for the optimal structure)"
        )
    return t2


def sequence_from_switch_times(
    params: SystemParams, t1: float, t2: float
) -> PulseSequence:
    """Optimal-structure sequence for given switch times.

    All four kicks and the hold level are proportional to the first kick,
    which the pulse-area identity then fixes linearly.  Used both by
    :func:`solve_optimal` (at the transcendental roots) and by switch-time
    scans around them.
    """
    gamma, T = params.gamma, params.duration
    if not 0.0 < t1 < t2 < T:
        raise SwitchOrderingError(
            f"need 0 < t1 < t2 < {T}, got t1={t1}, t2={t2}"
        )
    k = math.sqrt(4.0 - gamma * gamma)
    tt1 = k * t1 / 4.0
    ttT = k * (T - t2) / 4.0
    if abs(math.sin(ttT)) < 1e-14:
        raise SingularCoefficientError(
            f"trailing coast of length {T - t2} hits a node of the free motion"
        )
    decay1 = math.exp(-gamma * t1 / 4.0)
    r2 = decay1 * (gamma * math.sin(tt1) / k - math.cos(tt1))
    r_hold = decay1 * math.sin(tt1) / k
    r3 = -r_hold * (k / math.tan(ttT) + gamma)
    r4 = math.sin(tt1) * math.exp(-gamma * (t1 + T - t2) / 4.0) / math.sin(ttT)
    denom = 1.0 + r2 + (t2 - t1) * r_hold + r3 + r4
    if denom <= 0.0:
        raise NegativeElementError("pulse-area identity forces a nonpositive v1")
    v1 = HALF_PI / denom
    elements = {
        "v2": r2 * v1,
        "v3": r3 * v1,
        "v4": r4 * v1,
        "u_s": r_hold * v1,
    }
    bad = [name for name, val in elements.items() if val <= 0.0]
    if bad:
        raise NegativeElementError(
            f"optimal structure leaves its validity region at t1={t1:.6g}, "
            f"t2={t2:.6g}: nonpositive {', '.join(bad)}"
        )
    return PulseSequence(
        params=params,
        kind="optimal",
        v1=v1,
        v2=elements["v2"],
        v3=elements["v3"],
        v4=elements["v4"],
        u_s=elements["u_s"],
        t1=t1,
        t2=t2,
    )


def solve_optimal(params: SystemParams) -> PulseSequence:
    """Solve both switching-time equations and assemble the sequence."""
    t1 = solve_switch_time_t1(params.gamma)
    t2 = solve_switch_time_t2(params.gamma, params.duration)
    return sequence_from_switch_times(params, t1, t2)


def adjoint_boundary_values(
    gamma: float, t1: float, t2: float, duration: float
) -> tuple[float, float]:
    """Closed-form lam_v at t=0 and t=T for given switch times.

    Both equal 2 exactly when (t1, t2) solve the switching-time equations;
    deviations measure how far the structure is from optimality.
    """
    A1, B1 = _first_interval_coeffs(gamma, t1)
    lam_v0 = A1 * math.cosh(gamma * t1 / 4.0) + B1 * math.sinh(gamma * t1 / 4.0)
    tau = duration - t2
    A2, B2 = _last_interval_coeffs(gamma, tau)
    lam_vT = A2 * math.cosh(gamma * tau / 4.0) + B2 * math.sinh(gamma * tau / 4.0)
    return lam_v0, lam_vT


def _integrate_adjoint(gamma, t_start, t_end, y_ratio, n_steps):
    """RK4 for the adjoint pair from (gamma, 2), forward or backward.

    ``y_ratio(t)`` is the displacement normalized by the hold displacement;
    it is the only trajectory input the adjoint pair needs.  Returns the
    sample times and lam_v samples (lam_y is internal).
    """
    h = (t_end - t_start) / n_steps
    start = AdjointState.on_singular_arc(gamma)
    lam_y, lam_v = start.lam_y, start.lam_v
    ts = [t_start]
    lvs = [lam_v]
    t = t_start
    half_g = gamma / 2.0
    for _ in range(n_steps):
        r0 = y_ratio(t)
        rm = y_ratio(t + 0.5 * h)
        r1 = y_ratio(t + h)
        k1y = 0.25 * lam_v - 0.5 * r0
        k1v = -lam_y + half_g * lam_v
        y2 = lam_y + 0.5 * h * k1y
        v2 = lam_v + 0.5 * h * k1v
        k2y = 0.25 * v2 - 0.5 * rm
        k2v = -y2 + half_g * v2
        y3 = lam_y + 0.5 * h * k2y
        v3 = lam_v + 0.5 * h * k2v
        k3y = 0.25 * v3 - 0.5 * rm
        k3v = -y3 + half_g * v3
        y4 = lam_y + h * k3y
        v4 = lam_v + h * k3v
        k4y = 0.25 * v4 - 0.5 * r1
        k4v = -y4 + half_g * v4
        lam_y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        lam_v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        t += h
        ts.append(t)
        lvs.append(lam_v)
    return np.array(ts), np.array(lvs)


def integrate_adjoint_boundary(
    gamma: float, t1: float, t2: float, duration: float, steps: int = 20000
) -> tuple[float, float]:
    """ODE cross-check of :func:`adjoint_boundary_values`.

    Integrates the adjoint pair with the analytic coast-displacement ratio:
    backward over the leading interval and forward over the trailing one.
    """
    k = math.sqrt(4.0 - gamma * gamma)
    st1 = math.sin(k * t1 / 4.0)

    def ratio_first(t):
        return math.exp(-gamma * (t - t1) / 4.0) * math.sin(k * t / 4.0) / st1

    _, lvs0 = _integrate_adjoint(gamma, t1, 0.0, ratio_first, steps)

    tau = duration - t2
    ttT = k * tau / 4.0
    stT = math.sin(ttT)

    def ratio_last(t):
        return (
            math.exp(-gamma * (t - t2) / 4.0)
            * math.sin(ttT - k * (t - t2) / 4.0) / stT
        )

    _, lvsT = _integrate_adjoint(gamma, t2, duration, ratio_last, steps)
    return float(lvs0[-1]), float(lvsT[-1])


@dataclass(frozen=True)
class SingularVerificationReport:
    """Pontryagin-condition diagnostics for a bang-singular sequence.

    ``max_phi_violation`` is the largest positive excursion of
    ``2 - lam_v`` over the coast intervals: the switching function must not
    favor turning the control on there, which with the sign of the area
    multiplier reads ``lam_v >= 2``.  ``singular_y_deviation`` is the
    largest drift of the displacement from the hold value on the hold
    segment.
    """

    lam_v_at_0: float
    lam_v_at_T: float
    max_phi_violation: float
    singular_y_deviation: float

    def to_json_dict(self) -> dict:
        return {
            "lam_v_at_0": self.lam_v_at_0,
            "lam_v_at_T": self.lam_v_at_T,
            "max_phi_violation": self.max_phi_violation,
            "singular_y_deviation": self.singular_y_deviation,
        }


def verify_singular_conditions(
    seq: PulseSequence, steps: int = 20000
) -> SingularVerificationReport:
    """Check a sequence against the conditions defining the hold segment.

    The spring is simulated, the adjoint pair is integrated over both
    coast intervals with the simulated displacement, and the report
    collects the boundary multiplier values, the worst switching-function
    sign violation and the hold-segment displacement drift.  Report-only:
    nothing is raised for a failed condition.
    """
    traj = simulate_spring(seq.as_control_signal(), seq.params, steps=steps)
    gamma = seq.params.gamma
    T = seq.params.duration
    y_s = -2.0 * seq.u_s

    def simulated_ratio(t):
        return float(np.interp(t, traj.times, traj.y)) / y_s

    violations = [0.0]
    n1 = max(int(steps * seq.t1 / T), 1000)
    _, lvs0 = _integrate_adjoint(gamma, seq.t1, 0.0, simulated_ratio, n1)
    violations.append(float(np.max(LAM_V_SINGULAR - lvs0)))
    lam_v0 = float(lvs0[-1])

    n2 = max(int(steps * (T - seq.t2) / T), 1000)
    _, lvsT = _integrate_adjoint(gamma, seq.t2, T, simulated_ratio, n2)
    violations.append(float(np.max(LAM_V_SINGULAR - lvsT)))
    lam_vT = float(lvsT[-1])

    if seq.t2 > seq.t1:
        inside = (traj.times >= seq.t1) & (traj.times <= seq.t2)
        deviation = float(np.max(np.abs(traj.y[inside] - y_s))) if inside.any() else 0.0
    else:
        deviation = 0.0  # empty hold segment
    return SingularVerificationReport(
        lam_v_at_0=lam_v0,
        lam_v_at_T=lam_vT,
        max_phi_violation=max(violations),
        singular_y_deviation=deviation,
    )
