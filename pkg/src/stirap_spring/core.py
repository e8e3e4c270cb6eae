"""Shared domain types for spring-mapped STIRAP pulse design.

Everything here is dimensionless: the total Rabi frequency is the unit of
rate, its inverse the unit of time.  A control sequence is represented as a
:class:`ControlSignal`, the sum of a train of positive impulses (delta
kicks) and a piecewise-smooth part made of zero, constant ("singular") and
polynomial segments.  Impulses are first-class objects rather than tall
narrow pulses, so the simulators can apply their exact jump maps: a kick of
magnitude ``m`` shifts the spring velocity by ``-m/2`` and the mixing angle
by ``+m``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import quad

HALF_PI = math.pi / 2

# Impulses closer in time than this (relative to the duration) are merged.
_MERGE_TOL = 1e-12

# Tolerance on the pulse-area identity of a solver-built sequence.
_AREA_TOL = 1e-12


class PulseDesignError(ValueError):
    """Base class for all structural pulse-design failures."""

    code = "error"


class MalformedSignalError(PulseDesignError):
    code = "malformed-signal"


class AreaMismatchError(PulseDesignError):
    code = "area-mismatch"


class DurationTooShortError(PulseDesignError):
    code = "duration-too-short"


class BracketError(PulseDesignError):
    """No sign change of a switching-time residual inside its bracket."""

    code = "no-sign-change"


class SwitchOrderingError(PulseDesignError):
    code = "ordering"


class NegativeElementError(PulseDesignError):
    code = "negative-element"


class SingularCoefficientError(PulseDesignError):
    code = "singular-coefficient"


class DegreeRangeError(PulseDesignError):
    code = "degree-range"


@dataclass(frozen=True)
class SystemParams:
    """Decay rate and total duration, in total-Rabi-frequency units.

    Only the underdamped regime ``gamma < 2`` is supported; there the
    spring's free motion keeps its oscillatory closed form.
    """

    gamma: float
    duration: float

    def __post_init__(self):
        if not 0.0 <= self.gamma < 2.0:
            raise ValueError(
                f"gamma must satisfy 0 <= gamma < 2 (underdamped), got {self.gamma}"
            )
        if not self.duration > 0.0:
            raise ValueError(f"duration must be positive, got {self.duration}")


@dataclass(frozen=True)
class SpinStateXYZ:
    """Bloch vector of the real-valued three-level system.

    ``Z**2``, ``Y**2`` and ``X**2`` are the populations of the initial,
    intermediate (lossy) and target states, respectively.  The transfer
    starts at the north pole (0, 0, 1).
    """

    X: float
    Y: float
    Z: float

    def norm(self) -> float:
        return math.sqrt(self.X**2 + self.Y**2 + self.Z**2)


@dataclass(frozen=True)
class DarkBrightState:
    """State in the frame rotating with the mixing angle.

    ``z`` is the dark-state amplitude, ``x`` the bright one; ``y`` stays the
    intermediate-state amplitude.
    """

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


@dataclass(frozen=True)
class SpringState:
    """Displacement and velocity of the mapped oscillator."""

    y: float
    v: float


def to_dark_bright(state: SpinStateXYZ, theta: float) -> DarkBrightState:
    """Rotate a Bloch state into the dark/bright frame at mixing angle ``theta``."""
    c, s = math.cos(theta), math.sin(theta)
    return DarkBrightState(
        x=state.Z * s - state.X * c,
        y=state.Y,
        z=state.Z * c + state.X * s,
    )


def from_dark_bright(state: DarkBrightState, theta: float) -> SpinStateXYZ:
    """Inverse of :func:`to_dark_bright` (the rotation is orthogonal)."""
    c, s = math.cos(theta), math.sin(theta)
    return SpinStateXYZ(
        X=state.z * s - state.x * c,
        Y=state.y,
        Z=state.z * c + state.x * s,
    )


@dataclass(frozen=True)
class Impulse:
    """A delta kick: ``magnitude`` is the area under the spike."""

    time: float
    magnitude: float

    def __post_init__(self):
        if not self.magnitude > 0.0:
            raise NegativeElementError(
                f"impulse magnitude must be positive, got {self.magnitude}"
            )
        if self.time < 0.0:
            raise MalformedSignalError(f"impulse time must be >= 0, got {self.time}")


@dataclass(frozen=True)
class SmoothPiece:
    """One segment of the smooth control on ``[start, end]``.

    A piece is a constant level (zero segments are constants at level 0),
    a plain polynomial ``u(t) = sum_k poly[k] (t/scale)**k``, or an
    arbitrary smooth ``form`` object exposing ``value(t)`` and
    ``integral(t0, t)`` (used for polynomial-derived controls whose
    monomial coefficients would be too ill-conditioned to evaluate
    directly).
    """

    start: float
    end: float
    level: float = 0.0
    poly: tuple[float, ...] | None = None
    scale: float = 1.0
    form: object | None = None

    def __post_init__(self):
        if not self.end > self.start:
            raise MalformedSignalError(
                f"piece must have end > start, got [{self.start}, {self.end}]"
            )
        if self.poly is not None and self.scale <= 0.0:
            raise MalformedSignalError("polynomial piece needs a positive scale")
        if self.poly is not None and self.form is not None:
            raise MalformedSignalError("give either poly coefficients or a form")

    @property
    def is_constant(self) -> bool:
        return self.poly is None and self.form is None

    def value(self, t):
        """Control value at time ``t`` (scalar or ndarray)."""
        if self.form is not None:
            return self.form.value(t)
        if self.poly is None:
            return self.level if np.isscalar(t) else np.full_like(np.asarray(t, float), self.level)
        s = np.asarray(t, float) / self.scale
        out = np.polynomial.polynomial.polyval(s, np.asarray(self.poly))
        return float(out) if np.isscalar(t) else out

    def antiderivative(self, t):
        """Integral of the control from ``start`` to ``t``."""
        if self.form is not None:
            return self.form.integral(self.start, t)
        if self.poly is None:
            return self.level * (np.asarray(t, float) - self.start)
        coeffs = np.asarray(self.poly)
        integ = np.concatenate(([0.0], coeffs / np.arange(1, len(coeffs) + 1)))
        s = np.asarray(t, float) / self.scale
        s0 = self.start / self.scale
        pv = np.polynomial.polynomial.polyval
        return self.scale * (pv(s, integ) - pv(s0, integ))


def _merge_impulses(impulses: Iterable[Impulse], duration: float) -> tuple[Impulse, ...]:
    tol = _MERGE_TOL * max(1.0, duration)
    merged: list[Impulse] = []
    for imp in sorted(impulses, key=lambda i: i.time):
        if merged and imp.time - merged[-1].time <= tol:
            prev = merged.pop()
            merged.append(Impulse(prev.time, prev.magnitude + imp.magnitude))
        else:
            merged.append(imp)
    return tuple(merged)


@dataclass(frozen=True)
class ControlSignal:
    """Impulse train plus piecewise-smooth control on ``[0, duration]``.

    Pieces must be sorted and non-overlapping; gaps are implicitly zero.
    Coincident impulses are merged by summing magnitudes (the well-defined
    limit of two kicks collapsing onto the same instant).
    """

    duration: float
    impulses: tuple[Impulse, ...] = ()
    pieces: tuple[SmoothPiece, ...] = ()

    def __post_init__(self):
        if not self.duration > 0.0:
            raise MalformedSignalError("signal duration must be positive")
        object.__setattr__(
            self, "impulses", _merge_impulses(self.impulses, self.duration)
        )
        tol = _MERGE_TOL * max(1.0, self.duration)
        for imp in self.impulses:
            if imp.time > self.duration + tol:
                raise MalformedSignalError(
                    f"impulse at t={imp.time} outside [0, {self.duration}]"
                )
        pieces = tuple(sorted(self.pieces, key=lambda p: p.start))
        object.__setattr__(self, "pieces", pieces)
        prev_end = 0.0
        for p in pieces:
            if p.start < -tol or p.end > self.duration + tol:
                raise MalformedSignalError(
                    f"piece [{p.start}, {p.end}] outside [0, {self.duration}]"
                )
            if p.start < prev_end - tol:
                raise MalformedSignalError(
                    f"overlapping smooth pieces near t={p.start}"
                )
            prev_end = p.end

    def smooth_value(self, t: float) -> float:
        """Smooth part of the control at ``t`` (0 in gaps)."""
        for p in self.pieces:
            if p.start <= t <= p.end:
                return float(p.value(t))
        return 0.0

    def breakpoints(self) -> np.ndarray:
        """Sorted unique event times: endpoints, piece bounds, impulse times."""
        ts = {0.0, self.duration}
        ts.update(p.start for p in self.pieces)
        ts.update(p.end for p in self.pieces)
        ts.update(i.time for i in self.impulses)
        return np.array(sorted(t for t in ts if 0.0 <= t <= self.duration))

    def to_json_dict(self) -> dict:
        d: dict = {
            "duration": self.duration,
            "impulses": [
                {"time": i.time, "magnitude": i.magnitude} for i in self.impulses
            ],
            "pieces": [],
        }
        for p in self.pieces:
            entry: dict = {"start": p.start, "end": p.end}
            if p.form is not None:
                entry["form"] = p.form.to_json_dict()
            elif p.poly is not None:
                entry["poly"] = list(p.poly)
                entry["scale"] = p.scale
            else:
                entry["level"] = p.level
            d["pieces"].append(entry)
        return d


def control_area(signal: ControlSignal) -> float:
    """Total area of the control: impulse magnitudes plus the smooth integral.

    Constant segments integrate exactly; polynomial segments go through
    adaptive quadrature at relative tolerance 1e-13.  A valid transfer
    sequence has area ``pi/2``, the net mixing-angle sweep.
    """
    area = sum(i.magnitude for i in signal.impulses)
    for p in signal.pieces:
        if p.is_constant:
            area += p.level * (p.end - p.start)
        else:
            val, _err = quad(
                lambda t: float(p.value(t)), p.start, p.end,
                epsabs=1e-14, epsrel=1e-13, limit=200,
            )
            area += val
    return area


@dataclass(frozen=True)
class PulseSequence:
    """Bang-singular transfer sequence: impulses around a constant plateau.

    The suboptimal variant kicks only at the endpoints (``v3``/``v4``
    absent); the optimal one adds interior kicks at the switch times.  The
    singular level ``u_s`` acts on ``[t1, t2]``.  Construction validates
    positivity, switch ordering and the pulse-area identity
    ``sum(impulses) + (t2 - t1) u_s == pi/2``.
    """

    params: SystemParams
    kind: str
    v1: float
    v2: float
    u_s: float
    t1: float
    t2: float
    v3: float | None = None
    v4: float | None = None

    def __post_init__(self):
        if self.kind not in ("suboptimal", "optimal"):
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        has34 = self.v3 is not None or self.v4 is not None
        if self.kind == "suboptimal" and has34:
            raise ValueError("suboptimal sequences carry only v1 and v2")
        if self.kind == "optimal" and (self.v3 is None or self.v4 is None):
            raise ValueError("optimal sequences need v3 and v4")
        for name in ("v1", "v2", "v3", "v4", "u_s"):
            val = getattr(self, name)
            if val is not None and not val > 0.0:
                raise NegativeElementError(f"{name} must be positive, got {val}")
        T = self.params.duration
        # t1 == t2 is tolerated as the degenerate empty singular arc.
        if not (0.0 < self.t1 <= self.t2 < T):
            raise SwitchOrderingError(
                f"switch times must satisfy 0 < t1 <= t2 < {T}, "
                f"got t1={self.t1}, t2={self.t2}"
            )
        if abs(self.area() - HALF_PI) > _AREA_TOL:
            raise AreaMismatchError(
                f"pulse-area identity violated: area={self.area()!r}"
            )

    def impulse_magnitudes(self) -> tuple[float, ...]:
        if self.kind == "suboptimal":
            return (self.v1, self.v2)
        return (self.v1, self.v2, self.v3, self.v4)

    def impulse_schedule(self) -> tuple[Impulse, ...]:
        """Kicks with their instants of application."""
        T = self.params.duration
        if self.kind == "suboptimal":
            return (Impulse(0.0, self.v1), Impulse(T, self.v2))
        return (
            Impulse(0.0, self.v1),
            Impulse(self.t1, self.v2),
            Impulse(self.t2, self.v3),
            Impulse(T, self.v4),
        )

    def area(self) -> float:
        return sum(self.impulse_magnitudes()) + (self.t2 - self.t1) * self.u_s

    def as_control_signal(self) -> ControlSignal:
        T = self.params.duration
        pieces = []
        if self.t1 > 0.0:
            pieces.append(SmoothPiece(0.0, self.t1, level=0.0))
        if self.t2 > self.t1:
            pieces.append(SmoothPiece(self.t1, self.t2, level=self.u_s))
        if T > self.t2:
            pieces.append(SmoothPiece(self.t2, T, level=0.0))
        return ControlSignal(
            duration=T, impulses=self.impulse_schedule(), pieces=tuple(pieces)
        )

    def to_json_dict(self) -> dict:
        d = {
            "gamma": self.params.gamma,
            "duration": self.params.duration,
            "kind": self.kind,
            "v1": self.v1,
            "v2": self.v2,
        }
        if self.v3 is not None:
            d["v3"] = self.v3
        if self.v4 is not None:
            d["v4"] = self.v4
        d["u_s"] = self.u_s
        d["t1"] = self.t1
        d["t2"] = self.t2
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def pulse_sequence_from_json(data: str | dict) -> PulseSequence:
    d = json.loads(data) if isinstance(data, str) else data
    return PulseSequence(
        params=SystemParams(gamma=d["gamma"], duration=d["duration"]),
        kind=d["kind"],
        v1=d["v1"],
        v2=d["v2"],
        v3=d.get("v3"),
        v4=d.get("v4"),
        u_s=d["u_s"],
        t1=d["t1"],
        t2=d["t2"],
    )
