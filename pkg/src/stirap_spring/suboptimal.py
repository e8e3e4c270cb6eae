"""Closed-form kick/coast/hold/coast/kick sequence.

The intuitive sequence kicks the oscillator at t=0, lets it coast until its
velocity first vanishes (time ``t1``), holds it there with the constant
singular level until ``t2``, then releases it so that it coasts back to
``y = 0`` exactly at the final time, where a last kick stops it.  Every
element follows in closed form from the free-motion solution; the first
kick ``v1`` is fixed by the pulse-area identity, which is linear in ``v1``
because the hold level and the final kick are both proportional to it.
"""

from __future__ import annotations

import math

from .core import (
    HALF_PI,
    DurationTooShortError,
    PulseSequence,
    SystemParams,
)


def min_singular_duration(gamma: float) -> float:
    """Shortest total duration that leaves room for a hold segment.

    Below ``4 pi / sqrt(4 - gamma^2)`` the release time would precede the
    first velocity zero and the sequence degenerates to kick-coast-kick.
    """
    if not 0.0 <= gamma < 2.0:
        raise ValueError(f"gamma must satisfy 0 <= gamma < 2, got {gamma}")
    return 4.0 * math.pi / math.sqrt(4.0 - gamma * gamma)


def turning_time(gamma: float) -> float:
    """First instant the freely coasting kicked oscillator has zero velocity."""
    k = math.sqrt(4.0 - gamma * gamma)
    return 4.0 * math.atan2(k, gamma) / k


def solve_suboptimal(params: SystemParams) -> PulseSequence:
    """Build the intuitive sequence for the given rate and duration.

    Raises
    ------
    DurationTooShortError
        If the duration does not exceed :func:`min_singular_duration`.
        The kick-coast-kick sequence taking over below that bound is not
        constructed here.
    """
    gamma, T = params.gamma, params.duration
    if T <= min_singular_duration(gamma):
        raise DurationTooShortError(
            f"duration {T} does not exceed the singular-arc bound "
            f"{min_singular_duration(gamma):.6g} for gamma={gamma}"
        )
    k = math.sqrt(4.0 - gamma * gamma)
    alpha = math.atan2(k, gamma)  # in (0, pi/2], -> pi/2 as gamma -> 0
    t1 = 4.0 * alpha / k
    t2 = T - 4.0 * (math.pi - alpha) / k
    hold_ratio = 0.5 * math.exp(-gamma * alpha / k)   # u_s / v1
    final_ratio = math.exp(-math.pi * gamma / k)      # v2 / v1
    v1 = HALF_PI / (1.0 + (t2 - t1) * hold_ratio + final_ratio)
    return PulseSequence(
        params=params,
        kind="suboptimal",
        v1=v1,
        v2=v1 * final_ratio,
        u_s=v1 * hold_ratio,
        t1=t1,
        t2=t2,
    )
