"""Shortcut-to-adiabaticity pulse design on the spin-to-spring mapping.

Synthesizes bang-singular and smooth polynomial control sequences that
transfer population through a lossy three-level system, by solving the
mapped driven-damped oscillator problem in closed form, and validates
every sequence on both the oscillator and the original Bloch dynamics.
"""

from .core import (
    AreaMismatchError,
    BracketError,
    ControlSignal,
    DarkBrightState,
    DegreeRangeError,
    DurationTooShortError,
    Impulse,
    MalformedSignalError,
    NegativeElementError,
    PulseDesignError,
    PulseSequence,
    SingularCoefficientError,
    SmoothPiece,
    SpinStateXYZ,
    SpringState,
    SwitchOrderingError,
    SystemParams,
    control_area,
    from_dark_bright,
    pulse_sequence_from_json,
    to_dark_bright,
)
from .optimal import (
    AdjointState,
    MultipleRootsWarning,
    SingularVerificationReport,
    adjoint_boundary_values,
    integrate_adjoint_boundary,
    sequence_from_switch_times,
    solve_optimal,
    solve_switch_time_t1,
    solve_switch_time_t2,
    verify_singular_conditions,
)
from .polynomial import (
    ConstraintSystem,
    PolynomialControl,
    build_equality_constraints,
    polynomial_control_signal,
    solve_polynomial,
    solve_polynomial_float,
)
from .spin import (
    METHODS,
    SpinTrajectory,
    ThetaTrajectory,
    efficiency_of,
    signal_for_method,
    simulate_spin,
    theta_trajectory,
)
from .spring import (
    SpringTrajectory,
    free_evolution,
    reference_cost,
    simulate_spring,
)
from .suboptimal import min_singular_duration, solve_suboptimal, turning_time

__version__ = "0.1.0"

__all__ = [
    "AdjointState",
    "AreaMismatchError",
    "BracketError",
    "ConstraintSystem",
    "ControlSignal",
    "DarkBrightState",
    "DegreeRangeError",
    "DurationTooShortError",
    "Impulse",
    "MalformedSignalError",
    "METHODS",
    "MultipleRootsWarning",
    "NegativeElementError",
    "PolynomialControl",
    "PulseDesignError",
    "PulseSequence",
    "SingularCoefficientError",
    "SingularVerificationReport",
    "SmoothPiece",
    "SpinStateXYZ",
    "SpinTrajectory",
    "SpringState",
    "SpringTrajectory",
    "SwitchOrderingError",
    "SystemParams",
    "ThetaTrajectory",
    "adjoint_boundary_values",
    "build_equality_constraints",
    "control_area",
    "efficiency_of",
    "free_evolution",
    "from_dark_bright",
    "integrate_adjoint_boundary",
    "min_singular_duration",
    "polynomial_control_signal",
    "pulse_sequence_from_json",
    "reference_cost",
    "sequence_from_switch_times",
    "signal_for_method",
    "simulate_spin",
    "simulate_spring",
    "solve_optimal",
    "solve_polynomial",
    "solve_polynomial_float",
    "solve_suboptimal",
    "solve_switch_time_t1",
    "solve_switch_time_t2",
    "theta_trajectory",
    "to_dark_bright",
    "turning_time",
    "verify_singular_conditions",
]
