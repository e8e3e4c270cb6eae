"""Figure rendering for the spring-designed STIRAP pulse toolkit.

Consumes only the CSV/JSON files the design tool emits; computes no
physics of its own.
"""

from .figures import (
    FigureSpec,
    build_sweep_figure,
    build_trajectory_figure,
    plot_contour,
    plot_sweep,
    plot_trajectory,
)
from .io import (
    HeaderMismatchError,
    MissingColumnError,
    PlotDataError,
    impulse_schedule,
    read_contour,
    read_sequence,
    read_sweep,
    read_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "HeaderMismatchError",
    "MissingColumnError",
    "PlotDataError",
    "build_sweep_figure",
    "build_trajectory_figure",
    "impulse_schedule",
    "plot_contour",
    "plot_sweep",
    "plot_trajectory",
    "read_contour",
    "read_sequence",
    "read_sweep",
    "read_trajectory",
]
