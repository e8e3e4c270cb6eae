"""Figure builders for trajectory panels, duration sweeps and contours.

Pure rendering: every plotted number comes from an input file.  The
control panel of a kick sequence is drawn from the declared plateau and
kick magnitudes; for polynomial controls it is recovered by finite
differences of the tabulated mixing angle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (
    PlotDataError,
    impulse_schedule,
    read_contour,
    read_overlay,
    read_sequence,
    read_sweep,
    read_trajectory,
)

# Marker/colour conventions, one entry per synthesis method.
METHOD_STYLE = {
    "optimal": dict(marker="*", color="tab:green", label="optimal"),
    "suboptimal": dict(marker="o", color="black", label="suboptimal"),
    "poly8": dict(marker="^", color="dimgray", label="poly N=8"),
    "poly10": dict(marker="^", color="tab:red", label="poly N=10"),
    "poly12": dict(marker="^", color="tab:blue", label="poly N=12"),
}
OVERLAY_STYLE = dict(
    marker="v", color="tab:red", markerfacecolor="none", linestyle="none",
    label="external baseline",
)

plt.rcParams["svg.hashsalt"] = "stirap-plot"  # deterministic SVG ids


@dataclass(frozen=True)
class FigureSpec:
    """What to render: input paths, output path and style knobs."""

    kind: str  # trajectory-panels | sweep | contour
    inputs: tuple[str, ...]
    output: str
    options: dict = field(default_factory=dict)


def _save(fig, out_image) -> Path:
    out = Path(out_image)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    return out


def _declared_control_curve(sequence: dict, ts: np.ndarray) -> np.ndarray:
    """Piecewise-constant smooth part declared by a kick-sequence JSON."""
    u = np.zeros_like(ts)
    inside = (ts >= float(sequence["t1"])) & (ts <= float(sequence["t2"]))
    u[inside] = float(sequence["u_s"])
    return u


def _finite_difference_control(t: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Control recovered as the slope of the tabulated mixing angle."""
    return np.gradient(theta, t)


def build_trajectory_figure(traj_csv, sequence_json):
    """Assemble the four-panel figure; returns (figure, kick schedule)."""
    data = read_trajectory(traj_csv)
    sequence = read_sequence(sequence_json)
    kicks = impulse_schedule(sequence)
    t = data["t"]
    theta = data["theta"]

    fig, axes = plt.subplots(2, 2, figsize=(9.5, 6.5))
    ax_u, ax_theta, ax_fields, ax_pop = axes.ravel()

    if kicks:
        u = _declared_control_curve(sequence, t)
    else:
        u = _finite_difference_control(t, theta)
    ax_u.plot(t, u, color="tab:blue")
    top = max(float(np.max(np.abs(u))), max((m for _, m in kicks), default=0.0))
    for time, magnitude in kicks:
        ax_u.annotate(
            "",
            xy=(time, magnitude),
            xytext=(time, 0.0),
            arrowprops=dict(arrowstyle="-|>", color="tab:red", lw=1.6),
        )
    ax_u.set_xlabel("t")
    ax_u.set_ylabel("u")
    ax_u.set_ylim(min(float(np.min(u)) * 1.15, -0.02 * top), top * 1.15)

    ax_theta.plot(t, theta, color="tab:blue")
    ax_theta.axhline(np.pi / 2, color="gray", lw=0.6, ls=":")
    ax_theta.set_xlabel("t")
    ax_theta.set_ylabel(r"$\theta$")

    ax_fields.plot(t, np.sin(theta), color="tab:red", label=r"$\Omega_p$")
    ax_fields.plot(t, np.cos(theta), "--", color="tab:blue", label=r"$\Omega_s$")
    ax_fields.set_xlabel("t")
    ax_fields.set_ylabel("field amplitude")
    ax_fields.legend(loc="center right", fontsize=8)

    ax_pop.plot(t, data["pop1"], "--", color="black", label="initial")
    ax_pop.plot(t, data["pop2"], "-.", color="tab:blue", label="intermediate")
    ax_pop.plot(t, data["pop3"], "-", color="tab:red", label="target")
    ax_pop.set_xlabel("t")
    ax_pop.set_ylabel("population")
    ax_pop.set_ylim(-0.02, 1.05)
    ax_pop.legend(loc="center left", fontsize=8)

    fig.tight_layout()
    return fig, kicks


def plot_trajectory(traj_csv, sequence_json, out_image) -> Path:
    """Render control, mixing angle, fields and populations to a file."""
    fig, _kicks = build_trajectory_figure(traj_csv, sequence_json)
    return _save(fig, out_image)


def build_sweep_figure(sweep_csv, overlay_csv=None):
    records = read_sweep(sweep_csv)
    skipped = [r for r in records if r["efficiency"] is None]
    if skipped:
        print(f"note: skipping {len(skipped)} invalid sweep records "
              f"({sorted({r['valid'] for r in skipped})})")
    gammas = sorted({r["gamma"] for r in records})
    fig, axes = plt.subplots(
        1, max(len(gammas), 1), figsize=(5.0 * max(len(gammas), 1), 3.8),
        squeeze=False,
    )
    for ax, gamma in zip(axes.ravel(), gammas):
        for method, style in METHOD_STYLE.items():
            pts = sorted(
                (r["duration"], r["efficiency"])
                for r in records
                if r["method"] == method and r["gamma"] == gamma
                and r["efficiency"] is not None
            )
            if pts:
                ds, es = zip(*pts)
                ax.plot(ds, es, linestyle="-", lw=0.7, markersize=5, **style)
        if overlay_csv is not None:
            overlay = sorted(
                (r["duration"], r["efficiency"]) for r in read_overlay(overlay_csv)
            )
            ds, es = zip(*overlay)
            ax.plot(ds, es, markersize=6, **OVERLAY_STYLE)
        ax.set_xlabel("duration")
        ax.set_ylabel("target population")
        ax.set_title(f"decay rate {gamma:g}")
        ax.legend(fontsize=7)
    fig.tight_layout()
    return fig


def plot_sweep(sweep_csv, overlay_csv=None, out_image="sweep.png") -> Path:
    """Render efficiency-versus-duration series, one marker set per method."""
    fig = build_sweep_figure(sweep_csv, overlay_csv)
    return _save(fig, out_image)


def build_contour_figure(contour_csv, mark=None):
    records = read_contour(contour_csv)
    valid = [r for r in records if r["efficiency"] is not None]
    if not valid:
        raise PlotDataError(f"{contour_csv}: no valid contour records")
    dropped = len(records) - len(valid)
    if dropped:
        print(f"note: dropping {dropped} invalid contour points")
    t1 = np.array([r["t1"] for r in valid])
    t2 = np.array([r["t2"] for r in valid])
    eff = np.array([r["efficiency"] for r in valid])
    fig, ax = plt.subplots(figsize=(5.4, 4.2))
    tri = ax.tricontourf(t1, t2, eff, levels=30, cmap="viridis")
    fig.colorbar(tri, ax=ax, label="target population")
    if mark is not None:
        ax.plot([mark[0]], [mark[1]], "x", color="black", markersize=9, mew=2)
    ax.set_xlabel("entry switch time")
    ax.set_ylabel("release switch time")
    fig.tight_layout()
    return fig


def plot_contour(contour_csv, out_image, mark=None) -> Path:
    """Render a switch-time efficiency map; invalid grid points are dropped."""
    fig = build_contour_figure(contour_csv, mark=mark)
    return _save(fig, out_image)
