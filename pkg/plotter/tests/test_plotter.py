"""Plotter tests: inputs come from the design CLI, never from its library.

The design tool is exercised through its installed ``stirap-spring``
command so the plotter sees exactly the file contracts an external user
would produce.
"""

import json
import subprocess
import sys

import pytest

from stirap_plot import (
    HeaderMismatchError,
    PlotDataError,
    build_sweep_figure,
    build_trajectory_figure,
    impulse_schedule,
    plot_contour,
    plot_sweep,
    plot_trajectory,
)
from stirap_plot.cli import main


def run_design_tool(*args):
    proc = subprocess.run(
        ["stirap-spring", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def design_outputs(tmp_path_factory):
    """CSV/JSON inputs for the worked case (gamma 0.1, duration 20)."""
    root = tmp_path_factory.mktemp("design")
    traj = root / "traj.csv"
    seq = root / "seq.json"
    run_design_tool(
        "simulate", "--method", "optimal", "--gamma", "0.1", "--duration", "20",
        "--steps", "2000", "--out", str(traj), "--json", str(seq),
    )
    poly_traj = root / "poly_traj.csv"
    poly_json = root / "poly.json"
    run_design_tool(
        "simulate", "--method", "poly", "--degree", "12", "--gamma", "0.1",
        "--duration", "20", "--steps", "2000", "--out", str(poly_traj),
        "--json", str(poly_json),
    )
    sweep = root / "sweep.csv"
    run_design_tool(
        "sweep", "--gamma", "0.1", "--t-min", "5", "--t-max", "13",
        "--t-step", "2", "--methods", "suboptimal,optimal,poly8",
        "--steps", "2000", "--out", str(sweep),
    )
    contour = root / "contour.csv"
    run_design_tool(
        "contour", "--gamma", "0.1", "--duration", "20",
        "--t1", "3.7:4.7:5", "--t2", "15.1:16.1:5", "--steps", "2000",
        "--out", str(contour),
    )
    return {
        "traj": traj, "seq": seq, "poly_traj": poly_traj, "poly_json": poly_json,
        "sweep": sweep, "contour": contour,
    }


def test_never_imports_the_design_library():
    # run in a clean interpreter: importing the plotter must not pull in
    # the design library (the plotter owns no physics)
    probe = (
        "import sys, stirap_plot; "
        "sys.exit(1 if 'stirap_spring' in sys.modules else 0)"
    )
    assert subprocess.run([sys.executable, "-c", probe]).returncode == 0


def test_impulse_schedule_from_declared_fields(design_outputs):
    seq = json.loads(design_outputs["seq"].read_text())
    kicks = impulse_schedule(seq)
    assert [time for time, _ in kicks] == [0.0, seq["t1"], seq["t2"], seq["duration"]]
    assert [mag for _, mag in kicks] == [seq["v1"], seq["v2"], seq["v3"], seq["v4"]]
    assert impulse_schedule(json.loads(design_outputs["poly_json"].read_text())) == []


def test_trajectory_figure_has_arrows_at_declared_kicks(design_outputs):
    fig, kicks = build_trajectory_figure(
        design_outputs["traj"], design_outputs["seq"]
    )
    assert len(fig.axes) == 4
    ax_u = fig.axes[0]
    arrow_x = sorted(ann.xy[0] for ann in ax_u.texts if ann.arrowprops)
    assert arrow_x == sorted(time for time, _ in kicks)
    assert len(arrow_x) == 4


def test_plot_trajectory_writes_png_and_svg(design_outputs, tmp_path):
    png = plot_trajectory(
        design_outputs["traj"], design_outputs["seq"], tmp_path / "traj.png"
    )
    svg = plot_trajectory(
        design_outputs["traj"], design_outputs["seq"], tmp_path / "traj.svg"
    )
    assert png.stat().st_size > 1000
    assert svg.read_text().startswith("<?xml")


def test_plot_trajectory_polynomial_inputs(design_outputs, tmp_path):
    fig, kicks = build_trajectory_figure(
        design_outputs["poly_traj"], design_outputs["poly_json"]
    )
    assert kicks == []
    out = plot_trajectory(
        design_outputs["poly_traj"], design_outputs["poly_json"],
        tmp_path / "poly.png",
    )
    assert out.exists()


def test_plot_sweep_skips_invalid_rows(design_outputs, tmp_path, capsys):
    # durations 5 and 7 are structurally invalid for the kick sequences
    out = plot_sweep(design_outputs["sweep"], None, tmp_path / "sweep.png")
    assert out.exists()
    note = capsys.readouterr().out
    assert "skipping" in note and "invalid" in note


def test_plot_sweep_with_overlay_series(design_outputs, tmp_path):
    overlay = tmp_path / "overlay.csv"
    overlay.write_text(
        "duration,efficiency\n9,0.91\n11,0.93\n13,0.95\n"
    )
    fig = build_sweep_figure(design_outputs["sweep"], overlay)
    labels = {line.get_label() for ax in fig.axes for line in ax.get_lines()}
    assert "external baseline" in labels
    out = plot_sweep(design_outputs["sweep"], overlay, tmp_path / "sweep2.png")
    assert out.exists()


def test_sweep_header_mismatch_rejected(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("method,gamma,duration,eff\nx,0.1,10,0.5\n")
    with pytest.raises(HeaderMismatchError):
        plot_sweep(bad, None, tmp_path / "x.png")


def test_plot_contour(design_outputs, tmp_path, capsys):
    out = plot_contour(
        design_outputs["contour"], tmp_path / "contour.png",
        mark=(4.1808, 15.6159),
    )
    assert out.exists()


def test_empty_csv_is_an_error(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("t,theta,X,Y,Z,pop1,pop2,pop3\n")
    with pytest.raises(PlotDataError):
        plot_trajectory(empty, tmp_path / "s.json", tmp_path / "x.png")


def test_cli_trajectory_and_error_paths(design_outputs, tmp_path, capsys):
    out = tmp_path / "cli_traj.png"
    assert main([
        "trajectory", "--traj", str(design_outputs["traj"]),
        "--sequence", str(design_outputs["seq"]), "--out", str(out),
    ]) == 0
    assert out.exists()
    empty = tmp_path / "empty.csv"
    empty.write_text("t,theta,X,Y,Z,pop1,pop2,pop3\n")
    code = main([
        "trajectory", "--traj", str(empty),
        "--sequence", str(design_outputs["seq"]), "--out", str(tmp_path / "n.png"),
    ])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_cli_sweep_and_contour(design_outputs, tmp_path):
    assert main([
        "sweep", "--sweep", str(design_outputs["sweep"]),
        "--out", str(tmp_path / "cli_sweep.svg"),
    ]) == 0
    assert main([
        "contour", "--contour", str(design_outputs["contour"]),
        "--mark", "4.1808,15.6159", "--out", str(tmp_path / "cli_contour.png"),
    ]) == 0
    assert (tmp_path / "cli_sweep.svg").exists()
    assert (tmp_path / "cli_contour.png").exists()
