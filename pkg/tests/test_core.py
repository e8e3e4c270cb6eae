"""Frame transform, control-area and sequence-validation tests."""

import json
import math

import numpy as np
import pytest

from stirap_spring import (
    AreaMismatchError,
    ControlSignal,
    Impulse,
    MalformedSignalError,
    NegativeElementError,
    PulseSequence,
    SmoothPiece,
    SpinStateXYZ,
    SwitchOrderingError,
    SystemParams,
    control_area,
    from_dark_bright,
    pulse_sequence_from_json,
    to_dark_bright,
)

HALF_PI = math.pi / 2


def rotation_oracle(state, theta):
    """Independent 3x3 rotation-matrix route for the frame transform."""
    mat = np.array(
        [
            [-math.cos(theta), 0.0, math.sin(theta)],   # x row
            [0.0, 1.0, 0.0],                            # y row
            [math.sin(theta), 0.0, math.cos(theta)],    # z row
        ]
    )
    return mat @ np.array([state.X, state.Y, state.Z])


def test_dark_bright_identity_at_zero_angle():
    db = to_dark_bright(SpinStateXYZ(0.0, 0.0, 1.0), 0.0)
    assert (db.x, db.y, db.z) == (0.0, 0.0, 1.0)


def test_target_state_maps_to_dark_state_at_final_angle():
    db = to_dark_bright(SpinStateXYZ(1.0, 0.0, 0.0), HALF_PI)
    assert abs(db.x) < 1e-16
    assert db.y == 0.0
    assert abs(db.z - 1.0) < 1e-15


def test_dark_bright_matches_rotation_matrix_oracle():
    state = SpinStateXYZ(0.3, 0.1, 0.9)
    db = to_dark_bright(state, 0.7)
    expected = rotation_oracle(state, 0.7)
    assert abs(db.x - expected[0]) < 1e-15
    assert abs(db.y - expected[1]) < 1e-15
    assert abs(db.z - expected[2]) < 1e-15
    assert abs(db.norm() - state.norm()) < 1e-15


def test_transform_is_isometry_and_invertible():
    rng = np.random.default_rng(7)
    for _ in range(300):
        state = SpinStateXYZ(*rng.normal(size=3))
        theta = rng.uniform(-4.0, 4.0)
        db = to_dark_bright(state, theta)
        assert abs(db.norm() - state.norm()) < 1e-14
        back = from_dark_bright(db, theta)
        assert abs(back.X - state.X) < 1e-14
        assert abs(back.Y - state.Y) < 1e-14
        assert abs(back.Z - state.Z) < 1e-14


def test_control_area_trivia():
    assert control_area(ControlSignal(duration=5.0)) == 0.0
    single = ControlSignal(duration=5.0, impulses=(Impulse(0.0, HALF_PI),))
    assert control_area(single) == HALF_PI


def test_control_area_of_suboptimal_sequence(subopt01):
    area = control_area(subopt01.as_control_signal())
    assert abs(area - HALF_PI) < 1e-10


def test_control_area_quadrature_on_polynomial_piece():
    # u(t) = 3 (t/2)^2 on [0, 2] integrates to 2
    piece = SmoothPiece(0.0, 2.0, poly=(0.0, 0.0, 3.0), scale=2.0)
    sig = ControlSignal(duration=2.0, pieces=(piece,))
    assert abs(control_area(sig) - 2.0) < 1e-12


def test_coincident_impulses_merge():
    sig = ControlSignal(
        duration=4.0,
        impulses=(Impulse(1.0, 0.2), Impulse(1.0, 0.3), Impulse(2.0, 0.1)),
    )
    assert len(sig.impulses) == 2
    assert sig.impulses[0].magnitude == 0.5
    assert sig.impulses[1].magnitude == 0.1


def test_overlapping_pieces_rejected():
    with pytest.raises(MalformedSignalError):
        ControlSignal(
            duration=4.0,
            pieces=(SmoothPiece(0.0, 2.5, level=0.1), SmoothPiece(2.0, 4.0, level=0.2)),
        )


def test_impulse_outside_duration_rejected():
    with pytest.raises(MalformedSignalError):
        ControlSignal(duration=4.0, impulses=(Impulse(4.5, 0.1),))
    with pytest.raises(NegativeElementError):
        Impulse(1.0, -0.2)


def test_pulse_sequence_json_field_names(subopt01, opt01):
    d = subopt01.to_json_dict()
    assert list(d) == ["gamma", "duration", "kind", "v1", "v2", "u_s", "t1", "t2"]
    d_opt = opt01.to_json_dict()
    assert list(d_opt) == [
        "gamma", "duration", "kind", "v1", "v2", "v3", "v4", "u_s", "t1", "t2",
    ]


def test_pulse_sequence_json_round_trip(opt01, subopt01):
    for seq in (opt01, subopt01):
        back = pulse_sequence_from_json(json.loads(seq.to_json()))
        assert back == seq


def test_pulse_sequence_validation(params01):
    good = dict(v1=0.7, v2=HALF_PI - 0.8, u_s=0.01, t1=4.0, t2=14.0)
    PulseSequence(params=params01, kind="suboptimal", **good)
    with pytest.raises(NegativeElementError):
        PulseSequence(params=params01, kind="suboptimal",
                      **{**good, "v1": -0.7, "v2": HALF_PI + 0.6})
    with pytest.raises(SwitchOrderingError):
        PulseSequence(params=params01, kind="suboptimal",
                      **{**good, "t1": 15.0})
    with pytest.raises(AreaMismatchError):
        PulseSequence(params=params01, kind="suboptimal",
                      **{**good, "v1": 0.8})
    with pytest.raises(ValueError):
        PulseSequence(params=params01, kind="optimal", **good)


def test_degenerate_empty_singular_arc_allowed(params01):
    # t1 == t2 leaves no room for the plateau; the kicks carry all the area
    seq = PulseSequence(
        params=params01, kind="suboptimal",
        v1=HALF_PI / 2, v2=HALF_PI / 2, u_s=0.05, t1=8.0, t2=8.0,
    )
    assert seq.area() == pytest.approx(HALF_PI, abs=1e-15)


def test_system_params_validation():
    with pytest.raises(ValueError):
        SystemParams(gamma=2.0, duration=10.0)
    with pytest.raises(ValueError):
        SystemParams(gamma=-0.1, duration=10.0)
    with pytest.raises(ValueError):
        SystemParams(gamma=0.1, duration=0.0)
