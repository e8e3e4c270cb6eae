"""Exact-rational constraint assembly, KKT solve and control synthesis."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from stirap_spring import (
    DegreeRangeError,
    build_equality_constraints,
    control_area,
    polynomial_control_signal,
    simulate_spring,
    solve_polynomial,
    solve_polynomial_float,
    SystemParams,
)

F = Fraction

# Dependent-coefficient map for degree 12, derived by exact elimination of
# the boundary and area conditions (and re-verified below by substitution).
DEPENDENT_MAP_12 = (
    (F(1, 2), F(16, 9), F(4), F(80, 11), F(35, 3), F(224, 13)),
    (F(-5, 2), F(-25, 3), F(-18), F(-350, 11), F(-50), F(-945, 13)),
    (F(9, 2), F(40, 3), F(27), F(504, 11), F(70), F(1296, 13)),
    (F(-7, 2), F(-70, 9), F(-14), F(-245, 11), F(-98, 3), F(-588, 13)),
)
DEPENDENT_RHS_12 = (F(-140), F(420), F(-420), F(140))  # units of pi/T

TABLE_FREE = {
    8: (F(-10710), F(5355, 2)),
    10: (F(-526680), F(2317392, 5), F(-1106028, 5), F(1106028, 25)),
    12: (
        F(-9009000), F(74666592, 5), F(-80258178, 5), F(270197928, 25),
        F(-4144140), F(690690),
    ),
}
TABLE_COST = {8: F(735, 572), 10: F(6468, 5525), 12: F(9009, 8075)}


def test_constraint_blocks_for_degree_12():
    system = build_equality_constraints(12, 20.0)
    assert system.dependent_map == DEPENDENT_MAP_12
    assert system.dependent_rhs == DEPENDENT_RHS_12
    assert system.dependent_map[0][0] == F(1, 2)
    assert system.dependent_map[1][0] == F(-5, 2)
    assert system.dependent_rhs_values() == pytest.approx(
        [-7 * math.pi, 21 * math.pi, -21 * math.pi, 7 * math.pi], abs=1e-12
    )


@pytest.mark.parametrize("degree", range(7, 13))
def test_dependent_map_satisfies_raw_conditions(degree):
    # substitute a = (0,0,0, map@free + rhs, free) into the raw conditions
    system = build_equality_constraints(degree, 20.0)
    n_free = degree - 6
    free = [F(k * k - 3, k + 1) for k in range(1, n_free + 1)]  # arbitrary rationals
    dep = [
        sum(system.dependent_map[i][j] * free[j] for j in range(n_free))
        + system.dependent_rhs[i]
        for i in range(4)
    ]
    a = [F(0)] * 3 + dep + free
    assert sum(a) == 0
    assert sum(n * a[n] for n in range(degree + 1)) == 0
    assert sum(n * (n - 1) * a[n] for n in range(degree + 1)) == 0
    assert sum(a[n] / (n + 1) for n in range(degree + 1)) == F(-1)


@pytest.mark.parametrize("degree", range(7, 13))
def test_constraint_rank_is_seven(degree):
    system = build_equality_constraints(degree, 20.0)
    mat = np.array([[float(x) for x in row] for row in system.matrix])
    assert np.linalg.matrix_rank(mat) == 7
    assert system.rank == 7


def test_degree_out_of_range():
    for degree in (6, 13, 0):
        with pytest.raises(DegreeRangeError):
            build_equality_constraints(degree, 20.0)
        with pytest.raises(DegreeRangeError):
            solve_polynomial(degree, 20.0)


@pytest.mark.parametrize("degree", (8, 10, 12))
def test_optimal_free_coefficients_exact(degree):
    poly = solve_polynomial(degree, 20.0)
    assert poly.coefficients[7:] == TABLE_FREE[degree]
    assert poly.cost == TABLE_COST[degree]
    assert poly.coefficients[:3] == (F(0), F(0), F(0))


def test_odd_degrees_degenerate_to_even_solutions():
    p7 = solve_polynomial(7, 20.0)
    assert p7.coefficients[7] == 0
    p9 = solve_polynomial(9, 20.0)
    assert p9.coefficients[9] == 0
    assert p9.coefficients[7:9] == TABLE_FREE[8]
    assert p9.cost == TABLE_COST[8]
    p11 = solve_polynomial(11, 20.0)
    assert p11.coefficients[11] == 0
    assert p11.coefficients[7:11] == TABLE_FREE[10]
    assert p11.cost == TABLE_COST[10]


def test_costs_decrease_with_degree_toward_reference():
    costs = {n: solve_polynomial(n, 20.0).cost for n in (8, 10, 12)}
    assert costs[8] > costs[10] > costs[12] > 1  # units of the reference cost


def test_float_kkt_accuracy_degrades_with_conditioning():
    """Documents why the rational route is primary.

    The Hilbert-type block drives the KKT condition number from ~7e10 at
    degree 8 to ~4e17 at degree 12.  Rounding the system's entries to
    doubles already moves the exact minimizer by ~3e-5 (degree 10) and
    ~4e-2 (degree 12), so no double-precision solve can do better; only
    the degree-8 system is benign enough for float to track the rational
    solution closely.
    """
    errors = {}
    for degree in (8, 10, 12):
        rational = np.array(
            [float(c) for c in solve_polynomial(degree, 20.0).coefficients]
        )
        floated = solve_polynomial_float(degree, 20.0)
        scale = np.max(np.abs(rational))
        errors[degree] = np.max(np.abs(floated - rational)) / scale
    assert errors[8] < 1e-6
    assert errors[10] < 1e-3
    assert errors[12] < 1.0
    assert errors[8] < errors[10] < errors[12]
    assert errors[12] > 1e-6  # float genuinely cannot reproduce the table here


@pytest.mark.parametrize("gamma", (0.0, 0.1, 0.5, 1.5))
def test_area_is_rate_independent(gamma):
    sig = polynomial_control_signal(solve_polynomial(12, 20.0), gamma)
    assert abs(control_area(sig) - math.pi / 2) < 1e-10


def test_control_vanishes_at_boundaries():
    for degree in (8, 12):
        sig = polynomial_control_signal(solve_polynomial(degree, 20.0), 0.1)
        piece = sig.pieces[0]
        assert piece.value(0.0) == 0.0
        assert piece.value(20.0) == 0.0
        assert not sig.impulses


def test_highest_degree_control_has_negative_lobes():
    sig = polynomial_control_signal(solve_polynomial(12, 20.0), 0.1)
    ts = np.linspace(0.0, 20.0, 4001)
    u = sig.pieces[0].value(ts)
    head = u[ts < 5.0]
    tail = u[ts > 15.0]
    assert head.min() < -1e-3
    assert tail.min() < -1e-3
    assert u.max() > 0.0


@pytest.mark.parametrize("degree", (8, 10, 12))
def test_displacement_integral(degree):
    poly = solve_polynomial(degree, 20.0)
    val, _ = quad(lambda t: float(poly.displacement(t)), 0.0, 20.0, limit=200)
    assert abs(val + math.pi) < 1e-9


@pytest.mark.parametrize("degree", (8, 10, 12))
def test_spring_simulation_matches_closed_form_cost(degree):
    params = SystemParams(0.1, 20.0)
    poly = solve_polynomial(degree, 20.0)
    traj = simulate_spring(polynomial_control_signal(poly, 0.1), params, steps=20000)
    assert traj.endpoint_residual < 1e-7
    closed = poly.closed_form_cost(0.1)
    assert abs(traj.cost - closed) / closed < 1e-6


def test_json_export_shape():
    d = solve_polynomial(8, 20.0).to_json_dict()
    assert d["degree"] == 8
    assert d["cost"] == {"num": 735, "den": 572}
    assert len(d["coefficients"]) == 9
    assert d["coefficients"][7] == {"num": -10710, "den": 1}
    assert all(set(c) == {"num", "den"} for c in d["coefficients"])
