"""Shared fixtures: the worked reference case is gamma=0.1, duration=20."""

import pytest

from stirap_spring import (
    SystemParams,
    simulate_spin,
    simulate_spring,
    solve_optimal,
    solve_suboptimal,
)


@pytest.fixture(scope="session")
def params01() -> SystemParams:
    return SystemParams(gamma=0.1, duration=20.0)


@pytest.fixture(scope="session")
def subopt01(params01):
    return solve_suboptimal(params01)


@pytest.fixture(scope="session")
def opt01(params01):
    return solve_optimal(params01)


@pytest.fixture(scope="session")
def spring_subopt01(params01, subopt01):
    return simulate_spring(subopt01.as_control_signal(), params01, steps=20000)


@pytest.fixture(scope="session")
def spring_opt01(params01, opt01):
    return simulate_spring(opt01.as_control_signal(), params01, steps=20000)


@pytest.fixture(scope="session")
def spin_subopt01(params01, subopt01):
    return simulate_spin(subopt01.as_control_signal(), params01, steps=20000)


@pytest.fixture(scope="session")
def spin_opt01(params01, opt01):
    return simulate_spin(opt01.as_control_signal(), params01, steps=20000)
