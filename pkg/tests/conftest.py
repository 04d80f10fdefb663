"""Shared fixtures and the ODE-integration oracle."""

from typing import Callable, Tuple

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from src.algorithms import characteristic, coefficients


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def integrate_mathieu(
    alpha: complex,
    q: complex,
    start: float,
    stop: float,
    initial: Tuple[complex, complex],
    radial: bool = False,
) -> Tuple[complex, complex]:
    """Integrate the angular (or radial) Mathieu equation from start to stop.

    Angular: y'' = -(alpha - 2q cos 2x) y. Radial: y'' = (alpha - 2q cosh 2x) y.
    """

    def rhs(x, state):
        if radial:
            potential = alpha - 2.0 * q * np.cosh(2.0 * x)
            return [state[1], potential * state[0]]
        potential = alpha - 2.0 * q * np.cos(2.0 * x)
        return [state[1], -potential * state[0]]

    if stop == start:
        return complex(initial[0]), complex(initial[1])
    solution = solve_ivp(
        rhs,
        (start, stop),
        np.array(initial, dtype=complex),
        method="DOP853",
        rtol=1e-13,
        atol=1e-15,
    )
    assert solution.success, solution.message
    return complex(solution.y[0, -1]), complex(solution.y[1, -1])


@pytest.fixture
def ode_oracle() -> Callable[..., Tuple[complex, complex]]:
    return integrate_mathieu


@pytest.fixture
def fresh_caches():
    """Empty the coefficient and characteristic-value caches around a test."""
    characteristic.clear_cache()
    coefficients.clear_caches()
    yield
    characteristic.clear_cache()
    coefficients.clear_caches()
