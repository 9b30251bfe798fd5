"""Built-in benchmark plants.

``example1``: scalar non-affine plant with relative degree one and a
time-varying four-parameter vector.  ``example2``: Euler-discretized double
inverted pendulum, two coupled channels with relative degree two.
"""

from __future__ import annotations

import math

import numpy as np

from .adaptation import ProjectionBall
from .errors import ConfigurationError
from .plant import CoupledPlant, PlantSpec

EXAMPLE1_BALL = ProjectionBall(np.array([1.0, 1.0, 1.0, 1.0]), 0.9)
EXAMPLE2_THETA = (
    np.array([7.12, 30.0, 12.5, 40.0]),
    np.array([9.62, 24.0, 10.0, 32.0]),
)
EXAMPLE2_BALLS = (
    ProjectionBall(np.array([7.13, 29.98, 12.52, 39.97]), 0.11),
    ProjectionBall(np.array([9.63, 24.02, 9.98, 32.02]), 0.11),
)


def fixed_initial(values):
    values = tuple(float(v) for v in values)

    def initial(k):
        return values

    return initial


def uniform_initial(low: float, high: float, size: int, seed: int = 0, stream: int = 0):
    """Per-iteration uniform initial states, reproducible for each ``k`` on its own."""

    def initial(k):
        rng = np.random.default_rng([0x1A17, int(seed) & 0xFFFFFFFFFFFFFFFF, stream, int(k)])
        return rng.uniform(low, high, size=size)

    return initial


def _exp100(x):
    return math.exp(x / 100.0) if x < 70_000.0 else math.inf


def example1_regressor(X, u):
    x = float(X[0])
    return np.array([x * math.sin(x) / (1.0 + x * x), _exp100(x), u * u * u, math.atan(u) + u])


def example1_regressor_du(X, u):
    return np.array([0.0, 0.0, 3.0 * u * u, 1.0 / (1.0 + u * u) + 1.0])


def example1_theta(t):
    return np.array([
        0.5 + t / 50.0,
        0.75 + t / 75.0,
        1.5 + 0.5 * (-1.0) ** t,
        math.sin(math.pi / 4.0 + math.pi * t / 100.0),
    ])


def example1(initial_states=None, horizon: int = 50) -> PlantSpec:
    """Example 1 with ``x_k(0) = 0`` unless another reset rule is given."""
    return PlantSpec(
        regressor=example1_regressor,
        regressor_du=example1_regressor_du,
        theta_schedule=example1_theta,
        rho=1,
        horizon=horizon,
        p_dim=4,
        initial_states=initial_states or fixed_initial([0.0]),
        name="example1",
    )


def _pendulum_channel(i: int, initial_states, horizon: int) -> PlantSpec:
    j = 1 - i
    theta = EXAMPLE2_THETA[i]

    def regressor(Xs, u):
        return np.array([math.sin(Xs[i][1]), 1.0, math.sin(Xs[j][0] - Xs[j][1]), math.tanh(u)])

    def regressor_du(Xs, u):
        th = math.tanh(u)
        return np.array([0.0, 0.0, 0.0, 1.0 - th * th])

    def drift(Xs):
        return 2.0 * Xs[i][0] - Xs[i][1]

    return PlantSpec(
        regressor=regressor,
        regressor_du=regressor_du,
        drift=drift,
        theta_schedule=lambda t: theta,
        rho=2,
        horizon=horizon,
        p_dim=4,
        initial_states=initial_states,
        name=f"example2[{i + 1}]",
    )


def example2(seed: int = 0, horizon: int = 50, initial_states=None) -> CoupledPlant:
    """Both pendulum channels; initial angles uniform in ``[0, 0.1]`` per iteration."""
    inits = initial_states or [uniform_initial(0.0, 0.1, 2, seed, stream=i + 1) for i in range(2)]
    return CoupledPlant(tuple(_pendulum_channel(i, inits[i], horizon) for i in range(2)), name="example2")


PLANTS = {"example1": example1, "example2": example2}


def builtin_plant(name: str, **kwargs):
    try:
        return PLANTS[name](**kwargs)
    except KeyError:
        raise ConfigurationError(f"unknown built-in plant {name!r}; expected one of {sorted(PLANTS)}") from None
