"""Discrete-time parameterized non-affine repetitive plants.

A plant advances as

    x_k(t + rho) = drift(X_k(t)) + theta(t)^T f(X_k(t), u_k(t)) + w_k(t),
    X_k(t) = [x_k(t + rho - 1), ..., x_k(t)]

where ``f`` is a known regressor, ``theta`` is hidden from the controller and
``drift`` is an optional known, parameter-free part (zero for most plants).
Time indices start at 0; the first ``rho`` states of every iteration come
from the reset and the input is applied for ``t = 0 .. horizon - rho``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, NumericalOverflowError, SequencingError

Regressor = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class PlantSpec:
    """Immutable description of a single-channel plant.

    ``initial_states(k)`` returns ``x_k(0), ..., x_k(rho - 1)``.  When the
    spec is a channel of a :class:`CoupledPlant`, ``regressor``, ``drift`` and
    ``regressor_du`` receive the stacked state matrix (row ``i`` is channel
    ``i``'s state vector) instead of the channel's own vector.
    """

    regressor: Regressor
    theta_schedule: Callable[[int], np.ndarray]
    rho: int
    horizon: int
    p_dim: int
    initial_states: Callable[[int], Sequence[float]]
    regressor_du: Optional[Regressor] = None
    drift: Optional[Callable[[np.ndarray], float]] = None
    name: str = "custom"

    def __post_init__(self):
        errors = []
        if int(self.rho) != self.rho or self.rho < 1:
            errors.append(f"rho must be a positive integer, got {self.rho!r}")
        if self.horizon < self.rho:
            errors.append(f"horizon ({self.horizon}) must be >= rho ({self.rho})")
        if self.p_dim < 1:
            errors.append(f"p_dim must be >= 1, got {self.p_dim!r}")
        if errors:
            raise ConfigurationError("; ".join(errors), errors)

    @property
    def n_times(self) -> int:
        """Number of control instants, ``horizon - rho + 1``."""
        return self.horizon - self.rho + 1

    def known_part(self, X) -> float:
        return 0.0 if self.drift is None else float(self.drift(X))

    def regressor_derivative(self, X, u: float) -> np.ndarray:
        """``df/du``; central differences with ``h = 1e-6 * max(1, |u|)`` if no derivative is given."""
        if self.regressor_du is not None:
            return np.asarray(self.regressor_du(X, u), dtype=float)
        h = 1e-6 * max(1.0, abs(u))
        fp = np.asarray(self.regressor(X, u + h), dtype=float)
        fm = np.asarray(self.regressor(X, u - h), dtype=float)
        return (fp - fm) / (2.0 * h)


@dataclass
class PlantState:
    """Trajectory of one iteration, filled causally by :func:`step`."""

    k: int
    rho: int
    x: np.ndarray
    w_applied: np.ndarray
    filled: np.ndarray = field(repr=False)

    def state_vector(self, t: int) -> np.ndarray:
        """Measured ``X_k(t) = [x(t+rho-1), ..., x(t)]``."""
        lo, hi = t, t + self.rho
        if lo < 0 or hi > len(self.x) or not self.filled[lo:hi].all():
            raise SequencingError(f"state entries x({lo}..{hi - 1}) not yet available at k={self.k}")
        return self.x[lo:hi][::-1].copy()


def reset(spec: PlantSpec, k: int) -> PlantState:
    """Start iteration ``k``: only ``x(0..rho-1)`` are set."""
    if k < 1:
        raise ConfigurationError(f"iteration index must be >= 1, got {k}")
    x0 = np.asarray(spec.initial_states(k), dtype=float).reshape(-1)
    if x0.shape != (spec.rho,):
        raise ConfigurationError(
            f"initial_states({k}) returned {x0.shape[0]} values, expected rho={spec.rho}"
        )
    if not np.all(np.isfinite(x0)):
        raise ConfigurationError(f"non-finite initial state at k={k}: {x0.tolist()}")
    x = np.full(spec.horizon + 1, np.nan)
    x[: spec.rho] = x0
    filled = np.zeros(spec.horizon + 1, dtype=bool)
    filled[: spec.rho] = True
    return PlantState(k=k, rho=spec.rho, x=x, w_applied=np.full(spec.n_times, np.nan), filled=filled)


def _check_time(spec: PlantSpec, t: int):
    if not 0 <= t <= spec.horizon - spec.rho:
        raise SequencingError(f"time index {t} outside 0..{spec.horizon - spec.rho}")


def _commit(spec: PlantSpec, state: PlantState, t: int, value: float, w: float, u: float) -> float:
    if not np.isfinite(value):
        raise NumericalOverflowError(state.k, t, u)
    idx = t + spec.rho
    if state.filled[idx]:
        raise SequencingError(f"x({idx}) already written at k={state.k}")
    state.x[idx] = value
    state.filled[idx] = True
    state.w_applied[t] = w
    return value


def step(spec: PlantSpec, state: PlantState, t: int, u: float, w: float = 0.0) -> float:
    """Apply ``u_k(t)`` and disturbance ``w``; writes and returns ``x_k(t + rho)``."""
    _check_time(spec, t)
    X = state.state_vector(t)
    theta = np.asarray(spec.theta_schedule(t), dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        value = spec.known_part(X) + float(theta @ np.asarray(spec.regressor(X, u), dtype=float)) + w
    return _commit(spec, state, t, value, w, u)


@dataclass(frozen=True)
class CoupledPlant:
    """Several channels advanced in lockstep, each driven by its own input.

    Channel regressors see the stacked state matrix, so cross-channel state
    terms are allowed while the input Jacobian stays diagonal.
    """

    channels: tuple
    name: str = "coupled"

    def __post_init__(self):
        if not self.channels:
            raise ConfigurationError("a coupled plant needs at least one channel")
        rhos = {c.rho for c in self.channels}
        horizons = {c.horizon for c in self.channels}
        if len(rhos) != 1 or len(horizons) != 1:
            raise ConfigurationError("all channels of a coupled plant must share rho and horizon")

    @property
    def rho(self) -> int:
        return self.channels[0].rho

    @property
    def horizon(self) -> int:
        return self.channels[0].horizon

    @property
    def n_times(self) -> int:
        return self.channels[0].n_times


def reset_coupled(plant: CoupledPlant, k: int) -> list:
    return [reset(c, k) for c in plant.channels]


def step_coupled(plant: CoupledPlant, states: list, t: int, us, ws) -> np.ndarray:
    """Advance every channel by one step; all reads happen before any write."""
    return step_channels(plant.channels, states, t, us, ws)


def step_channels(channels, states: list, t: int, us, ws) -> np.ndarray:
    for c in channels:
        _check_time(c, t)
    Xs = np.vstack([s.state_vector(t) for s in states])
    values = []
    for c, u in zip(channels, us):
        theta = np.asarray(c.theta_schedule(t), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            values.append(c.known_part(Xs) + float(theta @ np.asarray(c.regressor(Xs, u), dtype=float)))
    out = np.empty(len(states))
    for i, (c, s, u, w) in enumerate(zip(channels, states, us, ws)):
        out[i] = _commit(c, s, t, values[i] + w, w, u)
    return out


@dataclass
class AssumptionReport:
    """Empirical, advisory estimates of the gain floor and Lipschitz constants."""

    samples: int
    min_gain: float
    max_gain: float
    lipschitz_x: float
    lipschitz_u: float
    gain_sign_changes: bool
    gain_floor: float

    @property
    def gain_near_zero(self) -> bool:
        return self.min_gain <= self.gain_floor or self.gain_sign_changes


def _uniform_in_ball(rng, center, radius):
    d = rng.standard_normal(center.shape[0])
    n = np.linalg.norm(d)
    if n == 0.0:
        return center.copy()
    return center + radius * rng.random() ** (1.0 / center.shape[0]) * d / n


def assumption_check(
    spec: PlantSpec,
    samples: int,
    seed=0,
    ball=None,
    *,
    x_scale: float = 1.0,
    u_scale: float = 2.0,
    state_shape=None,
    gain_floor: float = 1e-3,
) -> AssumptionReport:
    """Monte-Carlo probe of the non-vanishing gain and Lipschitz assumptions.

    Parameter vectors are drawn uniformly from ``ball`` (a
    :class:`~ailc.adaptation.ProjectionBall`), or from ``theta_schedule`` at
    random times when no ball is given.  States are drawn from
    ``[-x_scale, x_scale]`` and inputs from ``[-u_scale, u_scale]``.  The
    report never blocks a run.
    """
    if samples < 1:
        raise ConfigurationError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    shape = state_shape if state_shape is not None else (spec.rho,)
    min_gain, max_gain = np.inf, 0.0
    lx = lu = 0.0
    signs = set()
    for _ in range(samples):
        X = rng.uniform(-x_scale, x_scale, size=shape)
        u = float(rng.uniform(-u_scale, u_scale))
        if ball is not None:
            phi = _uniform_in_ball(rng, np.asarray(ball.center, dtype=float), float(ball.radius))
        else:
            phi = np.asarray(spec.theta_schedule(int(rng.integers(0, spec.n_times))), dtype=float)
        g = float(phi @ spec.regressor_derivative(X, u))
        if g != 0.0:
            signs.add(g > 0)
        min_gain = min(min_gain, abs(g))
        max_gain = max(max_gain, abs(g))

        f0 = np.asarray(spec.regressor(X, u), dtype=float)
        X2 = X + rng.normal(scale=0.1 * x_scale, size=shape)
        dx = np.linalg.norm(X2 - X)
        if dx > 0:
            lx = max(lx, np.linalg.norm(np.asarray(spec.regressor(X2, u), dtype=float) - f0) / dx)
        u2 = u + float(rng.normal(scale=0.1 * u_scale))
        if u2 != u:
            lu = max(lu, np.linalg.norm(np.asarray(spec.regressor(X, u2), dtype=float) - f0) / abs(u2 - u))
    return AssumptionReport(
        samples=samples,
        min_gain=float(min_gain),
        max_gain=float(max_gain),
        lipschitz_x=float(lx),
        lipschitz_u=float(lu),
        gain_sign_changes=len(signs) > 1,
        gain_floor=gain_floor,
    )
