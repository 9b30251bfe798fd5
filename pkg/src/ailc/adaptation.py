"""Robust gradient-descent parameter adaptation with dead-zone and projection."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigurationError, UsageError


class Variant(str, enum.Enum):
    ROBUST = "robust"
    DISTURBANCE_FREE = "disturbance_free"
    KNOWN_BOUND = "known_bound"


@dataclass(frozen=True)
class ProjectionBall:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1)
        object.__setattr__(self, "center", c)
        if not np.all(np.isfinite(c)):
            raise ConfigurationError("projection ball center must be finite")
        if not self.radius > 0:
            raise ConfigurationError(f"projection ball radius must be positive, got {self.radius!r}")

    def contains(self, theta, slack: float = 0.0) -> bool:
        return float(np.linalg.norm(np.asarray(theta) - self.center)) <= self.radius + slack


def project(theta_bar, ball: ProjectionBall) -> np.ndarray:
    """Closest point of ``ball`` to ``theta_bar`` (radial scaling outside)."""
    theta_bar = np.asarray(theta_bar, dtype=float)
    d = theta_bar - ball.center
    dist = float(np.linalg.norm(d))
    if dist <= ball.radius:
        return theta_bar.copy()
    out = ball.center + (ball.radius / dist) * d
    # rounding can leave the result a hair outside
    if np.linalg.norm(out - ball.center) > ball.radius:
        out = ball.center + (ball.radius * (1.0 - 1e-15) / dist) * d
    return out


def normalized_error(x_next: float, theta_hat_t, f_val, unit: bool = False):
    """Return ``(epsilon, m_sq)`` with ``m_sq = 1 + ||f||^2`` (or 1 when ``unit``)."""
    f_val = np.asarray(f_val, dtype=float)
    m_sq = 1.0 if unit else 1.0 + float(f_val @ f_val)
    epsilon = (x_next - float(np.asarray(theta_hat_t) @ f_val)) / m_sq
    return epsilon, m_sq


def dead_zone(epsilon: float, m_sq: float, w_hat_t: float) -> float:
    if abs(epsilon) <= w_hat_t / m_sq:
        return 0.0
    return 1.0 - w_hat_t / (abs(epsilon) * m_sq)


def lyapunov(theta_hat_t, w_hat_t: float, theta_true_t, w_true: float) -> float:
    """``0.5 ||theta_hat - theta||^2 + 0.5 (w_hat - w)^2``; needs the hidden truth."""
    d = np.asarray(theta_hat_t, dtype=float) - np.asarray(theta_true_t, dtype=float)
    return 0.5 * float(d @ d) + 0.5 * (w_hat_t - w_true) ** 2


class GdpaStep(NamedTuple):
    epsilon: float
    a: float
    m_sq: float
    theta_bar: np.ndarray


@dataclass
class AdaptState:
    """Per-time adaptation memory ``theta_hat(t)``, ``w_hat(t)`` of one channel.

    Arrays are indexed densely by ``t = 0 .. T - rho``.  Initial estimates
    outside the ball are allowed; :meth:`project_all` maps them in.
    """

    theta_hat: np.ndarray
    w_hat: np.ndarray
    eta: float
    ball: ProjectionBall
    variant: Variant = Variant.ROBUST
    w_plus: Optional[float] = None
    unit_normalizer: bool = False

    def __post_init__(self):
        self.variant = Variant(self.variant)
        if not 0.0 < self.eta < 2.0:
            raise ConfigurationError(f"adaptation gain eta must lie in (0, 2), got {self.eta!r}")
        if self.variant is Variant.KNOWN_BOUND and (self.w_plus is None or self.w_plus < 0):
            raise ConfigurationError("known_bound variant needs a non-negative w_plus")
        self.theta_hat = np.array(self.theta_hat, dtype=float)
        self.w_hat = np.array(self.w_hat, dtype=float)
        if self.theta_hat.ndim != 2 or self.theta_hat.shape[1] != self.ball.center.shape[0]:
            raise ConfigurationError("theta_hat must have shape (n_times, p) matching the ball")
        if self.w_hat.shape != (self.theta_hat.shape[0],) or np.any(self.w_hat < 0):
            raise ConfigurationError("w_hat must be a non-negative vector of length n_times")

    @classmethod
    def initial(cls, n_times, ball, eta, variant=Variant.ROBUST, theta0=None, w_plus=None,
                unit_normalizer=False):
        """``theta_hat_0`` defaults to the ball center; ``w_hat_0 = 0``."""
        p = ball.center.shape[0]
        if theta0 is None:
            theta = np.tile(ball.center, (n_times, 1))
        else:
            theta0 = np.asarray(theta0, dtype=float)
            if theta0.ndim == 1:
                if theta0.shape != (p,):
                    raise ConfigurationError(f"theta0 has length {theta0.shape[0]}, expected {p}")
                theta = np.tile(theta0, (n_times, 1))
            else:
                theta = theta0.copy()
        return cls(theta, np.zeros(n_times), eta, ball, variant, w_plus, unit_normalizer)

    def project_all(self) -> int:
        """Project every out-of-ball estimate; returns how many moved."""
        moved = 0
        for t in range(self.theta_hat.shape[0]):
            if not self.ball.contains(self.theta_hat[t]):
                self.theta_hat[t] = project(self.theta_hat[t], self.ball)
                moved += 1
        return moved

    def snapshot(self):
        return self.theta_hat.copy(), self.w_hat.copy()


def gdpa_update(state: AdaptState, t: int, x_next: float, f_val) -> GdpaStep:
    """Robust (or known-bound) update of ``theta_hat(t)`` and ``w_hat(t)``.

    ``x_next`` must already have any known drift removed.
    """
    if state.variant is Variant.DISTURBANCE_FREE:
        raise UsageError("gdpa_update called on a disturbance_free state")
    f_val = np.asarray(f_val, dtype=float)
    theta = state.theta_hat[t]
    eps, m_sq = normalized_error(x_next, theta, f_val, state.unit_normalizer)
    bound = state.w_plus if state.variant is Variant.KNOWN_BOUND else state.w_hat[t]
    a = dead_zone(eps, m_sq, bound)
    theta_bar = theta + state.eta * a * eps * f_val
    if state.variant is Variant.ROBUST:
        state.w_hat[t] = state.w_hat[t] + state.eta * a * abs(eps)
    state.theta_hat[t] = project(theta_bar, state.ball)
    return GdpaStep(eps, a, m_sq, theta_bar)


def gdpa_update_disturbance_free(state: AdaptState, t: int, x_next: float, f_val) -> GdpaStep:
    """Update with the dead-zone fixed at one and no bound estimation."""
    if state.variant is not Variant.DISTURBANCE_FREE:
        raise UsageError(f"gdpa_update_disturbance_free called on a {state.variant.value} state")
    f_val = np.asarray(f_val, dtype=float)
    theta = state.theta_hat[t]
    eps, m_sq = normalized_error(x_next, theta, f_val, state.unit_normalizer)
    theta_bar = theta + state.eta * eps * f_val
    state.theta_hat[t] = project(theta_bar, state.ball)
    return GdpaStep(eps, 1.0, m_sq, theta_bar)


def update(state: AdaptState, t: int, x_next: float, f_val) -> GdpaStep:
    """Dispatch on the state's variant."""
    if state.variant is Variant.DISTURBANCE_FREE:
        return gdpa_update_disturbance_free(state, t, x_next, f_val)
    return gdpa_update(state, t, x_next, f_val)
