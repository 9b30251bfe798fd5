"""Data-driven ILC baseline with a pseudo-partial-derivative (PPD) estimate.

Only relative-degree-one plants are supported; the update for iteration
``k + 1`` uses the error ``r_k(t+1) - x_k(t+1)`` of the iteration just run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .controller import IterationTrace, _as_disturbance
from .errors import ConfigurationError, NumericalError, RolloutAborted
from .plant import PlantSpec, reset, step

RESET_THRESHOLD = 1e-4


@dataclass(frozen=True)
class DdilcParams:
    eta: float = 0.5
    rho: float = 0.4
    lam: float = 1.0
    mu: float = 0.5
    theta0: float = 1.0
    u0: float = 0.0

    def __post_init__(self):
        if not self.lam > 0 or not self.mu > 0:
            raise ConfigurationError("DDILC needs lambda' > 0 and mu' > 0")
        if self.theta0 == 0:
            raise ConfigurationError("DDILC PPD reset value theta0 must be non-zero")


@dataclass
class DdilcState:
    """Inputs ``u_k`` to apply next and the PPD estimates ``theta'_k``."""

    u: np.ndarray
    theta_prime: np.ndarray
    theta_prime_0: np.ndarray
    params: DdilcParams
    resets: int = 0

    @classmethod
    def initial(cls, n_times: int, params: DdilcParams = DdilcParams()):
        return cls(
            u=np.full(n_times, float(params.u0)),
            theta_prime=np.full(n_times, float(params.theta0)),
            theta_prime_0=np.full(n_times, float(params.theta0)),
            params=params,
        )


def ddilc_update(state: DdilcState, k: int, x_k, x_prev, u_prev, ref) -> np.ndarray:
    """Compute ``u_{k+1}`` from iteration ``k`` (and ``k-1`` when available).

    ``x_prev``/``u_prev`` are ``None`` for the first iteration; the input
    difference is then zero, which selects the PPD reset branch.
    """
    p = state.params
    x_k = np.asarray(x_k, dtype=float)
    u_k = state.u
    n = len(u_k)
    u_next = np.empty(n)
    for t in range(n):
        du = 0.0 if u_prev is None else u_k[t] - u_prev[t]
        dx = 0.0 if x_prev is None else x_k[t + 1] - x_prev[t + 1]
        th = state.theta_prime[t]
        cand = th + p.eta * du * (dx - th * du) / (p.mu + du * du)
        th0 = state.theta_prime_0[t]
        if np.sign(cand) != np.sign(th0) or abs(cand) <= RESET_THRESHOLD or abs(du) <= RESET_THRESHOLD:
            cand = th0
            state.resets += 1
        state.theta_prime[t] = cand
        err = ref(k, t + 1) - x_k[t + 1]
        u_next[t] = u_k[t] + p.rho * cand * err / (p.lam + cand * cand)
    state.u = u_next
    return u_next


def run_ddilc_experiment(plant: PlantSpec, params: DdilcParams, ref, disturbance=None,
                         iterations: int = 1, state: Optional[DdilcState] = None) -> List[IterationTrace]:
    if plant.rho != 1:
        raise ConfigurationError(f"DDILC needs a relative-degree-one plant, got rho={plant.rho}")
    state = state or DdilcState.initial(plant.n_times, params)
    dist = _as_disturbance(disturbance)
    traces = []
    x_prev = u_prev = None
    for k in range(1, iterations + 1):
        ps = reset(plant, k)
        u_k = state.u.copy()
        r = np.empty(plant.n_times)
        for t in range(plant.n_times):
            w = dist(k, t, float(ps.x[t]))
            r[t] = ref(k, t + 1)
            try:
                step(plant, ps, t, float(u_k[t]), w)
            except NumericalError as exc:
                raise RolloutAborted(k, t, exc) from exc
        tr = IterationTrace(k=k, rho=1, x=ps.x.copy(), u=u_k, r=r, w=ps.w_applied.copy())
        ddilc_update(state, k, ps.x, x_prev, u_prev, ref)
        traces.append(tr)
        x_prev, u_prev = ps.x.copy(), u_k
    return traces
