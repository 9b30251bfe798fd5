"""Adaptive ILC rollouts: estimate, solve for the input, step, then adapt.

Within iteration ``k`` the input at time ``t`` only uses ``x_k(0..t)``,
``u_k(0..t-1)`` and the estimates produced from iteration ``k-1``.  The
parameter updates for iteration ``k+1`` are applied after the rollout,
evaluating the regressor on the measured states.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import adaptation
from .adaptation import AdaptState, ProjectionBall, Variant
from .errors import ConfigurationError, NumericalError, RolloutAborted
from .estimator import EstimatorMemory, estimate_joint
from .plant import CoupledPlant, PlantSpec, reset, step, step_channels
from .solver import SolverConfig, oracle_root, solve_fixed_point

log = logging.getLogger(__name__)

INPUT_MODES = ("fixed_point", "direct_solve")
M_MODES = ("normalized", "unit")


@dataclass(frozen=True)
class ControllerConfig:
    variant: Variant = Variant.ROBUST
    input_mode: str = "fixed_point"
    m_mode: str = "normalized"
    solver: SolverConfig = field(default_factory=SolverConfig)
    eta: float = 1.0
    w_plus: Optional[float] = None
    oracle_tol: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        errors = []
        if not 0.0 < self.eta < 2.0:
            errors.append(f"eta must lie in (0, 2), got {self.eta!r}")
        if self.input_mode not in INPUT_MODES:
            errors.append(f"input_mode must be one of {INPUT_MODES}")
        if self.m_mode not in M_MODES:
            errors.append(f"m_mode must be one of {M_MODES}")
        if self.variant is Variant.KNOWN_BOUND and (self.w_plus is None or self.w_plus < 0):
            errors.append("known_bound variant needs a non-negative w_plus")
        if errors:
            raise ConfigurationError("; ".join(errors), errors)

    def adapt_state(self, n_times: int, ball: ProjectionBall, theta0=None) -> AdaptState:
        return AdaptState.initial(
            n_times, ball, self.eta, self.variant, theta0, self.w_plus,
            unit_normalizer=self.m_mode == "unit",
        )


@dataclass
class IterationTrace:
    """Record of one iteration of one channel; row ``t`` refers to ``x(t + rho)``."""

    k: int
    rho: int
    x: np.ndarray          # full trajectory x(0..T)
    u: np.ndarray          # u(0..T-rho)
    r: np.ndarray          # r(t + rho)
    w: np.ndarray          # applied disturbance w(t)
    epsilon: np.ndarray = None
    a: np.ndarray = None
    w_hat: np.ndarray = None
    theta_hat: np.ndarray = None
    w_hat_next: np.ndarray = None
    theta_hat_next: np.ndarray = None
    V: np.ndarray = None
    V_next: np.ndarray = None
    solver_iterations: np.ndarray = None
    solver_p0: np.ndarray = None
    solver_residual: np.ndarray = None
    solver_l_prime: np.ndarray = None
    solver_stop: list = None

    def __post_init__(self):
        n = len(self.u)
        for name in ("epsilon", "a", "w_hat", "V", "V_next", "w_hat_next"):
            if getattr(self, name) is None:
                setattr(self, name, np.full(n, np.nan))

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.u))

    @property
    def x_next(self) -> np.ndarray:
        return self.x[self.rho:]

    @property
    def e(self) -> np.ndarray:
        return self.x_next - self.r

    @property
    def max_err(self) -> float:
        return float(np.max(np.abs(self.e)))

    @property
    def avg_err(self) -> float:
        return float(np.mean(np.abs(self.e)))


Reference = Callable[[int, int], float]


def _zero_disturbance(k, t, x):
    return 0.0


def _as_disturbance(d):
    if d is None:
        return _zero_disturbance
    if hasattr(d, "sample"):
        return d.sample
    return d


def _solve(spec: PlantSpec, cfg: ControllerConfig, theta, X_hat, r_target):
    offset = spec.known_part(X_hat)
    if cfg.input_mode == "direct_solve":
        return oracle_root(theta, X_hat, r_target, spec.regressor, tol=cfg.oracle_tol, offset=offset)
    return solve_fixed_point(theta, X_hat, r_target, cfg.solver, spec.regressor, spec.regressor_du, offset)


def _rollout(channels: Sequence[PlantSpec], coupled: bool, adapts, cfgs, refs, dists, k: int,
             verbose: bool = False) -> List[IterationTrace]:
    n = len(channels)
    rho = channels[0].rho
    n_t = channels[0].n_times
    states = [reset(c, k) for c in channels]
    u = np.zeros((n, n_t))
    r = np.zeros((n, n_t))
    telemetry = [[None] * n_t for _ in range(n)]
    mems = [EstimatorMemory(c, s.x, u[i], a.theta_hat) for i, (c, s, a) in enumerate(zip(channels, states, adapts))]
    for t in range(n_t):
        ws = [dists[i](k, t, float(states[i].x[t])) for i in range(n)]
        try:
            X_hat = estimate_joint(mems, t, coupled) if rho > 1 else np.array([[s.x[t]] for s in states])
        except (NumericalError, FloatingPointError) as exc:
            raise RolloutAborted(k, t, exc) from exc
        for i, c in enumerate(channels):
            r[i, t] = refs[i](k, t + rho)
            Xi = X_hat if coupled else X_hat[i]
            try:
                res = _solve(c, cfgs[i], adapts[i].theta_hat[t], Xi, r[i, t])
            except NumericalError as exc:
                raise RolloutAborted(k, t, exc, channel=i if n > 1 else None) from exc
            u[i, t] = res.u
            telemetry[i][t] = res
            if verbose:
                log.debug("k=%d t=%d ch=%d u=%.6g iters=%d p0=%d residual=%.3g stop=%s",
                          k, t, i, res.u, res.iterations, res.p0, res.residual, res.stop_reason)
        try:
            _step_all(channels, coupled, states, t, u[:, t], ws)
        except NumericalError as exc:
            raise RolloutAborted(k, t, exc) from exc

    traces = []
    for i in range(n):
        tel = telemetry[i]
        traces.append(IterationTrace(
            k=k, rho=rho, x=states[i].x.copy(), u=u[i].copy(), r=r[i].copy(),
            w=states[i].w_applied.copy(),
            solver_iterations=np.array([s.iterations for s in tel]),
            solver_p0=np.array([s.p0 for s in tel]),
            solver_residual=np.array([s.residual for s in tel]),
            solver_l_prime=np.array([s.l_prime for s in tel]),
            solver_stop=[s.stop_reason for s in tel],
        ))
    return traces


def _step_all(channels, coupled, states, t, us, ws):
    if coupled:
        return step_channels(channels, states, t, us, ws)
    return np.array([step(c, s, t, u_, w_) for c, s, u_, w_ in zip(channels, states, us, ws)])


def _adapt(channels, coupled, adapts, traces):
    """Post-rollout updates using the measured ``X_k(t)`` and applied ``u_k(t)``."""
    rho = channels[0].rho
    for ad, tr in zip(adapts, traces):
        tr.theta_hat = ad.theta_hat.copy()
        tr.w_hat = ad.w_hat.copy()
    for t in range(channels[0].n_times):
        X = np.vstack([tr.x[t:t + rho][::-1] for tr in traces])
        for i, (c, ad, tr) in enumerate(zip(channels, adapts, traces)):
            Xi = X if coupled else X[i]
            f_val = np.asarray(c.regressor(Xi, tr.u[t]), dtype=float)
            target = tr.x[t + rho] - c.known_part(Xi)
            res = adaptation.update(ad, t, target, f_val)
            tr.epsilon[t] = res.epsilon
            tr.a[t] = res.a
    for ad, tr in zip(adapts, traces):
        tr.theta_hat_next = ad.theta_hat.copy()
        tr.w_hat_next = ad.w_hat.copy()


def _fill_lyapunov(spec: PlantSpec, traces: List[IterationTrace], w_true: float):
    theta = np.array([spec.theta_schedule(t) for t in range(spec.n_times)], dtype=float)
    for tr in traces:
        d0 = tr.theta_hat - theta
        d1 = tr.theta_hat_next - theta
        tr.V = 0.5 * np.sum(d0 * d0, axis=1) + 0.5 * (tr.w_hat - w_true) ** 2
        tr.V_next = 0.5 * np.sum(d1 * d1, axis=1) + 0.5 * (tr.w_hat_next - w_true) ** 2


def _experiment(channels, coupled, adapts, cfgs, refs, dists, iterations, w_true, verbose):
    for ad, cfg in zip(adapts, cfgs):
        if ad.variant is not cfg.variant:
            raise ConfigurationError(
                f"adaptation state variant {ad.variant.value} does not match controller {cfg.variant.value}"
            )
        # the initial estimate is mapped into the ball before its first use
        moved = ad.project_all()
        if moved:
            log.info("projected %d initial estimates onto the ball", moved)
    dists = [_as_disturbance(d) for d in dists]
    per_channel = [[] for _ in channels]
    for k in range(1, iterations + 1):
        traces = _rollout(channels, coupled, adapts, cfgs, refs, dists, k, verbose)
        _adapt(channels, coupled, adapts, traces)
        for i, tr in enumerate(traces):
            per_channel[i].append(tr)
    for i, c in enumerate(channels):
        if not per_channel[i]:
            continue
        if w_true is None:
            w_i = max(float(np.max(np.abs(tr.w))) for tr in per_channel[i])
        else:
            w_i = w_true[i] if np.ndim(w_true) else float(w_true)
        _fill_lyapunov(c, per_channel[i], w_i)
    return per_channel


def run_iteration(plant: PlantSpec, adapt: AdaptState, cfg: ControllerConfig, ref: Reference,
                  disturbance=None, k: int = 1, verbose: bool = False) -> IterationTrace:
    """One rollout with the current estimates; no adaptation is applied."""
    return _rollout([plant], False, [adapt], [cfg], [ref], [_as_disturbance(disturbance)], k, verbose)[0]


def run_experiment(plant: PlantSpec, adapt: AdaptState, cfg: ControllerConfig, ref: Reference,
                   disturbance=None, iterations: int = 1, w_true: Optional[float] = None,
                   verbose: bool = False) -> List[IterationTrace]:
    """Iterations ``k = 1..iterations``; ``adapt`` is updated in place.

    ``w_true`` is the disturbance supremum used for the Lyapunov diagnostic;
    by default the largest applied ``|w|`` of the run.
    """
    return _experiment([plant], False, [adapt], [cfg], [ref], [disturbance], iterations, w_true, verbose)[0]


def mimo_run_experiment(plant: CoupledPlant, adapts: Sequence[AdaptState], cfgs: Sequence[ControllerConfig],
                        refs: Sequence[Reference], disturbances=None, iterations: int = 1,
                        w_true=None, verbose: bool = False) -> List[List[IterationTrace]]:
    """Lockstep run of a coupled plant whose inputs act on their own channels only."""
    n = len(plant.channels)
    disturbances = list(disturbances) if disturbances is not None else [None] * n
    if not (len(adapts) == len(cfgs) == len(refs) == len(disturbances) == n):
        raise ConfigurationError(f"expected {n} adaptation states, configs, references and disturbances")
    return _experiment(list(plant.channels), True, list(adapts), list(cfgs), list(refs), disturbances,
                       iterations, w_true, verbose)
