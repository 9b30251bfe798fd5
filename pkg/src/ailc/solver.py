"""Solving ``theta_hat^T f(X_hat, u) = r`` for the control input.

The production path is the contraction iteration ``u <- u - Z(u) / l'``
started at zero, stopped by an a-priori iteration count derived from the
gain floor ``d0``.  :func:`oracle_root` is an independent bisection solver
used for verification and as the ``direct_solve`` input mode.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BracketingError, ConfigurationError, DivergenceError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Settings of the fixed-point input solver.

    ``l_prime`` fixes the Lipschitz bound directly; when it is ``None`` the
    bound is sampled over ``|u| <= |c'| / d0_lower`` and inflated by
    ``margin_factor``.  ``gain_sign`` is ``"positive"``, ``"negative"`` or
    ``"auto"``.
    """

    d0_lower: float = 0.1
    l_prime: Optional[float] = None
    margin_factor: float = 1.25
    sample_count: int = 256
    epsilon_tol: float = 1e-6
    max_iter_cap: int = 10_000
    gain_sign: str = "auto"

    def __post_init__(self):
        errors = []
        if not self.d0_lower > 0:
            errors.append("d0_lower must be positive")
        if not self.epsilon_tol > 0:
            errors.append("epsilon_tol must be positive")
        if self.l_prime is None:
            if not self.margin_factor > 1:
                errors.append("margin_factor must exceed 1")
            if self.sample_count < 2:
                errors.append("sample_count must be >= 2")
        elif not self.l_prime > self.d0_lower:
            errors.append("l_prime must exceed d0_lower")
        if self.max_iter_cap < 1:
            errors.append("max_iter_cap must be >= 1")
        if self.gain_sign not in ("positive", "negative", "auto"):
            errors.append(f"unknown gain_sign {self.gain_sign!r}")
        if errors:
            raise ConfigurationError("; ".join(errors), errors)


@dataclass
class SolveResult:
    u: float
    iterations: int
    p0: int
    residual: float
    stop_reason: str  # criterion_met | fixed_point_exact | cap_hit | bisection
    l_prime: float = math.nan
    c_prime: float = math.nan
    ball_radius: float = math.nan
    max_abs_iterate: float = 0.0
    ball_violation: bool = False


def stopping_p0(u1: float, u0: float, d0: float, l_prime: float, eps: float) -> int:
    """A-priori iteration count guaranteeing ``|u^p0 - u*| < eps``."""
    if not 0 < d0 < l_prime:
        raise ConfigurationError(f"need 0 < d0 < l' for a contraction, got d0={d0}, l'={l_prime}")
    if eps <= 0:
        raise ConfigurationError("eps must be positive")
    if u1 == u0:
        return 1
    q = 1.0 - d0 / l_prime
    # log space: a subnormal first step would overflow the plain ratio
    log_arg = math.log(eps) + math.log(d0) - math.log(l_prime) - math.log(abs(u1 - u0))
    if log_arg >= 0.0:
        return 1
    return max(1, math.floor(log_arg / math.log(q)) + 1)


def _residual_fn(theta_hat, X_hat, r_target, regressor, offset):
    theta_hat = np.asarray(theta_hat, dtype=float)

    def Z(u):
        with np.errstate(over="ignore", invalid="ignore"):
            return offset + float(theta_hat @ np.asarray(regressor(X_hat, u), dtype=float)) - r_target

    return Z


def _gain_fn(theta_hat, X_hat, regressor, regressor_du):
    theta_hat = np.asarray(theta_hat, dtype=float)
    if regressor_du is not None:
        return lambda u: float(theta_hat @ np.asarray(regressor_du(X_hat, u), dtype=float))

    def g(u):
        h = 1e-6 * max(1.0, abs(u))
        fp = np.asarray(regressor(X_hat, u + h), dtype=float)
        fm = np.asarray(regressor(X_hat, u - h), dtype=float)
        return float(theta_hat @ (fp - fm)) / (2.0 * h)

    return g


def sample_gains(theta_hat, X_hat, radius, regressor, regressor_du=None, count=256) -> np.ndarray:
    """``theta_hat^T df/du`` on an even grid over ``[-radius, radius]`` (zero included)."""
    g = _gain_fn(theta_hat, X_hat, regressor, regressor_du)
    grid = np.union1d(np.linspace(-radius, radius, count), [0.0])
    return np.array([g(float(u)) for u in grid])


def solve_fixed_point(theta_hat, X_hat, r_target, cfg: SolverConfig, regressor,
                      regressor_du=None, offset: float = 0.0) -> SolveResult:
    """Contraction iteration from ``u = 0`` with the a-priori stopping rule.

    ``offset`` is a known additive term of the model (plant drift).  The
    iteration also stops when an iterate is reproduced exactly in floating
    point, since further steps cannot change it.
    """
    Z = _residual_fn(theta_hat, X_hat, r_target, regressor, offset)
    c = Z(0.0)
    if not math.isfinite(c):
        raise DivergenceError(f"non-finite residual at u=0: {c}")
    d0 = cfg.d0_lower
    radius = abs(c) / d0
    if c == 0.0:
        return SolveResult(0.0, 0, 1, 0.0, "fixed_point_exact", math.nan, 0.0, 0.0)

    gain_at_zero = _gain_fn(theta_hat, X_hat, regressor, regressor_du)(0.0)
    if cfg.l_prime is not None:
        l_prime = cfg.l_prime
        sign_probe = gain_at_zero
    else:
        gains = sample_gains(theta_hat, X_hat, radius, regressor, regressor_du, cfg.sample_count)
        l_prime = cfg.margin_factor * float(np.max(np.abs(gains)))
        # a sampled sup below d0 means d0 is too optimistic; keep the ratio valid
        l_prime = max(l_prime, cfg.margin_factor * d0)
        sign_probe = gain_at_zero if gain_at_zero != 0.0 else float(gains[np.argmax(np.abs(gains))])
        if not math.isfinite(l_prime):
            raise DivergenceError(f"non-finite sampled gain bound (c'={c})")

    if cfg.gain_sign == "positive":
        sign = 1.0
    elif cfg.gain_sign == "negative":
        sign = -1.0
    else:
        sign = -1.0 if sign_probe < 0 else 1.0
    step = sign * l_prime

    u_prev = 0.0
    z = c
    u = u_prev - z / step
    iterations = 1
    p0 = stopping_p0(u, u_prev, d0, l_prime, cfg.epsilon_tol)
    target = min(p0, cfg.max_iter_cap)
    max_abs = abs(u)
    reason = None
    while iterations < target:
        z = Z(u)
        u_next = u - z / step
        if not math.isfinite(u_next):
            raise DivergenceError(
                f"fixed-point iterate diverged after {iterations} steps (l'={l_prime}, c'={c}); "
                "l' underestimates the gain or the gain floor assumption fails"
            )
        iterations += 1
        max_abs = max(max_abs, abs(u_next))
        if u_next == u:
            reason = "fixed_point_exact"
            break
        u = u_next
    if not math.isfinite(u):
        raise DivergenceError(f"non-finite fixed-point iterate (l'={l_prime}, c'={c})")
    if reason is None:
        reason = "criterion_met" if iterations >= p0 else "cap_hit"
    violation = max_abs > radius * (1.0 + 1e-12)
    if violation:
        log.warning("fixed-point iterates left B(0, %.6g): max |u| = %.6g", radius, max_abs)
    return SolveResult(u, iterations, p0, abs(Z(u)), reason, l_prime, c, radius, max_abs, violation)


def oracle_root(theta_hat, X_hat, r_target, regressor, bracket=None, tol: float = 1e-12,
                offset: float = 0.0, max_iter: int = 400) -> SolveResult:
    """Bisection root of ``Z(u) = offset + theta_hat^T f(X_hat, u) - r``.

    Without an explicit ``bracket`` the search interval is doubled from
    ``[-1, 1]`` up to ``[-2**40, 2**40]`` until ``Z`` changes sign.
    """
    Z = _residual_fn(theta_hat, X_hat, r_target, regressor, offset)
    samples = []
    if bracket is not None:
        lo, hi = map(float, bracket)
        zlo, zhi = Z(lo), Z(hi)
        samples += [(lo, zlo), (hi, zhi)]
    else:
        half = 1.0
        while True:
            lo, hi = -half, half
            zlo, zhi = Z(lo), Z(hi)
            samples += [(lo, zlo), (hi, zhi)]
            if zlo * zhi <= 0 or half >= 2.0 ** 40:
                break
            half *= 2.0
    if not zlo * zhi <= 0:
        raise BracketingError(f"no sign change of the input residual in [{lo:g}, {hi:g}]", samples)
    if zlo == 0.0:
        return SolveResult(lo, 0, 0, 0.0, "bisection")
    if zhi == 0.0:
        return SolveResult(hi, 0, 0, 0.0, "bisection")
    n = 0
    mid, zmid = lo, zlo
    while n < max_iter:
        mid = 0.5 * (lo + hi)
        zmid = Z(mid)
        n += 1
        if not math.isfinite(zmid):
            raise BracketingError(f"non-finite residual at u={mid}", samples)
        if abs(zmid) <= tol or (hi - lo) <= tol or mid in (lo, hi):
            break
        if (zmid < 0) == (zlo < 0):
            lo, zlo = mid, zmid
        else:
            hi = mid
    return SolveResult(mid, n, 0, abs(zmid), "bisection")
