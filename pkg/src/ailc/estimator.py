"""Multi-step estimation of the unmeasured entries of ``X_k(t)``.

At time ``t`` only ``x(0..t)``, ``u(0..t-1)`` and the parameter estimates
are available.  The future states ``x(t+1), ..., x(t+rho-1)`` are obtained
bottom-up by running the plant model forward:

    x_hat(t+j | t) = drift(X(tau)) + theta_hat(tau)^T f(X(tau), u(tau)),  tau = t + j - rho

where ``X(tau)`` takes measured values for indices ``<= t`` (or inside the
known reset window ``0..rho-1``) and lower-level estimates otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SequencingError
from .plant import PlantSpec


class _CausalView:
    """Read-only sequence view that refuses indices beyond ``bound``."""

    def __init__(self, data, bound: int, label: str):
        self._data = data
        self.bound = bound
        self.label = label
        self.max_read = -1

    def __getitem__(self, i: int) -> float:
        if i < 0 or i > self.bound:
            raise SequencingError(f"{self.label}({i}) read while only 0..{self.bound} is available")
        self.max_read = max(self.max_read, i)
        return self._data[i]


@dataclass
class EstimatorMemory:
    """What the estimator may see for one channel during iteration ``k``."""

    spec: PlantSpec
    x_hist: Sequence[float]
    u_hist: Sequence[float]
    theta_hist: np.ndarray
    audit: list = field(default_factory=list, repr=False)

    @property
    def rho(self) -> int:
        return self.spec.rho


def estimate_joint(mems: Sequence[EstimatorMemory], t: int, coupled: bool = False) -> np.ndarray:
    """Estimated state matrix ``(n_channels, rho)`` at time ``t``.

    With ``coupled`` the channel models receive the full stacked matrix, so
    each estimation level is completed for all channels before the next.
    """
    rho = mems[0].rho
    if not 0 <= t <= mems[0].spec.horizon - rho:
        raise SequencingError(f"time index {t} outside 0..{mems[0].spec.horizon - rho}")
    known = max(t, rho - 1)
    xs = [_CausalView(m.x_hist, known, "x") for m in mems]
    us = [_CausalView(m.u_hist, t - 1, "u") for m in mems]
    # values[i][idx] for idx in t - rho + 1 .. t + rho - 1 as needed
    values = [dict() for _ in mems]

    def value(i, idx):
        if idx <= known:
            return xs[i][idx]
        return values[i][idx]

    for j in range(1, rho):
        idx = t + j
        if idx <= known:
            continue
        tau = idx - rho
        rows = [[value(i, tau + q) for q in range(rho - 1, -1, -1)] for i in range(len(mems))]
        X = np.asarray(rows, dtype=float)
        new = []
        for i, m in enumerate(mems):
            Xi = X if coupled else X[i]
            f = np.asarray(m.spec.regressor(Xi, us[i][tau]), dtype=float)
            new.append(m.spec.known_part(Xi) + float(np.asarray(m.theta_hist[tau]) @ f))
        for i, v in enumerate(new):
            values[i][idx] = v

    out = np.array([[value(i, t + q) for q in range(rho - 1, -1, -1)] for i in range(len(mems))])
    for m, xv, uv in zip(mems, xs, us):
        m.audit.append((t, xv.max_read, uv.max_read))
    return out


def estimate_state_vector(mem: EstimatorMemory, t: int) -> np.ndarray:
    """Estimated ``X_hat_k(t) = [x_hat(t+rho-1|t), ..., x_hat(t+1|t), x(t)]``."""
    return estimate_joint([mem], t)[0]
