"""Seeded disturbance generators for the benchmark scenarios.

Random kinds derive one generator per ``(seed, k, t)`` so a draw never
depends on how many other draws were made before it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, SequencingError

KINDS = (
    "none",
    "uniform",
    "gaussian",
    "bernoulli_like",
    "trigonometric",
    "hoim",
    "state_dependent",
    "example2_channel",
)

DEFAULTS = {
    "none": {},
    "uniform": {"a": -0.01, "b": 0.01},
    # printed as N(0, 0.01); read as a variance unless std is given
    "gaussian": {"mean": 0.0, "var": 0.01, "std": None},
    "bernoulli_like": {"v1": 0.03, "p1": 0.3, "v2": -0.01, "p2": 0.7},
    "trigonometric": {"a1": 0.01, "d1": 50.0, "a2": 0.006, "d2": 2.0},
    "hoim": {"c1": 5.0 / 3.0, "c2": -2.0 / 3.0, "w_init1": 0.02, "w_init2": -0.02},
    "state_dependent": {"c1": 0.01, "c2": 0.01},
    "example2_channel": {"channel": 1, "amp": 1e-4},
}

_STREAM_TAG = 0x5EED


@dataclass(frozen=True)
class DisturbanceSpec:
    kind: str = "none"
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown disturbance kind {self.kind!r}; expected one of {KINDS}")
        unknown = set(self.params) - set(DEFAULTS[self.kind])
        if unknown:
            raise ConfigurationError(f"unknown {self.kind} parameters: {sorted(unknown)}")
        merged = {**DEFAULTS[self.kind], **self.params}
        object.__setattr__(self, "params", merged)
        p = merged
        if self.kind == "uniform" and not p["a"] <= p["b"]:
            raise ConfigurationError("uniform disturbance needs a <= b")
        if self.kind == "gaussian" and (p["var"] < 0 or (p["std"] is not None and p["std"] < 0)):
            raise ConfigurationError("gaussian disturbance needs a non-negative spread")
        if self.kind == "bernoulli_like":
            if abs(p["p1"] + p["p2"] - 1.0) > 1e-12 or min(p["p1"], p["p2"]) < 0:
                raise ConfigurationError("bernoulli_like probabilities must be non-negative and sum to 1")
        if self.kind == "example2_channel" and p["channel"] not in (1, 2):
            raise ConfigurationError("example2_channel channel must be 1 or 2")


def _rng(seed: int, k: int, t: int, channel: int = 0):
    return np.random.default_rng([_STREAM_TAG, int(seed) & 0xFFFFFFFFFFFFFFFF, k, t, channel])


def hoim_value(spec: DisturbanceSpec, k: int) -> float:
    """Closed recursion for the high-order internal model disturbance (no memory)."""
    p = spec.params
    w2, w1 = p["w_init1"], p["w_init2"]
    if k == 1:
        return w2
    for _ in range(k - 2):
        w2, w1 = w1, p["c1"] * w1 + p["c2"] * w2
    return w1


def sample(spec: DisturbanceSpec, k: int, t: int, x_current: float = 0.0, memory=None,
           channel: int = 0) -> float:
    """Disturbance ``w_k(t)``.

    ``memory`` is required for ``hoim`` with ``k > 2`` and maps ``t`` to the
    pair ``(w_{k-1}(t), w_{k-2}(t))``.
    """
    p = spec.params
    kind = spec.kind
    if kind == "none":
        return 0.0
    if kind == "uniform":
        return float(_rng(spec.seed, k, t, channel).uniform(p["a"], p["b"]))
    if kind == "gaussian":
        std = p["std"] if p["std"] is not None else math.sqrt(p["var"])
        return float(p["mean"] + std * _rng(spec.seed, k, t, channel).standard_normal())
    if kind == "bernoulli_like":
        return float(p["v1"] if _rng(spec.seed, k, t, channel).random() < p["p1"] else p["v2"])
    if kind == "trigonometric":
        return p["a1"] * math.sin(k * math.pi * t / p["d1"]) + p["a2"] * math.cos(k * math.pi * t / p["d2"])
    if kind == "hoim":
        if k == 1:
            return p["w_init1"]
        if k == 2:
            return p["w_init2"]
        w1, w2 = (memory or {}).get(t, (None, None))
        if w1 is None or w2 is None:
            raise SequencingError(f"hoim disturbance at k={k}, t={t} needs w_(k-1)(t) and w_(k-2)(t)")
        return p["c1"] * w1 + p["c2"] * w2
    if kind == "state_dependent":
        return p["c1"] * x_current - p["c2"] * math.sin(x_current * math.pi)
    if kind == "example2_channel":
        a = p["amp"]
        if p["channel"] == 1:
            return a * math.cos(k * t * math.pi) + a * math.sin(k * t * math.pi / 2.0)
        return a * math.cos(2.0 * k * t * math.pi) + a * math.sin(k * t * math.pi)
    raise ConfigurationError(f"unhandled disturbance kind {kind!r}")


class DisturbanceStream:
    """Stateful wrapper that owns the hoim memory of one scenario run."""

    def __init__(self, spec: DisturbanceSpec, channel: int = 0):
        self.spec = spec
        self.channel = channel
        self._memory = {}
        self._current = {}
        self._k = None
        self.sup = 0.0

    def sample(self, k: int, t: int, x_current: float = 0.0) -> float:
        if self._k != k:
            if self._k is not None and k == self._k + 1:
                self._memory = {s: (w, self._memory.get(s, (None, None))[0]) for s, w in self._current.items()}
            elif self._k is not None:
                self._memory = {}
            self._current = {}
            self._k = k
        w = sample(self.spec, k, t, x_current, self._memory, self.channel)
        self._current[t] = w
        self.sup = max(self.sup, abs(w))
        return w
