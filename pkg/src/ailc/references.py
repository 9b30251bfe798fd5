"""Reference trajectory families ``r(k, t)``."""

from __future__ import annotations

import math

from .errors import ConfigurationError

FAMILIES = {
    "example1-compare": {"switch_after": 10, "a_sin": 0.8, "a_cos": 1.2, "period": 25.0},
    "example1-robust": {"a_sin": 0.8, "period": 25.0, "square_half": 20},
    "sine": {"amplitude": 0.1, "period": 25.0, "phase": 0.0, "offset": 0.0},
    "constant": {"value": 0.0},
}


def example1_compare(switch_after=10, a_sin=0.8, a_cos=1.2, period=25.0):
    """Sine for ``k <= switch_after`` or even ``k``; cosine for later odd ``k``."""

    def ref(k, t):
        if k <= switch_after or k % 2 == 0:
            return a_sin * math.sin(2.0 * math.pi * t / period)
        return a_cos * math.cos(2.0 * math.pi * t / period)

    return ref


def example1_robust(a_sin=0.8, period=25.0, square_half=20):
    """Sine on odd iterations, a 0/1 square wave on even ones."""

    def ref(k, t):
        if k % 2 == 1:
            return a_sin * math.sin(2.0 * math.pi * t / period)
        return 0.5 + 0.5 * (-1.0) ** (t // square_half)

    return ref


def sine(amplitude=0.1, period=25.0, phase=0.0, offset=0.0):
    def ref(k, t):
        return offset + amplitude * math.sin(2.0 * math.pi * t / period + phase)

    return ref


def constant(value=0.0):
    return lambda k, t: value


_BUILDERS = {
    "example1-compare": example1_compare,
    "example1-robust": example1_robust,
    "sine": sine,
    "constant": constant,
}


def build_reference(family: str, params=None):
    if family not in _BUILDERS:
        raise ConfigurationError(f"unknown reference family {family!r}; expected one of {sorted(_BUILDERS)}")
    params = dict(params or {})
    unknown = set(params) - set(FAMILIES[family])
    if unknown:
        raise ConfigurationError(f"unknown parameters for reference {family!r}: {sorted(unknown)}")
    return _BUILDERS[family](**{**FAMILIES[family], **params})
