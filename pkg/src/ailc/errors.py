"""Exception hierarchy shared by the simulation modules."""


class AilcError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(AilcError, ValueError):
    """Invalid plant, controller or scenario configuration."""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = list(errors) if errors else [message]


class SequencingError(AilcError, RuntimeError):
    """A value was read before it was causally available."""


class UsageError(AilcError, TypeError):
    """An operation was called on a state of the wrong kind."""


class NumericalError(AilcError, ArithmeticError):
    """Base class for numerical aborts (CLI exit code 2)."""


class NumericalOverflowError(NumericalError):
    """The plant produced a non-finite state."""

    def __init__(self, k, t, u, message=None):
        self.k, self.t, self.u = k, t, u
        super().__init__(message or f"non-finite plant state at k={k}, t={t}, u={u!r}")


class DivergenceError(NumericalError):
    """The fixed-point input iteration produced a non-finite iterate."""


class BracketingError(NumericalError):
    """No sign change of the input residual could be found."""

    def __init__(self, message, samples=None):
        super().__init__(message)
        self.samples = samples or []


class RolloutAborted(NumericalError):
    """A numerical failure inside a rollout, tagged with where it happened."""

    def __init__(self, k, t, cause, channel=None):
        self.k, self.t, self.channel, self.cause = k, t, channel, cause
        where = f"k={k}, t={t}" + (f", channel={channel}" if channel is not None else "")
        super().__init__(f"rollout aborted at {where}: {cause}")
