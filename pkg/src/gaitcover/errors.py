"""Exception types shared across the package."""


class GaitCoverError(Exception):
    """Base class for all package-specific errors."""


class InvalidConfigurationError(GaitCoverError, ValueError):
    """A parameter or configuration value is outside its valid domain."""


class InvalidInputError(GaitCoverError, ValueError):
    """A caller-supplied value has the wrong shape, length, or content."""


class WordLimitError(GaitCoverError, RuntimeError):
    """Word enumeration would exceed the configured hard cap."""


class SingularConfigurationError(GaitCoverError, RuntimeError):
    """The drag matrix is numerically singular at some shape.

    Carries the offending shape and, when raised during cycle integration,
    the phase at which it occurred.
    """

    def __init__(self, message, shape=None, phase=None):
        super().__init__(message)
        self.shape = shape
        self.phase = phase


class UnsupportedModelError(GaitCoverError, ValueError):
    """The requested operation does not apply to this model."""


class RolloutError(GaitCoverError, RuntimeError):
    """Too many samples in a rollout batch had to be discarded."""


class ConfigError(GaitCoverError, ValueError):
    """An experiment configuration file or override is invalid."""
