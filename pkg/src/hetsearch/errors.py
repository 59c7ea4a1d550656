"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A user-supplied parameter or scenario violates a documented invariant."""


class UnsupportedModeError(RuntimeError):
    """The operation needs a mode (e.g. sensor range limits) that is not enabled."""
