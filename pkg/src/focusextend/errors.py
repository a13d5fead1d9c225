"""Exception types shared across the library."""


class FocusExtendError(Exception):
    """Base class for all library errors."""


class DimensionError(FocusExtendError, ValueError):
    """Image/patch/kernel dimensions violate an operation's preconditions."""


class CoverageError(FocusExtendError, ValueError):
    """A patch grid does not cover every pixel of the requested output."""


class DegenerateInputError(FocusExtendError, ValueError):
    """Input carries no usable signal (e.g. an all-zero reference patch)."""


class RegistrationError(FocusExtendError):
    """Translation estimate is too unreliable to use."""


class EmptyTableError(FocusExtendError, ValueError):
    """A kernel lookup table has no populated bins."""


class ConfigError(FocusExtendError, ValueError):
    """Invalid configuration value or missing required setting."""
