"""Exception types shared across the package."""


class EinlabError(Exception):
    """Base class for all einlab errors."""


class InvalidRangeError(EinlabError, ValueError):
    """A numeric argument violates its documented range."""


class TooLargeError(EinlabError, ValueError):
    """Requested full state exceeds the memory guard (more than 24 spins)."""


class DimensionMismatchError(EinlabError, ValueError):
    """State-vector length does not match the environment size."""


class InvalidAngleError(EinlabError, ValueError):
    """Bloch angles outside theta in [0, pi] or phi in [0, 2*pi)."""


class NoDecayError(EinlabError):
    """The coherence magnitude never dropped below the threshold on the grid."""


class ConfigError(EinlabError, ValueError):
    """Base class for run-configuration problems."""


class ParseError(ConfigError):
    """Malformed configuration text; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class MissingKeyError(ConfigError):
    """A key required by the selected mode is absent."""


class RangeError(ConfigError):
    """A configuration value is outside its allowed range."""


class MissingColumnError(EinlabError, LookupError):
    """Requested CSV column does not exist."""
