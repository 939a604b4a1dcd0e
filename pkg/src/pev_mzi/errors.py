"""Exception hierarchy.

Physics errors (the state cannot be evolved or measured faithfully) are kept
apart from configuration errors so the command line can map them to
different exit codes.
"""


class PevError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PevError, ValueError):
    """Malformed or inconsistent scenario description."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(PevError, ValueError):
    """A point, window or support lies outside the grid it is defined on."""


class ResolutionError(PevError, ValueError):
    """The grid spacing is too coarse for the requested feature."""


class SnappingError(PevError, ValueError):
    """A shift is not an integer number of grid cells."""


class PhysicsError(PevError):
    """Evolution cannot proceed faithfully on the configured grid."""


class TruncationError(PhysicsError, ValueError):
    """The grid cuts off more of a profile than the tolerance allows."""

    def __init__(self, message, deficit=None):
        self.deficit = deficit
        super().__init__(message)


class DomainOverflowError(PhysicsError, DomainError):
    """A translation pushes amplitude off the edge of the grid."""

    def __init__(self, message, lost_mass):
        self.lost_mass = lost_mass
        super().__init__(message)


class AnnihilationError(PhysicsError):
    """An evolution step produced the zero vector (a probability-zero branch)."""


class TruncationWarning(UserWarning):
    """Emitted when a profile does not vanish at the edges of its grid."""
