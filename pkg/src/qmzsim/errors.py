"""Exception hierarchy shared by all simulator modules."""


class QmzError(Exception):
    """Base class for every error raised by qmzsim."""


class InvalidInputError(QmzError, ValueError):
    """A parameter or envelope violates its documented invariants."""


class ResolutionError(QmzError, ValueError):
    """The spatial grid is too coarse for the rate scales involved."""


class PrematureReadoutError(QmzError):
    """Outputs were requested while the emitter still holds population."""


class GridWindowError(QmzError):
    """A packet does not fit inside the grid window it must be mapped onto."""


class ConsistencyError(QmzError):
    """A computed probability left its physical range (e.g. a mishandled pole)."""


class ResourceError(QmzError):
    """A requested computation exceeds the configured memory budget."""
