class CCLPError(Exception):
    """Base class for errors raised by this package."""


class EdgeListParseError(CCLPError, ValueError):
    def __init__(self, message, lineno=None):
        super().__init__(message)
        self.lineno = lineno


class EmptyGraphError(CCLPError, ValueError):
    pass


class InvalidNodeError(CCLPError, IndexError):
    pass


class DegenerateInputError(CCLPError, ValueError):
    """The graph admits no well-defined answer (e.g. no non-edges to sample)."""


class ParameterError(CCLPError, ValueError):
    pass


class DatasetError(CCLPError, OSError):
    """A registry entry cannot be resolved, read, or verified."""
