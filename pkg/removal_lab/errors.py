class RemovalLabError(Exception):
    """Base class for every error raised by removal_lab."""
    pass


class DegenerateSetError(RemovalLabError):
    """Raised when a vertex set is too small for the requested quantity."""
    pass


class InvalidPairError(RemovalLabError):
    """Raised when a pair of vertex sets overlaps or has an empty side."""
    pass


class ParameterError(RemovalLabError):
    """Raised when a numeric parameter is out of its allowed range."""

    def __init__(self, message: str, suggestion: str | None = None):
        super().__init__(message if suggestion is None else f"{message} ({suggestion})")
        self.suggestion = suggestion


class ScaleError(RemovalLabError):
    """Raised when an exhaustive search would exceed its configured budget."""
    pass


class ConditionError(RemovalLabError):
    """Raised when a structural hypothesis of an operation does not hold."""
    pass


class InsufficientVerticesError(RemovalLabError):
    """Raised when a graph has too few vertices for a Ramsey-type extraction."""
    pass


class ConsistencyError(RemovalLabError):
    """Raised when a result fails its own re-verification."""
    pass


class InfeasibleDeltaError(RemovalLabError):
    """Raised when no clique graph reaches the requested density within range."""
    pass


class FormatError(RemovalLabError):
    """Raised when a graph, family or certificate file cannot be parsed."""
    pass
