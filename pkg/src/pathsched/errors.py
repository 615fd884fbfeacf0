"""Exception and warning types shared across the package."""


class PathschedError(Exception):
    """Base class for all package-specific errors."""


class GraphParseError(PathschedError, ValueError):
    """Input text does not describe a well-formed graph."""


class UnknownVertexError(PathschedError, ValueError):
    """A vertex id or label outside the graph was referenced."""


class InvalidDecompositionError(PathschedError, ValueError):
    """An operation required a valid path decomposition but got an invalid one.

    ``report`` carries the failing validation report when available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InvalidScheduleError(PathschedError, ValueError):
    """An operation required a valid measurement schedule but got an invalid one.

    ``report`` carries the failing validation report when available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class GraphTooLargeError(PathschedError, ValueError):
    """Instance exceeds a hard size cap of a solver or simulator."""


class SearchBudgetExceeded(PathschedError, RuntimeError):
    """A search exhausted its wall-clock or node-expansion budget."""


class NormDriftError(PathschedError, RuntimeError):
    """Simulator register norm drifted beyond tolerance.

    This signals an implementation bug, never a property of the input.
    """


class DuplicateEdgeWarning(UserWarning):
    """Parsed input repeated an edge; duplicates were merged."""
