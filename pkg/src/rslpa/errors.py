"""Exception types shared across the package."""


class RslpaError(Exception):
    """Base class for all library errors."""


class ParseError(RslpaError):
    """A text input (edge list, batch file, cover file) is malformed."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class BatchValidationError(RslpaError):
    """An edit batch violates the graph's current state in strict mode."""


class SequencingError(RslpaError):
    """An engine operation was invoked out of order (e.g. wrong iteration)."""


class ConsistencyError(RslpaError):
    """Label state and graph/deltas disagree."""


class SnapshotError(RslpaError):
    """A snapshot file is unreadable, corrupt, or from an unknown version."""
