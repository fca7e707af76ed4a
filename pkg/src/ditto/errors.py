"""Exception types shared across the pipeline."""


class DittoError(Exception):
    """Base class for all pipeline errors."""


class MalformedContainer(DittoError):
    """Video container header is invalid or the payload is truncated."""


class IoFailure(DittoError):
    """Underlying filesystem operation failed."""


class DimensionMismatch(DittoError):
    """Vectors of different dimensions were combined."""


class ZeroNorm(DittoError):
    """A zero-norm feature vector reached a similarity computation."""


class EmptyTrajectorySet(DittoError):
    """Motion score requested for an empty trajectory list."""


class EmptyDataset(DittoError):
    """A statistics report was requested on a manifest with no published triplets."""


class InvalidConfig(DittoError):
    """Pipeline configuration failed validation."""


class InvalidRequest(DittoError):
    """A backend request failed client-side validation before dispatch."""


class MalformedResponse(DittoError):
    """A backend response could not be parsed against the wire schema."""


class BackendFailure(DittoError):
    """The backend reported a failure status."""


class BackendTimeout(DittoError):
    """The backend did not answer within the transport deadline."""


class BackendUnavailable(DittoError):
    """All retry attempts against a backend were exhausted."""


class BudgetExceeded(DittoError):
    """Dispatching the next job would exceed the configured GPU-seconds budget."""


class DuplicatePublish(DittoError):
    """A second PUBLISH record was appended for the same asset."""


class CorruptJournal(DittoError):
    """Journal replay hit an invalid record.

    ``offset`` is the byte offset at which the bad record starts; everything
    before it replayed cleanly.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class AbortRun(DittoError):
    """Raised by a fault-injection hook to simulate a crash mid-run."""
