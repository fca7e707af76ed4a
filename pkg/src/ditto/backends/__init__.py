from .protocol import (  # noqa: F401
    KINDS,
    BackendRequest,
    BackendResponse,
    JudgeScores,
    MediaRef,
    validate_request,
)
from .client import BackendClient, HttpTransport, InProcessTransport  # noqa: F401
from .mocks import MockBackendHost  # noqa: F401
