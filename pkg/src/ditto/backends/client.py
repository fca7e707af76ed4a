"""Typed client over the backend wire protocol.

Two transports: in-process (default for tests and desk runs) and HTTP
against a ``mock-serve`` or real adapter process. All validation happens
client-side before anything touches a transport.
"""

import json
import urllib.error
import urllib.request

from ..encoding import canonical_json, hash_bytes
from ..errors import BackendFailure, BackendTimeout, MalformedResponse
from .mocks import MockBackendHost
from .protocol import BackendRequest, BackendResponse, MediaRef, validate_request


class InProcessTransport:
    def __init__(self, host: MockBackendHost):
        self.host = host

    def post(self, kind: str, body: dict) -> dict:
        req = BackendRequest.from_wire(kind, body)
        return self.host.handle(req).to_wire()


class HttpTransport:
    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def post(self, kind: str, body: dict) -> dict:
        data = canonical_json(body).encode("utf-8")
        req = urllib.request.Request(
            f"{self.base_url}/v1/{kind}",
            data=data,
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                raw = resp.read()
        except urllib.error.HTTPError as e:
            raise BackendFailure(f"{kind}: HTTP {e.code}: {e.read()[:200]!r}") from e
        except urllib.error.URLError as e:
            if isinstance(getattr(e, "reason", None), TimeoutError):
                raise BackendTimeout(f"{kind}: {e.reason}") from e
            raise BackendFailure(f"{kind}: {e.reason}") from e
        except TimeoutError as e:
            raise BackendTimeout(f"{kind}: timed out") from e
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise MalformedResponse(f"{kind}: unparseable body: {e}") from e


def default_request_id(kind: str, seed: int, inputs: dict) -> str:
    parts = [f"{k}={v.digest if isinstance(v, MediaRef) else v}" for k, v in sorted(inputs.items())]
    return f"{kind}-" + hash_bytes("ditto-request-id", kind, seed, *parts)[:8].hex()


class BackendClient:
    def __init__(self, transport):
        self.transport = transport

    def call(self, kind: str, inputs: dict, seed: int = 0, params: dict | None = None,
             request_id: str | None = None) -> BackendResponse:
        req = BackendRequest(
            kind=kind,
            request_id=request_id or default_request_id(kind, seed, inputs),
            seed=seed,
            inputs=inputs,
            params=params or {},
        )
        validate_request(req)
        wire = self.transport.post(kind, req.to_wire())
        resp = BackendResponse.from_wire(kind, wire)
        if resp.request_id != req.request_id:
            raise MalformedResponse(f"response for {resp.request_id}, expected {req.request_id}")
        if resp.status != "OK":
            raise BackendFailure(f"{kind}: {resp.outputs.get('error', 'backend failure')}")
        return resp

    # convenience wrappers, one per service kind

    def caption(self, video: MediaRef, seed: int = 0, **kw) -> BackendResponse:
        return self.call("caption", {"video": video}, seed, **kw)

    def instruct(self, video: MediaRef, caption: str, seed: int = 0, params=None, **kw) -> BackendResponse:
        return self.call("instruct", {"video": video, "caption": caption}, seed, params, **kw)

    def edit_image(self, frame: MediaRef, instruction: str, seed: int = 0, **kw) -> BackendResponse:
        return self.call("edit_image", {"frame": frame, "instruction": instruction}, seed, **kw)

    def predict_depth(self, video: MediaRef, seed: int = 0, **kw) -> BackendResponse:
        return self.call("depth", {"video": video}, seed, **kw)

    def generate_video(self, depth: MediaRef, edited_keyframe: MediaRef, instruction: str,
                       seed: int = 0, params=None, **kw) -> BackendResponse:
        inputs = {"depth_video": depth, "edited_keyframe": edited_keyframe, "instruction": instruction}
        return self.call("generate", inputs, seed, params, **kw)

    def judge(self, source: MediaRef, edited: MediaRef, instruction: str, seed: int = 0,
              params=None, **kw) -> BackendResponse:
        return self.call("judge", {"source": source, "edited": edited, "instruction": instruction},
                         seed, params, **kw)

    def enhance(self, video: MediaRef, seed: int = 0, params=None, **kw) -> BackendResponse:
        return self.call("enhance", {"video": video}, seed, params, **kw)
