"""HTTP server exposing the mock backends over the real wire path.

Stateless: every request is handled purely from its body plus the media
root. Bodies and responses are canonical JSON so conformance vectors can
be compared byte-for-byte against what travels on the wire.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from ..encoding import canonical_json
from ..errors import DittoError, InvalidRequest
from .mocks import MockBackendHost
from .protocol import KINDS, BackendRequest


def make_handler(host: MockBackendHost):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, *args):
            pass

        def _send(self, code: int, body: bytes):
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _error(self, code: int, message: str):
            self._send(code, canonical_json({"error": message}).encode("utf-8"))

        def do_POST(self):
            if not self.path.startswith("/v1/"):
                return self._error(404, f"no such path {self.path}")
            kind = self.path[len("/v1/"):]
            if kind not in KINDS:
                return self._error(404, f"unknown backend kind {kind!r}")
            try:
                length = int(self.headers.get("Content-Length", "0"))
                body = json.loads(self.rfile.read(length).decode("utf-8"))
                req = BackendRequest.from_wire(kind, body)
            except (ValueError, KeyError, TypeError, InvalidRequest) as e:
                return self._error(400, f"malformed request: {e}")
            try:
                resp = host.handle(req)
            except InvalidRequest as e:
                return self._error(400, str(e))
            except DittoError as e:
                failure = {
                    "request_id": req.request_id,
                    "status": "BACKEND_FAILURE",
                    "outputs": {"error": str(e)},
                    "gpu_seconds": 0,
                    "model_id": "mock",
                }
                return self._send(200, canonical_json(failure).encode("utf-8"))
            self._send(200, resp.serialize().encode("utf-8"))

    return Handler


class MockServer:
    """Threaded mock backend service; use as a context manager in tests."""

    def __init__(self, media_root, address: str = "127.0.0.1", port: int = 0):
        self.host = MockBackendHost(media_root)
        self.httpd = ThreadingHTTPServer((address, port), make_handler(self.host))
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        a, p = self.httpd.server_address[:2]
        return f"http://{a}:{p}"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        self.httpd.server_close()
        self.thread.join(timeout=5)


def serve_forever(media_root, address: str = "127.0.0.1", port: int = 8787):
    server = MockServer(media_root, address, port)
    print(f"mock backends listening on {server.url} (media root {media_root})")
    server.thread.start()
    try:
        server.thread.join()
    except KeyboardInterrupt:
        server.httpd.shutdown()
