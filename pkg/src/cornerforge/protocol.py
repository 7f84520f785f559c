"""HTTP wire protocol between the pipeline and generation services.

POST /v1/generate, request body JSON:

    {"version": "1.0", "kind": "mask_conditioned" | "diffusion",
     "class_name": str, "class_id": int, "seed": int,
     "mask_rect": {"x": int, "y": int, "w": int, "h": int},
     "prompt": str | null, "patch_png": base64, "params": {str: str}}

200 response: {"patch_png": base64, "backend_id": str}. Errors come back as
4xx/5xx with {"error": str}. GET /v1/health answers
{"status": "ok", "kind": ...}. All PNG payloads are RGB8.

The in-process :class:`StubServer` answers this protocol by echoing the
request patch back; its failure modes let tests exercise every client-side
ProtocolError path.
"""

from __future__ import annotations

import base64
import binascii
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import TYPE_CHECKING

import numpy as np
import requests

from .errors import BackendUnreachable, GenerationTimeout, ProtocolError
from .imaging import decode_png, encode_png

if TYPE_CHECKING:
    from .backends import GenerationRequest

PROTOCOL_VERSION = "1.0"
WIRE_KINDS = ("mask_conditioned", "diffusion")


def request_to_wire(kind: str, req: "GenerationRequest") -> dict:
    if kind not in WIRE_KINDS:
        raise ValueError(f"unknown wire kind {kind!r}")
    pixels = req.conditioned.pixels if req.conditioned is not None else req.crop
    return {
        "version": req.protocol_version,
        "kind": kind,
        "class_name": req.class_name,
        "class_id": int(req.class_id),
        "seed": int(req.seed),
        "mask_rect": req.mask_rect.to_dict(),
        "prompt": req.prompt,
        "patch_png": base64.b64encode(encode_png(pixels)).decode("ascii"),
        "params": dict(req.backend_params),
    }


def decode_patch_field(payload: dict) -> np.ndarray:
    """Decode the base64 PNG in `payload["patch_png"]` or raise ProtocolError."""
    if not isinstance(payload, dict) or "patch_png" not in payload:
        raise ProtocolError("response JSON lacks patch_png")
    try:
        raw = base64.b64decode(payload["patch_png"], validate=True)
    except (binascii.Error, TypeError, ValueError) as exc:
        raise ProtocolError(f"patch_png is not valid base64: {exc}") from exc
    try:
        return decode_png(raw)
    except Exception as exc:
        raise ProtocolError(f"patch_png does not decode as PNG: {exc}") from exc


def remote_generate(endpoint: str, kind: str, req: "GenerationRequest",
                    timeout_s: float = 30.0) -> tuple[np.ndarray, str]:
    """POST one generation request; returns (patch, backend_id).

    One retry on transport failure, then BackendUnreachable. Timeouts raise
    GenerationTimeout; every malformed answer raises ProtocolError.
    """
    url = endpoint.rstrip("/") + "/v1/generate"
    body = request_to_wire(kind, req)
    resp = None
    for attempt in (0, 1):
        try:
            resp = requests.post(url, json=body, timeout=timeout_s)
            break
        except requests.Timeout as exc:
            raise GenerationTimeout(f"{url} did not answer within {timeout_s}s") from exc
        except requests.RequestException as exc:
            if attempt == 1:
                raise BackendUnreachable(f"{url} unreachable after retry: {exc}") from exc
    if resp.status_code != 200:
        detail = ""
        try:
            detail = resp.json().get("error", "")
        except Exception:
            detail = resp.text[:200]
        raise ProtocolError(f"{url} answered {resp.status_code}: {detail}")
    try:
        payload = resp.json()
    except ValueError as exc:
        raise ProtocolError(f"{url} answered 200 with non-JSON body") from exc
    patch = decode_patch_field(payload)
    backend_id = payload.get("backend_id")
    if not isinstance(backend_id, str) or not backend_id:
        raise ProtocolError("response lacks a backend_id string")
    return patch, backend_id


def check_health(endpoint: str, timeout_s: float = 5.0) -> dict:
    url = endpoint.rstrip("/") + "/v1/health"
    try:
        resp = requests.get(url, timeout=timeout_s)
    except requests.Timeout as exc:
        raise GenerationTimeout(f"{url} health check timed out") from exc
    except requests.RequestException as exc:
        raise BackendUnreachable(f"{url} unreachable: {exc}") from exc
    if resp.status_code != 200:
        raise ProtocolError(f"{url} answered {resp.status_code}")
    try:
        payload = resp.json()
    except ValueError as exc:
        raise ProtocolError(f"{url} health body is not JSON") from exc
    if payload.get("status") != "ok":
        raise ProtocolError(f"health status is {payload.get('status')!r}, expected 'ok'")
    return payload


REQUIRED_REQUEST_FIELDS = (
    "version", "kind", "class_name", "class_id", "seed",
    "mask_rect", "patch_png", "params",
)


def validate_wire_request(payload) -> list[str]:
    """Field-level problems with an incoming generate request (empty = valid)."""
    problems = []
    if not isinstance(payload, dict):
        return ["body is not a JSON object"]
    for name in REQUIRED_REQUEST_FIELDS:
        if name not in payload:
            problems.append(f"missing field {name!r}")
    if payload.get("kind") not in WIRE_KINDS:
        problems.append(f"kind must be one of {WIRE_KINDS}")
    rect = payload.get("mask_rect")
    if not (isinstance(rect, dict) and all(k in rect for k in ("x", "y", "w", "h"))):
        problems.append("mask_rect must carry x, y, w, h")
    if payload.get("kind") == "diffusion" and not payload.get("prompt"):
        problems.append("diffusion requests require a prompt")
    return problems


class StubServer:
    """Protocol-conformant echo server for tests and conformance runs.

    failure_mode (tests only) selects one way to misbehave:
    wrong_size, garbage_b64, not_json, http_500, missing_field.
    """

    def __init__(self, kind: str = "mask_conditioned", failure_mode: str | None = None):
        self.kind = kind
        self.failure_mode = failure_mode
        self.requests_seen: list[dict] = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):
                pass

            def _send(self, code: int, body: bytes,
                      content_type: str = "application/json") -> None:
                self.send_response(code)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def _send_json(self, code: int, obj) -> None:
                self._send(code, json.dumps(obj).encode("utf-8"))

            def do_GET(self):
                if self.path == "/v1/health":
                    self._send_json(200, {"status": "ok", "kind": stub.kind})
                else:
                    self._send_json(404, {"error": f"no route {self.path}"})

            def do_POST(self):
                if self.path != "/v1/generate":
                    self._send_json(404, {"error": f"no route {self.path}"})
                    return
                length = int(self.headers.get("Content-Length", "0"))
                raw = self.rfile.read(length)
                try:
                    payload = json.loads(raw)
                except ValueError:
                    self._send_json(400, {"error": "body is not JSON"})
                    return
                problems = validate_wire_request(payload)
                if problems:
                    self._send_json(400, {"error": "; ".join(problems)})
                    return
                try:
                    patch = decode_patch_field(payload)
                except ProtocolError as exc:
                    self._send_json(422, {"error": str(exc)})
                    return
                stub.requests_seen.append(
                    {k: payload[k] for k in payload if k != "patch_png"})

                mode = stub.failure_mode
                if mode == "http_500":
                    self._send_json(500, {"error": "injected failure"})
                elif mode == "not_json":
                    self._send(200, b"this is not json", "text/plain")
                elif mode == "garbage_b64":
                    self._send_json(200, {"patch_png": "!!!not-base64!!!",
                                          "backend_id": "stub-broken"})
                elif mode == "wrong_size":
                    tiny = np.zeros((8, 8, 3), dtype=np.uint8)
                    self._send_json(200, {
                        "patch_png": base64.b64encode(encode_png(tiny)).decode("ascii"),
                        "backend_id": "stub-broken",
                    })
                elif mode == "missing_field":
                    self._send_json(200, {"backend_id": "stub-broken"})
                else:
                    self._send_json(200, {
                        "patch_png": base64.b64encode(encode_png(patch)).decode("ascii"),
                        "backend_id": "stub-echo",
                    })

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def __enter__(self) -> "StubServer":
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self._server.shutdown()
        self._server.server_close()
