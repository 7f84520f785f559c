"""HTTP generation service.

Implements the patch generation wire protocol: GET /v1/health and
POST /v1/generate with a base64 RGB8 PNG payload. Responses always match
the request patch's dimensions — the engine runs at its own fixed
resolution and the server resizes on the way in and out. One inference
runs at a time per process; scale horizontally with more processes.

Error mapping: 400 for bodies that are not valid requests, 422 for a
patch that does not decode as an image, 500 with the error string when
inference itself fails.
"""

from __future__ import annotations

import base64
import binascii
import io
import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import torch
from PIL import Image

from .configs import DiffusionConfig
from .diffusion import DdimSampler, PromptEncoder, ToyDenoiser
from .training import _to_tensor, load_generator, to_image

log = logging.getLogger(__name__)

WIRE_KINDS = ("mask_conditioned", "diffusion")
REQUIRED_FIELDS = ("version", "kind", "class_name", "class_id", "seed",
                   "mask_rect", "patch_png", "params")


def request_problems(payload, server_kind: str) -> list[str]:
    """Field-level problems with a generate request (empty list = valid)."""
    if not isinstance(payload, dict):
        return ["body is not a JSON object"]
    problems = [f"missing field {name!r}"
                for name in REQUIRED_FIELDS if name not in payload]
    kind = payload.get("kind")
    if kind not in WIRE_KINDS:
        problems.append(f"kind must be one of {WIRE_KINDS}")
    elif kind != server_kind:
        problems.append(f"this server generates {server_kind}, request asks for {kind}")
    rect = payload.get("mask_rect")
    if not (isinstance(rect, dict) and all(k in rect for k in ("x", "y", "w", "h"))):
        problems.append("mask_rect must carry x, y, w, h")
    if kind == "diffusion" and not payload.get("prompt"):
        problems.append("diffusion requests require a prompt")
    return problems


class PatchDecodeError(ValueError):
    pass


def decode_patch(b64_png: str) -> np.ndarray:
    try:
        raw = base64.b64decode(b64_png, validate=True)
    except (binascii.Error, TypeError, ValueError) as exc:
        raise PatchDecodeError(f"patch_png is not valid base64: {exc}") from exc
    try:
        with Image.open(io.BytesIO(raw)) as im:
            return np.asarray(im.convert("RGB"))
    except PatchDecodeError:
        raise
    except Exception as exc:
        raise PatchDecodeError(f"patch_png does not decode as an image: {exc}") from exc


def encode_patch(arr: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(arr, "RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _resize(arr: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    if arr.shape[:2] == (size[1], size[0]):
        return arr
    with Image.fromarray(arr, "RGB") as im:
        return np.asarray(im.resize(size, Image.BILINEAR))


class CganEngine:
    """Trained conditional generator behind the mask_conditioned kind."""

    kind = "mask_conditioned"

    def __init__(self, checkpoint_path, device: str = "cpu"):
        self.generator, self.config = load_generator(checkpoint_path, device)
        self.device = device
        side = self.config.resolution[0]
        self.resolution = (side, side)
        self.backend_id = f"unet-cgan-{side}px"

    def generate(self, patch: np.ndarray, payload: dict) -> np.ndarray:
        x = _to_tensor(patch)[None].to(self.device)
        with torch.no_grad():
            out = self.generator(x)[0]
        return to_image(out)


class DiffusionEngine:
    """DDIM image-to-image behind the diffusion kind."""

    kind = "diffusion"

    def __init__(self, config: DiffusionConfig | None = None,
                 model: torch.nn.Module | None = None, device: str = "cpu"):
        self.config = config or DiffusionConfig()
        self.sampler = DdimSampler(self.config, model or ToyDenoiser(),
                                   encoder=PromptEncoder(), device=device)
        self.resolution = self.config.resolution
        self.backend_id = f"ddim-img2img-{self.resolution[0]}px"

    def generate(self, patch: np.ndarray, payload: dict) -> np.ndarray:
        out = self.sampler.img2img(_to_tensor(patch),
                                   prompt=payload["prompt"],
                                   seed=int(payload["seed"]))
        return to_image(out)


class GenerationServer:
    """Serves one engine over the wire protocol; context manager for tests."""

    def __init__(self, engine, host: str = "127.0.0.1", port: int = 0):
        self.engine = engine
        self.prompts_seen: list[str] = []
        self._inference = threading.Lock()
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):
                pass

            def _send_json(self, code: int, obj) -> None:
                body = json.dumps(obj).encode("utf-8")
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/v1/health":
                    self._send_json(200, {"status": "ok", "kind": server.engine.kind})
                else:
                    self._send_json(404, {"error": f"no route {self.path}"})

            def do_POST(self):
                if self.path != "/v1/generate":
                    self._send_json(404, {"error": f"no route {self.path}"})
                    return
                length = int(self.headers.get("Content-Length", "0"))
                try:
                    payload = json.loads(self.rfile.read(length))
                except ValueError:
                    self._send_json(400, {"error": "body is not JSON"})
                    return
                problems = request_problems(payload, server.engine.kind)
                if problems:
                    self._send_json(400, {"error": "; ".join(problems)})
                    return
                try:
                    patch = decode_patch(payload["patch_png"])
                except PatchDecodeError as exc:
                    self._send_json(422, {"error": str(exc)})
                    return
                if payload["kind"] == "diffusion":
                    log.info("prompt: %s", payload["prompt"])
                    server.prompts_seen.append(payload["prompt"])
                try:
                    with server._inference:
                        h, w = patch.shape[:2]
                        working = _resize(patch, server.engine.resolution)
                        out = server.engine.generate(working, payload)
                        out = _resize(out, (w, h))
                except Exception as exc:
                    log.exception("inference failed")
                    self._send_json(500, {"error": str(exc)})
                    return
                self._send_json(200, {"patch_png": encode_patch(out),
                                      "backend_id": server.engine.backend_id})

        self._server = ThreadingHTTPServer((host, port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "GenerationServer":
        self._thread.start()
        log.info("serving %s (%s) at %s", self.engine.kind,
                 self.engine.backend_id, self.url)
        return self

    def shutdown(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "GenerationServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.shutdown()
