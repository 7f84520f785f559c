"""Protocol conformance checks, runnable against any generation server.

Each check is independent and never lets an exception escape: a misbehaving
server produces FAIL lines, not a crash. The same suite validates the
in-process stub and external neural services.
"""

from __future__ import annotations

import base64
import io
import json
from dataclasses import dataclass

import numpy as np
import requests
from PIL import Image

from . import protocol
from .backends import GenerationRequest
from .conditioning import build_prompt, compose_condition_patch
from .imaging import ClassPalette, CropRegion

PROBE_CLASS = "airplane"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _probe_request(size: int, kind: str, seed: int = 7) -> GenerationRequest:
    """Synthetic request: gradient crop, centered square mask."""
    ramp = np.linspace(40, 215, size).astype(np.uint8)
    crop = np.stack([np.tile(ramp, (size, 1))] * 3, axis=2)
    side = max(2, size // 4)
    rect = CropRegion((size - side) // 2, (size - side) // 2, side, side)
    mask = np.zeros((side, side), dtype=bool)
    mask[1:-1, 1:-1] = True
    palette = ClassPalette([(PROBE_CLASS, (255, 0, 0))])
    if kind == "diffusion":
        return GenerationRequest(class_name=PROBE_CLASS, class_id=0, seed=seed,
                                 mask_rect=rect, crop=crop,
                                 prompt=build_prompt(PROBE_CLASS))
    cond = compose_condition_patch(crop, mask, rect, palette, 0)
    return GenerationRequest(class_name=PROBE_CLASS, class_id=0, seed=seed,
                             mask_rect=rect, conditioned=cond)


def run_conformance(endpoint: str, size: int = 256, kind: str | None = None,
                    timeout_s: float = 30.0) -> list[CheckResult]:
    """Run the full check list; returns one CheckResult per check."""
    results: list[CheckResult] = []

    def record(name: str, fn) -> object:
        try:
            detail = fn()
            results.append(CheckResult(name, True, detail or ""))
            return True
        except Exception as exc:
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
            return False

    health_payload = {}

    def check_health():
        health_payload.update(protocol.check_health(endpoint, timeout_s=timeout_s))
        if "kind" not in health_payload:
            raise AssertionError("health payload lacks 'kind'")
        return f"kind={health_payload['kind']}"

    record("health_endpoint", check_health)
    wire_kind = kind or health_payload.get("kind", "mask_conditioned")
    if wire_kind not in protocol.WIRE_KINDS:
        wire_kind = "mask_conditioned"

    def check_roundtrip():
        req = _probe_request(size, wire_kind)
        patch, backend_id = protocol.remote_generate(endpoint, wire_kind, req,
                                                     timeout_s=timeout_s)
        if patch.shape[:2] != (size, size):
            raise AssertionError(
                f"shape contract broken: got {patch.shape[1]}x{patch.shape[0]}")
        return f"{size}x{size} from backend_id={backend_id!r}"

    record("generate_shape_roundtrip", check_roundtrip)

    def check_rgb8():
        req = _probe_request(size, wire_kind, seed=11)
        url = endpoint.rstrip("/") + "/v1/generate"
        resp = requests.post(url, json=protocol.request_to_wire(wire_kind, req),
                             timeout=timeout_s)
        if resp.status_code != 200:
            raise AssertionError(f"status {resp.status_code}")
        raw = base64.b64decode(resp.json()["patch_png"])
        with Image.open(io.BytesIO(raw)) as im:
            if im.mode != "RGB":
                raise AssertionError(f"patch PNG mode is {im.mode}, expected RGB")
        return "patch PNG is RGB8"

    record("generate_rgb8_payload", check_rgb8)

    def _post_raw(body: bytes) -> requests.Response:
        return requests.post(endpoint.rstrip("/") + "/v1/generate", data=body,
                             headers={"Content-Type": "application/json"},
                             timeout=timeout_s)

    def check_rejects_non_json():
        resp = _post_raw(b"definitely not json{{{")
        if not 400 <= resp.status_code < 500:
            raise AssertionError(f"expected 4xx, got {resp.status_code}")
        if "error" not in resp.json():
            raise AssertionError("error body lacks 'error' field")
        return f"rejected with {resp.status_code}"

    record("rejects_non_json_body", check_rejects_non_json)

    def check_rejects_missing_field():
        body = protocol.request_to_wire(wire_kind, _probe_request(size, wire_kind))
        del body["patch_png"]
        resp = _post_raw(json.dumps(body).encode("utf-8"))
        if not 400 <= resp.status_code < 500:
            raise AssertionError(f"expected 4xx, got {resp.status_code}")
        return f"rejected with {resp.status_code}"

    record("rejects_missing_patch", check_rejects_missing_field)

    def check_rejects_bad_png():
        body = protocol.request_to_wire(wire_kind, _probe_request(size, wire_kind))
        body["patch_png"] = base64.b64encode(b"not a png at all").decode("ascii")
        resp = _post_raw(json.dumps(body).encode("utf-8"))
        if not 400 <= resp.status_code < 500:
            raise AssertionError(f"expected 4xx, got {resp.status_code}")
        return f"rejected with {resp.status_code}"

    record("rejects_undecodable_png", check_rejects_bad_png)

    return results


def format_results(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        line = f"[{mark}] {r.name}"
        if r.detail:
            line += f" - {r.detail}"
        lines.append(line)
    failed = sum(1 for r in results if not r.passed)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)
