import base64
import json

import numpy as np
import pytest
import requests

from cornerforge.backends import BackendDescriptor, GenerationRequest, generate
from cornerforge.conditioning import compose_condition_patch
from cornerforge.errors import BackendUnreachable, GenerationTimeout, ProtocolError
from cornerforge.imaging import ClassPalette, CropRegion, decode_png, encode_png
from cornerforge.protocol import (
    PROTOCOL_VERSION,
    StubServer,
    check_health,
    remote_generate,
    request_to_wire,
    validate_wire_request,
)

PALETTE = ClassPalette([("airplane", (255, 0, 0))])


def _conditioned_request(seed=3):
    rng = np.random.default_rng(seed)
    crop = rng.integers(20, 230, (40, 40, 3), dtype=np.uint8)
    rect = CropRegion(8, 6, 18, 14)
    mask = np.zeros((rect.h, rect.w), dtype=bool)
    mask[2:-2, 3:-3] = True
    cond = compose_condition_patch(crop, mask, rect, PALETTE, 0)
    return GenerationRequest(class_name="airplane", class_id=0, seed=seed,
                             mask_rect=rect, conditioned=cond)


def _diffusion_request(seed=4):
    rng = np.random.default_rng(seed)
    crop = rng.integers(20, 230, (40, 40, 3), dtype=np.uint8)
    return GenerationRequest(class_name="airplane", class_id=0, seed=seed,
                             mask_rect=CropRegion(8, 6, 18, 14), crop=crop,
                             prompt="a photograph of an airplane, Nikon D850")


# ---------------------------------------------------------------------------
# wire encoding


def test_request_to_wire_shape():
    req = _conditioned_request()
    body = request_to_wire("mask_conditioned", req)
    assert body["version"] == PROTOCOL_VERSION == "1.0"
    assert body["kind"] == "mask_conditioned"
    assert body["class_name"] == "airplane"
    assert body["class_id"] == 0 and body["seed"] == 3
    assert body["mask_rect"] == {"x": 8, "y": 6, "w": 18, "h": 14}
    assert body["prompt"] is None
    assert body["params"] == {}
    round_trip = decode_png(base64.b64decode(body["patch_png"]))
    assert np.array_equal(round_trip, req.conditioned.pixels)


def test_request_to_wire_diffusion_carries_raw_crop():
    req = _diffusion_request()
    body = request_to_wire("diffusion", req)
    assert body["prompt"].startswith("a photograph of")
    assert np.array_equal(decode_png(base64.b64decode(body["patch_png"])), req.crop)


def test_request_to_wire_rejects_unknown_kind():
    with pytest.raises(ValueError):
        request_to_wire("telepathy", _conditioned_request())


def test_validate_wire_request_problems():
    assert validate_wire_request([1, 2]) == ["body is not a JSON object"]
    body = request_to_wire("mask_conditioned", _conditioned_request())
    assert validate_wire_request(body) == []
    del body["seed"]
    body["kind"] = "telepathy"
    body["mask_rect"] = {"x": 1}
    problems = validate_wire_request(body)
    assert any("seed" in p for p in problems)
    assert any("kind" in p for p in problems)
    assert any("mask_rect" in p for p in problems)


def test_validate_wire_request_diffusion_needs_prompt():
    body = request_to_wire("diffusion", _diffusion_request())
    assert validate_wire_request(body) == []
    body["prompt"] = None
    assert any("prompt" in p for p in validate_wire_request(body))


# ---------------------------------------------------------------------------
# round trips against the stub


def test_stub_echo_round_trip():
    req = _conditioned_request()
    with StubServer() as stub:
        patch, backend_id = remote_generate(stub.url, "mask_conditioned", req)
    assert backend_id == "stub-echo"
    assert np.array_equal(patch, req.conditioned.pixels)
    assert stub.requests_seen and "patch_png" not in stub.requests_seen[0]


def test_generate_through_remote_descriptor():
    req = _conditioned_request()
    with StubServer() as stub:
        backend = BackendDescriptor(kind="remote_mask_conditioned",
                                    endpoint=stub.url)
        res = generate(backend, req)
    assert res.backend_id == "stub-echo"
    assert np.array_equal(res.patch, req.conditioned.pixels)


def test_generate_diffusion_through_stub():
    req = _diffusion_request()
    with StubServer(kind="diffusion") as stub:
        backend = BackendDescriptor(kind="remote_diffusion", endpoint=stub.url,
                                    gt_rule="whole_patch")
        res = generate(backend, req)
    assert np.array_equal(res.patch, req.crop)


def test_health_check():
    with StubServer(kind="diffusion") as stub:
        payload = check_health(stub.url)
    assert payload == {"status": "ok", "kind": "diffusion"}


# ---------------------------------------------------------------------------
# failure modes, one per way a backend can lie


def test_failure_wrong_size_caught_by_shape_contract():
    req = _conditioned_request()
    with StubServer(failure_mode="wrong_size") as stub:
        backend = BackendDescriptor(kind="remote_mask_conditioned",
                                    endpoint=stub.url)
        with pytest.raises(ProtocolError, match="request was 40x40"):
            generate(backend, req)


@pytest.mark.parametrize("mode,needle", [
    ("garbage_b64", "base64"),
    ("not_json", "non-JSON"),
    ("http_500", "500"),
    ("missing_field", "patch_png"),
])
def test_failure_modes_raise_protocol_error(mode, needle):
    req = _conditioned_request()
    with StubServer(failure_mode=mode) as stub:
        with pytest.raises(ProtocolError, match=needle):
            remote_generate(stub.url, "mask_conditioned", req)


def test_server_rejects_non_json_body():
    with StubServer() as stub:
        resp = requests.post(stub.url + "/v1/generate", data=b"{{nope",
                             timeout=5)
    assert resp.status_code == 400
    assert "error" in resp.json()


def test_server_rejects_undecodable_patch():
    body = request_to_wire("mask_conditioned", _conditioned_request())
    body["patch_png"] = base64.b64encode(b"not a png").decode("ascii")
    with StubServer() as stub:
        resp = requests.post(stub.url + "/v1/generate", json=body, timeout=5)
    assert resp.status_code == 422


def test_server_rejects_missing_fields():
    with StubServer() as stub:
        resp = requests.post(stub.url + "/v1/generate",
                             data=json.dumps({"kind": "mask_conditioned"}),
                             headers={"Content-Type": "application/json"},
                             timeout=5)
    assert resp.status_code == 400
    assert "missing field" in resp.json()["error"]


# ---------------------------------------------------------------------------
# transport failures


def test_unreachable_backend_after_retry():
    stub = StubServer()
    with stub:
        url = stub.url
    # context exited: socket closed, connections now refused
    with pytest.raises(BackendUnreachable, match="after retry"):
        remote_generate(url, "mask_conditioned", _conditioned_request(),
                        timeout_s=2.0)
    with pytest.raises(BackendUnreachable):
        check_health(url, timeout_s=2.0)


def test_timeout_maps_to_generation_timeout(monkeypatch):
    def slow_post(*args, **kwargs):
        raise requests.Timeout("simulated")

    monkeypatch.setattr(requests, "post", slow_post)
    with pytest.raises(GenerationTimeout):
        remote_generate("http://127.0.0.1:1", "mask_conditioned",
                        _conditioned_request(), timeout_s=0.01)
