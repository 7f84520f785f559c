"""Generation backends: uniform interface, procedural stand-in, ground truth.

Three kinds are supported. `procedural` renders a deterministic texture
in-process and exists so the whole pipeline can run and be tested without any
neural component. The two `remote_*` kinds speak the HTTP wire protocol in
:mod:`cornerforge.protocol` to an external generation service.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, protocol
from .conditioning import ConditionedPatch
from .errors import EmptyMask, ProtocolError, WrongRequestKind
from .imaging import BBox, CropRegion, ensure_image, mask_bbox

BACKEND_KINDS = ("procedural", "remote_mask_conditioned", "remote_diffusion")
GT_RULES = ("mask_rect_tight", "whole_patch")


@dataclass(frozen=True)
class BackendDescriptor:
    """Which generator to call and how to derive ground truth from it.

    Diffusion backends cannot pin the object to the mask, so their ground
    truth is the whole patch; mask-conditioned backends fill the mask exactly
    and get tight boxes.
    """

    kind: str
    endpoint: str | None = None
    gt_rule: str = "mask_rect_tight"
    timeout_s: float = 30.0

    def __post_init__(self):
        if self.kind not in BACKEND_KINDS:
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.gt_rule not in GT_RULES:
            raise ValueError(f"unknown gt rule {self.gt_rule!r}")
        if self.kind.startswith("remote_") and not self.endpoint:
            raise ValueError(f"backend kind {self.kind} requires an endpoint")
        if (self.gt_rule == "whole_patch") != (self.kind == "remote_diffusion"):
            raise ValueError("gt_rule must be whole_patch exactly for remote_diffusion")
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be > 0")

    @property
    def wire_kind(self) -> str:
        return "diffusion" if self.kind == "remote_diffusion" else "mask_conditioned"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "endpoint": self.endpoint,
                "gt_rule": self.gt_rule, "timeout_s": self.timeout_s}

    @classmethod
    def from_dict(cls, d: dict) -> "BackendDescriptor":
        return cls(kind=d["kind"], endpoint=d.get("endpoint"),
                   gt_rule=d.get("gt_rule", "mask_rect_tight"),
                   timeout_s=float(d.get("timeout_s", 30.0)))

    @classmethod
    def procedural(cls) -> "BackendDescriptor":
        return cls(kind="procedural")


@dataclass
class GenerationRequest:
    """One patch to generate.

    Exactly one of `conditioned` (mask-conditioned backends) or
    `crop` + `prompt` (diffusion backends) is populated.
    """

    class_name: str
    class_id: int
    seed: int
    mask_rect: CropRegion
    conditioned: ConditionedPatch | None = None
    crop: np.ndarray | None = None
    prompt: str | None = None
    backend_params: dict[str, str] = field(default_factory=dict)
    protocol_version: str = protocol.PROTOCOL_VERSION

    def patch_dims(self) -> tuple[int, int]:
        """(w, h) of whichever pixel payload is populated."""
        img = self.conditioned.pixels if self.conditioned is not None else self.crop
        if img is None:
            raise WrongRequestKind("request has neither conditioned patch nor crop")
        return img.shape[1], img.shape[0]

    def check_kind(self, backend: BackendDescriptor) -> None:
        if backend.kind == "remote_diffusion":
            if self.crop is None or self.conditioned is not None or not self.prompt:
                raise WrongRequestKind(
                    "diffusion backends take a plain crop plus prompt")
        else:
            if self.conditioned is None or self.crop is not None:
                raise WrongRequestKind(
                    "mask-conditioned backends take a conditioned patch")


@dataclass(frozen=True)
class GenerationResult:
    patch: np.ndarray
    backend_id: str
    latency_ms: float


def procedural_generate(req: GenerationRequest) -> np.ndarray:
    """Deterministic in-process generator.

    Paints a seeded luminance-noise texture over the class color inside the
    mask and lerps the black surround away from the rectangle borders. Not
    meant to look real; meant to make every pipeline invariant testable.
    """
    if req.conditioned is None:
        raise WrongRequestKind("procedural backend needs a conditioned patch")
    cond = req.conditioned
    if not cond.mask.any():
        raise EmptyMask("conditioned patch has an empty mask")
    ys, xs = np.nonzero(cond.mask)
    color = tuple(int(v) for v in cond.pixels[ys[0] + cond.mask_rect.y,
                                              xs[0] + cond.mask_rect.x])
    out = np.ascontiguousarray(cond.pixels.copy())
    _kernels.procedural_fill(out, cond.mask, cond.mask_rect.x, cond.mask_rect.y,
                             color, req.seed)
    return out


def generate(backend: BackendDescriptor, req: GenerationRequest) -> GenerationResult:
    """Run one generation and enforce the shape contract on the result."""
    req.check_kind(backend)
    want_w, want_h = req.patch_dims()
    t0 = time.perf_counter()
    if backend.kind == "procedural":
        patch = procedural_generate(req)
        backend_id = "procedural"
    else:
        patch, backend_id = protocol.remote_generate(
            backend.endpoint, backend.wire_kind, req, timeout_s=backend.timeout_s)
    latency_ms = (time.perf_counter() - t0) * 1000.0
    ensure_image(patch)
    if patch.shape[:2] != (want_h, want_w):
        raise ProtocolError(
            f"backend returned {patch.shape[1]}x{patch.shape[0]}, "
            f"request was {want_w}x{want_h}")
    return GenerationResult(patch=patch, backend_id=backend_id, latency_ms=latency_ms)


def derive_ground_truth(backend: BackendDescriptor, mask: np.ndarray,
                        mask_rect: CropRegion, crop: CropRegion) -> BBox:
    """Bounding box in background coordinates under the backend's gt rule."""
    if backend.gt_rule == "whole_patch":
        return BBox(crop.x, crop.y, crop.w, crop.h)
    tight = mask_bbox(mask)
    return BBox(tight.x + mask_rect.x + crop.x,
                tight.y + mask_rect.y + crop.y,
                tight.w, tight.h)
