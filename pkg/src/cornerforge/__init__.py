"""Synthetic dataset bootstrapping for airborne-object detection.

Plan deterministic object placements over real backgrounds, condition a
generator (procedural or remote neural) on class-colored mask patches,
composite the results back, and emit pixel-exact ground truth with YOLO and
COCO exports plus detection-metric evaluation.
"""

from .backends import BackendDescriptor, GenerationRequest, derive_ground_truth, generate
from .conditioning import ConditionedPatch, build_prompt, compose_condition_patch
from .config import RunConfig, default_palette, load_run_config
from .dataset import (
    GenerationManifest,
    ObjectPool,
    execute_plan,
    plan_dataset,
    scan_backgrounds,
)
from .errors import CornerforgeError
from .evaluation import Detection, EvalReport, GroundTruthBox, evaluate, iou
from .imaging import BBox, ClassPalette, CropRegion, extract_crop, merge_patch
from .placement import Placement, PlacementConfig, sample_placement
from .rng import RNG_ALGORITHM, SplitMix64, hash64

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "BackendDescriptor",
    "ClassPalette",
    "ConditionedPatch",
    "CornerforgeError",
    "CropRegion",
    "Detection",
    "EvalReport",
    "GenerationManifest",
    "GenerationRequest",
    "GroundTruthBox",
    "ObjectPool",
    "Placement",
    "PlacementConfig",
    "RNG_ALGORITHM",
    "RunConfig",
    "SplitMix64",
    "build_prompt",
    "compose_condition_patch",
    "default_palette",
    "derive_ground_truth",
    "evaluate",
    "execute_plan",
    "extract_crop",
    "generate",
    "hash64",
    "iou",
    "load_run_config",
    "merge_patch",
    "plan_dataset",
    "sample_placement",
    "scan_backgrounds",
    "__version__",
]
