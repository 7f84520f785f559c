"""Pixel-kernel dispatch.

The compiled extension is used when built; the NumPy implementation in
``pyref`` is the behavioral reference and the fallback. Set
``CORNERFORGE_KERNELS=python`` or ``=compiled`` to force a lane.
"""

import os

from . import pyref

_force = os.environ.get("CORNERFORGE_KERNELS", "").strip().lower()

_compiled = None
if _force != "python":
    try:
        from . import _core as _compiled  # type: ignore[attr-defined]
    except ImportError:
        if _force == "compiled":
            raise ImportError(
                "CORNERFORGE_KERNELS=compiled, but the extension is not built; "
                "run `pip install -e . --no-build-isolation` with Cython available"
            ) from None

if _compiled is not None:
    BACKEND = "compiled"
    compose_zones = _compiled.compose_zones
    procedural_fill = _compiled.procedural_fill
    feather_blend = _compiled.feather_blend
else:
    BACKEND = "python"
    compose_zones = pyref.compose_zones
    procedural_fill = pyref.procedural_fill
    feather_blend = pyref.feather_blend


def implementations():
    """Available kernel implementations by name (for tests and benchmarks)."""
    impls = {"python": pyref}
    if _compiled is not None:
        impls["compiled"] = _compiled
    return impls
