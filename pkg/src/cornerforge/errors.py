"""Exception types shared across the pipeline."""


class CornerforgeError(Exception):
    """Base class for all pipeline errors."""


class RegionOutOfBounds(CornerforgeError):
    """A crop region exceeds the extents of the image it is bound to."""


class DimensionMismatch(CornerforgeError):
    """Two rasters that must share dimensions do not."""


class EmptyMask(CornerforgeError):
    """A binary mask with no set pixels where at least one is required."""


class BackgroundTooSmall(CornerforgeError):
    """Background image cannot contain the requested crop plus margins."""


class UnknownClass(CornerforgeError):
    """Class id or name not present in the palette."""


class EmptyClassName(CornerforgeError):
    """Prompt construction requires a non-empty class name."""


class WrongRequestKind(CornerforgeError):
    """Generation request payload does not match the backend kind."""


class BackendUnreachable(CornerforgeError):
    """Remote backend could not be reached after retry."""


class GenerationTimeout(CornerforgeError):
    """Remote backend did not answer within the configured timeout."""


class ProtocolError(CornerforgeError):
    """Remote backend answered, but not in the agreed wire format."""


class InsufficientBackgrounds(CornerforgeError):
    """Not enough background images to give every split a disjoint set."""


class EmptyPool(CornerforgeError):
    """Object pool has no entry satisfying the request."""


class MissingImage(CornerforgeError):
    """An annotation references an image that does not exist."""


class ExecutionFailed(CornerforgeError):
    """A dataset run finished with at least one failed item."""


class MalformedInput(CornerforgeError):
    """An input file does not follow its documented format; message carries
    the file name and, for line-oriented formats, the line number."""


class ClassSetMismatch(CornerforgeError):
    """Two evaluation reports do not cover the same class set."""


class ConfigInvalid(CornerforgeError):
    """Run configuration failed validation; message names the field."""
