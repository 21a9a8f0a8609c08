"""Exception types shared across the engine.

The CLI maps these onto exit codes: format/data problems are exit 2,
geometry and no-candidates problems are exit 3, bad hole specs are a
usage error (exit 1).
"""


class SwapFillError(Exception):
    """Base class for engine errors."""


class FormatError(SwapFillError):
    """A data file is corrupt, unreadable, or not what it claims to be."""


class UnsupportedVersionError(FormatError):
    """FMAP file declares a version this reader does not understand."""


class TruncatedPayloadError(FormatError):
    """Stream ends before the declared tensor is complete."""


class DataError(FormatError):
    """Payload parsed but contains invalid values (NaN, inf, out of range)."""


class GeometryError(SwapFillError):
    """Shapes, strides, or coordinates of paired objects do not line up."""


class BoundsError(GeometryError):
    """A requested region does not fit inside its raster."""


class SizeError(GeometryError):
    """Input raster is too small for the requested operation."""


class NoCandidatesError(GeometryError):
    """The hole leaves no full-support candidate patch on the boundary."""


class NoBoundaryError(GeometryError):
    """Mask covers the whole raster, leaving nothing to fill from."""


class HoleSpecError(SwapFillError):
    """Malformed or inconsistent hole specification."""
