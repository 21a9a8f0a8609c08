"""Translate step: coordinate-mapped patch pasting, boundary color
alignment, and blended compositing back into the known image.

The feature-to-image map is a pure stride multiplication: a match at
feature cell (u, v) pastes the (k*stride)^2 image block under the source
footprint onto the block under the query footprint. Overlapping pastes
average; only hole pixels ever change.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.ndimage import distance_transform_cdt

from .errors import GeometryError
from .matching import PatchAssignment
from .types import Image, Mask


def _check_dims(a: Image, b: Image) -> None:
    if (a.height, a.width) != (b.height, b.width):
        raise GeometryError(
            f"image dims differ: {a.height}x{a.width} vs {b.height}x{b.width}")


def paste_reconstruct(coarse: Image, assignment: PatchAssignment, stride: int,
                      mask: Mask, source: Image | None = None) -> Image:
    """Paste matched source blocks over hole query blocks, averaging overlaps.

    Pixels outside the hole are returned unchanged bit-exactly; hole pixels
    no paste reaches keep their coarse value. `source` is the image source
    blocks are read from (defaults to `coarse`; style transfer passes the
    style image).
    """
    src = source if source is not None else coarse
    if not mask.matches(coarse):
        raise GeometryError(
            f"mask {mask.height}x{mask.width} does not match image "
            f"{coarse.height}x{coarse.width}")
    _, fm_h, fm_w = assignment.map_dims
    if (abs(fm_h * stride - coarse.height) >= stride
            or abs(fm_w * stride - coarse.width) >= stride):
        raise GeometryError(
            f"assignment grid {fm_h}x{fm_w} at stride {stride} inconsistent "
            f"with image {coarse.height}x{coarse.width}")

    h, w = coarse.height, coarse.width
    sh, sw = src.height, src.width
    half = assignment.patch_size // 2
    block = assignment.patch_size * stride

    acc = np.zeros((h, w, 3), dtype=np.float64)
    count = np.zeros((h, w), dtype=np.float64)
    for rec in assignment.records:
        ty = (rec.query[0] - half) * stride
        tx = (rec.query[1] - half) * stride
        sy = (rec.source[0] - half) * stride
        sx = (rec.source[1] - half) * stride
        # Clip target and source jointly so the copied block stays rigid.
        oy0 = max(0, -ty, -sy)
        ox0 = max(0, -tx, -sx)
        oy1 = block - max(0, ty + block - h, sy + block - sh)
        ox1 = block - max(0, tx + block - w, sx + block - sw)
        if oy1 <= oy0 or ox1 <= ox0:
            continue
        acc[ty + oy0:ty + oy1, tx + ox0:tx + ox1] += \
            src.data[sy + oy0:sy + oy1, sx + ox0:sx + ox1]
        count[ty + oy0:ty + oy1, tx + ox0:tx + ox1] += 1.0

    out = coarse.data.copy()
    replace = (count > 0) & mask.data
    out[replace] = np.clip(acc[replace] / count[replace][:, None], 0.0, 1.0)
    return Image(data=out)


def ring_pixels(mask: Mask, band: int) -> np.ndarray:
    """Known pixels within `band` (Chebyshev) of the hole."""
    hole = mask.data
    if not hole.any():
        return np.zeros_like(hole)
    if hole.all():
        return np.zeros_like(hole)
    dist = distance_transform_cdt(~hole, metric="chessboard")
    return (~hole) & (dist <= band)


def align_color(image: Image, reference: Image, mask: Mask, band: int) -> Image:
    """Shift hole pixels by the per-channel mean difference between
    `reference` and `image` over the known ring around the hole."""
    if band < 1:
        raise ValueError(f"band must be >= 1, got {band}")
    _check_dims(image, reference)
    if not mask.matches(image):
        raise GeometryError("mask does not match image")
    hole = mask.data
    if not hole.any():
        return Image(data=image.data.copy())
    ring = ring_pixels(mask, band)
    if not ring.any():
        warnings.warn("color alignment skipped: no known pixels border the hole",
                      stacklevel=2)
        return Image(data=image.data.copy())
    delta = reference.data[ring].mean(axis=0) - image.data[ring].mean(axis=0)
    out = image.data.copy()
    out[hole] = np.clip(out[hole] + delta, 0.0, 1.0)
    return Image(data=out)


def composite(output: Image, input_image: Image, mask: Mask,
              blend_width: int) -> Image:
    """Blend `output` into `input_image` over the hole.

    Known pixels take the input exactly. Hole pixels farther than
    blend_width from the known region take the output exactly; within that
    inner band the two blend on a linear ramp over the Chebyshev distance
    to the hole boundary (distance d gets output weight d / (blend_width+1)).
    """
    if blend_width < 0:
        raise ValueError(f"blend_width must be >= 0, got {blend_width}")
    _check_dims(output, input_image)
    if not mask.matches(output):
        raise GeometryError("mask does not match image")
    hole = mask.data
    if not hole.any():
        return Image(data=input_image.data.copy())
    if hole.all():
        return Image(data=output.data.copy())

    result = input_image.data.copy()
    depth = distance_transform_cdt(hole, metric="chessboard").astype(np.float64)
    interior = hole & (depth > blend_width)
    result[interior] = output.data[interior]
    band = hole & ~interior
    if band.any():
        alpha = (depth[band] / (blend_width + 1))[:, None]
        result[band] = (1.0 - alpha) * input_image.data[band] + alpha * output.data[band]
    return Image(data=result)
