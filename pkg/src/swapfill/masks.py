"""Hole rasterization and conservative mask downsampling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import BoundsError, GeometryError, HoleSpecError
from .types import FeatureMask, Mask


@dataclass(frozen=True)
class CenterHole:
    side: int


@dataclass(frozen=True)
class RectHole:
    y: int
    x: int
    height: int
    width: int


@dataclass(frozen=True)
class RandomHoles:
    min_side: int
    max_side: int
    count: int


HoleSpec = Union[CenterHole, RectHole, RandomHoles]


def parse_hole_spec(text: str) -> HoleSpec:
    """Parse "center:N", "rect:Y,X,H,W", or "random:MIN,MAX,COUNT"."""
    kind, sep, args = text.partition(":")
    if not sep:
        raise HoleSpecError(f"hole spec needs kind:args, got {text!r}")
    try:
        values = [int(v) for v in args.split(",")]
    except ValueError as exc:
        raise HoleSpecError(f"non-integer field in hole spec {text!r}") from exc
    if kind == "center" and len(values) == 1:
        return CenterHole(values[0])
    if kind == "rect" and len(values) == 4:
        return RectHole(*values)
    if kind == "random" and len(values) == 3:
        return RandomHoles(*values)
    raise HoleSpecError(f"unrecognized hole spec {text!r}")


def rasterize_hole(spec: HoleSpec, height: int, width: int, seed: int = 0) -> Mask:
    """Render a hole specification to a boolean mask.

    Random holes are drawn from a generator seeded with `seed`: side lengths
    uniform on [min_side, max_side], top-left corners uniform over placements
    keeping the rectangle fully inside the image. Holes may overlap.
    """
    data = np.zeros((height, width), dtype=bool)

    if isinstance(spec, CenterHole):
        s = spec.side
        if s < 1:
            raise HoleSpecError(f"center hole side must be >= 1, got {s}")
        if s > height or s > width:
            raise BoundsError(f"{s}x{s} hole does not fit in {height}x{width}")
        y0 = (height - s) // 2
        x0 = (width - s) // 2
        data[y0:y0 + s, x0:x0 + s] = True
    elif isinstance(spec, RectHole):
        if spec.height < 1 or spec.width < 1:
            raise HoleSpecError("rect hole must have positive size")
        if (spec.y < 0 or spec.x < 0 or spec.y + spec.height > height
                or spec.x + spec.width > width):
            raise BoundsError(
                f"rect ({spec.y},{spec.x},{spec.height},{spec.width}) "
                f"not inside {height}x{width}")
        data[spec.y:spec.y + spec.height, spec.x:spec.x + spec.width] = True
    elif isinstance(spec, RandomHoles):
        if spec.min_side > spec.max_side:
            raise HoleSpecError(
                f"min_side {spec.min_side} > max_side {spec.max_side}")
        if spec.min_side < 1 or spec.count < 1:
            raise HoleSpecError("random holes need min_side >= 1 and count >= 1")
        if spec.max_side > height or spec.max_side > width:
            raise BoundsError(
                f"max side {spec.max_side} does not fit in {height}x{width}")
        rng = np.random.default_rng(seed)
        for _ in range(spec.count):
            h = int(rng.integers(spec.min_side, spec.max_side + 1))
            w = int(rng.integers(spec.min_side, spec.max_side + 1))
            y0 = int(rng.integers(0, height - h + 1))
            x0 = int(rng.integers(0, width - w + 1))
            data[y0:y0 + h, x0:x0 + w] = True
    else:
        raise HoleSpecError(f"unknown hole spec type {type(spec).__name__}")

    return Mask(data=data)


def downsample_mask(mask: Mask, stride: int, fm_height: int, fm_width: int) -> FeatureMask:
    """Project an image-space hole onto the feature grid, conservatively.

    Cell (i, j) is marked iff any image pixel in its stride x stride block
    (clipped to the image) is in the hole, so hole content can never leak
    into the candidate region.
    """
    if stride < 1:
        raise GeometryError(f"stride must be >= 1, got {stride}")
    if (abs(fm_height * stride - mask.height) >= stride
            or abs(fm_width * stride - mask.width) >= stride):
        raise GeometryError(
            f"feature grid {fm_height}x{fm_width} at stride {stride} inconsistent "
            f"with mask {mask.height}x{mask.width}")

    canvas = np.zeros((fm_height * stride, fm_width * stride), dtype=bool)
    ch = min(mask.height, canvas.shape[0])
    cw = min(mask.width, canvas.shape[1])
    canvas[:ch, :cw] = mask.data[:ch, :cw]
    blocks = canvas.reshape(fm_height, stride, fm_width, stride)
    return FeatureMask(data=blocks.any(axis=(1, 3)))
