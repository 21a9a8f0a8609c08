"""Core raster data model: images, masks, feature maps, feature masks.

Pixels live in [0, 1] floats internally; 8-bit quantization happens only at
file boundaries. Every container freezes its array after validation, so
instances are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, GeometryError


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Image:
    """H x W x 3 raster, row-major (y, x, channel), values in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 3 or data.shape[2] != 3:
            raise GeometryError(f"image must be HxWx3, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise GeometryError("image must contain at least one pixel")
        if not np.isfinite(data).all():
            raise DataError("image contains non-finite values")
        if data.min() < 0.0 or data.max() > 1.0:
            raise DataError("image values must lie in [0, 1]")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class Mask:
    """H x W boolean raster; True marks pixels inside the hole."""

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=bool)
        if data.ndim != 2:
            raise GeometryError(f"mask must be HxW, got shape {data.shape}")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def matches(self, image: Image) -> bool:
        return (self.height, self.width) == (image.height, image.width)


@dataclass(frozen=True)
class FeatureMap:
    """C x H_f x W_f tensor, channel-major (c, y, x), with a stride mapping
    each feature cell to a stride x stride block of image pixels."""

    data: np.ndarray
    stride: int

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 3:
            raise GeometryError(f"feature map must be CxHxW, got shape {data.shape}")
        if data.shape[0] < 1:
            raise GeometryError("feature map needs at least one channel")
        if not np.isfinite(data).all():
            raise DataError("feature map contains non-finite values")
        if int(self.stride) < 1:
            raise GeometryError(f"stride must be >= 1, got {self.stride}")
        object.__setattr__(self, "stride", int(self.stride))
        object.__setattr__(self, "data", _frozen(data))

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class FeatureMask:
    """Boolean raster on the feature grid; True marks cells in the hole."""

    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=bool)
        if data.ndim != 2:
            raise GeometryError(f"feature mask must be HxW, got shape {data.shape}")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def matches(self, fmap: FeatureMap) -> bool:
        return (self.height, self.width) == (fmap.height, fmap.width)
