"""Feature maps for matching.

Two sources behind one interface: a self-contained classical extractor
(Gaussian pyramid colors plus Sobel gradient energy, standardized per
channel), or externally computed CNN activations loaded from an FMAP file.
Both yield the same stride geometry, so the image-space paste step never
cares which one produced the map.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import GeometryError, SizeError
from .fmap import read_fmap
from .types import FeatureMap, Image

VARIANCE_FLOOR = 1e-8
_LUMA = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class FeatureSpec:
    kind: str = "builtin"          # "builtin" | "external"
    path: str | None = None        # FMAP file when kind == "external"
    levels: int = 3
    stride: int = 4

    def __post_init__(self):
        if self.kind not in ("builtin", "external"):
            raise ValueError(f"feature kind must be builtin or external, got {self.kind!r}")
        if self.kind == "external" and not self.path:
            raise ValueError("external features need a path")
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if self.stride not in (1, 2, 4, 8):
            raise ValueError(f"stride must be one of 1, 2, 4, 8, got {self.stride}")


def _block_mean(channel: np.ndarray, stride: int, h_out: int, w_out: int) -> np.ndarray:
    """Area-average pooling onto an h_out x w_out grid; edge blocks clipped
    to the raster average over the pixels they actually cover."""
    h, w = channel.shape
    row_idx = np.arange(0, h, stride)
    col_idx = np.arange(0, w, stride)
    sums = np.add.reduceat(np.add.reduceat(channel, row_idx, axis=0), col_idx, axis=1)
    row_n = np.minimum(row_idx + stride, h) - row_idx
    col_n = np.minimum(col_idx + stride, w) - col_idx
    means = sums / np.outer(row_n, col_n)
    if means.shape != (h_out, w_out):
        raise GeometryError(
            f"pooled grid {means.shape} does not match expected {(h_out, w_out)}")
    return means


def _standardize(channel: np.ndarray) -> np.ndarray:
    mean = channel.mean()
    var = channel.var()
    return (channel - mean) / np.sqrt(max(var, VARIANCE_FLOOR))


def extract_builtin_features(image: Image, spec: FeatureSpec = FeatureSpec()) -> FeatureMap:
    """Classical multi-level features on the stride grid.

    Per level l in [0, levels): RGB smoothed at sigma 2^l, plus the absolute
    horizontal and vertical Sobel responses of the smoothed luminance.
    All channels are area-averaged onto the stride grid and standardized to
    zero mean, unit variance over the whole map (floored at variance 1e-8).
    Total channels: 5 * levels.
    """
    if spec.kind != "builtin":
        raise ValueError("extract_builtin_features requires a builtin spec")
    stride = spec.stride
    if image.height < 2 * stride or image.width < 2 * stride:
        raise SizeError(
            f"image {image.height}x{image.width} smaller than twice stride {stride}")

    h_out = -(-image.height // stride)
    w_out = -(-image.width // stride)
    luma = image.data @ np.asarray(_LUMA)

    channels = []
    for level in range(spec.levels):
        sigma = float(2 ** level)
        smooth_rgb = ndimage.gaussian_filter(image.data, sigma=(sigma, sigma, 0),
                                             mode="reflect")
        smooth_luma = ndimage.gaussian_filter(luma, sigma=sigma, mode="reflect")
        grad_h = np.abs(ndimage.sobel(smooth_luma, axis=1, mode="reflect"))
        grad_v = np.abs(ndimage.sobel(smooth_luma, axis=0, mode="reflect"))
        for plane in (smooth_rgb[:, :, 0], smooth_rgb[:, :, 1], smooth_rgb[:, :, 2],
                      grad_h, grad_v):
            pooled = _block_mean(plane, stride, h_out, w_out)
            channels.append(_standardize(pooled))

    data = np.stack(channels).astype(np.float32)
    return FeatureMap(data=data, stride=stride)


def load_external_features(path: str | Path, image: Image) -> FeatureMap:
    """Load an FMAP file and validate its stride geometry against `image`:
    stride * grid must land within one stride of the image dimensions."""
    with open(path, "rb") as handle:
        fmap = read_fmap(handle)
    if (abs(fmap.stride * fmap.height - image.height) >= fmap.stride
            or abs(fmap.stride * fmap.width - image.width) >= fmap.stride):
        raise GeometryError(
            f"feature grid {fmap.height}x{fmap.width} at stride {fmap.stride} "
            f"does not cover image {image.height}x{image.width}")
    return fmap


def features_for(image: Image, spec: FeatureSpec) -> FeatureMap:
    if spec.kind == "external":
        return load_external_features(spec.path, image)
    return extract_builtin_features(image, spec)
