"""Evaluation metrics: mean L1 error, SSIM (optionally hole-restricted),
and feature-space perceptual distance with optional cell weighting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import GeometryError, SizeError
from .types import FeatureMap, FeatureMask, Image, Mask

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
_LUMA = (0.299, 0.587, 0.114)


def mean_l1(a: Image, b: Image) -> float:
    """Mean absolute pixel difference in percent of the dynamic range."""
    if (a.height, a.width) != (b.height, b.width):
        raise GeometryError(
            f"image dims differ: {a.height}x{a.width} vs {b.height}x{b.width}")
    return float(100.0 * np.abs(a.data - b.data).mean())


def _gaussian_taps(size: int, sigma: float) -> np.ndarray:
    offsets = np.arange(size) - (size - 1) / 2.0
    taps = np.exp(-(offsets ** 2) / (2.0 * sigma ** 2))
    return taps / taps.sum()


def ssim_map(a: Image, b: Image) -> np.ndarray:
    """Per-pixel structural similarity of the luminance channels.

    Local statistics use an 11x11 Gaussian window (sigma 1.5) with reflected
    boundaries; constants K1=0.01, K2=0.03 on a dynamic range of 1.
    """
    if (a.height, a.width) != (b.height, b.width):
        raise GeometryError("ssim inputs must share dimensions")
    if a.height < SSIM_WINDOW or a.width < SSIM_WINDOW:
        raise SizeError(
            f"image {a.height}x{a.width} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")

    x = a.data @ np.asarray(_LUMA)
    y = b.data @ np.asarray(_LUMA)
    taps = _gaussian_taps(SSIM_WINDOW, SSIM_SIGMA)

    def smooth(img: np.ndarray) -> np.ndarray:
        tmp = correlate1d(img, taps, axis=0, mode="reflect")
        return correlate1d(tmp, taps, axis=1, mode="reflect")

    mu_x = smooth(x)
    mu_y = smooth(y)
    var_x = smooth(x * x) - mu_x * mu_x
    var_y = smooth(y * y) - mu_y * mu_y
    cov = smooth(x * y) - mu_x * mu_y

    c1 = SSIM_K1 ** 2
    c2 = SSIM_K2 ** 2
    return ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / \
        ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2))


def ssim(a: Image, b: Image, mask: Mask | None = None) -> float:
    """Mean SSIM over all pixels, or over hole pixels when `mask` is given."""
    smap = ssim_map(a, b)
    if mask is None:
        return float(smap.mean())
    if not mask.matches(a):
        raise GeometryError("mask does not match images")
    if not mask.data.any():
        raise GeometryError("mask selects no pixels for ssim")
    return float(smap[mask.data].mean())


@dataclass(frozen=True)
class WeightedMask:
    """Nonnegative per-cell weights for feature-space evaluation: zero
    outside the region of interest, 1 inside the hole, boosted on hole
    cells touching the boundary."""

    weights: np.ndarray

    def __post_init__(self):
        weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if weights.ndim != 2:
            raise GeometryError(f"weights must be HxW, got shape {weights.shape}")
        if (weights < 0).any():
            raise ValueError("weights must be nonnegative")
        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)

    @property
    def total(self) -> float:
        return float(self.weights.sum())


def build_weighted_mask(fmask: FeatureMask, overlap_boost: float = 5.0) -> WeightedMask:
    """Weight 0 outside the hole, 1 strictly inside, `overlap_boost` on hole
    cells 4-adjacent to the boundary."""
    if overlap_boost < 1:
        raise ValueError(f"overlap_boost must be >= 1, got {overlap_boost}")
    hole = fmask.data
    known_nbr = np.zeros_like(hole)
    known = ~hole
    known_nbr[1:, :] |= known[:-1, :]
    known_nbr[:-1, :] |= known[1:, :]
    known_nbr[:, 1:] |= known[:, :-1]
    known_nbr[:, :-1] |= known[:, 1:]
    weights = np.where(hole & known_nbr, float(overlap_boost),
                       np.where(hole, 1.0, 0.0))
    return WeightedMask(weights=weights)


def perceptual_distance(fa: FeatureMap, fb: FeatureMap,
                        w: WeightedMask | None = None,
                        norm: str = "l1") -> float:
    """Feature-space distance between two maps.

    L1: weighted mean absolute difference, sum(w |fa - fb|) / (C * sum(w)).
    L2: weighted root mean square, sqrt(sum(w (fa - fb)^2) / (C * sum(w))).
    Without `w` every cell weighs 1. Both are size-independent.
    """
    if fa.data.shape != fb.data.shape:
        raise GeometryError(
            f"feature map shapes differ: {fa.data.shape} vs {fb.data.shape}")
    if norm not in ("l1", "l2"):
        raise ValueError(f"norm must be 'l1' or 'l2', got {norm!r}")
    diff = fa.data.astype(np.float64) - fb.data.astype(np.float64)
    channels = fa.channels
    if w is not None:
        if w.weights.shape != (fa.height, fa.width):
            raise GeometryError(
                f"weights {w.weights.shape} do not match grid {(fa.height, fa.width)}")
        total = w.total * channels
        if total <= 0:
            raise GeometryError("weighted mask has zero total weight")
        if norm == "l1":
            return float((w.weights[None, :, :] * np.abs(diff)).sum() / total)
        return float(np.sqrt((w.weights[None, :, :] * diff * diff).sum() / total))
    if norm == "l1":
        return float(np.abs(diff).mean())
    return float(np.sqrt((diff * diff).mean()))
