"""End-to-end inpainting: infer (diffusion), match (patch swap), translate
(coordinate paste), at one scale or across a factor-2 pyramid. Also hosts
the cross-image style-transfer mode built on the same matcher."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffusion import DiffusionSettings, diffusion_fill
from .errors import GeometryError
from .features import FeatureSpec, features_for
from .masks import downsample_mask
from .matching import (
    PatchAssignment,
    cross_map_swap,
    match_brute_force,
    match_convolutional,
)
from .reconstruct import align_color, composite, paste_reconstruct
from .types import Image, Mask

MIN_COARSE_DIM = 64


@dataclass(frozen=True)
class InpaintConfig:
    patch_size: int = 3
    scales: int = 2
    matcher: str = "conv"                 # "brute" | "conv"
    features: FeatureSpec = field(default_factory=FeatureSpec)
    diffusion: DiffusionSettings = field(default_factory=DiffusionSettings)
    blend_width: int = 4
    align_band: int = 4
    iterations: int = 1                   # swap/translate passes per scale
    seed: int = 0

    def __post_init__(self):
        if self.patch_size < 1 or self.patch_size % 2 == 0:
            raise ValueError(f"patch_size must be odd, got {self.patch_size}")
        if self.scales < 1:
            raise ValueError(f"scales must be >= 1, got {self.scales}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.matcher not in ("brute", "conv"):
            raise ValueError(f"matcher must be brute or conv, got {self.matcher!r}")
        if self.blend_width < 0:
            raise ValueError("blend_width must be >= 0")
        if self.align_band < 1:
            raise ValueError("align_band must be >= 1")


def _match(fmap, fmask, cfg: InpaintConfig, threads: int | None) -> PatchAssignment:
    if cfg.matcher == "brute":
        return match_brute_force(fmap, fmask, cfg.patch_size)
    return match_convolutional(fmap, fmask, cfg.patch_size, threads=threads)


def inpaint_single_scale(image: Image, mask: Mask, cfg: InpaintConfig,
                         coarse: Image | None = None,
                         threads: int | None = None,
                         trace: dict | None = None) -> Image:
    """One infer-match-translate pass (repeated cfg.iterations times).

    `coarse` overrides the diffusion initialization; multiscale passes the
    upsampled previous scale here.
    """
    if not mask.matches(image):
        raise GeometryError("mask does not match image")
    if not mask.data.any():
        return Image(data=image.data.copy())

    if coarse is None:
        coarse = diffusion_fill(image, mask, cfg.diffusion)
    if trace is not None:
        trace["coarse"] = coarse

    current = coarse
    for _ in range(cfg.iterations):
        fmap = features_for(current, cfg.features)
        fmask = downsample_mask(mask, fmap.stride, fmap.height, fmap.width)
        assignment = _match(fmap, fmask, cfg, threads)
        pasted = paste_reconstruct(current, assignment, fmap.stride, mask)
        aligned = align_color(pasted, image, mask, cfg.align_band)
        current = composite(aligned, image, mask, cfg.blend_width)
        if trace is not None:
            trace["assignment"] = assignment
            trace.setdefault("query_counts", []).append(len(assignment.records))
    return current


def _downsample_image(image: Image) -> Image:
    """Factor-2 area-average downsampling; odd trailing rows/columns
    average over the pixels they cover."""
    h2 = -(-image.height // 2)
    w2 = -(-image.width // 2)
    rows = np.arange(0, image.height, 2)
    cols = np.arange(0, image.width, 2)
    sums = np.add.reduceat(np.add.reduceat(image.data, rows, axis=0), cols, axis=1)
    row_n = np.minimum(rows + 2, image.height) - rows
    col_n = np.minimum(cols + 2, image.width) - cols
    data = sums / (row_n[:, None, None] * col_n[None, :, None])
    assert data.shape[:2] == (h2, w2)
    return Image(data=np.clip(data, 0.0, 1.0))


def _downsample_pair(image: Image, mask: Mask) -> tuple[Image, Mask]:
    small = _downsample_image(image)
    fmask = downsample_mask(mask, 2, small.height, small.width)
    return small, Mask(data=fmask.data)


def _bilinear_resize(data: np.ndarray, h_out: int, w_out: int) -> np.ndarray:
    """Separable bilinear resampling with half-pixel-aligned centers."""
    h_in, w_in = data.shape[:2]

    def axis_coords(n_out, n_in):
        centers = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        centers = np.clip(centers, 0.0, n_in - 1.0)
        lo = np.floor(centers).astype(np.intp)
        hi = np.minimum(lo + 1, n_in - 1)
        frac = centers - lo
        return lo, hi, frac

    ylo, yhi, yf = axis_coords(h_out, h_in)
    xlo, xhi, xf = axis_coords(w_out, w_in)
    rows = data[ylo] * (1.0 - yf)[:, None, None] + data[yhi] * yf[:, None, None]
    out = rows[:, xlo] * (1.0 - xf)[None, :, None] + rows[:, xhi] * xf[None, :, None]
    return out


def effective_scales(height: int, width: int, requested: int) -> int:
    """Clamp the pyramid depth so the coarsest level keeps its minimum
    dimension at or above MIN_COARSE_DIM."""
    scales = 1
    dim = min(height, width)
    while scales < requested and -(-dim // 2) >= MIN_COARSE_DIM:
        dim = -(-dim // 2)
        scales += 1
    return scales


def inpaint_multiscale(image: Image, mask: Mask, cfg: InpaintConfig,
                       threads: int | None = None,
                       trace: dict | None = None) -> Image:
    """Coarse-to-fine inpainting over a factor-2 pyramid.

    The coarsest level gets the diffusion initialization; each finer level
    starts from the bilinear upsample of the previous result with known
    pixels re-imposed, so known content is never hallucinated.
    """
    if not mask.matches(image):
        raise GeometryError("mask does not match image")
    if not mask.data.any():
        return Image(data=image.data.copy())

    n_scales = effective_scales(image.height, image.width, cfg.scales)
    if cfg.features.kind == "external" and n_scales > 1:
        raise GeometryError(
            "external feature maps describe a single geometry; use scales=1")

    levels = [(image, mask)]
    for _ in range(n_scales - 1):
        levels.append(_downsample_pair(*levels[-1]))

    result: Image | None = None
    for level in range(n_scales - 1, -1, -1):
        level_image, level_mask = levels[level]
        level_trace = trace if level == 0 else None
        if result is None:
            result = inpaint_single_scale(level_image, level_mask, cfg,
                                          threads=threads, trace=level_trace)
        else:
            up = _bilinear_resize(result.data, level_image.height, level_image.width)
            up = np.clip(up, 0.0, 1.0)
            known = ~level_mask.data
            up[known] = level_image.data[known]
            coarse = Image(data=up)
            result = inpaint_single_scale(level_image, level_mask, cfg,
                                          coarse=coarse, threads=threads,
                                          trace=level_trace)
    return result


def style_transfer(content: Image, style: Image, cfg: InpaintConfig,
                   style_features: FeatureSpec | None = None,
                   threads: int | None = None,
                   trace: dict | None = None) -> Image:
    """Rebuild the content image from the style image's patches.

    Every content feature patch is matched against every style feature
    patch; the matched style blocks are pasted over the whole canvas, then
    the global mean color is aligned to the content.
    """
    content_fmap = features_for(content, cfg.features)
    style_fmap = features_for(style, style_features or cfg.features)
    if content_fmap.stride != style_fmap.stride:
        raise GeometryError(
            f"stride mismatch: content {content_fmap.stride} vs style "
            f"{style_fmap.stride}")

    swapped, assignment = cross_map_swap(content_fmap, style_fmap, cfg.patch_size,
                                         matcher=cfg.matcher, threads=threads)
    if trace is not None:
        trace["assignment"] = assignment
        trace["swapped"] = swapped

    everything = Mask(data=np.ones((content.height, content.width), dtype=bool))
    raw = paste_reconstruct(content, assignment, content_fmap.stride, everything,
                            source=style)
    # Whole-image mean shift stands in for the ring-based alignment: with an
    # all-true mask there is no known ring to average over.
    delta = content.data.mean(axis=(0, 1)) - raw.data.mean(axis=(0, 1))
    return Image(data=np.clip(raw.data + delta, 0.0, 1.0))
