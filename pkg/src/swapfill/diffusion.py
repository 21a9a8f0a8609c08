"""Coarse hole prediction by harmonic diffusion.

Jacobi iteration of the discrete Laplace equation inside the hole, with
known pixels as fixed boundary conditions. Jacobi rather than Gauss-Seidel
keeps every sweep order-independent, so the result does not depend on
pixel visiting order or parallel scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, NoBoundaryError
from .types import Image, Mask


@dataclass(frozen=True)
class DiffusionSettings:
    tolerance: float = 1e-4        # max absolute per-pixel update at convergence
    max_iterations: int = 10_000

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")


def boundary_ring(mask: Mask) -> np.ndarray:
    """Known pixels 4-adjacent to the hole."""
    hole = mask.data
    near = np.zeros_like(hole)
    near[1:, :] |= hole[:-1, :]
    near[:-1, :] |= hole[1:, :]
    near[:, 1:] |= hole[:, :-1]
    near[:, :-1] |= hole[:, 1:]
    return near & ~hole


def diffusion_fill(image: Image, mask: Mask,
                   settings: DiffusionSettings = DiffusionSettings()) -> Image:
    """Fill the hole with the converged Jacobi solution of the Laplace
    equation; pixels outside the hole are returned unchanged bit-exactly.

    Hole pixels start at the mean color of the boundary ring and are
    repeatedly replaced by the mean of their in-bounds 4-neighbors until
    the largest update drops to `settings.tolerance` or the iteration cap
    is reached.
    """
    if not mask.matches(image):
        raise GeometryError(
            f"mask {mask.height}x{mask.width} does not match image "
            f"{image.height}x{image.width}")
    hole = mask.data
    if not hole.any():
        return Image(data=image.data.copy())
    ring = boundary_ring(mask)
    if not ring.any():
        raise NoBoundaryError("mask covers the whole image; nothing to diffuse from")

    out = image.data.copy()
    out[hole] = out[ring].mean(axis=0)

    # Work on the hole bounding box plus a one-pixel rim, clipped to the image.
    ys, xs = np.nonzero(hole)
    y0 = max(int(ys.min()) - 1, 0)
    y1 = min(int(ys.max()) + 2, image.height)
    x0 = max(int(xs.min()) - 1, 0)
    x1 = min(int(xs.max()) + 2, image.width)

    box = out[y0:y1, x0:x1].copy()
    box_hole = hole[y0:y1, x0:x1]

    # In-bounds 4-neighbor count relative to the image, not the box.
    count = np.zeros((image.height, image.width))
    count[1:, :] += 1
    count[:-1, :] += 1
    count[:, 1:] += 1
    count[:, :-1] += 1
    box_count = count[y0:y1, x0:x1][box_hole][:, None]

    for _ in range(settings.max_iterations):
        nbr = np.zeros_like(box)
        nbr[1:, :] += box[:-1, :]
        nbr[:-1, :] += box[1:, :]
        nbr[:, 1:] += box[:, :-1]
        nbr[:, :-1] += box[:, 1:]
        updated = nbr[box_hole] / box_count
        delta = np.abs(updated - box[box_hole]).max()
        box[box_hole] = updated
        if delta <= settings.tolerance:
            break

    out[y0:y1, x0:x1][box_hole] = box[box_hole]
    return Image(data=out)
