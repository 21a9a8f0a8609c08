"""Synthetic periodic textures for evaluation.

Stripes, checkerboards, and sinusoidal plaids with known ground truth, used
by the benchmark scripts and the acceptance suite. All generators are pure
functions of their parameters.
"""

from __future__ import annotations

import numpy as np

from .types import Image, Mask


def _colorize(pattern: np.ndarray, color_a, color_b) -> Image:
    a = np.asarray(color_a, dtype=np.float64)
    b = np.asarray(color_b, dtype=np.float64)
    data = pattern[:, :, None] * a + (1.0 - pattern[:, :, None]) * b
    return Image(data=np.clip(data, 0.0, 1.0))


def stripes(height: int, width: int, period: int, orientation: str = "vertical",
            color_a=(0.9, 0.8, 0.2), color_b=(0.1, 0.2, 0.6), phase: int = 0) -> Image:
    """Hard-edged stripes; `vertical` stripes vary along x, `horizontal`
    along y, `diagonal` along x+y."""
    ys, xs = np.mgrid[0:height, 0:width]
    if orientation == "vertical":
        coord = xs
    elif orientation == "horizontal":
        coord = ys
    elif orientation == "diagonal":
        coord = xs + ys
    else:
        raise ValueError(f"unknown orientation {orientation!r}")
    pattern = (((coord + phase) // (period // 2)) % 2).astype(np.float64)
    return _colorize(pattern, color_a, color_b)


def checkers(height: int, width: int, period: int,
             color_a=(0.85, 0.85, 0.85), color_b=(0.15, 0.25, 0.2),
             phase: int = 0) -> Image:
    ys, xs = np.mgrid[0:height, 0:width]
    half = period // 2
    pattern = ((((ys + phase) // half) + ((xs + phase) // half)) % 2).astype(np.float64)
    return _colorize(pattern, color_a, color_b)


def plaid(height: int, width: int, period_y: int, period_x: int,
          color_a=(0.9, 0.4, 0.3), color_b=(0.1, 0.3, 0.7),
          phase_y: float = 0.0, phase_x: float = 0.0) -> Image:
    """Sinusoidal plaid: product of sinusoids along each axis, mapped to a
    two-color ramp."""
    ys, xs = np.mgrid[0:height, 0:width]
    wave_y = np.sin(2.0 * np.pi * (ys + phase_y) / period_y)
    wave_x = np.sin(2.0 * np.pi * (xs + phase_x) / period_x)
    pattern = 0.5 + 0.5 * wave_y * wave_x
    return _colorize(pattern, color_a, color_b)


def texture_suite(size: int = 256, seed: int = 7) -> list[tuple[str, Image]]:
    """Twenty named structured textures mixing stripes, checkers, and
    plaids over a range of periods, phases, and palettes."""
    rng = np.random.default_rng(seed)

    def palette():
        a = rng.uniform(0.55, 0.95, size=3)
        b = rng.uniform(0.05, 0.45, size=3)
        return tuple(a), tuple(b)

    suite: list[tuple[str, Image]] = []
    stripe_params = [(8, "vertical"), (8, "horizontal"), (16, "vertical"),
                     (16, "diagonal"), (24, "horizontal"), (32, "vertical"),
                     (4, "vertical")]
    for period, orientation in stripe_params:
        a, b = palette()
        phase = int(rng.integers(0, period))
        suite.append((f"stripes_{orientation}_{period}",
                      stripes(size, size, period, orientation, a, b, phase)))

    for period in (4, 8, 16, 16, 32, 24):
        a, b = palette()
        phase = int(rng.integers(0, period))
        suite.append((f"checkers_{period}_{phase}",
                      checkers(size, size, period, a, b, phase)))

    plaid_params = [(16, 16), (16, 32), (32, 16), (8, 16), (32, 32), (16, 8), (8, 8)]
    for py, px in plaid_params:
        a, b = palette()
        suite.append((f"plaid_{py}x{px}",
                      plaid(size, size, py, px, a, b,
                            phase_y=float(rng.integers(0, py)),
                            phase_x=float(rng.integers(0, px)))))

    assert len(suite) == 20
    return suite


def punch_hole(image: Image, mask: Mask, fill_value: float = 0.0) -> Image:
    """Destroy hole content so nothing can leak from the input into the
    reconstruction."""
    data = image.data.copy()
    data[mask.data] = fill_value
    return Image(data=data)


def hole_mean_l1_pct(result: Image, truth: Image, mask: Mask) -> float:
    """Mean absolute error in percent, restricted to hole pixels."""
    diff = np.abs(result.data[mask.data] - truth.data[mask.data])
    return float(100.0 * diff.mean())
