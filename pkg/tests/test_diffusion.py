"""Harmonic diffusion fill: preservation, harmonicity, maximum principle."""

import numpy as np
import pytest

from swapfill.diffusion import DiffusionSettings, boundary_ring, diffusion_fill
from swapfill.errors import NoBoundaryError
from swapfill.types import Image, Mask


def centered_mask(h, w, side):
    data = np.zeros((h, w), bool)
    y0, x0 = (h - side) // 2, (w - side) // 2
    data[y0:y0 + side, x0:x0 + side] = True
    return Mask(data=data)


def test_constant_surroundings_fill_with_constant():
    img = Image(data=np.full((24, 24, 3), 0.37))
    mask = centered_mask(24, 24, 8)
    out = diffusion_fill(img, mask)
    assert np.allclose(out.data[mask.data], 0.37, atol=1e-12)


def test_linear_ramp_is_reproduced():
    xs = np.arange(32) / 31.0
    ramp = np.repeat(xs[None, :, None], 32, axis=0)
    img = Image(data=np.concatenate([ramp, 0.5 * ramp, 1.0 - 0.75 * ramp], axis=2))
    mask = centered_mask(32, 32, 10)
    out = diffusion_fill(img, mask, DiffusionSettings(tolerance=1e-7))
    assert np.abs(out.data[mask.data] - img.data[mask.data]).max() < 1e-4


def test_known_region_preserved_bit_exactly():
    rng = np.random.default_rng(0)
    img = Image(data=rng.random((40, 40, 3)))
    mask = centered_mask(40, 40, 12)
    out = diffusion_fill(img, mask)
    known = ~mask.data
    assert np.array_equal(out.data[known], img.data[known])


def test_maximum_principle_random_boundary():
    rng = np.random.default_rng(5)
    img = Image(data=rng.random((30, 30, 3)))
    mask = centered_mask(30, 30, 12)
    out = diffusion_fill(img, mask)
    ring = boundary_ring(mask)
    for c in range(3):
        lo = img.data[:, :, c][ring].min()
        hi = img.data[:, :, c][ring].max()
        filled = out.data[:, :, c][mask.data]
        assert filled.min() >= lo - 1e-4
        assert filled.max() <= hi + 1e-4


def test_idempotent_at_convergence():
    rng = np.random.default_rng(9)
    img = Image(data=rng.random((28, 28, 3)))
    mask = centered_mask(28, 28, 10)
    settings = DiffusionSettings(tolerance=1e-6)
    once = diffusion_fill(img, mask, settings)
    twice = diffusion_fill(once, mask, settings)
    # both runs stop within tolerance/(1-rho) of the unique harmonic fixed
    # point; 1e-4 (the default tolerance) comfortably bounds the gap here
    assert np.abs(twice.data - once.data).max() <= 1e-4


def test_empty_hole_returns_input():
    rng = np.random.default_rng(2)
    img = Image(data=rng.random((16, 16, 3)))
    out = diffusion_fill(img, Mask(data=np.zeros((16, 16), bool)))
    assert np.array_equal(out.data, img.data)


def test_all_true_mask_rejected():
    img = Image(data=np.zeros((8, 8, 3)))
    with pytest.raises(NoBoundaryError):
        diffusion_fill(img, Mask(data=np.ones((8, 8), bool)))


def test_hole_touching_border_converges():
    rng = np.random.default_rng(13)
    img = Image(data=rng.random((20, 20, 3)))
    data = np.zeros((20, 20), bool)
    data[0:6, 0:6] = True  # corner hole: clipped neighbor counts in play
    out = diffusion_fill(img, Mask(data=data))
    assert np.isfinite(out.data).all()
    assert np.array_equal(out.data[~data], img.data[~data])


def test_settings_validation():
    with pytest.raises(ValueError):
        DiffusionSettings(tolerance=0.0)
    with pytest.raises(ValueError):
        DiffusionSettings(max_iterations=0)
