"""Shared test helpers: independent oracles used by unit and acceptance tests."""

import numpy as np

from swapfill.types import Image, Mask


def ssim_oracle(a: Image, b: Image, window=11, sigma=1.5, k1=0.01, k2=0.03):
    """Direct-formula SSIM: explicit per-pixel windows with reflected
    indexing, coded independently of the library's filtering path."""
    x = 0.299 * a.data[:, :, 0] + 0.587 * a.data[:, :, 1] + 0.114 * a.data[:, :, 2]
    y = 0.299 * b.data[:, :, 0] + 0.587 * b.data[:, :, 1] + 0.114 * b.data[:, :, 2]
    h, w = x.shape
    half = window // 2
    offs = np.arange(-half, half + 1)
    taps = np.exp(-(offs.astype(float) ** 2) / (2 * sigma * sigma))
    taps = taps / taps.sum()
    kernel = np.outer(taps, taps)

    def reflect(i, n):
        if i < 0:
            return -1 - i
        if i >= n:
            return 2 * n - 1 - i
        return i

    c1, c2 = k1 * k1, k2 * k2
    total = 0.0
    for py in range(h):
        for px in range(w):
            wx = np.empty((window, window))
            wy = np.empty((window, window))
            for dy in range(window):
                for dx in range(window):
                    sy = reflect(py + dy - half, h)
                    sx = reflect(px + dx - half, w)
                    wx[dy, dx] = x[sy, sx]
                    wy[dy, dx] = y[sy, sx]
            mx = (kernel * wx).sum()
            my = (kernel * wy).sum()
            vx = (kernel * wx * wx).sum() - mx * mx
            vy = (kernel * wy * wy).sum() - my * my
            cov = (kernel * wx * wy).sum() - mx * my
            total += ((2 * mx * my + c1) * (2 * cov + c2)) / \
                ((mx * mx + my * my + c1) * (vx + vy + c2))
    return total / (h * w)


def jacobi_residual(image: Image, mask: Mask) -> float:
    """Largest change a single extra Jacobi sweep would make to the hole:
    the convergence residual of a diffusion fill."""
    data = image.data
    h, w = mask.height, mask.width
    nbr = np.zeros_like(data)
    count = np.zeros((h, w, 1))
    nbr[1:, :] += data[:-1, :]
    count[1:, :, 0] += 1
    nbr[:-1, :] += data[1:, :]
    count[:-1, :, 0] += 1
    nbr[:, 1:] += data[:, :-1]
    count[:, 1:, 0] += 1
    nbr[:, :-1] += data[:, 1:]
    count[:, :-1, 0] += 1
    update = nbr / count - data
    return float(np.abs(update[mask.data]).max())
