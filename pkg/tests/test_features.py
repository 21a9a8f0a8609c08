"""Builtin feature extraction and external FMAP loading."""

import numpy as np
import pytest

from swapfill.errors import GeometryError, SizeError
from swapfill.features import (
    FeatureSpec,
    extract_builtin_features,
    load_external_features,
)
from swapfill.fmap import write_fmap
from swapfill.types import FeatureMap, Image


def make_image(data):
    return Image(data=np.asarray(data, dtype=np.float64))


def test_grid_geometry_256_gives_15x64x64():
    rng = np.random.default_rng(0)
    img = make_image(rng.random((256, 256, 3)))
    fmap = extract_builtin_features(img, FeatureSpec(levels=3, stride=4))
    assert (fmap.channels, fmap.height, fmap.width) == (15, 64, 64)
    assert fmap.stride == 4


def test_constant_image_gives_all_zero_channels():
    img = make_image(np.full((32, 32, 3), 0.5))
    fmap = extract_builtin_features(img, FeatureSpec(levels=2, stride=4))
    # no edges and floored variance: every standardized channel is exactly 0
    assert np.array_equal(fmap.data, np.zeros_like(fmap.data))


def test_channels_are_standardized():
    rng = np.random.default_rng(1)
    img = make_image(rng.random((64, 96, 3)))
    fmap = extract_builtin_features(img, FeatureSpec(levels=3, stride=4))
    for ch in fmap.data.astype(np.float64):
        assert abs(ch.mean()) <= 1e-6
        assert abs(ch.var() - 1.0) <= 1e-6


def test_vertical_step_edge_peaks_horizontal_gradient():
    data = np.full((64, 64, 3), 0.2)
    data[:, 32:, :] = 0.8
    fmap = extract_builtin_features(make_image(data), FeatureSpec(levels=1, stride=4))
    # channels per level: R, G, B, |d/dx|, |d/dy|
    grad_h = fmap.data[3].astype(np.float64)
    grad_v = fmap.data[4].astype(np.float64)
    peak_cols = set(np.argmax(grad_h, axis=1).tolist())
    assert peak_cols <= {7, 8}  # edge sits between pixel columns 31 and 32
    # the edge is vertical, no structure along y
    assert grad_v.std() < grad_h.std()


def test_translation_covariance_on_stride_grid():
    # periodic content shifted by exactly one stride: the standardization
    # statistics are unchanged, so interior cells must shift by one cell
    rng = np.random.default_rng(2)
    tile = rng.random((4, 4, 3))
    base = np.tile(tile, (16, 16, 1))
    shifted = np.roll(base, 4, axis=1)
    spec = FeatureSpec(levels=2, stride=4)
    f_base = extract_builtin_features(make_image(base), spec).data.astype(np.float64)
    f_shift = extract_builtin_features(make_image(shifted), spec).data.astype(np.float64)
    margin = 3  # keep clear of smoothing boundary effects
    inner = f_base[:, margin:-margin, margin:-margin - 1]
    moved = f_shift[:, margin:-margin, margin + 1:-margin]
    assert np.allclose(inner, moved, atol=1e-6)


def test_too_small_image_rejected():
    img = make_image(np.zeros((6, 32, 3)))
    with pytest.raises(SizeError):
        extract_builtin_features(img, FeatureSpec(stride=4))


def test_spec_validation():
    with pytest.raises(ValueError):
        FeatureSpec(stride=3)
    with pytest.raises(ValueError):
        FeatureSpec(levels=0)
    with pytest.raises(ValueError):
        FeatureSpec(kind="external")
    with pytest.raises(ValueError):
        FeatureSpec(kind="vgg")


class TestExternalLoading:
    def write_fmap_file(self, tmp_path, shape, stride):
        rng = np.random.default_rng(7)
        fmap = FeatureMap(data=rng.standard_normal(shape).astype(np.float32),
                          stride=stride)
        path = tmp_path / "features.fmap"
        with open(path, "wb") as handle:
            write_fmap(fmap, handle)
        return path, fmap

    def test_accepts_matching_geometry(self, tmp_path):
        path, fmap = self.write_fmap_file(tmp_path, (256, 64, 64), 4)
        img = make_image(np.zeros((256, 256, 3)))
        loaded = load_external_features(path, img)
        assert np.array_equal(loaded.data, fmap.data)

    def test_rejects_wrong_image_size(self, tmp_path):
        path, _ = self.write_fmap_file(tmp_path, (256, 64, 64), 4)
        img = make_image(np.zeros((512, 512, 3)))
        with pytest.raises(GeometryError):
            load_external_features(path, img)

    def test_roundtrip_through_file(self, tmp_path):
        path, fmap = self.write_fmap_file(tmp_path, (8, 16, 12), 4)
        img = make_image(np.zeros((64, 48, 3)))
        loaded = load_external_features(path, img)
        assert loaded.stride == fmap.stride
        assert np.array_equal(loaded.data, fmap.data)
