"""Metrics: mean L1, SSIM against a direct-formula oracle, perceptual
distance, weighted masks."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapfill.errors import GeometryError, SizeError
from swapfill.metrics import (
    WeightedMask,
    build_weighted_mask,
    mean_l1,
    perceptual_distance,
    ssim,
)
from swapfill.types import FeatureMap, FeatureMask, Image, Mask


def gray(value, h=32, w=32):
    return Image(data=np.full((h, w, 3), float(value)))


def rand_image(h, w, seed):
    return Image(data=np.random.default_rng(seed).random((h, w, 3)))


class TestMeanL1:
    def test_identity_is_zero(self):
        img = rand_image(16, 16, 0)
        assert mean_l1(img, img) == 0.0

    def test_black_vs_white_is_100(self):
        assert mean_l1(gray(0.0), gray(1.0)) == 100.0

    def test_half_pixels_off_by_half_gives_25(self):
        a = np.zeros((16, 16, 3))
        b = a.copy()
        b[:8, :, :] = 0.5  # half the pixels differ by exactly 0.5
        assert mean_l1(Image(data=a), Image(data=b)) == pytest.approx(25.0, abs=1e-12)

    def test_dim_mismatch_rejected(self):
        with pytest.raises(GeometryError):
            mean_l1(gray(0, 8, 8), gray(0, 9, 9))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_symmetric_nonnegative(self, seed):
        a = rand_image(12, 12, seed)
        b = rand_image(12, 12, seed + 1)
        assert mean_l1(a, b) == mean_l1(b, a) >= 0.0


from conftest import ssim_oracle  # noqa: E402  (direct-formula oracle)


class TestSsim:
    def test_identity_is_one(self):
        img = rand_image(32, 32, 1)
        assert ssim(img, img) == pytest.approx(1.0, abs=1e-9)

    def test_symmetry(self):
        a = rand_image(24, 24, 2)
        b = rand_image(24, 24, 3)
        assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)

    def test_matches_direct_formula_oracle_on_fixed_noise_case(self):
        ramp = np.linspace(0.1, 0.9, 64)
        base = np.repeat(np.repeat(ramp[None, :], 64, axis=0)[:, :, None], 3, axis=2)
        rng = np.random.default_rng(1234)
        noisy = np.clip(base + rng.normal(0.0, 0.1, base.shape), 0.0, 1.0)
        a = Image(data=base)
        b = Image(data=noisy)
        assert ssim(a, b) == pytest.approx(ssim_oracle(a, b), abs=1e-6)

    def test_decreases_with_noise_amplitude(self):
        base = rand_image(48, 48, 4)
        rng_values = np.random.default_rng(5).normal(0.0, 1.0, base.data.shape)
        values = []
        for amplitude in (0.02, 0.08, 0.2):
            noisy = Image(data=np.clip(base.data + amplitude * rng_values, 0, 1))
            values.append(ssim(base, noisy))
        assert values[0] > values[1] > values[2]

    def test_masked_mean_restricts_to_hole(self):
        a = rand_image(32, 32, 6)
        # differ only inside the hole: full-image ssim > hole ssim
        data = a.data.copy()
        hole = np.zeros((32, 32), bool)
        hole[8:24, 8:24] = True
        data[hole] = np.clip(data[hole] + 0.3, 0, 1)
        b = Image(data=data)
        assert ssim(a, b, Mask(data=hole)) < ssim(a, b)

    def test_too_small_image_rejected(self):
        with pytest.raises(SizeError):
            ssim(gray(0.5, 8, 8), gray(0.5, 8, 8))

    def test_empty_mask_rejected(self):
        a = rand_image(16, 16, 7)
        with pytest.raises(GeometryError):
            ssim(a, a, Mask(data=np.zeros((16, 16), bool)))


class TestPerceptualDistance:
    def fmap(self, seed, shape=(4, 10, 12)):
        rng = np.random.default_rng(seed)
        return FeatureMap(data=rng.standard_normal(shape).astype(np.float32), stride=4)

    def test_identity_zero_both_norms(self):
        fm = self.fmap(0)
        assert perceptual_distance(fm, fm, norm="l1") == 0.0
        assert perceptual_distance(fm, fm, norm="l2") == 0.0

    def test_single_weighted_cell(self):
        a = FeatureMap(data=np.zeros((1, 4, 4), np.float32), stride=1)
        b_data = np.zeros((1, 4, 4), np.float32)
        b_data[0, 2, 1] = 0.25
        b = FeatureMap(data=b_data, stride=1)
        weights = np.zeros((4, 4))
        weights[2, 1] = 1.0
        w = WeightedMask(weights=weights)
        assert perceptual_distance(a, b, w, norm="l1") == pytest.approx(0.25, abs=1e-9)

    def test_unmasked_l2_matches_independent_loop(self):
        fa = self.fmap(1)
        fb = self.fmap(2)
        total = 0.0
        count = 0
        for c in range(fa.channels):
            for y in range(fa.height):
                for x in range(fa.width):
                    d = float(fa.data[c, y, x]) - float(fb.data[c, y, x])
                    total += d * d
                    count += 1
        assert perceptual_distance(fa, fb, norm="l2") == \
            pytest.approx(np.sqrt(total / count), abs=1e-12)

    def test_masked_metric_ignores_zero_weight_cells(self):
        fa = self.fmap(3)
        fb_data = fa.data.copy()
        fb_data[:, 0, 0] = 99.0  # huge difference at a zero-weight cell
        fb = FeatureMap(data=fb_data, stride=4)
        weights = np.zeros((fa.height, fa.width))
        weights[5, 5] = 2.0
        w = WeightedMask(weights=weights)
        assert perceptual_distance(fa, fb, w, norm="l1") == 0.0

    def test_symmetry(self):
        fa, fb = self.fmap(4), self.fmap(5)
        for norm in ("l1", "l2"):
            assert perceptual_distance(fa, fb, norm=norm) == \
                perceptual_distance(fb, fa, norm=norm)

    def test_zero_total_weight_rejected(self):
        fa, fb = self.fmap(6), self.fmap(7)
        w = WeightedMask(weights=np.zeros((fa.height, fa.width)))
        with pytest.raises(GeometryError):
            perceptual_distance(fa, fb, w)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(GeometryError):
            perceptual_distance(self.fmap(8), self.fmap(9, shape=(4, 9, 12)))


class TestWeightedMask:
    def test_empty_hole_gives_all_zero(self):
        fmask = FeatureMask(data=np.zeros((8, 8), bool))
        w = build_weighted_mask(fmask, overlap_boost=5)
        assert not w.weights.any()

    def test_single_cell_gets_boost(self):
        data = np.zeros((8, 8), bool)
        data[3, 3] = True
        w = build_weighted_mask(FeatureMask(data=data), overlap_boost=5)
        assert w.weights[3, 3] == 5.0
        assert w.total == 5.0

    def test_4x4_block_boost_2(self):
        data = np.zeros((10, 10), bool)
        data[3:7, 3:7] = True
        w = build_weighted_mask(FeatureMask(data=data), overlap_boost=2)
        assert (w.weights == 2.0).sum() == 12  # ring of the block
        assert (w.weights == 1.0).sum() == 4   # strict interior
        assert (w.weights == 0.0).sum() == 100 - 16

    def test_boost_below_one_rejected(self):
        with pytest.raises(ValueError):
            build_weighted_mask(FeatureMask(data=np.zeros((4, 4), bool)), 0.5)

    def test_negative_weights_rejected(self):
        with pytest.raises(ValueError):
            WeightedMask(weights=np.array([[-1.0]]))
