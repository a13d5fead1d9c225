import numpy as np
import pytest

from focusextend import (blur_map, cell_texture, convolve, crete_blur,
                         gaussian_kernel)
from focusextend.errors import DimensionError


def reflect_index(i, n):
    """Symmetric reflection (matches scipy 'reflect': -1 -> 0, n -> n-1)."""
    while i < 0 or i >= n:
        if i < 0:
            i = -i - 1
        if i >= n:
            i = 2 * n - 1 - i
    return i


def crete_blur_bruteforce(patch):
    """Loop-level re-derivation of the blur score, step by step.

    Independent of the library's vectorized path: 9-tap means, neighbor
    differences, lost variation, per-axis normalized score, max of the two.
    """
    f = np.asarray(patch, dtype=float)
    rows, cols = f.shape
    reblur_h = np.zeros_like(f)
    reblur_v = np.zeros_like(f)
    for i in range(rows):
        for j in range(cols):
            acc_h = sum(f[i, reflect_index(j + t, cols)] for t in range(-4, 5))
            acc_v = sum(f[reflect_index(i + t, rows), j] for t in range(-4, 5))
            reblur_h[i, j] = acc_h / 9.0
            reblur_v[i, j] = acc_v / 9.0

    def axis_sums(orig, reblur, axis):
        sum_d = 0.0
        sum_v = 0.0
        if axis == 1:
            for i in range(1, rows - 1):
                for j in range(1, cols - 2):
                    d = abs(orig[i, j + 1] - orig[i, j])
                    db = abs(reblur[i, j + 1] - reblur[i, j])
                    sum_d += d
                    sum_v += max(0.0, d - db)
        else:
            for i in range(1, rows - 2):
                for j in range(1, cols - 1):
                    d = abs(orig[i + 1, j] - orig[i, j])
                    db = abs(reblur[i + 1, j] - reblur[i, j])
                    sum_d += d
                    sum_v += max(0.0, d - db)
        return sum_d, sum_v

    sd_h, sv_h = axis_sums(f, reblur_h, axis=1)
    sd_v, sv_v = axis_sums(f, reblur_v, axis=0)
    if sd_h <= 1e-9 and sd_v <= 1e-9:
        return 1.0
    score_h = 1.0 if sd_h <= 1e-9 else (sd_h - sv_h) / sd_h
    score_v = 1.0 if sd_v <= 1e-9 else (sd_v - sv_v) / sd_v
    return min(max(max(score_h, score_v), 0.0), 1.0)


def checkerboard(n):
    return (np.indices((n, n)).sum(axis=0) % 2).astype(float)


class TestCreteBlur:
    def test_flat_patch_scores_one(self):
        assert crete_blur(np.full((32, 32), 0.7)) == 1.0
        assert crete_blur(np.zeros((16, 16))) == 1.0

    def test_checkerboard_matches_bruteforce(self):
        cb = checkerboard(12)
        expected = crete_blur_bruteforce(cb)
        # frozen from the brute-force run; a 1-px checkerboard is nearly as
        # sharp as content gets
        assert expected == pytest.approx(0.037037037037037, abs=1e-12)
        assert crete_blur(cb) == pytest.approx(expected, abs=1e-12)
        assert crete_blur(cb) < 0.2

    def test_matches_bruteforce_on_random_patches(self):
        rng = np.random.default_rng(3)
        for _ in range(3):
            patch = rng.random((20, 24))
            assert crete_blur(patch) == pytest.approx(
                crete_blur_bruteforce(patch), abs=1e-12)

    def test_blurred_texture_scores_higher(self, blob_texture):
        light = convolve(blob_texture, gaussian_kernel(1.0))
        heavy = convolve(blob_texture, gaussian_kernel(4.0))
        assert crete_blur(light) < crete_blur(heavy)

    def test_strictly_increasing_over_sigma(self, blob_texture_256):
        scores = [crete_blur(convolve(blob_texture_256, gaussian_kernel(s)))
                  for s in (0.5, 1, 2, 4, 8)]
        assert all(a < b for a, b in zip(scores, scores[1:]))

    def test_range_on_assorted_inputs(self):
        rng = np.random.default_rng(11)
        inputs = [rng.random((16, 16)), np.zeros((8, 8)), np.ones((8, 8)),
                  checkerboard(9), rng.random((3, 50))]
        for patch in inputs:
            assert 0.0 <= crete_blur(patch) <= 1.0

    def test_reblur_fixed_point(self, blob_texture):
        from scipy.ndimage import uniform_filter1d
        averaged = uniform_filter1d(
            uniform_filter1d(blob_texture, 9, axis=0, mode="reflect"),
            9, axis=1, mode="reflect")
        assert crete_blur(averaged) > crete_blur(blob_texture)

    def test_translation_insensitive_on_periodic_texture(self):
        x = np.arange(64) * 2 * np.pi / 8
        tex = 0.5 + 0.25 * (np.sin(x)[None, :] + np.sin(x)[:, None])
        assert abs(crete_blur(tex) - crete_blur(np.roll(tex, 1, axis=1))) < 0.05
        assert abs(crete_blur(tex) - crete_blur(np.roll(tex, 1, axis=0))) < 0.05

    def test_rejects_color_and_tiny_patches(self):
        with pytest.raises(DimensionError):
            crete_blur(np.zeros((8, 8, 3)))
        with pytest.raises(DimensionError):
            crete_blur(np.zeros((2, 40)))


class TestBlurMap:
    def test_uniform_blur_gives_flat_map(self):
        tex = cell_texture((192, 192), seed=2, scale=2.5)
        blurred = convolve(tex, gaussian_kernel(2.0))
        bm = blur_map(blurred, patch=64, stride=32)
        interior = bm[32:-32, 32:-32]
        assert np.all(np.abs(interior - np.median(interior)) < 0.1)

    def test_values_in_unit_interval(self, blob_texture_256):
        bm = blur_map(blob_texture_256, patch=64, stride=32)
        assert bm.min() >= 0.0 and bm.max() <= 1.0

    def test_no_overlap_is_piecewise_constant(self, blob_texture_256):
        bm = blur_map(blob_texture_256, patch=64, stride=64)
        for y in range(0, 256, 64):
            for x in range(0, 256, 64):
                cell = bm[y:y + 64, x:x + 64]
                assert np.ptp(cell) < 1e-12

    def test_left_sharp_right_blurred_is_nondecreasing(self):
        tex = cell_texture((128, 256), seed=4, scale=2.5)
        right = convolve(tex, gaussian_kernel(4.0))
        composite = tex.copy()
        composite[:, 128:] = right[:, 128:]
        bm = blur_map(composite, patch=64, stride=32)
        col_mean = bm.mean(axis=0)
        # column means, smoothed over a patch width, must not decrease
        smooth = np.convolve(col_mean, np.ones(64) / 64, mode="valid")
        assert np.all(np.diff(smooth) > -1e-3)

    def test_rgb_scored_on_green(self, blob_texture_256):
        rgb = np.stack([np.zeros_like(blob_texture_256), blob_texture_256,
                        np.ones_like(blob_texture_256)], axis=2)
        assert np.allclose(blur_map(rgb), blur_map(blob_texture_256))
