import numpy as np
import pytest

from focusextend import (PatchGrid, blend_window, cell_texture,
                         extract_patches, splat_values, stitch_patches)
from focusextend.errors import CoverageError, DimensionError


class TestExtract:
    def test_exact_fit_single_patch(self):
        img = np.random.default_rng(0).random((64, 64))
        grid = extract_patches(img, 64, 64)
        assert grid.origins == [(0, 0)]
        assert np.array_equal(grid.patches[0], img)

    def test_overlapping_grid_origins(self):
        img = np.zeros((128, 128))
        grid = extract_patches(img, 64, 32)
        xs = sorted({x for x, _ in grid.origins})
        ys = sorted({y for _, y in grid.origins})
        assert xs == [0, 32, 64] and ys == [0, 32, 64]
        assert len(grid.patches) == 9
        assert grid.shape == (3, 3)

    def test_clamped_edge_origins(self):
        img = np.zeros((100, 100))
        grid = extract_patches(img, 64, 64)
        assert sorted({x for x, _ in grid.origins}) == [0, 36]
        assert sorted({y for _, y in grid.origins}) == [0, 36]

    def test_origin_count_formula(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            h = int(rng.integers(16, 200))
            w = int(rng.integers(16, 200))
            p = int(rng.integers(4, min(h, w) + 1))
            s = int(rng.integers(1, p + 1))
            grid = extract_patches(np.zeros((h, w)), p, s)
            nx = int(np.ceil((w - p) / s)) + 1
            ny = int(np.ceil((h - p) / s)) + 1
            assert len(grid.origins) == nx * ny

    def test_patches_are_copies(self):
        img = np.zeros((64, 64))
        grid = extract_patches(img, 32, 32)
        grid.patches[0][0, 0] = 5.0
        assert img[0, 0] == 0.0

    def test_image_smaller_than_patch(self):
        with pytest.raises(DimensionError):
            extract_patches(np.zeros((32, 32)), 64, 32)


class TestStitch:
    def test_round_trip_identity(self):
        img = cell_texture((96, 130), seed=7)
        for p, s in [(64, 32), (32, 32), (48, 16), (96, 96), (17, 5)]:
            grid = extract_patches(img, p, s)
            out = stitch_patches(grid, 130, 96)
            assert np.max(np.abs(out - img)) < 1e-6

    def test_round_trip_identity_rgb(self):
        img = cell_texture((80, 72), seed=7, rgb=True)
        grid = extract_patches(img, 32, 16)
        out = stitch_patches(grid, 72, 80)
        assert np.max(np.abs(out - img)) < 1e-6

    def test_constant_patches_give_constant_image(self):
        grid = extract_patches(np.full((100, 100), 0.37), 64, 48)
        out = stitch_patches(grid, 100, 100)
        assert np.max(np.abs(out - 0.37)) < 1e-6

    def test_single_full_patch_is_identity(self):
        img = np.random.default_rng(2).random((40, 40))
        grid = extract_patches(img, 40, 40)
        assert np.max(np.abs(stitch_patches(grid, 40, 40) - img)) < 1e-12

    def test_overlap_blend_is_monotone_ramp(self):
        # two 64-wide patches overlapping 32 px: 0-valued and 1-valued
        grid = PatchGrid(patch_size=64, stride=32,
                         origins=[(0, 0), (32, 0)],
                         patches=[np.zeros((64, 64)), np.ones((64, 64))])
        out = stitch_patches(grid, 96, 64)
        row = out[32]
        assert np.all(row[:32] == 0.0) and np.all(row[64:] == 1.0)
        assert np.all(np.diff(row[31:65]) >= 0)
        # symmetric weights: the two central overlap columns average to 1/2
        assert (row[47] + row[48]) / 2 == pytest.approx(0.5, abs=1e-6)

    def test_uncovered_pixels_raise(self):
        grid = PatchGrid(patch_size=16, stride=16, origins=[(0, 0)],
                         patches=[np.ones((16, 16))])
        with pytest.raises(CoverageError):
            stitch_patches(grid, 64, 64)

    def test_window_floor_is_positive(self):
        win = blend_window(64)
        assert win.min() >= 1e-3
        assert win.max() <= 1.0


class TestSplat:
    def test_single_value_constant_map(self):
        grid = extract_patches(np.zeros((64, 64)), 64, 64)
        out = splat_values(grid, np.array([0.5]), 64, 64)
        assert np.max(np.abs(out - 0.5)) < 1e-12

    def test_convex_combination_bounds(self):
        grid = extract_patches(np.zeros((96, 96)), 64, 32)
        vals = np.random.default_rng(3).random(len(grid.origins))
        out = splat_values(grid, vals, 96, 96)
        assert out.min() >= vals.min() - 1e-12
        assert out.max() <= vals.max() + 1e-12

    def test_value_count_mismatch(self):
        grid = extract_patches(np.zeros((64, 64)), 32, 32)
        with pytest.raises(DimensionError):
            splat_values(grid, np.array([1.0]), 64, 64)
