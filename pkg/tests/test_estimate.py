import numpy as np
import pytest

from focusextend import (cell_texture, convolve, estimate_kernel,
                         estimate_kernel_map, gaussian_kernel,
                         kernel_second_moment, load_kernel_map, ramp_profile,
                         save_kernel_map, synth_depth_blur, kernel_montage)
from focusextend.errors import DegenerateInputError, DimensionError


@pytest.fixture
def sharp64():
    return np.random.default_rng(100).random((64, 64))


class TestEstimateKernel:
    def test_identity_blur_gives_centered_delta(self, sharp64):
        est = estimate_kernel(sharp64, sharp64, k=15, lambda_k=1e-3)
        assert est[7, 7] > 0.95
        assert np.abs(est).sum() - abs(est[7, 7]) < 0.05
        assert est.sum() == pytest.approx(1.0, abs=1e-9)

    def test_circular_shift_gives_displaced_delta(self, sharp64):
        shifted = np.roll(sharp64, 1, axis=1)
        est = estimate_kernel(sharp64, shifted, k=15, lambda_k=1e-3)
        peak = np.unravel_index(np.argmax(est), est.shape)
        assert peak == (7, 8)
        assert est[peak] > 0.95
        assert np.abs(est).sum() - abs(est[peak]) < 0.05
        # the estimate really explains the data: reblur it
        reblur = convolve(sharp64, est, boundary="wrap")
        assert np.max(np.abs(reblur - shifted)) < 0.01

    def test_gaussian_recovery_noiseless(self, sharp64):
        true = gaussian_kernel(2.0, 15)
        blurry = convolve(sharp64, true)
        est = estimate_kernel(sharp64, blurry, k=15, lambda_k=1e-4)
        assert np.linalg.norm(est - true) < 0.05

    def test_reblur_consistency(self, sharp64):
        true = gaussian_kernel(2.0, 15)
        blurry = convolve(sharp64, true)
        est = estimate_kernel(sharp64, blurry, k=15, lambda_k=1e-4)
        resid = np.linalg.norm(convolve(sharp64, est) - blurry)
        assert resid / np.linalg.norm(blurry) < 0.05

    def test_error_grows_with_blur(self, sharp64):
        # full-support true kernels; a 15x15 estimate cannot explain sigma=8
        def reblur_error(sigma):
            blurry = convolve(sharp64, gaussian_kernel(sigma))
            est = estimate_kernel(sharp64, blurry, k=15, lambda_k=1e-4)
            return np.linalg.norm(convolve(sharp64, est) - blurry) / \
                np.linalg.norm(blurry)
        assert reblur_error(8.0) > reblur_error(2.0)

    def test_regularization_monotone_smoothing(self, sharp64):
        blurry = convolve(sharp64, gaussian_kernel(2.0, 15))

        def hf_energy(lam):
            est = estimate_kernel(sharp64, blurry, k=15, lambda_k=lam)
            from scipy.ndimage import laplace
            return float((laplace(est) ** 2).sum())

        energies = [hf_energy(lam) for lam in (1e-4, 1e-3, 1e-2, 1e-1)]
        assert all(a >= b - 1e-12 for a, b in zip(energies, energies[1:]))

    def test_default_ridge_is_data_relative(self, sharp64):
        blurry = convolve(sharp64, gaussian_kernel(2.0, 15))
        est_default = estimate_kernel(sharp64, blurry, k=15)
        import scipy.fft as fft
        lam = 1e-3 * np.max(np.abs(fft.fft2(sharp64)) ** 2)
        est_explicit = estimate_kernel(sharp64, blurry, k=15, lambda_k=lam)
        assert np.array_equal(est_default, est_explicit)

    def test_all_zero_reference_raises(self):
        with pytest.raises(DegenerateInputError):
            estimate_kernel(np.zeros((64, 64)), np.ones((64, 64)), k=15,
                            lambda_k=1e-3)

    def test_shape_and_size_validation(self, sharp64):
        with pytest.raises(DimensionError):
            estimate_kernel(sharp64, sharp64[:32], k=15, lambda_k=1e-3)
        with pytest.raises(DimensionError):
            estimate_kernel(sharp64, sharp64, k=14, lambda_k=1e-3)
        with pytest.raises(DimensionError):
            estimate_kernel(sharp64, sharp64, k=65, lambda_k=1e-3)


class TestEstimateKernelMap:
    def test_identical_images_give_deltas(self):
        img = cell_texture((128, 128), seed=8)
        km = estimate_kernel_map(img, img, patch=64, stride=64, k=15,
                                 lambda_k=1e-3)
        assert km.grid_shape == (2, 2)
        for ker, degen in zip(km.kernels, km.degenerate):
            assert not degen
            assert ker[7, 7] > 0.9

    def test_ramp_pair_moments_track_true_sigma(self):
        tex = cell_texture((128, 512), seed=3)
        profile = ramp_profile(tex.shape, 0.0, 6.0)
        blurry = synth_depth_blur(tex, profile)
        km = estimate_kernel_map(tex, blurry, patch=64, stride=64, k=15)
        # group cells by column; moments should increase along the ramp
        moments = {}
        for (x, _), ker in zip(km.origins, km.kernels):
            moments.setdefault(x, []).append(kernel_second_moment(ker))
        xs = sorted(moments)
        means = [np.mean(moments[x]) for x in xs]
        assert all(a < b for a, b in zip(means, means[1:]))

    def test_swapped_arguments_fail_recovery(self):
        tex = cell_texture((64, 64), seed=3)
        true = gaussian_kernel(2.0, 15)
        blurry = convolve(tex, true)
        est = estimate_kernel(blurry, tex, k=15, lambda_k=1e-4)  # swapped
        assert np.linalg.norm(est - true) > 0.05  # documented negative control

    def test_flat_cells_marked_degenerate(self):
        sharp = np.full((64, 128), 0.5)
        sharp[:, :64] = cell_texture((64, 64), seed=2)
        blurry = convolve(sharp, gaussian_kernel(1.0))
        km = estimate_kernel_map(sharp, blurry, patch=64, stride=64, k=15,
                                 lambda_k=1e-3)
        assert km.degenerate == [False, True]
        delta = km.kernels[1]
        assert delta[7, 7] == 1.0

    def test_green_channel_used_for_rgb(self):
        gray = cell_texture((64, 64), seed=9)
        rgb = np.stack([np.zeros_like(gray), gray, np.ones_like(gray)], axis=2)
        blurry_gray = convolve(gray, gaussian_kernel(1.5))
        blurry_rgb = np.stack([np.zeros_like(gray), blurry_gray,
                               np.ones_like(gray)], axis=2)
        km_rgb = estimate_kernel_map(rgb, blurry_rgb, patch=64, stride=64,
                                     k=15, lambda_k=1e-3)
        km_gray = estimate_kernel_map(gray, blurry_gray, patch=64, stride=64,
                                      k=15, lambda_k=1e-3)
        assert np.allclose(km_rgb.kernels[0], km_gray.kernels[0])

    def test_size_mismatch_raises(self):
        with pytest.raises(DimensionError):
            estimate_kernel_map(np.zeros((64, 64)), np.zeros((64, 128)))

    def test_thread_count_does_not_change_result(self):
        tex = cell_texture((128, 128), seed=10)
        blurry = convolve(tex, gaussian_kernel(2.0))
        serial = estimate_kernel_map(tex, blurry, patch=64, stride=32)
        threaded = estimate_kernel_map(tex, blurry, patch=64, stride=32,
                                       threads=4)
        for a, b in zip(serial.kernels, threaded.kernels):
            assert np.array_equal(a, b)
        assert serial.blur_levels == threaded.blur_levels


class TestKernelMapSerialization:
    def test_round_trip(self, tmp_path):
        tex = cell_texture((128, 128), seed=4)
        blurry = convolve(tex, gaussian_kernel(1.5))
        km = estimate_kernel_map(tex, blurry, patch=64, stride=64, k=9,
                                 lambda_k=1e-3)
        path = str(tmp_path / "km.json")
        save_kernel_map(km, path)
        back = load_kernel_map(path)
        assert back.grid_shape == km.grid_shape
        assert back.origins == km.origins
        assert back.blur_levels == pytest.approx(km.blur_levels)
        assert back.degenerate == km.degenerate
        for a, b in zip(back.kernels, km.kernels):
            assert np.allclose(a, b)

    def test_montage_orders_by_blur(self, tmp_path):
        tex = cell_texture((64, 192), seed=4)
        profile = ramp_profile(tex.shape, 0.0, 5.0)
        blurry = synth_depth_blur(tex, profile)
        km = estimate_kernel_map(tex, blurry, patch=64, stride=64, k=9)
        sheet = kernel_montage(km, columns=3, cell=18)
        assert sheet.ndim == 2
        assert sheet.min() >= 0.0 and sheet.max() <= 1.0
        # 3 tiles of 18x18 + separators
        assert sheet.shape == (20, 3 * 19 + 1)
