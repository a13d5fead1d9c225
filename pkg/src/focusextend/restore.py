"""Patch deconvolution filters, the space-variant deblurring pipeline, and
restoration quality metrics."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import fft

from .blur import patch_scores
from .errors import ConfigError, DimensionError
from .patches import PatchGrid, stitch_patches
from .psf import (AUTO_KERNEL_CAP, DELTA_SIGMA, KernelLUT, gaussian_kernel,
                  lut_query, sigma_from_blur)

__all__ = ["psf2otf", "inverse_filter", "wiener", "deblur_image", "mse", "psnr"]

LAPLACIAN = np.array([[0.0, 1.0, 0.0],
                      [1.0, -4.0, 1.0],
                      [0.0, 1.0, 0.0]])


def psf2otf(ker: np.ndarray, shape: tuple) -> np.ndarray:
    """Zero-pad a centered kernel to `shape` and move its center to the zero
    lag, then transform."""
    k = ker.shape[0]
    if k > min(shape):
        raise DimensionError(f"kernel size {k} exceeds patch extent {shape}")
    padded = np.zeros(shape)
    padded[:k, :k] = ker
    padded = np.roll(padded, (-(k // 2), -(k // 2)), axis=(0, 1))
    return fft.fft2(padded)


def inverse_filter(blurry: np.ndarray, ker: np.ndarray,
                   eps: float = 1e-6) -> np.ndarray:
    """Naive frequency-domain division baseline.

    |OTF| is floored at eps with phase preserved. Kept as a reference point
    only: any noise at frequencies where the OTF is small is amplified by up
    to 1/eps, which is exactly the failure mode the regularized filter below
    avoids.
    """
    if blurry.ndim != 2:
        raise DimensionError("inverse_filter expects a single-channel patch")
    if eps <= 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    otf = psf2otf(ker, blurry.shape)
    mag = np.abs(otf)
    phase = np.where(mag > 0, otf / np.where(mag > 0, mag, 1.0), 1.0)
    floored = phase * np.maximum(mag, eps)
    spec = fft.fft2(blurry)
    return np.real(fft.ifft2(spec / floored))


def wiener(blurry: np.ndarray, ker: np.ndarray, lambda_w: float = 0.1,
           clamp: bool = True) -> np.ndarray:
    """Laplacian-regularized Wiener deconvolution of one patch.

    I_hat = conj(OTF) * B / (|OTF|^2 + lambda_w * |L|^2) where L is the
    transform of the 3x3 discrete Laplacian zero-padded to the patch size.
    The Laplacian's DC response is zero, so unit-sum kernels preserve the
    patch mean. Output is clamped to [0, 1] unless clamp=False.
    """
    if blurry.ndim != 2:
        raise DimensionError("wiener expects a single-channel patch")
    if lambda_w < 0:
        raise ValueError(f"lambda_w must be >= 0, got {lambda_w}")
    otf = psf2otf(ker, blurry.shape)
    reg = psf2otf(LAPLACIAN, blurry.shape)
    spec = fft.fft2(blurry)
    denom = np.abs(otf) ** 2 + lambda_w * np.abs(reg) ** 2
    # lambda_w = 0 with a vanishing OTF would divide by zero; keep it finite.
    denom = np.maximum(denom, 1e-300)
    out = np.real(fft.ifft2(np.conj(otf) * spec / denom))
    return np.clip(out, 0.0, 1.0) if clamp else out


def _kernel_for_blur(blur: float, method: str, sigma_scale: float,
                     lut: KernelLUT | None, patch: int) -> np.ndarray:
    if method == "gaussian":
        sigma = sigma_from_blur(blur, sigma_scale)
        if sigma < DELTA_SIGMA:
            return gaussian_kernel(0.0)
        cap = min(AUTO_KERNEL_CAP, patch if patch % 2 == 1 else patch - 1)
        k_auto = 2 * int(np.ceil(3 * sigma)) + 1
        return gaussian_kernel(sigma, min(k_auto, cap))
    return lut_query(lut, blur)


def deblur_image(img: np.ndarray, method: str = "gaussian", patch: int = 64,
                 stride: int = 32, lambda_w: float = 0.1,
                 sigma_scale: float = 50.0, max_blur: float = 1.0,
                 lut: KernelLUT | None = None, threads: int = 1) -> np.ndarray:
    """Space-variant deblurring of a whole image.

    The blur level is scored per patch on the green channel; each patch gets
    a kernel from its score (parametric Gaussian or lookup table) and is
    Wiener-restored per channel with that same kernel; restored patches are
    stitched with the standard window. Patches scoring above max_blur pass
    through unrestored. threads caps the patch worker pool (0 = all cores);
    results do not depend on the thread count.
    """
    if method not in ("gaussian", "lut"):
        raise ConfigError(f"method must be 'gaussian' or 'lut', got {method!r}")
    if method == "lut":
        if lut is None:
            raise ConfigError("lut method requires a loaded kernel lookup table")
        if lut.kernel_size > patch:
            raise ConfigError(
                f"table kernels ({lut.kernel_size}) exceed the patch size ({patch})"
            )
    grid, scores = patch_scores(img, patch, stride)
    color = img.ndim == 3

    def restore_cell(args):
        (x, y), blur = args
        source = img[y:y + patch, x:x + patch]
        if blur > max_blur:
            return source.copy()
        ker = _kernel_for_blur(blur, method, sigma_scale, lut, patch)
        if ker.shape[0] == 1:
            # deconvolving by a delta is a no-op by intent; regularizing
            # anyway would only smooth content that was never blurred
            return source.copy()
        if color:
            return np.stack(
                [wiener(source[:, :, c], ker, lambda_w) for c in range(3)], axis=2
            )
        return wiener(source, ker, lambda_w)

    jobs = list(zip(grid.origins, scores))
    if threads == 1:
        restored = [restore_cell(j) for j in jobs]
    else:
        workers = threads if threads > 0 else None
        with ThreadPoolExecutor(max_workers=workers) as pool:
            restored = list(pool.map(restore_cell, jobs))
    out = PatchGrid(patch_size=patch, stride=stride, origins=grid.origins,
                    patches=restored)
    h, w = img.shape[:2]
    return stitch_patches(out, w, h)


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared difference over all pixels and channels."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB for unit-interval images.

    Identical images have no error to measure; that case returns math.inf.
    """
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / err)
