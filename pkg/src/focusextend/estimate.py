"""Ground-truth PSF recovery from aligned sharp/blurry patch pairs.

Per patch the blur kernel is the closed-form ridge solution of the linear
degradation model, computed in the frequency domain where the circulant
structure turns the normal equations into an elementwise division.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from .blur import FLAT_THRESHOLD, crete_blur
from .errors import DegenerateInputError, DimensionError
from .image_io import green_channel
from .patches import axis_origins
from .psf import delta_kernel, normalize_kernel

__all__ = ["estimate_kernel", "estimate_kernel_map", "KernelMap",
           "save_kernel_map", "load_kernel_map", "kernel_montage"]

# Relative ridge weight applied to max|I|^2 when no explicit weight is given.
DEFAULT_RELATIVE_RIDGE = 1e-3


def estimate_kernel(sharp: np.ndarray, blurry: np.ndarray, k: int = 15,
                    lambda_k: float | None = None) -> np.ndarray:
    """Closed-form ridge estimate of the kernel mapping sharp to blurry.

    Computes H = conj(I) * B / (|I|^2 + lambda_k) elementwise over the patch
    DFTs, inverse-transforms, centers the zero lag, crops the central k x k
    window and normalizes to unit sum. lambda_k is the absolute ridge weight;
    None selects the data-relative default 1e-3 * max|I|^2. Negative weights
    in the estimate are kept (they encode ringing honestly).
    """
    sharp = np.asarray(sharp, dtype=np.float64)
    blurry = np.asarray(blurry, dtype=np.float64)
    if sharp.ndim != 2 or blurry.ndim != 2:
        raise DimensionError("kernel estimation expects single-channel patches")
    if sharp.shape != blurry.shape:
        raise DimensionError(
            f"patch shapes differ: {sharp.shape} vs {blurry.shape}"
        )
    if k % 2 == 0 or k < 1 or k > min(sharp.shape):
        raise DimensionError(
            f"kernel size must be odd and fit the patch, got k={k} for {sharp.shape}"
        )
    if not np.any(sharp):
        raise DegenerateInputError("all-zero reference patch")
    spec_sharp = fft.fft2(sharp)
    spec_blurry = fft.fft2(blurry)
    power = np.abs(spec_sharp) ** 2
    if lambda_k is None:
        lambda_k = DEFAULT_RELATIVE_RIDGE * power.max()
    if lambda_k <= 0:
        raise ValueError(f"lambda_k must be > 0, got {lambda_k}")
    est = np.conj(spec_sharp) * spec_blurry / (power + lambda_k)
    full = fft.fftshift(np.real(fft.ifft2(est)))
    cy, cx = full.shape[0] // 2, full.shape[1] // 2
    r = k // 2
    return normalize_kernel(full[cy - r:cy + r + 1, cx - r:cx + r + 1])


@dataclass
class KernelMap:
    """Per-cell kernel estimates over an image grid.

    Cells are stored row-major (x fastest); blur_levels are the blurry
    patches' scores, degenerate marks flat reference patches that carry a
    delta placeholder instead of an estimate.
    """

    grid_shape: tuple
    patch_size: int
    stride: int
    kernel_size: int
    origins: list = field(default_factory=list)
    kernels: list = field(default_factory=list)
    blur_levels: list = field(default_factory=list)
    degenerate: list = field(default_factory=list)


def _is_flat(patch: np.ndarray) -> bool:
    d = np.abs(np.diff(patch, axis=1))[1:-1, 1:-1].sum() + \
        np.abs(np.diff(patch, axis=0))[1:-1, 1:-1].sum()
    return d <= FLAT_THRESHOLD


def estimate_kernel_map(sharp: np.ndarray, blurry: np.ndarray, patch: int = 64,
                        stride: int = 64, k: int = 15,
                        lambda_k: float | None = None,
                        threads: int = 1) -> KernelMap:
    """Per-cell kernel estimation over registered sharp/blurry images.

    Works on the green channels. Every cell records the blurry patch's blur
    level; flat reference cells are marked degenerate and carry a delta.
    Cells are independent; threads caps the worker pool (0 = all cores) and
    does not affect the result.
    """
    if sharp.shape[:2] != blurry.shape[:2]:
        raise DimensionError(
            f"image sizes differ: {sharp.shape[:2]} vs {blurry.shape[:2]}"
        )
    plane_sharp = green_channel(sharp)
    plane_blurry = green_channel(blurry)
    h, w = plane_sharp.shape
    ys = axis_origins(h, patch, stride)
    xs = axis_origins(w, patch, stride)
    km = KernelMap(grid_shape=(len(ys), len(xs)), patch_size=patch,
                   stride=stride, kernel_size=k)
    origins = [(x, y) for y in ys for x in xs]

    def estimate_cell(origin):
        x, y = origin
        ps = plane_sharp[y:y + patch, x:x + patch]
        pb = plane_blurry[y:y + patch, x:x + patch]
        blur = crete_blur(pb)
        if _is_flat(ps):
            return delta_kernel(k), blur, True
        return estimate_kernel(ps, pb, k, lambda_k), blur, False

    if threads == 1:
        cells = [estimate_cell(o) for o in origins]
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads if threads > 0 else None) as pool:
            cells = list(pool.map(estimate_cell, origins))
    for origin, (ker, blur, degenerate) in zip(origins, cells):
        km.origins.append(origin)
        km.kernels.append(ker)
        km.blur_levels.append(blur)
        km.degenerate.append(degenerate)
    return km


def save_kernel_map(km: KernelMap, path: str) -> None:
    """Persist a kernel map as versioned JSON (kernels row-major)."""
    doc = {
        "version": 1,
        "grid_height": km.grid_shape[0],
        "grid_width": km.grid_shape[1],
        "patch_size": km.patch_size,
        "stride": km.stride,
        "kernel_size": km.kernel_size,
        "cells": [
            {
                "x": int(x),
                "y": int(y),
                "blur": float(b),
                "degenerate": bool(d),
                "kernel": [float(v) for v in ker.ravel()],
            }
            for (x, y), ker, b, d in zip(km.origins, km.kernels,
                                         km.blur_levels, km.degenerate)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_kernel_map(path: str) -> KernelMap:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != 1:
        raise ValueError(f"unsupported kernel-map version: {doc.get('version')!r}")
    k = int(doc["kernel_size"])
    km = KernelMap(grid_shape=(int(doc["grid_height"]), int(doc["grid_width"])),
                   patch_size=int(doc["patch_size"]), stride=int(doc["stride"]),
                   kernel_size=k)
    for cell in doc["cells"]:
        ker = np.asarray(cell["kernel"], dtype=np.float64).reshape(k, k)
        km.origins.append((int(cell["x"]), int(cell["y"])))
        km.kernels.append(ker)
        km.blur_levels.append(float(cell["blur"]))
        km.degenerate.append(bool(cell["degenerate"]))
    return km


def kernel_montage(km: KernelMap, columns: int = 16, cell: int = 32) -> np.ndarray:
    """Grayscale tile sheet of the map's kernels in ascending order of blur.

    Each kernel is min/max normalized for display and nearest-neighbor
    upscaled into a cell x cell tile with a 1-px separator.
    """
    order = np.argsort(np.asarray(km.blur_levels), kind="stable")
    tiles = []
    for idx in order:
        ker = km.kernels[idx]
        lo, hi = ker.min(), ker.max()
        norm = (ker - lo) / (hi - lo) if hi > lo else np.zeros_like(ker)
        reps = max(1, cell // ker.shape[0])
        tiles.append(np.kron(norm, np.ones((reps, reps))))
    side = tiles[0].shape[0]
    columns = min(columns, len(tiles))
    rows = (len(tiles) + columns - 1) // columns
    sheet = np.zeros((rows * (side + 1) + 1, columns * (side + 1) + 1))
    for n, tile in enumerate(tiles):
        r, c = divmod(n, columns)
        y0, x0 = 1 + r * (side + 1), 1 + c * (side + 1)
        sheet[y0:y0 + side, x0:x0 + side] = tile
    return sheet
