"""Blur-level → PSF models: parametric Gaussians and the kernel lookup table."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, EmptyTableError

__all__ = ["DELTA_SIGMA", "normalize_kernel", "delta_kernel", "gaussian_kernel",
           "sigma_from_blur", "kernel_second_moment", "KernelLUT", "lut_build",
           "lut_query", "save_lut", "load_lut"]

# Below this sigma a Gaussian is indistinguishable from a delta on the pixel
# grid and is treated as one.
DELTA_SIGMA = 0.05

MAX_KERNEL_SIZE = 127
AUTO_KERNEL_CAP = 63


def normalize_kernel(ker: np.ndarray) -> np.ndarray:
    """Rescale a kernel to unit sum. Idempotent; negatives are kept."""
    ker = np.asarray(ker, dtype=np.float64)
    if ker.ndim != 2 or ker.shape[0] != ker.shape[1]:
        raise DimensionError(f"kernel must be square, got shape {ker.shape}")
    k = ker.shape[0]
    if k % 2 == 0 or not 1 <= k <= MAX_KERNEL_SIZE:
        raise DimensionError(f"kernel size must be odd and in [1, {MAX_KERNEL_SIZE}]")
    if not np.all(np.isfinite(ker)):
        raise ValueError("kernel contains non-finite weights")
    total = ker.sum()
    if abs(total) < 1e-12:
        raise ValueError("kernel sum is zero; cannot normalize")
    if abs(total - 1.0) < 1e-12:  # already normalized; keep idempotent
        return ker.copy()
    return ker / total


def delta_kernel(k: int = 1) -> np.ndarray:
    """Identity kernel of odd size k."""
    ker = np.zeros((k, k))
    ker[k // 2, k // 2] = 1.0
    return normalize_kernel(ker)


def gaussian_kernel(sigma: float, k: int | None = None) -> np.ndarray:
    """Sampled isotropic Gaussian PSF, normalized to unit sum.

    The weight at integer offset d from the center is exp(-d^2 / (2 sigma^2));
    any closed-form prefactor cancels in the discrete renormalization. With
    k=None the support is auto-sized to the 3-sigma truncation, capped at 63
    to bound patch-FFT cost. sigma below the delta threshold yields an exact
    delta.
    """
    if sigma < 0 or not np.isfinite(sigma):
        raise ValueError(f"sigma must be finite and >= 0, got {sigma}")
    if sigma < DELTA_SIGMA:
        return delta_kernel(k if k is not None else 1)
    if k is None:
        k = min(AUTO_KERNEL_CAP, 2 * int(np.ceil(3 * sigma)) + 1)
    if k % 2 == 0 or not 1 <= k <= MAX_KERNEL_SIZE:
        raise DimensionError(f"kernel size must be odd and in [1, {MAX_KERNEL_SIZE}]")
    ax = np.arange(k, dtype=np.float64) - k // 2
    xx, yy = np.meshgrid(ax, ax)
    w = np.exp(-(xx ** 2 + yy ** 2) / (2.0 * sigma ** 2))
    return normalize_kernel(w)


def sigma_from_blur(blur: float, scale: float = 50.0) -> float:
    """Linear blur-level → Gaussian sigma mapping (sigma = scale * blur)."""
    if not 0.0 <= blur <= 1.0:
        raise ValueError(f"blur level must be in [0, 1], got {blur}")
    if scale < 0:
        raise ValueError(f"scale must be >= 0, got {scale}")
    return scale * blur


def kernel_second_moment(ker: np.ndarray) -> float:
    """Per-axis second moment of a unit-sum kernel about its window center.

    Reproduces sigma^2 for sampled Gaussians; for estimated kernels it is a
    robust spread diagnostic (signed weights enter as-is).
    """
    ker = np.asarray(ker, dtype=np.float64)
    k = ker.shape[0]
    ax = np.arange(k, dtype=np.float64) - k // 2
    xx, yy = np.meshgrid(ax, ax)
    return float((ker * (xx ** 2 + yy ** 2)).sum() / 2.0)


@dataclass
class KernelLUT:
    """Blur-level-binned table of averaged kernels.

    kernels maps populated bin index -> unit-sum (k, k) array; counts maps
    bin index -> number of averaged samples. scale_note carries free-text
    provenance (source images, ridge weight, patch size).
    """

    bin_count: int = 100
    kernel_size: int = 15
    kernels: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    scale_note: str = ""

    def bin_index(self, blur: float) -> int:
        if not 0.0 <= blur <= 1.0:
            raise ValueError(f"blur level must be in [0, 1], got {blur}")
        return min(int(blur * self.bin_count), self.bin_count - 1)

    def bin_center(self, index: int) -> float:
        return (index + 0.5) / self.bin_count


def lut_build(km, bin_count: int = 100, scale_note: str = "") -> KernelLUT:
    """Average a kernel map's cells into blur-level bins.

    Degenerate cells are skipped; each populated bin stores the renormalized
    mean of its kernels plus the sample count. Raises EmptyTableError when no
    usable cell exists.
    """
    lut = KernelLUT(bin_count=bin_count, kernel_size=km.kernel_size,
                    scale_note=scale_note)
    sums: dict = {}
    for ker, blur, degenerate in zip(km.kernels, km.blur_levels, km.degenerate):
        if degenerate:
            continue
        i = lut.bin_index(blur)
        if i in sums:
            sums[i] += ker
            lut.counts[i] += 1
        else:
            sums[i] = ker.copy()
            lut.counts[i] = 1
    if not sums:
        raise EmptyTableError("no non-degenerate cells to build a table from")
    for i, total in sums.items():
        lut.kernels[i] = normalize_kernel(total / lut.counts[i])
    return lut


def lut_query(lut: KernelLUT, blur: float) -> np.ndarray:
    """Kernel for a blur level: stored bin, interpolation, or nearest edge.

    A populated bin returns its kernel as stored. An empty bin between
    populated ones returns the renormalized linear interpolation of the two
    nearest populated bins, weighted by blur distance to their centers.
    Below/above the populated range the nearest populated kernel is used.
    """
    if not lut.kernels:
        raise EmptyTableError("kernel lookup table has no populated bins")
    i = lut.bin_index(blur)
    if i in lut.kernels:
        return lut.kernels[i].copy()
    populated = sorted(lut.kernels)
    lower = [p for p in populated if p < i]
    upper = [p for p in populated if p > i]
    if not lower:
        return lut.kernels[upper[0]].copy()
    if not upper:
        return lut.kernels[lower[-1]].copy()
    lo, hi = lower[-1], upper[0]
    c_lo, c_hi = lut.bin_center(lo), lut.bin_center(hi)
    t = np.clip((blur - c_lo) / (c_hi - c_lo), 0.0, 1.0)
    mix = (1.0 - t) * lut.kernels[lo] + t * lut.kernels[hi]
    return normalize_kernel(mix)


def save_lut(lut: KernelLUT, path: str) -> None:
    """Persist a lookup table as versioned JSON."""
    doc = {
        "version": 1,
        "bin_count": lut.bin_count,
        "kernel_size": lut.kernel_size,
        "scale_note": lut.scale_note,
        "entries": [
            {
                "bin": i,
                "blur_center": lut.bin_center(i),
                "count": lut.counts[i],
                "kernel": [float(v) for v in lut.kernels[i].ravel()],
            }
            for i in sorted(lut.kernels)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_lut(path: str) -> KernelLUT:
    """Load a JSON lookup table, rejecting unknown versions and kernels whose
    sum strays from 1 by more than 1e-6."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != 1:
        raise ValueError(f"unsupported lookup-table version: {doc.get('version')!r}")
    k = int(doc["kernel_size"])
    lut = KernelLUT(bin_count=int(doc["bin_count"]), kernel_size=k,
                    scale_note=str(doc.get("scale_note", "")))
    for entry in doc["entries"]:
        ker = np.asarray(entry["kernel"], dtype=np.float64)
        if ker.size != k * k:
            raise ValueError(f"bin {entry['bin']}: expected {k * k} weights")
        ker = ker.reshape(k, k)
        if abs(ker.sum() - 1.0) > 1e-6:
            raise ValueError(f"bin {entry['bin']}: kernel sum {ker.sum()} is not 1")
        i = int(entry["bin"])
        if not 0 <= i < lut.bin_count:
            raise ValueError(f"bin index {i} out of range")
        lut.kernels[i] = ker
        lut.counts[i] = int(entry["count"])
    return lut
