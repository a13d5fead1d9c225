"""Overlapping patch extraction and weighted stitching.

The same blend window is used everywhere a per-patch quantity has to be
merged back into image coordinates: a separable triangular ramp, floored at
1e-3 so pixels covered by a single clamped edge patch never divide by zero,
with per-pixel renormalization so the weights always sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CoverageError, DimensionError

__all__ = ["PatchGrid", "axis_origins", "blend_window", "extract_patches",
           "stitch_patches", "splat_values"]

WEIGHT_FLOOR = 1e-3


@dataclass
class PatchGrid:
    """Overlapping patches plus the metadata tying them to image coordinates.

    origins are (x, y) top-left corners, x varying fastest; patches[i] is the
    copy extracted at origins[i]. Grayscale sources give (p, p) patches, RGB
    sources (p, p, 3).
    """

    patch_size: int
    stride: int
    origins: list = field(default_factory=list)
    patches: list = field(default_factory=list)

    @property
    def shape(self) -> tuple:
        """(cells_y, cells_x) of the origin lattice."""
        xs = sorted({x for x, _ in self.origins})
        ys = sorted({y for _, y in self.origins})
        return (len(ys), len(xs))


def axis_origins(dim: int, patch: int, stride: int) -> list:
    """Patch start offsets along one axis: step by stride, clamp the last
    origin to dim - patch so the edge is always covered."""
    if patch > dim:
        raise DimensionError(f"patch size {patch} exceeds image extent {dim}")
    if not 1 <= stride <= patch:
        raise ValueError(f"stride must be in [1, patch], got {stride}")
    xs = list(range(0, dim - patch + 1, stride))
    if xs[-1] != dim - patch:
        xs.append(dim - patch)
    return xs


def blend_window(patch: int) -> np.ndarray:
    """Separable triangular 2D window with the 1e-3 floor applied."""
    w = np.bartlett(patch)
    return np.maximum(np.outer(w, w), WEIGHT_FLOOR)


def extract_patches(img: np.ndarray, patch_size: int, stride: int) -> PatchGrid:
    """Partition an image into a grid of overlapping patch copies.

    Origins step by `stride`; the last origin per axis is clamped to
    dim - patch_size so edges are covered. Raises DimensionError when the
    image is smaller than the patch.
    """
    h, w = img.shape[:2]
    ys = axis_origins(h, patch_size, stride)
    xs = axis_origins(w, patch_size, stride)
    grid = PatchGrid(patch_size=patch_size, stride=stride)
    for y in ys:
        for x in xs:
            grid.origins.append((x, y))
            grid.patches.append(img[y:y + patch_size, x:x + patch_size].copy())
    return grid


def stitch_patches(grid: PatchGrid, out_w: int, out_h: int) -> np.ndarray:
    """Blend a patch grid back into an (out_h, out_w) image.

    Each output pixel is the weight-normalized sum of all overlapping patch
    contributions under the triangular window. Raises CoverageError if any
    pixel receives no contribution.
    """
    if not grid.patches:
        raise CoverageError("empty patch grid")
    p = grid.patch_size
    channels = grid.patches[0].ndim == 3
    shape = (out_h, out_w, grid.patches[0].shape[2]) if channels else (out_h, out_w)
    acc = np.zeros(shape)
    wacc = np.zeros((out_h, out_w))
    win = blend_window(p)
    win_c = win[:, :, None] if channels else win
    for (x, y), data in zip(grid.origins, grid.patches):
        if y + p > out_h or x + p > out_w or x < 0 or y < 0:
            raise DimensionError(
                f"patch at ({x}, {y}) exceeds output extent {out_w}x{out_h}"
            )
        acc[y:y + p, x:x + p] += data * win_c
        wacc[y:y + p, x:x + p] += win
    if np.any(wacc == 0.0):
        raise CoverageError("patch grid leaves uncovered pixels")
    return acc / (wacc[:, :, None] if channels else wacc)


def splat_values(grid: PatchGrid, values: np.ndarray, out_w: int,
                 out_h: int) -> np.ndarray:
    """Spread one scalar per patch over its footprint with the blend window.

    Used to turn per-patch scores into a continuous per-pixel map.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.shape[0] != len(grid.origins):
        raise DimensionError("one value per patch required")
    p = grid.patch_size
    acc = np.zeros((out_h, out_w))
    wacc = np.zeros((out_h, out_w))
    win = blend_window(p)
    for (x, y), v in zip(grid.origins, values):
        acc[y:y + p, x:x + p] += v * win
        wacc[y:y + p, x:x + p] += win
    if np.any(wacc == 0.0):
        raise CoverageError("patch grid leaves uncovered pixels")
    return acc / wacc
