"""Focal-stack preprocessing: translation registration and sharpness fusion.

A stack of the same subject at different focus depths is aligned to a
reference frame by phase correlation, then fused by picking, per patch cell,
the stack member whose blur score is lowest. The fused result serves as the
all-in-focus reference for ground-truth kernel estimation.
"""

from __future__ import annotations

import numpy as np
from scipy import fft

from .blur import crete_blur
from .errors import DimensionError, RegistrationError
from .image_io import green_channel
from .patches import PatchGrid, axis_origins, stitch_patches

__all__ = ["register_translation", "shift_image", "fuse_stack"]

MIN_CONFIDENCE = 0.05


def register_translation(reference: np.ndarray, moving: np.ndarray):
    """Integer-pixel translation of `moving` relative to `reference`.

    Phase correlation: the normalized cross-power spectrum of the two green
    channels inverse-transforms to a correlation surface whose peak sits at
    the translation. Both planes are mean-subtracted and Hann-windowed
    first, which stops image borders from locking the peak to zero shift
    when the frames carry different defocus. Returns (dx, dy, confidence)
    where confidence is the peak value over the surface's L2 energy, in
    (0, 1]. Raises RegistrationError below the 0.05 confidence floor.
    """
    ref = green_channel(np.asarray(reference, dtype=np.float64))
    mov = green_channel(np.asarray(moving, dtype=np.float64))
    if ref.shape != mov.shape:
        raise DimensionError(f"image sizes differ: {ref.shape} vs {mov.shape}")
    taper = np.outer(np.hanning(ref.shape[0]), np.hanning(ref.shape[1]))
    spec_ref = fft.fft2((ref - ref.mean()) * taper)
    spec_mov = fft.fft2((mov - mov.mean()) * taper)
    cross = np.conj(spec_ref) * spec_mov
    surface = np.real(fft.ifft2(cross / np.maximum(np.abs(cross), 1e-12)))
    peak = np.unravel_index(np.argmax(surface), surface.shape)
    energy = float(np.sqrt(np.sum(surface ** 2)))
    confidence = float(surface[peak] / energy) if energy > 0 else 0.0
    confidence = min(max(confidence, 0.0), 1.0)
    if confidence < MIN_CONFIDENCE:
        raise RegistrationError(
            f"registration confidence {confidence:.4f} below {MIN_CONFIDENCE}"
        )
    h, w = surface.shape
    dy, dx = int(peak[0]), int(peak[1])
    if dy > h // 2:
        dy -= h
    if dx > w // 2:
        dx -= w
    return dx, dy, confidence


def shift_image(img: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Translate by whole pixels, replicating edge rows/columns."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    if abs(dx) >= w or abs(dy) >= h:
        raise DimensionError(f"shift ({dx}, {dy}) exceeds image extent")
    pad = [(max(dy, 0), max(-dy, 0)), (max(dx, 0), max(-dx, 0))]
    if img.ndim == 3:
        pad.append((0, 0))
    padded = np.pad(img, pad, mode="edge")
    return padded[max(-dy, 0):max(-dy, 0) + h, max(-dx, 0):max(-dx, 0) + w]


def fuse_stack(stack: list, patch: int = 64, stride: int = 32):
    """Fuse registered same-size images by per-cell sharpness selection.

    For every patch location the member with the lowest blur score wins
    (ties to the lowest stack index); winning patches are stitched with the
    standard window. Returns (fused_image, selection) where selection maps
    row-major cell order to the winning stack index.
    """
    if not stack:
        raise ValueError("empty stack")
    first = np.asarray(stack[0], dtype=np.float64)
    members = [np.asarray(m, dtype=np.float64) for m in stack]
    for m in members[1:]:
        if m.shape != first.shape:
            raise DimensionError("stack members must share dimensions")
    planes = [green_channel(m) for m in members]
    h, w = first.shape[:2]
    ys = axis_origins(h, patch, stride)
    xs = axis_origins(w, patch, stride)
    grid = PatchGrid(patch_size=patch, stride=stride)
    selection = []
    for y in ys:
        for x in xs:
            scores = [crete_blur(p[y:y + patch, x:x + patch]) for p in planes]
            winner = int(np.argmin(scores))  # argmin ties to the lowest index
            selection.append(winner)
            grid.origins.append((x, y))
            grid.patches.append(members[winner][y:y + patch, x:x + patch].copy())
    return stitch_patches(grid, w, h), selection
