"""No-reference per-patch blur estimation and blur-map assembly.

The per-patch score follows the re-blur principle: a region that is already
blurry changes far less under an additional strong low-pass than a sharp one.
Scores are in [0, 1], higher = blurrier, and double as the depth proxy for
PSF selection.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import DimensionError
from .image_io import green_channel
from .patches import extract_patches, splat_values

__all__ = ["crete_blur", "blur_map", "FLAT_THRESHOLD"]

# Sum of absolute neighbor differences below which a patch is considered
# featureless (flat). Flat patches carry no recoverable detail and score 1.0.
FLAT_THRESHOLD = 1e-9

_REBLUR_TAPS = 9


def crete_blur(patch: np.ndarray) -> float:
    """Blur level of a single-channel patch, in [0, 1] (higher = blurrier).

    Steps: (1) re-blur with 9-tap uniform averaging filters, horizontally and
    vertically; (2) take absolute differences of neighboring pixels along the
    matching axis for the original and re-blurred patch; (3) keep the lost
    variation V = max(0, D_orig - D_reblur); (4) per axis score
    (sum D_orig - sum V) / sum D_orig over interior pixels; (5) return the
    larger of the two axis scores. A flat patch scores 1.0 by convention.
    """
    f = np.asarray(patch, dtype=np.float64)
    if f.ndim != 2:
        raise DimensionError(f"expected a single-channel patch, got shape {f.shape}")
    if min(f.shape) < 3:
        raise DimensionError(f"patch must be at least 3x3, got {f.shape}")
    reblur_h = ndimage.uniform_filter1d(f, size=_REBLUR_TAPS, axis=1, mode="reflect")
    reblur_v = ndimage.uniform_filter1d(f, size=_REBLUR_TAPS, axis=0, mode="reflect")
    d_orig_h = np.abs(np.diff(f, axis=1))
    d_orig_v = np.abs(np.diff(f, axis=0))
    d_reblur_h = np.abs(np.diff(reblur_h, axis=1))
    d_reblur_v = np.abs(np.diff(reblur_v, axis=0))
    v_h = np.maximum(0.0, d_orig_h - d_reblur_h)
    v_v = np.maximum(0.0, d_orig_v - d_reblur_v)
    sum_d_h = d_orig_h[1:-1, 1:-1].sum()
    sum_d_v = d_orig_v[1:-1, 1:-1].sum()
    if sum_d_h <= FLAT_THRESHOLD and sum_d_v <= FLAT_THRESHOLD:
        return 1.0
    score_h = 1.0 if sum_d_h <= FLAT_THRESHOLD else \
        (sum_d_h - v_h[1:-1, 1:-1].sum()) / sum_d_h
    score_v = 1.0 if sum_d_v <= FLAT_THRESHOLD else \
        (sum_d_v - v_v[1:-1, 1:-1].sum()) / sum_d_v
    return float(np.clip(max(score_h, score_v), 0.0, 1.0))


def patch_scores(img: np.ndarray, patch: int, stride: int):
    """Patch grid over the green channel plus the per-patch blur scores."""
    plane = green_channel(img)
    grid = extract_patches(plane, patch, stride)
    scores = np.array([crete_blur(p) for p in grid.patches])
    return grid, scores


def blur_map(img: np.ndarray, patch: int = 64, stride: int = 32) -> np.ndarray:
    """Continuous per-pixel blur-level map in [0, 1].

    Each patch's scalar score is spread over its footprint with the standard
    blend window and per-pixel weight-normalized. RGB inputs are scored on
    the green channel.
    """
    grid, scores = patch_scores(img, patch, stride)
    h, w = img.shape[:2]
    return splat_values(grid, scores, w, h)
