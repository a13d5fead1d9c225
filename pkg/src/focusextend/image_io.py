"""Image loading, saving and channel handling.

Images are plain numpy arrays throughout the library: shape (H, W) for
grayscale or (H, W, 3) for RGB, dtype float64, every intensity finite and
in [0, 1]. Files are read and written with OpenCV so that PNG and TIFF in
both 8-bit and 16-bit depths work for grayscale and RGB alike.
"""

from __future__ import annotations

import os

import cv2
import numpy as np

from .errors import DimensionError

__all__ = ["load_image", "save_image", "as_image", "green_channel"]


def as_image(data: np.ndarray) -> np.ndarray:
    """Validate and coerce an array to the library's image convention.

    Accepts (H, W) or (H, W, 3) arrays, converts to float64 and checks that
    all values are finite and inside [0, 1].

    Raises
    ------
    DimensionError
        If the shape is not a 2D plane or a 3-channel stack.
    ValueError
        If any value is non-finite or outside [0, 1].
    """
    img = np.asarray(data, dtype=np.float64)
    if img.ndim == 3 and img.shape[2] == 1:
        img = img[:, :, 0]
    if img.ndim not in (2, 3) or (img.ndim == 3 and img.shape[2] != 3):
        raise DimensionError(
            f"expected (H, W) or (H, W, 3) image, got shape {img.shape}"
        )
    if img.size == 0:
        raise DimensionError("empty image")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite values")
    if img.min() < 0.0 or img.max() > 1.0:
        raise ValueError("image intensities must lie in [0, 1]")
    return img


def load_image(path: str) -> np.ndarray:
    """Load a PNG or TIFF image as float64 in [0, 1].

    8-bit values are divided by 255, 16-bit values by 65535. Color images
    come back as (H, W, 3) RGB; grayscale as (H, W).
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such image: {path}")
    raw = cv2.imread(os.fspath(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise FileNotFoundError(f"cannot read image: {path}")
    if raw.ndim == 3 and raw.shape[2] == 4:
        raise ValueError(f"alpha channels are not supported: {path}")
    if raw.dtype == np.uint8:
        img = raw.astype(np.float64) / 255.0
    elif raw.dtype == np.uint16:
        img = raw.astype(np.float64) / 65535.0
    else:
        raise ValueError(f"unsupported sample type {raw.dtype} in {path}")
    if img.ndim == 3:
        img = img[:, :, ::-1]  # BGR -> RGB
    return as_image(img)


def save_image(path: str, img: np.ndarray, bit_depth: int = 8) -> None:
    """Write an image as PNG or TIFF (by extension) at 8 or 16 bits.

    Values are clamped to [0, 1] before quantization.
    """
    if bit_depth not in (8, 16):
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    img = np.asarray(img, dtype=np.float64)
    if img.ndim not in (2, 3):
        raise DimensionError(f"cannot save array of shape {img.shape}")
    scale = 255 if bit_depth == 8 else 65535
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    quant = np.rint(np.clip(img, 0.0, 1.0) * scale).astype(dtype)
    if quant.ndim == 3:
        quant = quant[:, :, ::-1]  # RGB -> BGR
    if not cv2.imwrite(os.fspath(path), quant):
        raise IOError(f"cannot write image: {path}")


def green_channel(img: np.ndarray) -> np.ndarray:
    """Return the green plane of an RGB image (identity for grayscale)."""
    if img.ndim == 2:
        return img
    if img.ndim == 3 and img.shape[2] == 3:
        return np.ascontiguousarray(img[:, :, 1])
    raise DimensionError(f"expected grayscale or RGB image, got shape {img.shape}")
